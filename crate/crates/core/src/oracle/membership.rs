//! Machine-decidable symptom and error predicates.

use thiserror::Error;

use crate::kernel::{is_instance_of, match_term, Program, Signature, Substitution, Term, Universe, Var};

use super::spec::Specification;
use super::Verdict;

/// Ground terms kept for enumerating instances.
const UNIVERSE_CAP: usize = 5_000;
/// Ground instances tried per enumeration.
const INSTANCE_LIMIT: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the answers come from a search cut by the budget")]
pub struct TruncatedTree;

/// The universe used for instances of `atom`: the specification's symbols,
/// the program's and the atom's own.
pub fn universe_for(spec: &Specification, atom: &Term, program: Option<&Program>) -> Universe {
    let mut sig = spec.signature().clone();
    sig.add_atom(atom);
    if let Some(p) = program {
        sig.merge(&p.signature());
    }
    Universe::build(&sig, spec.bounds.depth, UNIVERSE_CAP)
}

/// Ground instances of `atom` within the depth bound, shallowest first.
pub fn ground_instances(spec: &Specification, atom: &Term, program: Option<&Program>) -> Vec<Term> {
    let u = universe_for(spec, atom, program);
    let vars = atom.vars();
    u.assignments(&vars, INSTANCE_LIMIT)
        .map(|s| s.apply(atom))
        .filter(|g| g.atom_depth() <= spec.bounds.depth)
        .collect()
}

/// Whether `atom` has a ground instance outside the correctness
/// specification. `Yes` means it is a symptom.
///
/// A non-ground atom is not a symptom when it is an instance of an answer
/// the specification program computes for it; otherwise its bounded ground
/// instances are checked.
pub fn is_incorrectness_symptom(spec_corr: &Specification, atom: &Term) -> Verdict {
    if atom.is_ground() {
        return spec_corr.holds(atom).negate();
    }
    if spec_corr
        .general_answers(atom, 64)
        .iter()
        .any(|g| is_instance_of(atom, g))
    {
        return Verdict::No;
    }
    let mut unknown = false;
    for g in ground_instances(spec_corr, atom, None) {
        match spec_corr.holds(&g) {
            Verdict::No => return Verdict::Yes,
            Verdict::Unknown => unknown = true,
            Verdict::Yes => {}
        }
    }
    if unknown {
        Verdict::Unknown
    } else {
        Verdict::No
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MissingCheck {
    /// A required instance that no answer covers.
    Symptom { witness: Term },
    NotSymptom,
    Unknown,
}

/// Whether some ground instance of `atom` is required by the completeness
/// specification but is an instance of none of `answers`, which must be the
/// complete answer set of a finished search.
pub fn is_incompleteness_symptom(
    spec_compl: &Specification,
    atom: &Term,
    answers: &[Term],
    truncated: bool,
) -> Result<MissingCheck, TruncatedTree> {
    if truncated {
        return Err(TruncatedTree);
    }
    let mut unknown = false;
    for g in ground_instances(spec_compl, atom, None) {
        if answers.iter().any(|a| is_instance_of(&g, a)) {
            continue;
        }
        match spec_compl.holds(&g) {
            Verdict::Yes => return Ok(MissingCheck::Symptom { witness: g }),
            Verdict::Unknown => unknown = true,
            Verdict::No => {}
        }
    }
    Ok(if unknown { MissingCheck::Unknown } else { MissingCheck::NotSymptom })
}

/// Whether some clause of `p` has a ground instance with head `a` and every
/// body atom in the completeness specification. Body-only variables range
/// over the bounded universe.
pub fn covered(spec_compl: &Specification, a: &Term, p: &Program) -> Verdict {
    covering_clause(spec_compl, a, p).0
}

/// As [`covered`], also naming the first covering clause.
pub fn covering_clause(spec_compl: &Specification, a: &Term, p: &Program) -> (Verdict, Option<usize>) {
    debug_assert!(a.is_ground());
    let u = universe_for(spec_compl, a, Some(p));
    let mut unknown = false;
    for &ord in p.clauses_for(a) {
        let c = p.clause(ord);
        let Some(s) = match_term(&c.head, a) else {
            continue;
        };
        let body = s.apply_all(&c.body);
        match satisfiable(spec_compl, &u, &body, Substitution::new()) {
            Verdict::Yes => return (Verdict::Yes, Some(ord)),
            Verdict::Unknown => unknown = true,
            Verdict::No => {}
        }
    }
    (if unknown { Verdict::Unknown } else { Verdict::No }, None)
}

/// Is there a grounding of `body` (extending `s`) with every atom a yes
/// member?
fn satisfiable(spec: &Specification, u: &Universe, body: &[Term], s: Substitution) -> Verdict {
    let Some((first, rest)) = body.split_first() else {
        return Verdict::Yes;
    };
    let atom = s.apply(first);
    if atom.is_ground() {
        return match spec.holds(&atom) {
            Verdict::Yes => satisfiable(spec, u, rest, s),
            other => other,
        };
    }
    let vars: Vec<Var> = atom.vars();
    let mut unknown = false;
    for g in u.assignments(&vars, INSTANCE_LIMIT) {
        let inst = g.apply(&atom);
        if inst.atom_depth() > spec.bounds.depth {
            continue;
        }
        match spec.holds(&inst) {
            Verdict::Yes => match satisfiable(spec, u, rest, s.compose(&g)) {
                Verdict::Yes => return Verdict::Yes,
                Verdict::Unknown => unknown = true,
                Verdict::No => {}
            },
            Verdict::Unknown => unknown = true,
            Verdict::No => {}
        }
    }
    if unknown {
        Verdict::Unknown
    } else {
        Verdict::No
    }
}

/// The first ground instance of `a` that the completeness specification
/// requires and no clause of `p` covers.
pub fn find_uncovered_instance(spec_compl: &Specification, a: &Term, p: &Program) -> Option<Term> {
    ground_instances(spec_compl, a, Some(p))
        .into_iter()
        .find(|g| spec_compl.holds(g) == Verdict::Yes && covered(spec_compl, g, p) == Verdict::No)
}

/// A ground instance of `clause` with every body atom in `spec_corr` and the
/// head outside it, if one exists within bounds.
pub fn incorrect_instance(
    spec_corr: &Specification,
    p: &Program,
    ordinal: usize,
) -> Option<(Term, Vec<Term>)> {
    let c = p.clause(ordinal);
    let mut sig: Signature = spec_corr.signature().clone();
    sig.merge(&p.signature());
    let u = Universe::build(&sig, spec_corr.bounds.depth, UNIVERSE_CAP);
    let vars = c.vars();
    u.assignments(&vars, INSTANCE_LIMIT).find_map(|g| {
        let head = g.apply(&c.head);
        let body = g.apply_all(&c.body);
        (spec_corr.holds(&head) == Verdict::No && body.iter().all(|b| spec_corr.holds(b) == Verdict::Yes))
            .then_some((head, body))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_atom, parse_program};
    use crate::oracle::{Bounds, Role};

    const EVEN: &str = "even(0).\neven(s(s(X))) :- even(X).\n";

    fn spec(role: Role, depth: usize) -> Specification {
        Specification::new(role, parse_program(EVEN).unwrap(), Bounds { depth, iter: 50 }, &Signature::default())
    }

    fn atom(s: &str) -> Term {
        parse_atom(s).unwrap()
    }

    #[test]
    fn incorrectness_symptoms() {
        let s = spec(Role::Corr, 6);
        assert_eq!(is_incorrectness_symptom(&s, &atom("even(s(0))")), Verdict::Yes);
        assert_eq!(is_incorrectness_symptom(&s, &atom("even(0)")), Verdict::No);
        let mut deep = Term::constant("0");
        for _ in 0..100 {
            deep = Term::app("s", vec![deep]);
        }
        assert_eq!(is_incorrectness_symptom(&s, &Term::app("even", vec![deep])), Verdict::Unknown);
        assert_eq!(is_incorrectness_symptom(&s, &atom("even(X)")), Verdict::Yes);
        assert_eq!(is_incorrectness_symptom(&s, &atom("even(s(s(0)))")), Verdict::No);
    }

    #[test]
    fn incompleteness_symptoms() {
        let s = spec(Role::Compl, 6);
        let got = is_incompleteness_symptom(&s, &atom("even(X)"), &[atom("even(0)")], false).unwrap();
        assert_eq!(got, MissingCheck::Symptom { witness: atom("even(s(s(0)))") });
        let got = is_incompleteness_symptom(&s, &atom("even(0)"), &[atom("even(0)")], false).unwrap();
        assert_eq!(got, MissingCheck::NotSymptom);
        assert_eq!(is_incompleteness_symptom(&s, &atom("even(0)"), &[], true), Err(TruncatedTree));
    }

    #[test]
    fn coverage() {
        let s = spec(Role::Compl, 6);
        let facts = parse_program("even(0).").unwrap();
        assert_eq!(covered(&s, &atom("even(0)"), &facts), Verdict::Yes);
        assert_eq!(covered(&s, &atom("even(s(s(0)))"), &facts), Verdict::No);
        let buggy = parse_program("even(0).\neven(s(X)) :- even(X).\n").unwrap();
        assert_eq!(covered(&s, &atom("even(s(s(0)))"), &buggy), Verdict::No);
        assert_eq!(covered(&s, &atom("even(s(0))"), &buggy), Verdict::Yes);
        let body_only = parse_program("p :- even(X), q(X).\nq(s(s(0))).\n").unwrap();
        let s2 = Specification::new(
            Role::Compl,
            parse_program(&format!("{EVEN}q(s(s(0))).\np.\n")).unwrap(),
            Bounds { depth: 4, iter: 50 },
            &Signature::default(),
        );
        assert_eq!(covering_clause(&s2, &atom("p"), &body_only), (Verdict::Yes, Some(1)));
    }

    #[test]
    fn uncovered_instances() {
        let s = spec(Role::Compl, 6);
        let facts = parse_program("even(0).").unwrap();
        assert_eq!(find_uncovered_instance(&s, &atom("even(X)"), &facts), Some(atom("even(s(s(0)))")));
        assert_eq!(find_uncovered_instance(&s, &atom("even(0)"), &facts), None);
        assert_eq!(find_uncovered_instance(&s, &atom("even(s(0))"), &facts), None);
    }

    #[test]
    fn incorrect_clause_instances() {
        let s = spec(Role::Corr, 6);
        let buggy = parse_program("even(0).\neven(s(X)) :- even(X).\n").unwrap();
        let (h, b) = incorrect_instance(&s, &buggy, 2).unwrap();
        assert_eq!((h.to_string(), b[0].to_string()), ("even(s(0))".into(), "even(0)".into()));
        assert!(incorrect_instance(&s, &buggy, 1).is_none());
    }
}
