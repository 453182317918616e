//! Bounded bottom-up evaluation of the immediate-consequence operator.

use std::collections::{BTreeSet, HashMap};

use crate::kernel::{match_term, PredKey, Program, Signature, Substitution, Term, Universe, Var};

/// Ground terms generated for head variables the body leaves unbound.
const UNIVERSE_CAP: usize = 20_000;
/// Atoms kept in the model, and partial joins per clause.
const ATOM_CAP: usize = 50_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedModel {
    pub atoms: BTreeSet<Term>,
    pub depth_bound: usize,
    /// Operator applications performed.
    pub iterations: usize,
    /// A further application would add nothing.
    pub converged: bool,
    /// Some enumeration ran into the universe cap, or the model outgrew
    /// the atom cap.
    pub capped: bool,
}

impl BoundedModel {
    pub fn contains(&self, atom: &Term) -> bool {
        self.atoms.contains(atom)
    }

    /// Membership is exact for atoms within the depth bound: the
    /// iteration converged without capping and no clause can reach a
    /// shallow head through deeper body atoms.
    pub fn is_exact_for(&self, program: &Program) -> bool {
        self.converged && !self.capped && program.is_depth_safe()
    }
}

/// Ground atoms derivable within `iteration_bound` applications of `T_P`,
/// keeping only atoms of depth `<= depth_bound`.
pub fn tp_oracle(p: &Program, depth_bound: usize, iteration_bound: usize) -> BTreeSet<Term> {
    bounded_model(p, &Signature::default(), depth_bound, iteration_bound).atoms
}

/// As [`tp_oracle`], over the program's signature extended by `extra`.
pub fn bounded_model(
    p: &Program,
    extra: &Signature,
    depth_bound: usize,
    iteration_bound: usize,
) -> BoundedModel {
    let mut sig = p.signature();
    sig.merge(extra);
    let universe = Universe::build(&sig, depth_bound, UNIVERSE_CAP);
    let mut model = BoundedModel {
        atoms: BTreeSet::new(),
        depth_bound,
        iterations: 0,
        converged: false,
        capped: !universe.is_complete(),
    };
    let mut by_pred: HashMap<PredKey, Vec<Term>> = HashMap::new();
    'iterate: while model.iterations < iteration_bound {
        model.iterations += 1;
        let mut fresh = BTreeSet::new();
        for c in p.clauses() {
            let mut partial = Vec::new();
            join(&c.body, &by_pred, Substitution::new(), &mut partial);
            if partial.len() >= ATOM_CAP {
                model.capped = true;
                break 'iterate;
            }
            for s in partial {
                let head = s.apply(&c.head);
                let open: Vec<Var> = head.vars();
                let mut insts = universe.assignments(&open, UNIVERSE_CAP);
                for g in insts.by_ref() {
                    let h = g.apply(&head);
                    if h.atom_depth() <= depth_bound && !model.atoms.contains(&h) {
                        fresh.insert(h);
                    }
                }
                if insts.hit_limit() {
                    model.capped = true;
                }
                if model.atoms.len() + fresh.len() > ATOM_CAP {
                    model.capped = true;
                    break 'iterate;
                }
            }
        }
        if fresh.is_empty() {
            model.converged = true;
            break;
        }
        for a in fresh {
            if let Some(k) = a.functor() {
                by_pred.entry(k).or_default().push(a.clone());
            }
            model.atoms.insert(a);
        }
    }
    if !model.converged && !model.capped && model.iterations == iteration_bound {
        // one more pass only to learn whether the bound was tight
        model.converged = !grows(p, &by_pred, &universe, &model.atoms, depth_bound);
    }
    model
}

fn grows(
    p: &Program,
    by_pred: &HashMap<PredKey, Vec<Term>>,
    universe: &Universe,
    atoms: &BTreeSet<Term>,
    depth_bound: usize,
) -> bool {
    p.clauses().iter().any(|c| {
        let mut partial = Vec::new();
        join(&c.body, by_pred, Substitution::new(), &mut partial);
        partial.iter().any(|s| {
            let head = s.apply(&c.head);
            let open = head.vars();
            universe
                .assignments(&open, UNIVERSE_CAP)
                .map(|g| g.apply(&head))
                .any(|h| h.atom_depth() <= depth_bound && !atoms.contains(&h))
        })
    })
}

/// All substitutions grounding `body` into the current interpretation.
fn join(
    body: &[Term],
    by_pred: &HashMap<PredKey, Vec<Term>>,
    s: Substitution,
    out: &mut Vec<Substitution>,
) {
    if out.len() >= ATOM_CAP {
        return;
    }
    let Some((first, rest)) = body.split_first() else {
        out.push(s);
        return;
    };
    let pattern = s.apply(first);
    let Some(candidates) = pattern.functor().and_then(|k| by_pred.get(&k)) else {
        return;
    };
    for fact in candidates {
        if let Some(m) = match_term(&pattern, fact) {
            join(rest, by_pred, s.compose(&m), out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_atom, parse_program};

    fn shown(set: &BTreeSet<Term>) -> Vec<String> {
        set.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn single_fact() {
        let p = parse_program("p(a).").unwrap();
        assert_eq!(shown(&tp_oracle(&p, 3, 10)), vec!["p(a)"]);
    }

    #[test]
    fn even_numerals_at_depth_five() {
        let p = parse_program("even(0). even(s(s(X))) :- even(X).").unwrap();
        let m = tp_oracle(&p, 5, 100);
        assert_eq!(shown(&m), vec!["even(0)", "even(s(s(0)))", "even(s(s(s(s(0)))))"]);
    }

    #[test]
    fn no_base_case_no_atoms() {
        let p = parse_program("p :- p.").unwrap();
        for d in 0..4 {
            assert!(tp_oracle(&p, d, 50).is_empty());
        }
    }

    #[test]
    fn head_only_variables_range_over_the_universe() {
        let p = parse_program("q(a). q(f(b)). p(X, Y) :- q(X).").unwrap();
        let m = bounded_model(&p, &Signature::default(), 2, 10);
        assert!(m.converged);
        assert!(m.contains(&parse_atom("p(a,f(a))").unwrap()));
        assert!(m.contains(&parse_atom("p(f(b),b)").unwrap()));
        assert!(!m.contains(&parse_atom("p(b,a)").unwrap()));
    }

    #[test]
    fn iteration_bound_is_respected() {
        let p = parse_program("n(0). n(s(X)) :- n(X).").unwrap();
        let m = bounded_model(&p, &Signature::default(), 10, 3);
        assert_eq!(m.atoms.len(), 3);
        assert!(!m.converged);
        let full = bounded_model(&p, &Signature::default(), 10, 100);
        assert_eq!(full.atoms.len(), 10);
        assert!(full.converged);
        assert!(full.is_exact_for(&p));
    }
}
