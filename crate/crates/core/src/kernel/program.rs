use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::subst::Substitution;
use super::term::{PredKey, Sym, Term, Var};

/// A definite clause `head :- body`. `ordinal` is the 1-based position in the
/// program text.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
    pub ordinal: usize,
}

impl Clause {
    pub fn new(head: Term, body: Vec<Term>, ordinal: usize) -> Self {
        debug_assert!(!head.is_var() && body.iter().all(|b| !b.is_var()));
        Clause { head, body, ordinal }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn key(&self) -> PredKey {
        self.head.functor().expect("clause head is an atom")
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.head.collect_vars(&mut out);
        for b in &self.body {
            b.collect_vars(&mut out);
        }
        out
    }

    pub fn apply(&self, s: &Substitution) -> Clause {
        Clause {
            head: s.apply(&self.head),
            body: s.apply_all(&self.body),
            ordinal: self.ordinal,
        }
    }

    /// Renames every variable to a fresh `_G<n>`, advancing `counter`.
    pub fn rename(&self, counter: &mut u64) -> Clause {
        let renaming = Substitution::from_bindings(self.vars().into_iter().map(|v| {
            *counter += 1;
            (v, Term::Var(Var::fresh(*counter)))
        }));
        self.apply(&renaming)
    }

    /// For every ground instance, no body atom is deeper than the head.
    ///
    /// Holds when the body skeleton is no deeper than the head skeleton and
    /// every body variable occurs in the head at least as deeply nested as
    /// anywhere in the body.
    pub fn is_depth_safe(&self) -> bool {
        let head_skel = skeleton_depth(&self.head);
        self.body.iter().all(|b| {
            skeleton_depth(b) <= head_skel
                && b.vars().iter().all(|v| {
                    match (max_offset(&self.head, v), max_offset(b, v)) {
                        (Some(h), Some(d)) => d <= h,
                        _ => false,
                    }
                })
        })
    }
}

fn skeleton_depth(atom: &Term) -> usize {
    atom.atom_depth()
}

/// Deepest nesting of `v` below the atom's arguments (0 for a bare argument).
fn max_offset(atom: &Term, v: &Var) -> Option<usize> {
    fn go(t: &Term, v: &Var, level: usize) -> Option<usize> {
        match t {
            Term::Var(w) if w == v => Some(level),
            Term::Var(_) => None,
            Term::Compound(_, args) => args.iter().filter_map(|a| go(a, v, level + 1)).max(),
        }
    }
    atom.args().iter().filter_map(|a| go(a, v, 0)).max()
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        f.write_str(".")
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.ordinal, self)
    }
}

/// Clauses in textual order, indexed by predicate.
#[derive(Clone, Debug, Default)]
pub struct Program {
    clauses: Vec<Clause>,
    index: HashMap<PredKey, Vec<usize>>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl Eq for Program {}

impl Program {
    pub fn new(clauses: Vec<Clause>) -> Self {
        let mut index: HashMap<PredKey, Vec<usize>> = HashMap::new();
        let clauses: Vec<Clause> = clauses
            .into_iter()
            .enumerate()
            .map(|(i, mut c)| {
                c.ordinal = i + 1;
                index.entry(c.key()).or_default().push(i + 1);
                c
            })
            .collect();
        Program { clauses, index }
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Clause by 1-based ordinal.
    pub fn clause(&self, ordinal: usize) -> &Clause {
        &self.clauses[ordinal - 1]
    }

    /// Ordinals of the clauses for a predicate, in textual order.
    pub fn procedure(&self, key: &PredKey) -> &[usize] {
        self.index.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn clauses_for(&self, atom: &Term) -> &[usize] {
        match atom.functor() {
            Some(k) => self.procedure(&k),
            None => &[],
        }
    }

    pub fn predicates(&self) -> BTreeSet<PredKey> {
        self.index.keys().cloned().collect()
    }

    /// A copy with one clause removed (ordinals are renumbered).
    pub fn without_clause(&self, ordinal: usize) -> Program {
        Program::new(
            self.clauses
                .iter()
                .filter(|c| c.ordinal != ordinal)
                .cloned()
                .collect(),
        )
    }

    pub fn with_clause(&self, ordinal: usize, clause: Clause) -> Program {
        let mut cs = self.clauses.clone();
        cs[ordinal - 1] = clause;
        Program::new(cs)
    }

    /// Functor symbols (name, arity) occurring in argument positions.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for c in &self.clauses {
            sig.add_atom(&c.head);
            c.body.iter().for_each(|b| sig.add_atom(b));
        }
        sig
    }

    pub fn is_depth_safe(&self) -> bool {
        self.clauses.iter().all(Clause::is_depth_safe)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Function symbols available for building ground terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub functors: BTreeSet<(Sym, usize)>,
}

impl Signature {
    pub fn add_term(&mut self, t: &Term) {
        if let Term::Compound(f, args) = t {
            self.functors.insert((f.clone(), args.len()));
            args.iter().for_each(|a| self.add_term(a));
        }
    }

    /// Adds the argument terms of an atom (not its predicate symbol).
    pub fn add_atom(&mut self, atom: &Term) {
        atom.args().iter().for_each(|a| self.add_term(a));
    }

    pub fn merge(&mut self, other: &Signature) {
        self.functors.extend(other.functors.iter().cloned());
    }

    pub fn constants(&self) -> impl Iterator<Item = &Sym> {
        self.functors.iter().filter(|(_, n)| *n == 0).map(|(f, _)| f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Query {
    pub atoms: Vec<Term>,
}

impl Query {
    pub fn new(atoms: Vec<Term>) -> Self {
        Query { atoms }
    }

    pub fn atom(a: Term) -> Self {
        Query { atoms: vec![a] }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn first(&self) -> Option<&Term> {
        self.atoms.first()
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.atoms.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("□");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use crate::kernel::syntax::parse_program;

    #[test]
    fn rename_uses_fresh_names() {
        let p = parse_program("app([H|T],L,[H|R]) :- app(T,L,R).").unwrap();
        let mut counter = 10;
        let c = p.clause(1).rename(&mut counter);
        assert_eq!(counter, 14);
        assert_eq!(c.to_string(), "app([_G11|_G12],_G13,[_G11|_G14]) :- app(_G12,_G13,_G14).");
    }

    #[test]
    fn procedure_index_keeps_text_order() {
        let p = parse_program("p(1). q. p(2). p(3) :- q.").unwrap();
        let key = p.clause(1).key();
        assert_eq!(p.procedure(&key), &[1, 3, 4]);
        assert_eq!(key.to_string(), "p/1");
    }

    #[test]
    fn depth_safety() {
        let safe = parse_program(
            "app([],L,L). app([H|T],L,[H|R]) :- app(T,L,R). even(s(s(X))) :- even(X).",
        )
        .unwrap();
        assert!(safe.is_depth_safe());
        for unsafe_src in [
            "p(X) :- q(f(X)).",
            "p(X) :- q(X, Y).",
            "p(a) :- q(f(a)).",
            "isort([H|T],Ys) :- isort(T,Zs), insert(H,Zs,Ys).",
        ] {
            let p = parse_program(unsafe_src).unwrap();
            assert!(!p.is_depth_safe(), "{unsafe_src}");
        }
    }

    #[test]
    fn signature_skips_predicate_symbols() {
        let p = parse_program("even(s(s(X))) :- even(X). even(0).").unwrap();
        let sig = p.signature();
        let names: Vec<_> = sig.functors.iter().map(|(f, n)| format!("{f:?}/{n}")).collect();
        assert_eq!(names, vec!["0/0", "s/1"]);
    }
}
