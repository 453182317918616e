//! Substitutions and most general unifiers.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::term::{Term, Var};

/// The two terms have no unifier (functor clash or occur-check failure).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("terms do not unify")]
pub struct NoUnifier;

/// Finite idempotent mapping from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Var> {
        self.bindings.keys()
    }

    /// Adds a binding without normalising; callers keep idempotence.
    /// Self-bindings are dropped.
    pub(crate) fn insert_raw(&mut self, v: Var, t: Term) {
        if t != Term::Var(v.clone()) {
            self.bindings.insert(v, t);
        }
    }

    /// Builds a substitution from bindings, dropping `X ↦ X`.
    pub fn from_bindings(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        let mut s = Substitution::new();
        for (v, t) in pairs {
            s.insert_raw(v, t);
        }
        s
    }

    /// Simultaneous replacement of every bound variable.
    pub fn apply(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }

    /// As [`Substitution::apply`], rewriting `t` where it stands; only the
    /// replaced variables allocate.
    pub fn apply_in_place(&self, t: &mut Term) {
        if self.bindings.is_empty() {
            return;
        }
        match t {
            Term::Var(v) => {
                if let Some(b) = self.bindings.get(v) {
                    *t = b.clone();
                }
            }
            Term::Compound(_, args) => args.iter_mut().for_each(|a| self.apply_in_place(a)),
        }
    }

    pub fn apply_all(&self, ts: &[Term]) -> Vec<Term> {
        ts.iter().map(|t| self.apply(t)).collect()
    }

    /// `self` followed by `other`: applying the result equals applying
    /// `self` then `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (v, t) in &self.bindings {
            out.insert_raw(v.clone(), other.apply(t));
        }
        for (v, t) in &other.bindings {
            if !self.bindings.contains_key(v) {
                out.insert_raw(v.clone(), t.clone());
            }
        }
        out
    }

    /// Keeps only bindings for the given variables.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.bindings
            .values()
            .all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Triangular binding store used while solving a set of equations.
struct Solver {
    bindings: BTreeMap<Var, Term>,
}

impl Solver {
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify(&mut self, a: &Term, b: &Term) -> Result<(), NoUnifier> {
        let mut stack = vec![(a.clone(), b.clone())];
        while let Some((x, y)) = stack.pop() {
            let x = self.walk(&x).clone();
            let y = self.walk(&y).clone();
            match (&x, &y) {
                (Term::Var(v), Term::Var(w)) if v == w => {}
                (Term::Var(v), other) | (other, Term::Var(v)) => {
                    if self.occurs(v, other) {
                        return Err(NoUnifier);
                    }
                    self.bindings.insert(v.clone(), other.clone());
                }
                (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                    if f != g || xs.len() != ys.len() {
                        return Err(NoUnifier);
                    }
                    stack.extend(xs.iter().cloned().zip(ys.iter().cloned()).rev());
                }
            }
        }
        Ok(())
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(v.clone()),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }

    fn finish(self) -> Substitution {
        let mut out = Substitution::new();
        for v in self.bindings.keys() {
            out.insert_raw(v.clone(), self.resolve(&Term::Var(v.clone())));
        }
        out
    }
}

/// Most general unifier of two terms (Robinson, with occur-check).
pub fn unify(a: &Term, b: &Term) -> Result<Substitution, NoUnifier> {
    let mut s = Solver {
        bindings: BTreeMap::new(),
    };
    s.unify(a, b)?;
    Ok(s.finish())
}

/// Simultaneous mgu of pairwise equations.
pub fn unify_all(pairs: &[(Term, Term)]) -> Result<Substitution, NoUnifier> {
    let mut s = Solver {
        bindings: BTreeMap::new(),
    };
    for (a, b) in pairs {
        s.unify(a, b)?;
    }
    Ok(s.finish())
}

/// One-way matching: a substitution `σ` over the variables of `pattern` with
/// `pattern σ == target`. Variables of `target` are treated as constants.
pub fn match_term(pattern: &Term, target: &Term) -> Option<Substitution> {
    let mut acc = BTreeMap::new();
    if match_into(pattern, target, &mut acc) {
        Some(Substitution::from_bindings(acc))
    } else {
        None
    }
}

/// Matches a sequence of patterns against a sequence of targets with one
/// shared substitution.
pub fn match_all(patterns: &[Term], targets: &[Term]) -> Option<Substitution> {
    if patterns.len() != targets.len() {
        return None;
    }
    let mut acc = BTreeMap::new();
    for (p, t) in patterns.iter().zip(targets) {
        if !match_into(p, t, &mut acc) {
            return None;
        }
    }
    Some(Substitution::from_bindings(acc))
}

fn match_into(pattern: &Term, target: &Term, acc: &mut BTreeMap<Var, Term>) -> bool {
    match pattern {
        Term::Var(v) => match acc.get(v) {
            Some(bound) => bound == target,
            None => {
                acc.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Compound(f, xs) => match target {
            Term::Compound(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys).all(|(x, y)| match_into(x, y, acc))
            }
            _ => false,
        },
    }
}

/// `specific` is an instance of `general`.
pub fn is_instance_of(specific: &Term, general: &Term) -> bool {
    match_term(general, specific).is_some()
}

/// The two terms are equal up to variable renaming.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    is_instance_of(a, b) && is_instance_of(b, a)
}
