//! First-order terms.
//!
//! Atoms (predications) are ordinary compound terms; a constant is a compound
//! with no arguments. Lists use the `'.'/2` and `[]` constructors.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Functor or constant name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(Arc<str>);

impl Sym {
    pub fn new(name: &str) -> Self {
        Sym(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Sym {
    fn from(s: &str) -> Self {
        Sym::new(s)
    }
}

/// Variable name. Source variables start with an uppercase letter or `_`;
/// variables introduced by renaming apart are `_G<n>`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn fresh(n: u64) -> Self {
        Var(Arc::from(format!("_G{n}").as_str()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The counter value if this is a renaming variable `_G<n>`.
    pub fn fresh_index(&self) -> Option<u64> {
        self.0.strip_prefix("_G").and_then(|d| {
            if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) {
                d.parse().ok()
            } else {
                None
            }
        })
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Compound(Sym, Vec<Term>),
}

/// Predicate or functor identity: name and arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PredKey {
    pub name: Sym,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_functor(f, self.name.as_str())?;
        write!(f, "/{}", self.arity)
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Compound(Sym::new(name), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::Compound(Sym::new(name), args)
    }

    pub fn nil() -> Term {
        Term::constant(NIL)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::app(CONS, vec![head, tail])
    }

    /// Builds a proper list, or a partial list ending in `tail`.
    pub fn list(items: Vec<Term>, tail: Option<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(tail.unwrap_or_else(Term::nil), |acc, t| Term::cons(t, acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn functor(&self) -> Option<PredKey> {
        match self {
            Term::Var(_) => None,
            Term::Compound(name, args) => Some(PredKey {
                name: name.clone(),
                arity: args.len(),
            }),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::Compound(_, args) => args,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Term depth: variables and constants have depth 1, `f(t1..tn)` has
    /// depth one more than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Depth of an atom: the depth of its deepest argument (0 for a
    /// propositional atom).
    pub fn atom_depth(&self) -> usize {
        self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        self.vars().into_iter().collect()
    }

    /// Largest `n` among `_G<n>` variables, if any.
    pub fn max_fresh_index(&self) -> Option<u64> {
        match self {
            Term::Var(v) => v.fresh_index(),
            Term::Compound(_, args) => args.iter().filter_map(Term::max_fresh_index).max(),
        }
    }

    /// Splits a list term into its items and the tail (which is `[]` for a
    /// proper list).
    fn list_parts(&self) -> Option<(Vec<&Term>, &Term)> {
        let mut items = Vec::new();
        let mut cur = self;
        while let Term::Compound(name, args) = cur {
            if name.as_str() == CONS && args.len() == 2 {
                items.push(&args[0]);
                cur = &args[1];
            } else {
                break;
            }
        }
        if items.is_empty() {
            None
        } else {
            Some((items, cur))
        }
    }
}

/// Whether a name can be printed unquoted.
pub fn is_plain_name(name: &str) -> bool {
    if name == NIL {
        return true;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        }
        Some(c) if c.is_ascii_digit() => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

fn write_functor(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_plain_name(name) {
        f.write_str(name)
    } else {
        f.write_str("'")?;
        for c in name.chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("'")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v.name()),
            Term::Compound(name, args) => {
                if let Some((items, tail)) = self.list_parts() {
                    f.write_str("[")?;
                    for (i, item) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{item}")?;
                    }
                    if !matches!(tail, Term::Compound(n, a) if n.as_str() == NIL && a.is_empty()) {
                        write!(f, "|{tail}")?;
                    }
                    return f.write_str("]");
                }
                write_functor(f, name.as_str())?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
