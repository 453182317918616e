//! Specifications given as definite programs, and the spec file format.
//!
//! ```text
//! %% bounds depth=6 iter=50
//! %% corr
//! even(0).
//! even(s(s(X))) :- even(X).
//! %% compl
//! even(0).
//! even(s(s(X))) :- even(X).
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{bounded_model, solve, BoundedModel, Budget};
use crate::kernel::{parse_program, ParseError, Program, Query, Signature, Term};

use super::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Corr,
    Compl,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Corr => "corr",
            Role::Compl => "compl",
        })
    }
}

/// Limits for membership decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Atoms deeper than this are never decided by the machine.
    pub depth: usize,
    /// Applications of the consequence operator.
    pub iter: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { depth: 6, iter: 64 }
    }
}

/// Budget for the top-down membership check.
fn membership_budget() -> Budget {
    Budget { max_steps: 20_000, max_depth: 400, max_answers: 1 }
}

/// An intended interpretation: the least model of `program`, decided within
/// `bounds`. Ground facts of the program are its explicit atoms.
pub struct Specification {
    pub role: Role,
    pub program: Program,
    pub explicit: BTreeSet<Term>,
    pub bounds: Bounds,
    signature: Signature,
    model: BoundedModel,
    exact: bool,
    cache: Mutex<HashMap<Term, Verdict>>,
}

impl Clone for Specification {
    fn clone(&self) -> Self {
        Specification {
            role: self.role,
            program: self.program.clone(),
            explicit: self.explicit.clone(),
            bounds: self.bounds,
            signature: self.signature.clone(),
            model: self.model.clone(),
            exact: self.exact,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl fmt::Debug for Specification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Specification")
            .field("role", &self.role)
            .field("clauses", &self.program.len())
            .field("bounds", &self.bounds)
            .field("model_atoms", &self.model.atoms.len())
            .field("exact", &self.exact)
            .finish()
    }
}

impl Specification {
    /// `extra` adds function symbols (typically those of the program under
    /// diagnosis) to the universe the model is built over.
    pub fn new(role: Role, program: Program, bounds: Bounds, extra: &Signature) -> Self {
        let explicit = program
            .clauses()
            .iter()
            .filter(|c| c.is_fact() && c.head.is_ground())
            .map(|c| c.head.clone())
            .collect();
        let model = bounded_model(&program, extra, bounds.depth, bounds.iter);
        let exact = model.is_exact_for(&program);
        let mut signature = program.signature();
        signature.merge(extra);
        Specification {
            role,
            program,
            explicit,
            bounds,
            signature,
            model,
            exact,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn model(&self) -> &BoundedModel {
        &self.model
    }

    /// Within the depth bound, absence from the model means absence from
    /// the interpretation.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Membership of a ground atom.
    ///
    /// Yes when the atom is explicit, in the bounded model, or succeeds
    /// top-down; no when it finitely fails top-down, or when the bounded
    /// model is exact; unknown otherwise, and always for atoms deeper than
    /// the bound.
    pub fn holds(&self, a: &Term) -> Verdict {
        debug_assert!(a.is_ground());
        if a.atom_depth() > self.bounds.depth {
            return Verdict::Unknown;
        }
        if let Some(v) = self.cache.lock().unwrap().get(a) {
            return *v;
        }
        let v = self.decide(a);
        self.cache.lock().unwrap().insert(a.clone(), v);
        v
    }

    fn decide(&self, a: &Term) -> Verdict {
        if self.explicit.contains(a) || self.model.contains(a) {
            return Verdict::Yes;
        }
        let run = solve(&Query::atom(a.clone()), &self.program, membership_budget());
        if !run.answers.is_empty() {
            return Verdict::Yes;
        }
        if !run.is_truncated() {
            return Verdict::No;
        }
        let mut sig = Signature::default();
        sig.add_atom(a);
        let known = sig.functors.is_subset(&self.signature.functors);
        if self.exact && known {
            Verdict::No
        } else {
            Verdict::Unknown
        }
    }

    /// Computed answers of `atom` in the specification program, for
    /// subsumption checks on non-ground atoms.
    pub fn general_answers(&self, atom: &Term, limit: usize) -> Vec<Term> {
        let b = Budget { max_answers: limit, ..membership_budget() };
        solve(&Query::atom(atom.clone()), &self.program, b).answer_atoms()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}: malformed header: {text}")]
    Header { line: usize, text: String },
    #[error("{role} section: {source}")]
    Parse {
        role: Role,
        #[source]
        source: ParseError,
    },
    #[error("clauses before the first section header (line {line})")]
    Unsectioned { line: usize },
    #[error("no `%% {0}` section")]
    Missing(Role),
}

/// A parsed spec file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub bounds: Bounds,
    pub corr: Option<Program>,
    pub compl: Option<Program>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile, SpecError> {
        let mut bounds = Bounds::default();
        let mut section: Option<Role> = None;
        let mut corr_lines = Vec::new();
        let mut compl_lines = Vec::new();
        let mut seen = (false, false);
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            let (mut c, mut k) = (String::new(), String::new());
            if let Some(rest) = trimmed.strip_prefix("%%") {
                let rest = rest.trim();
                if rest == "corr" {
                    section = Some(Role::Corr);
                    seen.0 = true;
                } else if rest == "compl" {
                    section = Some(Role::Compl);
                    seen.1 = true;
                } else if let Some(args) = rest.strip_prefix("bounds") {
                    bounds = parse_bounds(args).ok_or(SpecError::Header { line: i + 1, text: line.to_string() })?;
                }
            } else {
                match section {
                    Some(Role::Corr) => c = line.to_string(),
                    Some(Role::Compl) => k = line.to_string(),
                    None => {
                        let code = trimmed.split('%').next().unwrap_or("").trim();
                        if !code.is_empty() {
                            return Err(SpecError::Unsectioned { line: i + 1 });
                        }
                    }
                }
            }
            // keep line numbers intact for parse errors
            corr_lines.push(c);
            compl_lines.push(k);
        }
        let parse = |role: Role, lines: Vec<String>| {
            parse_program(&lines.join("\n")).map_err(|source| SpecError::Parse { role, source })
        };
        Ok(SpecFile {
            bounds,
            corr: if seen.0 { Some(parse(Role::Corr, corr_lines)?) } else { None },
            compl: if seen.1 { Some(parse(Role::Compl, compl_lines)?) } else { None },
        })
    }

    pub fn program(&self, role: Role) -> Result<&Program, SpecError> {
        match role {
            Role::Corr => self.corr.as_ref(),
            Role::Compl => self.compl.as_ref(),
        }
        .ok_or(SpecError::Missing(role))
    }

    pub fn specification(&self, role: Role, extra: &Signature) -> Result<Specification, SpecError> {
        Ok(Specification::new(role, self.program(role)?.clone(), self.bounds, extra))
    }
}

fn parse_bounds(args: &str) -> Option<Bounds> {
    let mut b = Bounds::default();
    for kv in args.split_whitespace() {
        let (k, v) = kv.split_once('=')?;
        let v: usize = v.parse().ok().filter(|&v| v > 0)?;
        match k {
            "depth" => b.depth = v,
            "iter" => b.iter = v,
            _ => return None,
        }
    }
    Some(b)
}

/// Atoms the completeness specification requires but the correctness
/// specification rejects (within bounds). A well-formed pair has none.
pub fn inconsistent_atoms(corr: &Specification, compl: &Specification) -> Vec<Term> {
    compl
        .model()
        .atoms
        .iter()
        .chain(compl.explicit.iter())
        .filter(|a| corr.holds(a) == Verdict::No)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse_atom;

    const EVEN: &str = "even(0).\neven(s(s(X))) :- even(X).\n";

    fn even_spec(depth: usize) -> Specification {
        Specification::new(
            Role::Corr,
            parse_program(EVEN).unwrap(),
            Bounds { depth, iter: 50 },
            &Signature::default(),
        )
    }

    #[test]
    fn membership_examples() {
        let s = even_spec(10);
        assert_eq!(s.holds(&parse_atom("even(s(0))").unwrap()), Verdict::No);
        assert_eq!(s.holds(&parse_atom("even(0)").unwrap()), Verdict::Yes);
        assert_eq!(s.holds(&parse_atom("even(s(s(s(s(0)))))").unwrap()), Verdict::Yes);
        let mut deep = Term::constant("0");
        for _ in 0..100 {
            deep = Term::app("s", vec![deep]);
        }
        assert_eq!(s.holds(&Term::app("even", vec![deep])), Verdict::Unknown);
    }

    #[test]
    fn larger_bounds_only_resolve_unknowns() {
        let atoms: Vec<Term> = (0..12)
            .map(|n| {
                let mut t = Term::constant("0");
                for _ in 0..n {
                    t = Term::app("s", vec![t]);
                }
                Term::app("even", vec![t])
            })
            .collect();
        let small = even_spec(4);
        let large = even_spec(12);
        for a in &atoms {
            let (v1, v2) = (small.holds(a), large.holds(a));
            if v1 != Verdict::Unknown {
                assert_eq!(v1, v2, "{a}");
            }
        }
    }

    #[test]
    fn spec_file_sections() {
        let text = format!("%% bounds depth=5 iter=20\n%% corr\n{EVEN}%% compl\neven(0).\n");
        let f = SpecFile::parse(&text).unwrap();
        assert_eq!(f.bounds, Bounds { depth: 5, iter: 20 });
        assert_eq!(f.corr.as_ref().unwrap().len(), 2);
        assert_eq!(f.compl.as_ref().unwrap().len(), 1);
        let only_corr = SpecFile::parse("%% corr\np(a).\n").unwrap();
        assert_eq!(only_corr.program(Role::Compl), Err(SpecError::Missing(Role::Compl)));
    }

    #[test]
    fn spec_file_errors_keep_lines() {
        match SpecFile::parse("%% corr\np(a).\n\np(X :- q.\n") {
            Err(SpecError::Parse { role: Role::Corr, source }) => assert_eq!(source.line, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(SpecFile::parse("%% bounds depth=x\n"), Err(SpecError::Header { line: 1, .. })));
        assert!(matches!(SpecFile::parse("p(a).\n%% corr\n"), Err(SpecError::Unsectioned { line: 1 })));
    }

    #[test]
    fn consistency_of_spec_pairs() {
        let corr = even_spec(6);
        let compl = Specification::new(
            Role::Compl,
            parse_program("even(0). even(s(0)).").unwrap(),
            Bounds { depth: 6, iter: 50 },
            &Signature::default(),
        );
        let bad: Vec<_> = inconsistent_atoms(&corr, &compl).iter().map(|t| t.to_string()).collect();
        assert_eq!(bad, vec!["even(s(0))"]);
    }
}
