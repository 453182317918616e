//! Declarative diagnosis.
//!
//! Incorrectness diagnosis starts from a computed answer outside the
//! correctness specification and descends to a clause instance whose body
//! holds and whose head does not. It can walk the proof tree of the answer,
//! the top-level success traces of the computation, or scan the Exit items
//! of the box trace. Incompleteness diagnosis starts from an atom with a
//! required answer missing and descends through top-level search traces to
//! an atom with an uncovered instance.

mod incompleteness;
mod incorrectness;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{solve, Budget, Run, SearchStatus, Truncation};
use crate::kernel::{PredKey, Program, Query, Term};
use crate::oracle::{Awaiting, Oracle, OracleVerdict, Question, Role, Verdict};

pub use incompleteness::diagnose_incompleteness;
pub use incorrectness::{diagnose_incorrectness, diagnose_incorrectness_tracewise, TraceMode};

/// How incorrectness diagnosis descends.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Root-to-leaf search of the answer's proof tree.
    #[default]
    ProofTree,
    /// Judge the top-level success trace of each incorrect answer.
    Alg4,
    /// Judge every top-level Exit between a call and its incorrect answer.
    Alg5,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::ProofTree => "prooftree",
            Strategy::Alg4 => "alg4",
            Strategy::Alg5 => "alg5",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prooftree" => Ok(Strategy::ProofTree),
            "alg4" => Ok(Strategy::Alg4),
            "alg5" => Ok(Strategy::Alg5),
            _ => Err(format!("unknown strategy `{s}` (expected prooftree, alg4 or alg5)")),
        }
    }
}

/// A located incorrect clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncorrectnessResult {
    /// 1-based ordinal in the program.
    pub clause: usize,
    /// The error instance `head :- body`: every body atom judged yes, the
    /// head judged no.
    pub head: Term,
    pub body: Vec<Term>,
    pub questions: Vec<OracleVerdict>,
}

/// Questions spent on one atom of an incompleteness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelStats {
    pub atom: Term,
    pub entries: usize,
    pub questions: usize,
}

/// A located incompleteness error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncompletenessResult {
    pub error_atom: Term,
    /// A ground instance of `error_atom` required by the specification and
    /// covered by no clause.
    pub witness: Term,
    /// The procedure that has to be extended.
    pub procedure: PredKey,
    pub levels: Vec<LevelStats>,
    pub questions: Vec<OracleVerdict>,
    /// Answers seen during the search that the correctness specification
    /// rejects. Incorrectness diagnosis may be the better next step.
    pub wrong_answers: Vec<Term>,
}

/// Why a diagnosis stopped without a result.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Stop {
    #[error("{0} is not a symptom")]
    NotASymptom(Term),
    #[error("no verdict for {atom} at {context}")]
    Undecided { atom: Term, context: String },
    #[error("the search for {atom} hit {cause}")]
    TruncatedTree { atom: Term, cause: Truncation },
    #[error("waiting for an answer to question {}", .0.seq)]
    Awaiting(Question),
    #[error("{0} is not a computed answer")]
    NotComputed(Term),
    #[error("no {0} specification")]
    NoSpecification(Role),
}

impl From<Awaiting> for Stop {
    fn from(a: Awaiting) -> Self {
        Stop::Awaiting(a.0)
    }
}

fn truncation(run: &Run) -> Option<Truncation> {
    match run.stats.status {
        SearchStatus::Truncated(t) => Some(t),
        SearchStatus::Exhausted => None,
    }
}

fn need(oracle: &Oracle, role: Role) -> Result<(), Stop> {
    let present = match role {
        Role::Corr => oracle.corr.is_some(),
        Role::Compl => oracle.compl.is_some(),
    };
    if present {
        Ok(())
    } else {
        Err(Stop::NoSpecification(role))
    }
}

/// The first answer of `run` judged incorrect.
pub fn find_symptom(run: &Run, oracle: &mut Oracle) -> Result<usize, Stop> {
    need(oracle, Role::Corr)?;
    for (k, a) in run.answers.iter().enumerate() {
        let context = format!("answer {}", k + 1);
        match oracle.judge(Role::Corr, a.atom(), &context)? {
            Verdict::No => return Ok(k),
            Verdict::Yes => {}
            Verdict::Unknown => return Err(Stop::Undecided { atom: a.atom().clone(), context }),
        }
    }
    let atom = run.query.atoms[0].clone();
    match truncation(run) {
        Some(cause) => Err(Stop::TruncatedTree { atom, cause }),
        None => Err(Stop::NotASymptom(atom)),
    }
}

/// Solves `query`, picks its first incorrect answer and locates an
/// incorrect clause with the given strategy.
pub fn diagnose_query(
    query: &Term,
    program: &Program,
    budget: Budget,
    strategy: Strategy,
    restart: bool,
    oracle: &mut Oracle,
) -> Result<IncorrectnessResult, Stop> {
    let run = solve(&Query::atom(query.clone()), program, budget);
    let start = oracle.log().len();
    let k = find_symptom(&run, oracle)?;
    let mut res = match strategy {
        Strategy::ProofTree => {
            let (_, tree) = crate::boxtrace::answer_views(&run, k).expect("answers have proof trees");
            diagnose_incorrectness(&tree, oracle)?
        }
        Strategy::Alg4 | Strategy::Alg5 => {
            let mode = TraceMode { scan: strategy == Strategy::Alg5, restart };
            incorrectness::tracewise_in(run, k, program, budget, mode, oracle)?
        }
    };
    res.questions = oracle.log()[start..].to_vec();
    Ok(res)
}
