//! LD-resolution: leftmost selection, clauses in textual order, depth-first
//! backtracking, occur-check unification.

mod fixpoint;
mod ldtree;
mod machine;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::boxtrace::BoxEvent;
use crate::kernel::{Query, Substitution, Term};

pub use fixpoint::{bounded_model, tp_oracle, BoundedModel};
pub use ldtree::{Derivation, DerivationStatus, LdNode, LdTree, NodeId, NodeOutcome, Step};
pub use machine::{resolve_step, solve};

/// Limits that keep every run finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Clause attempts, including failed head unifications.
    pub max_steps: usize,
    /// Box depth; root-query atoms have depth 1.
    pub max_depth: usize,
    pub max_answers: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_steps: 100_000, max_depth: 1_000, max_answers: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answer {
    pub query: Query,
    /// Restricted to the query's variables.
    pub binding: Substitution,
    /// `binding` applied to the query.
    pub answer: Query,
    /// The success leaf in the LD-tree.
    pub node: NodeId,
}

impl Answer {
    /// The answer atom of a single-atom query.
    pub fn atom(&self) -> &Term {
        &self.answer.atoms[0]
    }
}

/// Where in the LD-tree an event happened. For Exit it is the node whose
/// query closes the subderivation; `clause` is the clause the box used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EventMark {
    pub node: NodeId,
    pub clause: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxInfo {
    pub invocation: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub call_atom: Term,
    /// The node whose selected atom is this call.
    pub call_node: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    Steps,
    Depth,
    Answers,
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truncation::Steps => "max_steps",
            Truncation::Depth => "max_depth",
            Truncation::Answers => "max_answers",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Exhausted,
    Truncated(Truncation),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TreeStats {
    pub status: SearchStatus,
    pub steps: usize,
    pub nodes: usize,
    pub max_depth: usize,
}

/// Everything recorded by one run.
#[derive(Clone, Debug)]
pub struct Run {
    pub query: Query,
    pub answers: Vec<Answer>,
    pub events: Vec<BoxEvent>,
    /// Parallel to `events`.
    pub marks: Vec<EventMark>,
    /// Indexed by invocation number minus one.
    pub boxes: Vec<BoxInfo>,
    pub tree: LdTree,
    pub stats: TreeStats,
}

impl Run {
    pub fn is_truncated(&self) -> bool {
        matches!(self.stats.status, SearchStatus::Truncated(_))
    }

    pub fn box_info(&self, invocation: usize) -> Option<&BoxInfo> {
        invocation.checked_sub(1).and_then(|i| self.boxes.get(i))
    }

    /// Answer atoms of a single-atom query.
    pub fn answer_atoms(&self) -> Vec<Term> {
        self.answers.iter().map(|a| a.atom().clone()).collect()
    }
}
