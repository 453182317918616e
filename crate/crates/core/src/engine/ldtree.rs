//! The recorded LD-tree of a run and the derivations (branches) in it.

use crate::kernel::{Clause, Query, Substitution};

pub type NodeId = usize;

/// One resolution step: the input clause (as written and renamed apart) and
/// the mgu of the selected atom with the renamed head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub clause: usize,
    pub renamed: Clause,
    pub mgu: Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeOutcome {
    /// Has children.
    Inner,
    /// The empty query.
    Success,
    /// Leaf whose selected atom unifies with no clause head.
    Failure,
    /// Leaf at which the search was stopped by the budget.
    Cut,
}

#[derive(Clone, Debug)]
pub struct LdNode {
    pub parent: Option<NodeId>,
    pub query: Query,
    /// The step leading from the parent to this node.
    pub step: Option<Step>,
    pub children: Vec<NodeId>,
    pub outcome: NodeOutcome,
}

#[derive(Clone, Debug, Default)]
pub struct LdTree {
    nodes: Vec<LdNode>,
}

impl LdTree {
    pub(crate) fn with_root(query: Query) -> Self {
        LdTree {
            nodes: vec![LdNode {
                parent: None,
                query,
                step: None,
                children: Vec::new(),
                outcome: NodeOutcome::Cut,
            }],
        }
    }

    pub(crate) fn push(&mut self, parent: NodeId, query: Query, step: Step) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(LdNode {
            parent: Some(parent),
            query,
            step: Some(step),
            children: Vec::new(),
            outcome: NodeOutcome::Cut,
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub(crate) fn set_outcome(&mut self, id: NodeId, outcome: NodeOutcome) {
        self.nodes[id].outcome = outcome;
    }

    /// Marks nodes with children as inner; leaves keep their outcome.
    pub(crate) fn finish(&mut self) {
        for n in &mut self.nodes {
            if !n.children.is_empty() {
                n.outcome = NodeOutcome::Inner;
            }
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &LdNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &LdNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.children.is_empty())
            .map(|(i, _)| i)
    }

    /// Node ids from the root to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The derivation from the root query to `id`.
    pub fn derivation_to(&self, id: NodeId) -> Derivation {
        let nodes = self.path_to(id);
        let queries = nodes.iter().map(|&n| self.nodes[n].query.clone()).collect();
        let steps = nodes[1..]
            .iter()
            .map(|&n| self.nodes[n].step.clone().expect("non-root node has a step"))
            .collect();
        let status = match self.nodes[id].outcome {
            NodeOutcome::Success => DerivationStatus::Success,
            NodeOutcome::Failure => DerivationStatus::Failure,
            NodeOutcome::Cut => DerivationStatus::ExhaustedBudget,
            NodeOutcome::Inner => DerivationStatus::Prefix,
        };
        Derivation { queries, steps, status, nodes }
    }

    /// Whether `ancestor` lies on the path from the root to `node`.
    pub fn is_ancestor(&self, ancestor: NodeId, node: NodeId) -> bool {
        let mut cur = Some(node);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivationStatus {
    Success,
    Failure,
    ExhaustedBudget,
    /// Ends at an inner node of the tree.
    Prefix,
}

/// An LD-derivation `Q0, Q1, ...` with the step taking `Q(i-1)` to `Qi` at
/// `steps[i-1]`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub queries: Vec<Query>,
    pub steps: Vec<Step>,
    pub status: DerivationStatus,
    /// Tree node of each query.
    pub nodes: Vec<NodeId>,
}

impl Derivation {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Position of a tree node in this derivation.
    pub fn position_of(&self, node: NodeId) -> Option<usize> {
        self.nodes.iter().position(|&n| n == node)
    }

    /// Applies the mgus of steps `from+1 ..= to` (that is, `θ(from+1)⋯θ(to)`).
    pub fn apply_steps(&self, t: &crate::kernel::Term, from: usize, to: usize) -> crate::kernel::Term {
        self.steps[from..to]
            .iter()
            .fold(t.clone(), |acc, s| s.mgu.apply(&acc))
    }
}
