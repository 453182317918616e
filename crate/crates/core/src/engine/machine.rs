//! The resolution loop.
//!
//! Goals live on a stack of `Call` entries interleaved with `Exit` markers;
//! a marker is popped once every body atom of its clause has succeeded, so
//! runs of consecutive markers produce the nested Exit items that share one
//! LD-tree node. Bindings are applied eagerly to everything on the stack.
//!
//! Backtracking walks the box structure: a failing box hands control to its
//! left sibling's Redo port, and a box that is redone redoes its last child
//! before retrying its own clauses.

use std::collections::BTreeSet;

use crate::boxtrace::{BoxEvent, Port};
use crate::kernel::{match_all, unify, Clause, NoUnifier, Program, Query, Substitution, Term, Var};

use super::ldtree::{LdTree, NodeId, NodeOutcome, Step};
use super::{Answer, BoxInfo, Budget, EventMark, Run, SearchStatus, Truncation, TreeStats};

/// Index into the box table; the invocation number is `id + 1`.
type BoxId = usize;

#[derive(Clone, Debug)]
enum Goal {
    Call { atom: Term, parent: Option<BoxId>, depth: usize },
    Exit { bx: BoxId, atom: Term },
}

#[derive(Clone, Debug)]
struct Saved {
    goals: Vec<Goal>,
    template: Vec<Term>,
}

#[derive(Debug)]
struct BoxRec {
    depth: usize,
    parent: Option<BoxId>,
    call_atom: Term,
    call_node: NodeId,
    /// Procedure position to resume from on retry.
    next_pos: usize,
    /// A later clause head unifies with the call.
    has_alt: bool,
    saved: Option<Saved>,
    /// Boxes of the current clause's body atoms called so far.
    children: Vec<BoxId>,
    clause: Option<usize>,
    last_exit: Option<(Term, NodeId)>,
}

enum Back {
    Fail(BoxId),
    AfterFail { parent: Option<BoxId>, pos: usize },
    Redo(BoxId),
    Retry(BoxId),
}

enum Flow {
    Forward,
    Done,
    Stop(Truncation),
}

struct Machine<'p> {
    program: &'p Program,
    budget: Budget,
    goals: Vec<Goal>,
    template: Vec<Term>,
    node: NodeId,
    counter: u64,
    steps: usize,
    boxes: Vec<BoxRec>,
    /// Boxes with an untried clause. A box holding one is never discarded,
    /// and every live box called after `b` sits inside `b` while `b` is
    /// exiting, so `b`'s subtree has a choicepoint iff some id `>= b` is here.
    alts: BTreeSet<BoxId>,
    roots: Vec<BoxId>,
    tree: LdTree,
    events: Vec<BoxEvent>,
    marks: Vec<EventMark>,
    answers: Vec<Answer>,
    max_depth_seen: usize,
}

/// Runs `query` against `program` and explores the whole LD-tree within the
/// budget.
pub fn solve(query: &Query, program: &Program, budget: Budget) -> Run {
    let counter = query
        .atoms
        .iter()
        .filter_map(Term::max_fresh_index)
        .max()
        .unwrap_or(0);
    let mut m = Machine {
        program,
        budget,
        goals: query
            .atoms
            .iter()
            .rev()
            .map(|a| Goal::Call { atom: a.clone(), parent: None, depth: 1 })
            .collect(),
        template: query.atoms.clone(),
        node: 0,
        counter,
        steps: 0,
        boxes: Vec::new(),
        alts: BTreeSet::new(),
        roots: Vec::new(),
        tree: LdTree::with_root(query.clone()),
        events: Vec::new(),
        marks: Vec::new(),
        answers: Vec::new(),
        max_depth_seen: 0,
    };
    let status = m.run(query);
    m.tree.finish();
    let boxes = m
        .boxes
        .iter()
        .enumerate()
        .map(|(i, b)| BoxInfo {
            invocation: i + 1,
            parent: b.parent.map(|p| p + 1),
            depth: b.depth,
            call_atom: b.call_atom.clone(),
            call_node: b.call_node,
        })
        .collect();
    Run {
        query: query.clone(),
        answers: m.answers,
        events: m.events,
        marks: m.marks,
        boxes,
        stats: TreeStats {
            status,
            steps: m.steps,
            nodes: m.tree.len(),
            max_depth: m.max_depth_seen,
        },
        tree: m.tree,
    }
}

/// One LD-resolution step: renames clause `ordinal` apart (advancing
/// `counter`) and resolves it with the first atom of `q`.
pub fn resolve_step(
    q: &Query,
    program: &Program,
    ordinal: usize,
    counter: &mut u64,
) -> Result<(Query, Substitution), NoUnifier> {
    let selected = q.first().ok_or(NoUnifier)?;
    let renamed = program.clause(ordinal).rename(counter);
    let mgu = unify(selected, &renamed.head)?;
    let mut atoms = renamed.body.clone();
    atoms.extend(q.atoms[1..].iter().cloned());
    Ok((Query::new(mgu.apply_all(&atoms)), mgu))
}

/// Renames with names that cannot occur in parsed text, for look-ahead
/// unification only.
fn shadow(clause: &Clause) -> Term {
    let s = Substitution::from_bindings(
        clause
            .vars()
            .into_iter()
            .enumerate()
            .map(|(i, v)| (v, Term::Var(Var::new(&format!("#{i}"))))),
    );
    s.apply(&clause.head)
}

impl Machine<'_> {
    fn run(&mut self, query: &Query) -> SearchStatus {
        let mut flow = Flow::Forward;
        loop {
            match flow {
                Flow::Done => return SearchStatus::Exhausted,
                // the node being expanded keeps its default `Cut` outcome
                Flow::Stop(t) => return SearchStatus::Truncated(t),
                Flow::Forward => flow = self.forward(query),
            }
        }
    }

    fn current_query(&self) -> Query {
        Query::new(
            self.goals
                .iter()
                .rev()
                .filter_map(|g| match g {
                    Goal::Call { atom, .. } => Some(atom.clone()),
                    Goal::Exit { .. } => None,
                })
                .collect(),
        )
    }

    fn emit(&mut self, port: Port, bx: BoxId, atom: Term, node: NodeId) {
        let b = &self.boxes[bx];
        let mut ev = BoxEvent::new(port, bx + 1, b.depth, atom);
        let clause = if port == Port::Exit {
            ev.nondet = self.subtree_has_alt(bx);
            b.clause
        } else {
            None
        };
        self.events.push(ev);
        self.marks.push(EventMark { node, clause });
    }

    fn subtree_has_alt(&self, bx: BoxId) -> bool {
        self.alts.range(bx..).next().is_some()
    }

    fn set_alt(&mut self, bx: BoxId, has_alt: bool) {
        self.boxes[bx].has_alt = has_alt;
        if has_alt {
            self.alts.insert(bx);
        } else {
            self.alts.remove(&bx);
        }
    }

    /// Runs forward until the goal stack empties, a box fails, or the
    /// budget runs out; handles backtracking in between.
    fn forward(&mut self, query: &Query) -> Flow {
        loop {
            match self.goals.pop() {
                None => {
                    let binding = match_all(&query.atoms, &self.template)
                        .expect("the answer template is an instance of the query");
                    self.tree.set_outcome(self.node, NodeOutcome::Success);
                    self.answers.push(Answer {
                        query: query.clone(),
                        binding,
                        answer: Query::new(self.template.clone()),
                        node: self.node,
                    });
                    let pending = !self.alts.is_empty();
                    if !pending {
                        return Flow::Done;
                    }
                    if self.answers.len() >= self.budget.max_answers {
                        return Flow::Stop(Truncation::Answers);
                    }
                    let last = *self.roots.last().expect("pending alternative implies a box");
                    return self.backtrack(Back::Redo(last));
                }
                Some(Goal::Exit { bx, atom }) => {
                    let node = self.node;
                    self.emit(Port::Exit, bx, atom.clone(), node);
                    self.boxes[bx].last_exit = Some((atom, node));
                }
                Some(Goal::Call { atom, parent, depth }) => {
                    if depth > self.budget.max_depth {
                        return Flow::Stop(Truncation::Depth);
                    }
                    self.max_depth_seen = self.max_depth_seen.max(depth);
                    let bx = self.boxes.len();
                    self.boxes.push(BoxRec {
                        depth,
                        parent,
                        call_atom: atom.clone(),
                        call_node: self.node,
                        next_pos: 0,
                        has_alt: false,
                        saved: None,
                        children: Vec::new(),
                        clause: None,
                        last_exit: None,
                    });
                    match parent {
                        Some(p) => self.boxes[p].children.push(bx),
                        None => self.roots.push(bx),
                    }
                    let node = self.node;
                    self.emit(Port::Call, bx, atom, node);
                    match self.try_clauses(bx) {
                        Ok(true) => {}
                        Ok(false) => {
                            if self.tree.node(self.node).children.is_empty() {
                                self.tree.set_outcome(self.node, NodeOutcome::Failure);
                            }
                            return self.backtrack(Back::Fail(bx));
                        }
                        Err(t) => return Flow::Stop(t),
                    }
                }
            }
        }
    }

    /// Tries the clauses of `bx` from its resume position, with the goal
    /// stack holding everything below the call. Returns false when no
    /// remaining clause applies.
    fn try_clauses(&mut self, bx: BoxId) -> Result<bool, Truncation> {
        let atom = self.boxes[bx].call_atom.clone();
        let procedure = self.program.clauses_for(&atom);
        let mut pos = self.boxes[bx].next_pos;
        while pos < procedure.len() {
            self.steps += 1;
            if self.steps > self.budget.max_steps {
                return Err(Truncation::Steps);
            }
            let ordinal = procedure[pos];
            let clause = self.program.clause(ordinal);
            let renamed = clause.rename(&mut self.counter);
            pos += 1;
            let Ok(mgu) = unify(&atom, &renamed.head) else {
                continue;
            };
            let has_alt = procedure[pos..]
                .iter()
                .any(|&o| unify(&atom, &shadow(self.program.clause(o))).is_ok());
            self.set_alt(bx, has_alt);
            let b = &mut self.boxes[bx];
            b.next_pos = pos;
            b.clause = Some(ordinal);
            b.children.clear();
            b.saved = has_alt.then(|| Saved {
                goals: self.goals.clone(),
                template: self.template.clone(),
            });
            let depth = b.depth;

            for g in &mut self.goals {
                match g {
                    Goal::Call { atom, .. } | Goal::Exit { atom, .. } => mgu.apply_in_place(atom),
                }
            }
            self.template.iter_mut().for_each(|t| mgu.apply_in_place(t));
            self.goals.push(Goal::Exit { bx, atom: mgu.apply(&atom) });
            for body_atom in renamed.body.iter().rev() {
                self.goals.push(Goal::Call {
                    atom: mgu.apply(body_atom),
                    parent: Some(bx),
                    depth: depth + 1,
                });
            }
            let q = self.current_query();
            self.node = self.tree.push(self.node, q, Step { clause: ordinal, renamed, mgu });
            return Ok(true);
        }
        self.set_alt(bx, false);
        self.boxes[bx].next_pos = pos;
        Ok(false)
    }

    fn backtrack(&mut self, mut action: Back) -> Flow {
        loop {
            action = match action {
                Back::Fail(bx) => {
                    let atom = self.boxes[bx].call_atom.clone();
                    let node = self.boxes[bx].call_node;
                    self.emit(Port::Fail, bx, atom, node);
                    let parent = self.boxes[bx].parent;
                    let siblings = match parent {
                        Some(p) => &self.boxes[p].children,
                        None => &self.roots,
                    };
                    let pos = siblings.iter().position(|&c| c == bx).expect("box is a child");
                    Back::AfterFail { parent, pos }
                }
                Back::AfterFail { parent, pos } => {
                    let siblings = match parent {
                        Some(p) => &mut self.boxes[p].children,
                        None => &mut self.roots,
                    };
                    siblings.truncate(pos);
                    if pos > 0 {
                        Back::Redo(siblings[pos - 1])
                    } else {
                        match parent {
                            Some(p) => Back::Retry(p),
                            None => return Flow::Done,
                        }
                    }
                }
                Back::Redo(bx) => {
                    let (atom, node) = self.boxes[bx].last_exit.clone().expect("redo after exit");
                    self.emit(Port::Redo, bx, atom, node);
                    match self.boxes[bx].children.last() {
                        Some(&c) => Back::Redo(c),
                        None => Back::Retry(bx),
                    }
                }
                Back::Retry(bx) => {
                    if !self.boxes[bx].has_alt {
                        Back::Fail(bx)
                    } else {
                        let saved = self.boxes[bx].saved.take().expect("alternative has saved state");
                        self.goals = saved.goals;
                        self.template = saved.template;
                        self.node = self.boxes[bx].call_node;
                        self.boxes[bx].children.clear();
                        match self.try_clauses(bx) {
                            Ok(true) => return Flow::Forward,
                            Ok(false) => Back::Fail(bx),
                            Err(t) => return Flow::Stop(t),
                        }
                    }
                }
            }
        }
    }
}
