//! Subderivations, top-level calls, success traces and proof trees, computed
//! from a recorded derivation.

use std::fmt;

use crate::engine::{Derivation, Run};
use crate::kernel::Term;

/// The part of a derivation evaluating the first atom of `Q[start]`. It is
/// closed when it reaches `Q[end]`, the first later query that is one atom
/// shorter than `Q[start]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subderivation {
    pub start: usize,
    pub end: Option<usize>,
    pub call_atom: Term,
    /// The computed answer, when closed.
    pub answer: Option<Term>,
}

impl Subderivation {
    pub fn is_closed(&self) -> bool {
        self.end.is_some()
    }
}

/// The subderivation for the atom selected in `d.queries[position]`.
///
/// Panics if the query at `position` is empty.
pub fn subderivation_for(d: &Derivation, position: usize) -> Subderivation {
    let q = &d.queries[position];
    let call_atom = q.first().expect("subderivation of an empty query").clone();
    let target = q.len() - 1;
    let end = (position + 1..d.queries.len()).find(|&i| d.queries[i].len() == target);
    let answer = end.map(|e| d.apply_steps(&call_atom, position, e));
    Subderivation { start: position, end, call_atom, answer }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopLevelCall {
    pub atom: Term,
    pub sub: Subderivation,
}

/// The top-level calls of `s`: the instances of the first clause's body
/// atoms at the moment each is selected. Calls not reached within the
/// derivation are omitted.
pub fn top_level_calls(d: &Derivation, s: &Subderivation) -> Vec<TopLevelCall> {
    let Some(step) = d.steps.get(s.start) else {
        return Vec::new();
    };
    let m = d.queries[s.start].len() - 1;
    let n = step.renamed.body.len();
    let limit = s.end.unwrap_or(d.queries.len() - 1);
    let mut out = Vec::with_capacity(n);
    let mut from = s.start + 1;
    for j in 1..=n {
        let target = m + n + 1 - j;
        let Some(i) = (from..=limit).find(|&i| d.queries[i].len() == target) else {
            break;
        };
        let sub = subderivation_for(d, i);
        out.push(TopLevelCall { atom: sub.call_atom.clone(), sub });
        from = i + 1;
    }
    out
}

/// The answers of the top-level calls along one successful subderivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessTrace {
    pub call: Term,
    pub answer: Term,
    /// Ordinal of the clause used in the first step.
    pub clause: usize,
    pub answers: Vec<Term>,
}

/// `None` when `s` is open.
pub fn success_trace_for(d: &Derivation, s: &Subderivation) -> Option<SuccessTrace> {
    let answer = s.answer.clone()?;
    let answers = top_level_calls(d, s)
        .into_iter()
        .map(|c| c.sub.answer.expect("calls inside a closed subderivation succeed"))
        .collect();
    Some(SuccessTrace {
        call: s.call_atom.clone(),
        answer,
        clause: d.steps[s.start].clause,
        answers,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub atom: Term,
    pub clause: usize,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    /// The subtree at a path of child indices.
    pub fn at(&self, path: &[usize]) -> Option<&ProofTree> {
        path.iter().try_fold(self, |t, &i| t.children.get(i))
    }

    /// Nodes in pre-order with their paths.
    pub fn walk(&self) -> Vec<(Vec<usize>, &ProofTree)> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a ProofTree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a ProofTree)>) {
            out.push((path.clone(), t));
            for (i, c) in t.children.iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// The clause instance `atom :- child atoms` at this node.
    pub fn instance(&self) -> (Term, Vec<Term>) {
        (self.atom.clone(), self.children.iter().map(|c| c.atom.clone()).collect())
    }
}

impl fmt::Display for ProofTree {
    /// ASCII rendering, one node per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &ProofTree, prefix: &str, last: bool, root: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if root {
                writeln!(f, "{}  [{}]", t.atom, t.clause)?;
            } else {
                writeln!(f, "{prefix}{}{}  [{}]", if last { "`-- " } else { "|-- " }, t.atom, t.clause)?;
            }
            let child_prefix = if root {
                String::new()
            } else {
                format!("{prefix}{}", if last { "    " } else { "|   " })
            };
            for (i, c) in t.children.iter().enumerate() {
                go(c, &child_prefix, i + 1 == t.children.len(), false, f)?;
            }
            Ok(())
        }
        go(self, "", true, true, f)
    }
}

/// The proof tree of a closed subderivation, with every node instantiated by
/// all bindings made up to the subderivation's end.
pub fn proof_tree_for(d: &Derivation, s: &Subderivation) -> Option<ProofTree> {
    let end = s.end?;
    Some(build(d, s, end))
}

fn build(d: &Derivation, s: &Subderivation, root_end: usize) -> ProofTree {
    ProofTree {
        atom: d.apply_steps(&s.call_atom, s.start, root_end),
        clause: d.steps[s.start].clause,
        children: top_level_calls(d, s)
            .iter()
            .map(|c| build(d, &c.sub, root_end))
            .collect(),
    }
}

/// The derivation ending at an Exit event and the subderivation that Exit
/// closes. `None` if the event is not an Exit.
pub fn exit_subderivation(run: &Run, event: usize) -> Option<(Derivation, Subderivation)> {
    let ev = run.events.get(event)?;
    if ev.port != crate::boxtrace::Port::Exit {
        return None;
    }
    let node = run.marks[event].node;
    let call_node = run.box_info(ev.invocation)?.call_node;
    let d = run.tree.derivation_to(node);
    let pos = d.position_of(call_node)?;
    let sub = subderivation_for(&d, pos);
    Some((d, sub))
}

/// The success trace closed by an Exit event, with the event indices of the
/// Exit items of its top-level calls.
pub fn success_trace_at(run: &Run, exit: usize) -> Option<(SuccessTrace, Vec<usize>)> {
    let (d, s) = exit_subderivation(run, exit)?;
    let trace = success_trace_for(&d, &s)?;
    let ev = &run.events[exit];
    let mut idx = Vec::with_capacity(trace.answers.len());
    for c in top_level_calls(&d, &s) {
        let node = d.nodes[c.sub.end?];
        let f = (0..exit).rev().find(|&f| {
            let e = &run.events[f];
            e.port == crate::boxtrace::Port::Exit
                && e.depth == ev.depth + 1
                && run.marks[f].node == node
                && run.box_info(e.invocation).and_then(|b| b.parent) == Some(ev.invocation)
        })?;
        idx.push(f);
    }
    Some((trace, idx))
}

/// The Exit event of the root call that produced answer `k`.
pub fn answer_exit(run: &Run, k: usize) -> Option<usize> {
    let node = run.answers.get(k)?.node;
    run.events
        .iter()
        .enumerate()
        .position(|(i, e)| e.port == crate::boxtrace::Port::Exit && e.invocation == 1 && run.marks[i].node == node)
}

/// Success trace and proof tree for the `k`-th answer of a single-atom run.
pub fn answer_views(run: &Run, k: usize) -> Option<(SuccessTrace, ProofTree)> {
    let a = run.answers.get(k)?;
    let d = run.tree.derivation_to(a.node);
    let s = subderivation_for(&d, 0);
    Some((success_trace_for(&d, &s)?, proof_tree_for(&d, &s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{solve, Budget};
    use crate::kernel::{parse_program, parse_query};

    fn run(src: &str, q: &str) -> Run {
        solve(&parse_query(q).unwrap(), &parse_program(src).unwrap(), Budget::default())
    }

    fn first_derivation(r: &Run) -> Derivation {
        r.tree.derivation_to(r.answers[0].node)
    }

    #[test]
    fn spans_of_conjunction() {
        let r = run("p.\nr.\n", "p, r");
        let d = first_derivation(&r);
        let sp = subderivation_for(&d, 0);
        assert_eq!((sp.start, sp.end), (0, Some(1)));
        assert_eq!(sp.answer.unwrap().to_string(), "p");
        let sr = subderivation_for(&d, 1);
        assert_eq!((sr.start, sr.end), (1, Some(2)));
    }

    #[test]
    fn inner_append_call_is_last_two_queries() {
        let r = run("app([],L,L).\napp([H|T],L,[H|R]) :- app(T,L,R).\n", "app([1],[2],Z)");
        let d = first_derivation(&r);
        assert_eq!(d.len(), 3);
        let s = subderivation_for(&d, 1);
        assert_eq!((s.start, s.end), (1, Some(2)));
        assert_eq!(s.answer.unwrap().to_string(), "app([],[2],[2])");
        let whole = subderivation_for(&d, 0);
        let t = success_trace_for(&d, &whole).unwrap();
        assert_eq!(t.answers.len(), 1);
        assert_eq!(t.answers[0].to_string(), "app([],[2],[2])");
        let pt = proof_tree_for(&d, &whole).unwrap();
        assert_eq!(pt.atom.to_string(), "app([1],[2],[1,2])");
        assert_eq!(pt.children.len(), 1);
        assert!(pt.children[0].children.is_empty());
    }

    #[test]
    fn calls_of_clause_bodies() {
        let r = run("p :- q, r.\nq.\nr.\n", "p");
        let d = first_derivation(&r);
        let calls = top_level_calls(&d, &subderivation_for(&d, 0));
        let shown: Vec<_> = calls.iter().map(|c| c.atom.to_string()).collect();
        assert_eq!(shown, vec!["q", "r"]);
        let fact = run("p.\n", "p");
        let d = first_derivation(&fact);
        let s = subderivation_for(&d, 0);
        assert!(top_level_calls(&d, &s).is_empty());
        let t = success_trace_for(&d, &s).unwrap();
        assert_eq!((t.clause, t.answers.len()), (1, 0));
        assert_eq!(proof_tree_for(&d, &s).unwrap().size(), 1);
    }

    #[test]
    fn buggy_even_views() {
        let r = run("even(0).\neven(s(X)) :- even(X).\n", "even(s(0))");
        let (t, pt) = answer_views(&r, 0).unwrap();
        assert_eq!(answer_exit(&r, 0), Some(3));
        assert_eq!(t.clause, 2);
        assert_eq!(t.answers[0].to_string(), "even(0)");
        assert_eq!(pt.to_string(), "even(s(0))  [2]\n`-- even(0)  [1]\n");
    }

    #[test]
    fn buggy_insertion_sort_calls() {
        // insert without any ordering guard
        let src = "isort([],[]).\n\
                   isort([H|T],Ys) :- isort(T,Zs), insert(H,Zs,Ys).\n\
                   insert(X,[],[X]).\n\
                   insert(X,[Y|Ys],[Y|Zs]) :- insert(X,Ys,Zs).\n\
                   insert(X,[Y|Ys],[X,Y|Ys]).\n";
        let r = run(src, "isort([2,1],Ys)");
        let d = first_derivation(&r);
        let calls = top_level_calls(&d, &subderivation_for(&d, 0));
        assert_eq!(calls.len(), 2);
        assert!(calls[0].atom.to_string().starts_with("isort([1],"));
        assert!(calls[1].atom.to_string().starts_with("insert(2,"));
    }

    #[test]
    fn exit_events_close_their_calls() {
        let r = run("app([],L,L).\napp([H|T],L,[H|R]) :- app(T,L,R).\n", "app(X,Y,[1,2])");
        for (i, e) in r.events.iter().enumerate() {
            if e.port == crate::boxtrace::Port::Exit {
                let (d, s) = exit_subderivation(&r, i).unwrap();
                assert_eq!(s.end, Some(d.len() - 1));
                assert_eq!(s.answer.as_ref(), Some(&e.atom));
                assert_eq!(s.call_atom, r.box_info(e.invocation).unwrap().call_atom);
                let (t, idx) = success_trace_at(&r, i).unwrap();
                let at: Vec<_> = idx.iter().map(|&f| r.events[f].atom.clone()).collect();
                assert_eq!(t.answers, at);
            }
        }
    }
}
