//! Backward reconstruction of a success trace from displayed event items.
//!
//! Starting at `Exit n d A'`, look at the item before the current one. An
//! `Exit` at depth `d+1` is an answer of a top-level call: record it and
//! jump to its `Call`. A `Call` or `Redo` of invocation `n` ends the walk.
//! So does a `Fail` at depth `d+1`: the clause used was entered by retrying
//! `n` after its previous clause's first body call failed, and no `Redo n`
//! item is shown in that case.
//!
//! The input must be the full stream; the Redo display filter removes items
//! the walk depends on.

use crate::kernel::Term;

use super::event::{parse_event_line, BoxEvent, MalformedTrace, Port};

/// Reconstructs from event text; `exit_line` is the 1-based line of the
/// Exit item.
pub fn reconstruct_success_trace(text: &str, exit_line: usize) -> Result<Vec<Term>, MalformedTrace> {
    let mut events = Vec::new();
    let mut lines = Vec::new();
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        events.push(parse_event_line(l, i + 1)?);
        lines.push(i + 1);
    }
    let idx = lines.iter().position(|&l| l == exit_line).ok_or(MalformedTrace {
        line: exit_line,
        reason: "no event item on this line".into(),
    })?;
    reconstruct_from_events(&events, idx).map_err(|(i, reason)| MalformedTrace {
        line: i.map_or(exit_line, |i| lines[i]),
        reason,
    })
}

/// As [`reconstruct_success_trace`] on parsed events; `exit` is an index
/// into `events`. Errors carry the offending event index, if any.
pub fn reconstruct_from_events(events: &[BoxEvent], exit: usize) -> Result<Vec<Term>, (Option<usize>, String)> {
    let top = &events[exit];
    if top.port != Port::Exit {
        return Err((Some(exit), "not an Exit item".into()));
    }
    let (n, d) = (top.invocation, top.depth);
    let mut answers = Vec::new();
    let mut cur = exit;
    loop {
        if cur == 0 {
            return Err((None, format!("no Call item for invocation {n}")));
        }
        let prev = &events[cur - 1];
        match prev.port {
            Port::Exit if prev.depth == d + 1 => {
                answers.push(prev.atom.clone());
                let call = events[..cur - 1]
                    .iter()
                    .rposition(|e| e.port == Port::Call && e.invocation == prev.invocation)
                    .ok_or((Some(cur - 1), format!("no Call item for invocation {}", prev.invocation)))?;
                cur = call;
            }
            Port::Call | Port::Redo if prev.invocation == n => break,
            Port::Fail if prev.depth == d + 1 => break,
            _ => {
                return Err((Some(cur - 1), format!("unexpected item while reconstructing invocation {n}")));
            }
        }
    }
    answers.reverse();
    Ok(answers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxtrace::render_events;
    use crate::engine::{solve, Budget};
    use crate::kernel::{parse_program, parse_query};

    fn text(src: &str, q: &str) -> String {
        let r = solve(&parse_query(q).unwrap(), &parse_program(src).unwrap(), Budget::default());
        render_events(&r.events)
    }

    fn shown(ts: &[Term]) -> Vec<String> {
        ts.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn fact_has_empty_trace() {
        let t = text("p.\n", "p");
        assert_eq!(t, "1 1 Call: p\n1 1 Exit: p\n");
        assert!(reconstruct_success_trace(&t, 2).unwrap().is_empty());
    }

    #[test]
    fn buggy_even() {
        let t = text("even(0).\neven(s(X)) :- even(X).\n", "even(s(0))");
        assert_eq!(shown(&reconstruct_success_trace(&t, 4).unwrap()), vec!["even(0)"]);
    }

    #[test]
    fn missing_call_is_reported() {
        let t = "2 2 Exit: even(0)\n1 1 Exit: even(s(0))\n";
        let e = reconstruct_success_trace(t, 2).unwrap_err();
        assert_eq!(e.line, 1);
        assert!(reconstruct_success_trace("1 1 Call: p\n", 1).is_err());
    }

    #[test]
    fn retried_clause_after_failed_first_call() {
        let src = "p :- q.\np :- r, s.\nr.\ns.\n";
        let t = text(src, "p");
        assert_eq!(
            t,
            "1 1 Call: p\n2 2 Call: q\n2 2 Fail: q\n3 2 Call: r\n3 2 Exit: r\n4 2 Call: s\n4 2 Exit: s\n1 1 Exit: p\n"
        );
        assert_eq!(shown(&reconstruct_success_trace(&t, 8).unwrap()), vec!["r", "s"]);
    }

    #[test]
    fn second_answer_after_redo() {
        let src = "p(X) :- q(X), r.\nq(a).\nq(b).\nr.\n";
        let t = text(src, "p(X)");
        let last = t.lines().count();
        assert_eq!(shown(&reconstruct_success_trace(&t, last).unwrap()), vec!["q(b)", "r"]);
    }
}
