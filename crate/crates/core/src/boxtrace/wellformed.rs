//! Structural checks on event streams.

use std::collections::HashMap;

use thiserror::Error;

use super::event::{BoxEvent, Port};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("event {index}: {reason}")]
pub struct Violation {
    /// 0-based position of the first offending event.
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckMode {
    /// The stream went through the Redo display filter, so a Redo may skip
    /// over later siblings whose Redo and Fail items were hidden.
    pub filtered: bool,
    /// Boxes may still be open at the end (a truncated run).
    pub allow_open: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Active,
    Exited,
    Failed,
}

struct BoxState {
    depth: usize,
    state: State,
    /// Children that exited and may be redone, oldest first.
    exited: Vec<usize>,
}

/// Checks a full event stream.
pub fn events_wellformed(events: &[BoxEvent]) -> Result<(), Violation> {
    check_events(events, CheckMode::default())
}

/// Checks, for every invocation, the port pattern
/// `Call (Exit Redo)* (Exit | Fail)` and a constant depth; that boxes nest
/// (a Call opens a child of the innermost active box, Exit and Fail close
/// the innermost one, Redo re-enters an exited child of it); and that
/// consecutive Exit items have strictly decreasing depths.
pub fn check_events(events: &[BoxEvent], mode: CheckMode) -> Result<(), Violation> {
    let mut boxes: HashMap<usize, BoxState> = HashMap::new();
    // the chain of active boxes, outermost first
    let mut active: Vec<usize> = Vec::new();
    let mut exited_roots: Vec<usize> = Vec::new();
    let mut max_invocation = 0;
    let mut prev_exit_depth: Option<usize> = None;

    for (index, e) in events.iter().enumerate() {
        let bad = |reason: String| Err(Violation { index, reason });
        let n = e.invocation;
        if e.port != Port::Exit && e.nondet {
            return bad(format!("`?` on a {} item", e.port));
        }
        if e.port == Port::Call {
            if boxes.contains_key(&n) {
                return bad(format!("second Call for invocation {n}"));
            }
            if n <= max_invocation {
                return bad(format!("invocation {n} is not above {max_invocation}"));
            }
            if e.depth != active.len() + 1 {
                return bad(format!(
                    "Call at depth {} inside {} active boxes",
                    e.depth,
                    active.len()
                ));
            }
            max_invocation = n;
            boxes.insert(n, BoxState { depth: e.depth, state: State::Active, exited: Vec::new() });
            active.push(n);
            prev_exit_depth = None;
            continue;
        }
        let Some(b) = boxes.get(&n) else {
            return bad(format!("{} before Call for invocation {n}", e.port));
        };
        if b.depth != e.depth {
            return bad(format!("invocation {n} changed depth from {} to {}", b.depth, e.depth));
        }
        match (e.port, b.state) {
            (Port::Exit | Port::Fail, State::Active) => {
                if active.last() != Some(&n) {
                    return bad(format!("{} of invocation {n}, which is not the innermost active box", e.port));
                }
                if e.port == Port::Fail && !mode.filtered && !b.exited.is_empty() {
                    return bad(format!("Fail of invocation {n} while a child can still be redone"));
                }
                if e.port == Port::Exit {
                    if let Some(pd) = prev_exit_depth {
                        if e.depth >= pd {
                            return bad(format!("Exit depth {} after Exit depth {pd}", e.depth));
                        }
                    }
                }
                active.pop();
                let siblings = match active.last() {
                    Some(p) => &mut boxes.get_mut(p).unwrap().exited,
                    None => &mut exited_roots,
                };
                if e.port == Port::Exit {
                    siblings.push(n);
                }
                let b = boxes.get_mut(&n).unwrap();
                b.state = if e.port == Port::Exit { State::Exited } else { State::Failed };
            }
            (Port::Redo, State::Exited) => {
                let siblings = match active.last() {
                    Some(p) => &mut boxes.get_mut(p).unwrap().exited,
                    None => &mut exited_roots,
                };
                let Some(pos) = siblings.iter().position(|&c| c == n) else {
                    return bad(format!("Redo of invocation {n} outside its parent"));
                };
                if !mode.filtered && pos + 1 != siblings.len() {
                    return bad(format!("Redo of invocation {n} before its later siblings"));
                }
                siblings.truncate(pos);
                boxes.get_mut(&n).unwrap().state = State::Active;
                active.push(n);
            }
            (Port::Redo, State::Active) => return bad(format!("Redo of invocation {n} before any Exit")),
            (Port::Exit | Port::Fail, State::Exited) => {
                return bad(format!("{} of invocation {n} after Exit without Redo", e.port))
            }
            (_, State::Failed) => return bad(format!("{} of invocation {n} after Fail", e.port)),
            (Port::Call, _) => unreachable!(),
        }
        prev_exit_depth = (e.port == Port::Exit).then_some(e.depth);
    }
    if !mode.allow_open && !active.is_empty() {
        return Err(Violation {
            index: events.len(),
            reason: format!("invocation {} never left", active[active.len() - 1]),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxtrace::{parse_events, sicstus_view};
    use crate::engine::{solve, Budget};
    use crate::kernel::{parse_program, parse_query};

    fn evs(text: &str) -> Vec<BoxEvent> {
        parse_events(text).unwrap()
    }

    #[test]
    fn minimal_cases() {
        assert!(events_wellformed(&evs("1 1 Call: p\n1 1 Exit: p\n")).is_ok());
        let v = events_wellformed(&evs("1 1 Call: p\n1 1 Redo: p\n")).unwrap_err();
        assert_eq!(v.index, 1);
        assert!(v.reason.contains("before any Exit"));
    }

    #[test]
    fn structural_violations() {
        let cases = [
            ("1 1 Call: p\n2 1 Call: q\n", 1),
            ("1 1 Call: p\n2 2 Call: q\n1 1 Exit: p\n", 2),
            ("1 1 Call: p\n1 2 Exit: p\n", 1),
            ("1 1 Call: p\n1 1 Fail: p\n1 1 Redo: p\n", 2),
            ("1 1 Call: p\n1 1 Exit: p\n1 1 Exit: p\n", 2),
            ("2 1 Exit: p\n", 0),
            ("1 1 Call: p\n", 1),
        ];
        for (text, index) in cases {
            assert_eq!(events_wellformed(&evs(text)).unwrap_err().index, index, "{text}");
        }
    }

    #[test]
    fn append_search_is_wellformed() {
        let p = parse_program("app([],L,L).\napp([H|T],L,[H|R]) :- app(T,L,R).\n").unwrap();
        let r = solve(&parse_query("app(X,Y,[1,2])").unwrap(), &p, Budget::default());
        assert!(events_wellformed(&r.events).is_ok());
        let filtered = sicstus_view(&r.events);
        assert!(check_events(&filtered, CheckMode { filtered: true, allow_open: false }).is_ok());
    }

    #[test]
    fn truncated_runs_may_stay_open() {
        let p = parse_program("p :- p.").unwrap();
        let r = solve(&parse_query("p").unwrap(), &p, Budget { max_depth: 5, ..Budget::default() });
        assert!(events_wellformed(&r.events).is_err());
        assert!(check_events(&r.events, CheckMode { filtered: false, allow_open: true }).is_ok());
    }
}
