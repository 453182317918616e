//! Box events and their one-line text form.
//!
//! ```text
//! 1 1 Call: app(X,Y,[1])
//! ? 1 1 Exit: app([],[1],[1])
//! ```
//!
//! A `? ` prefix marks an Exit after which more answers may follow.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{parse_atom, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Port {
    Call,
    Exit,
    Redo,
    Fail,
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::Call => "Call",
            Port::Exit => "Exit",
            Port::Redo => "Redo",
            Port::Fail => "Fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxEvent {
    pub port: Port,
    pub invocation: usize,
    pub depth: usize,
    pub atom: Term,
    /// Only meaningful on Exit.
    pub nondet: bool,
}

impl BoxEvent {
    pub fn new(port: Port, invocation: usize, depth: usize, atom: Term) -> Self {
        BoxEvent { port, invocation, depth, atom, nondet: false }
    }
}

impl fmt::Display for BoxEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nondet && self.port == Port::Exit {
            f.write_str("? ")?;
        }
        write!(f, "{} {} {}: {}", self.invocation, self.depth, self.port, self.atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed trace at line {line}: {reason}")]
pub struct MalformedTrace {
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

/// One line per event, each newline-terminated.
pub fn render_events(events: &[BoxEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&e.to_string());
        out.push('\n');
    }
    out
}

/// Drops what SICStus does not usually display: Redo items whose Exit was
/// not marked `?`. Such a box has no alternatives left, so the Redo is
/// followed by Fails of the box and of everything redone inside it; those
/// are dropped too.
pub fn sicstus_view(events: &[BoxEvent]) -> Vec<BoxEvent> {
    let mut last_exit_nondet: HashMap<usize, bool> = HashMap::new();
    let mut suppressed: HashSet<usize> = HashSet::new();
    let mut out = Vec::with_capacity(events.len());
    for e in events {
        match e.port {
            Port::Exit => {
                last_exit_nondet.insert(e.invocation, e.nondet);
                out.push(e.clone());
            }
            Port::Redo if !last_exit_nondet.get(&e.invocation).copied().unwrap_or(true) => {
                suppressed.insert(e.invocation);
            }
            Port::Fail if suppressed.contains(&e.invocation) => {}
            _ => out.push(e.clone()),
        }
    }
    out
}

pub fn parse_event_line(line: &str, line_no: usize) -> Result<BoxEvent, MalformedTrace> {
    let bad = |reason: &str| MalformedTrace { line: line_no, reason: reason.to_string() };
    let (nondet, rest) = match line.strip_prefix("? ") {
        Some(r) => (true, r),
        None => (false, line),
    };
    let mut parts = rest.splitn(3, ' ');
    let invocation: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| bad("expected a positive invocation number"))?;
    let depth: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| bad("expected a positive depth"))?;
    let rest = parts.next().ok_or_else(|| bad("expected a port"))?;
    let (port, atom_text) = rest.split_once(": ").ok_or_else(|| bad("expected `<Port>: `"))?;
    let port = match port {
        "Call" => Port::Call,
        "Exit" => Port::Exit,
        "Redo" => Port::Redo,
        "Fail" => Port::Fail,
        other => return Err(bad(&format!("unknown port `{other}`"))),
    };
    if nondet && port != Port::Exit {
        return Err(bad("`?` marker on a non-Exit item"));
    }
    let atom = parse_atom(atom_text).map_err(|e| bad(&format!("atom: {e}")))?;
    Ok(BoxEvent { port, invocation, depth, atom, nondet })
}

/// Parses event text; blank lines are skipped but still counted.
pub fn parse_events(text: &str) -> Result<Vec<BoxEvent>, MalformedTrace> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_event_line(l, i + 1))
        .collect()
}
