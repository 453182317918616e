//! Top-level search traces and answer collection from event streams.

use std::fmt;

use crate::engine::{solve, Budget, Run};
use crate::kernel::{is_variant, Program, Query, Term};

use super::event::{BoxEvent, Port};

/// One top-level call of some subderivation for the traced atom, with every
/// answer it produced in the LD-tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchEntry {
    pub invocation: usize,
    pub call: Term,
    pub answers: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopLevelTrace {
    pub for_atom: Term,
    pub entries: Vec<SearchEntry>,
    /// The search was cut by the budget, so answer sets may be partial.
    pub truncated: bool,
}

impl TopLevelTrace {
    /// Entries with variant calls merged, for display only.
    pub fn merged(&self) -> Vec<(Term, Vec<Term>)> {
        let mut out: Vec<(Term, Vec<Term>)> = Vec::new();
        for e in &self.entries {
            match out.iter_mut().find(|(c, _)| is_variant(c, &e.call)) {
                Some((_, answers)) => {
                    for a in &e.answers {
                        if !answers.iter().any(|b| is_variant(a, b)) {
                            answers.push(a.clone());
                        }
                    }
                }
                None => out.push((e.call.clone(), e.answers.clone())),
            }
        }
        out
    }
}

impl fmt::Display for TopLevelTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            write!(f, "{} {}: {{", e.invocation, e.call)?;
            for (i, a) in e.answers.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str("}\n")?;
        }
        if self.truncated {
            f.write_str("% search truncated\n")?;
        }
        Ok(())
    }
}

/// Runs `atom` and collects its top-level search trace.
pub fn search_trace_for(atom: &Term, p: &Program, b: Budget) -> (TopLevelTrace, Run) {
    let run = solve(&Query::atom(atom.clone()), p, b);
    (search_trace_of(&run), run)
}

/// The top-level search trace of the root call of a single-atom run.
pub fn search_trace_of(run: &Run) -> TopLevelTrace {
    let entries = run
        .boxes
        .iter()
        .filter(|b| b.parent == Some(1))
        .map(|b| SearchEntry {
            invocation: b.invocation,
            call: b.call_atom.clone(),
            answers: all_answers_for(b.invocation, &run.events),
        })
        .collect();
    TopLevelTrace {
        for_atom: run.query.atoms[0].clone(),
        entries,
        truncated: run.is_truncated(),
    }
}

/// The Exit atoms of one invocation, in emission order.
pub fn all_answers_for(invocation: usize, events: &[BoxEvent]) -> Vec<Term> {
    events
        .iter()
        .filter(|e| e.invocation == invocation && e.port == Port::Exit)
        .map(|e| e.atom.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_atom, parse_program};

    fn trace(src: &str, a: &str) -> TopLevelTrace {
        search_trace_for(&parse_atom(a).unwrap(), &parse_program(src).unwrap(), Budget::default()).0
    }

    fn shown(t: &TopLevelTrace) -> Vec<(String, Vec<String>)> {
        t.entries
            .iter()
            .map(|e| (e.call.to_string(), e.answers.iter().map(|a| a.to_string()).collect()))
            .collect()
    }

    #[test]
    fn single_call() {
        let t = trace("p :- q.\nq.\n", "p");
        assert_eq!(shown(&t), vec![("q".to_string(), vec!["q".to_string()])]);
    }

    #[test]
    fn buggy_even() {
        let t = trace("even(0).\neven(s(X)) :- even(X).\n", "even(s(0))");
        assert_eq!(shown(&t), vec![("even(0)".to_string(), vec!["even(0)".to_string()])]);
    }

    #[test]
    fn append_split() {
        let t = trace("app([],L,L).\napp([H|T],L,[H|R]) :- app(T,L,R).\n", "app(X,Y,[1])");
        assert_eq!(t.entries.len(), 1);
        let call = &t.entries[0].call;
        assert!(is_variant(call, &parse_atom("app(A,B,[])").unwrap()));
        assert_eq!(t.entries[0].answers[0].to_string(), "app([],[],[])");
        assert!(!t.truncated);
    }

    #[test]
    fn answers_of_root_and_failing_calls() {
        let p = parse_program("app([],L,L).\napp([H|T],L,[H|R]) :- app(T,L,R).\n").unwrap();
        let run = solve(&Query::atom(parse_atom("app(X,Y,[1])").unwrap()), &p, Budget::default());
        let root: Vec<_> = all_answers_for(1, &run.events).iter().map(|a| a.to_string()).collect();
        assert_eq!(root, vec!["app([],[1],[1])", "app([1],[],[1])"]);
        let failing = solve(&Query::atom(parse_atom("app([],[],[1])").unwrap()), &p, Budget::default());
        assert!(all_answers_for(1, &failing.events).is_empty());
    }

    #[test]
    fn variant_calls_stay_separate() {
        let t = trace("p :- q(X), r.\np :- q(Y).\nq(a).\nr :- fail_here.\n", "p");
        assert_eq!(t.entries.len(), 3);
        assert_eq!(t.merged().len(), 2);
    }
}
