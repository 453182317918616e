//! JSON views of terms, traces, trees and diagnosis results.

use serde::Serialize;

use boxdiag::boxtrace::{BoxEvent, ProofTree, TopLevelTrace};
use boxdiag::diagnoser::{IncompletenessResult, IncorrectnessResult};
use boxdiag::kernel::{Program, Term};
use boxdiag::oracle::{OracleVerdict, Question, QuestionKind, Role, Source, Verdict};

/// A term as canonical text plus its structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermJson {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub var: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub args: Option<Vec<TermJson>>,
}

impl From<&Term> for TermJson {
    fn from(t: &Term) -> Self {
        match t {
            Term::Var(v) => TermJson { text: t.to_string(), var: Some(v.name().to_string()), functor: None, args: None },
            Term::Compound(f, args) => TermJson {
                text: t.to_string(),
                var: None,
                functor: Some(f.as_str().to_string()),
                args: Some(args.iter().map(TermJson::from).collect()),
            },
        }
    }
}

pub fn terms(ts: &[Term]) -> Vec<TermJson> {
    ts.iter().map(TermJson::from).collect()
}

#[derive(Serialize)]
pub struct EventJson {
    pub invocation: usize,
    pub depth: usize,
    pub port: String,
    pub nondet: bool,
    pub atom: TermJson,
    pub line: String,
}

pub fn events(evs: &[BoxEvent]) -> Vec<EventJson> {
    evs.iter()
        .map(|e| EventJson {
            invocation: e.invocation,
            depth: e.depth,
            port: e.port.to_string(),
            nondet: e.nondet,
            atom: (&e.atom).into(),
            line: e.to_string(),
        })
        .collect()
}

#[derive(Serialize)]
pub struct SearchEntryJson {
    pub invocation: usize,
    pub call: TermJson,
    pub answers: Vec<TermJson>,
}

#[derive(Serialize)]
pub struct SearchTraceJson {
    pub atom: TermJson,
    pub entries: Vec<SearchEntryJson>,
    pub truncated: bool,
}

impl From<&TopLevelTrace> for SearchTraceJson {
    fn from(t: &TopLevelTrace) -> Self {
        SearchTraceJson {
            atom: (&t.for_atom).into(),
            entries: t
                .entries
                .iter()
                .map(|e| SearchEntryJson { invocation: e.invocation, call: (&e.call).into(), answers: terms(&e.answers) })
                .collect(),
            truncated: t.truncated,
        }
    }
}

#[derive(Serialize)]
pub struct ProofTreeJson {
    pub atom: TermJson,
    pub clause: usize,
    /// Child indices from the root, as used in question contexts.
    pub path: String,
    pub children: Vec<ProofTreeJson>,
}

pub fn proof_tree(t: &ProofTree) -> ProofTreeJson {
    fn go(t: &ProofTree, path: &mut Vec<usize>) -> ProofTreeJson {
        let children = t
            .children
            .iter()
            .enumerate()
            .map(|(i, c)| {
                path.push(i);
                let j = go(c, path);
                path.pop();
                j
            })
            .collect();
        ProofTreeJson {
            atom: (&t.atom).into(),
            clause: t.clause,
            path: format!("/{}", path.iter().map(usize::to_string).collect::<Vec<_>>().join("/")),
            children,
        }
    }
    go(t, &mut Vec::new())
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub role: Role,
    pub kind: QuestionKind,
    pub atom: String,
    pub verdict: Verdict,
    pub source: Source,
}

fn verdicts(qs: &[OracleVerdict]) -> Vec<VerdictJson> {
    qs.iter()
        .map(|q| VerdictJson { role: q.role, kind: q.kind, atom: q.atom.to_string(), verdict: q.value, source: q.source })
        .collect()
}

#[derive(Serialize)]
pub struct QuestionJson {
    pub seq: u64,
    pub role: Role,
    pub kind: QuestionKind,
    pub atom: TermJson,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub answers: Vec<TermJson>,
    pub context: String,
    pub prompt: String,
}

impl From<&Question> for QuestionJson {
    fn from(q: &Question) -> Self {
        QuestionJson {
            seq: q.seq,
            role: q.role,
            kind: q.kind,
            atom: (&q.atom).into(),
            answers: terms(&q.answers),
            context: q.context.clone(),
            prompt: q.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct InstanceJson {
    pub head: TermJson,
    pub body: Vec<TermJson>,
}

#[derive(Serialize)]
pub struct LevelJson {
    pub atom: String,
    pub entries: usize,
    pub questions: usize,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ResultJson {
    Incorrectness {
        clause: usize,
        clause_text: String,
        instance: InstanceJson,
        questions: Vec<VerdictJson>,
    },
    Incompleteness {
        procedure: String,
        error_atom: TermJson,
        witness: TermJson,
        levels: Vec<LevelJson>,
        questions: Vec<VerdictJson>,
        wrong_answers: Vec<TermJson>,
    },
}

impl ResultJson {
    pub fn incorrectness(r: &IncorrectnessResult, p: &Program) -> Self {
        ResultJson::Incorrectness {
            clause: r.clause,
            clause_text: p.clause(r.clause).to_string(),
            instance: InstanceJson { head: (&r.head).into(), body: terms(&r.body) },
            questions: verdicts(&r.questions),
        }
    }

    pub fn incompleteness(r: &IncompletenessResult) -> Self {
        ResultJson::Incompleteness {
            procedure: r.procedure.to_string(),
            error_atom: (&r.error_atom).into(),
            witness: (&r.witness).into(),
            levels: r
                .levels
                .iter()
                .map(|l| LevelJson { atom: l.atom.to_string(), entries: l.entries, questions: l.questions })
                .collect(),
            questions: verdicts(&r.questions),
            wrong_answers: terms(&r.wrong_answers),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxdiag::kernel::parse_term;

    #[test]
    fn terms_carry_text_and_structure() {
        let t = parse_term("f(X,[a])").unwrap();
        let j = serde_json::to_value(TermJson::from(&t)).unwrap();
        assert_eq!(j["text"], "f(X,[a])");
        assert_eq!(j["functor"], "f");
        assert_eq!(j["args"][0]["var"], "X");
        assert_eq!(j["args"][1]["functor"], ".");
        assert_eq!(j["args"][1]["text"], "[a]");
    }
}
