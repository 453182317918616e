//! A diagnosis request that can be re-run against a growing set of human
//! answers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use boxdiag::diagnoser::{diagnose_incompleteness, diagnose_query, IncompletenessResult, IncorrectnessResult, Stop, Strategy};
use boxdiag::engine::Budget;
use boxdiag::kernel::{Program, Term};
use boxdiag::oracle::{
    HumanChannel, JournalEntry, OnMissing, Oracle, Role, ScriptedChannel, SpecError, SpecFile, Specification, Verdict,
};

use crate::json::ResultJson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Incorrectness,
    Incompleteness,
}

impl Kind {
    pub fn role(self) -> Role {
        match self {
            Kind::Incorrectness => Role::Corr,
            Kind::Incompleteness => Role::Compl,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Job {
    pub kind: Kind,
    pub program: Program,
    pub query: Term,
    pub strategy: Strategy,
    /// Incorrectness: re-run the engine on each wrong answer found.
    /// Incompleteness: descend from ground witnesses.
    pub restart: bool,
    pub budget: Budget,
    corr: Option<Specification>,
    compl: Option<Specification>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Located {
    Incorrect(IncorrectnessResult),
    Incomplete(IncompletenessResult),
}

impl Job {
    /// Builds the specifications once; the spec file must have the section
    /// the diagnosis kind needs.
    pub fn new(
        kind: Kind,
        program: Program,
        spec: &SpecFile,
        query: Term,
        strategy: Strategy,
        restart: bool,
        budget: Budget,
    ) -> Result<Job, SpecError> {
        let mut extra = program.signature();
        extra.add_atom(&query);
        spec.program(kind.role())?;
        let corr = spec.corr.as_ref().map(|_| spec.specification(Role::Corr, &extra)).transpose()?;
        let compl = match kind {
            Kind::Incompleteness => Some(spec.specification(Role::Compl, &extra)?),
            Kind::Incorrectness => None,
        };
        Ok(Job { kind, program, query, strategy, restart, budget, corr, compl })
    }

    pub fn oracle(&self, channel: Box<dyn HumanChannel + Send>) -> Oracle {
        Oracle::new(self.corr.clone(), self.compl.clone(), channel)
    }

    pub fn run(&self, channel: Box<dyn HumanChannel + Send>) -> (Result<Located, Stop>, Oracle) {
        let mut oracle = self.oracle(channel);
        let res = match self.kind {
            Kind::Incorrectness => {
                diagnose_query(&self.query, &self.program, self.budget, self.strategy, self.restart, &mut oracle)
                    .map(Located::Incorrect)
            }
            Kind::Incompleteness => {
                diagnose_incompleteness(&self.query, &self.program, self.budget, self.restart, &mut oracle)
                    .map(Located::Incomplete)
            }
        };
        (res, oracle)
    }

    /// Runs with scripted answers; a question beyond the script suspends.
    pub fn replay(&self, answers: &BTreeMap<u64, Verdict>) -> (Result<Located, Stop>, Vec<JournalEntry>) {
        let (res, oracle) = self.run(Box::new(ScriptedChannel::new(answers.clone(), OnMissing::Await)));
        (res, oracle.journal().to_vec())
    }
}

impl Located {
    pub fn to_json(&self, p: &Program) -> ResultJson {
        match self {
            Located::Incorrect(r) => ResultJson::incorrectness(r, p),
            Located::Incomplete(r) => ResultJson::incompleteness(r),
        }
    }

    /// Plain-text report, as printed by the CLI.
    pub fn render(&self, p: &Program) -> String {
        let mut s = String::new();
        match self {
            Located::Incorrect(r) => {
                let _ = writeln!(s, "incorrect clause {}: {}", r.clause, p.clause(r.clause));
                let _ = writeln!(s, "error instance: {}", instance_text(&r.head, &r.body));
                let _ = writeln!(s, "{}", question_summary(&r.questions));
            }
            Located::Incomplete(r) => {
                let _ = writeln!(s, "incomplete procedure: {}", r.procedure);
                let _ = writeln!(s, "error atom: {}", r.error_atom);
                let _ = writeln!(s, "uncovered instance: {}", r.witness);
                let _ = writeln!(s, "{}", question_summary(&r.questions));
                if !r.wrong_answers.is_empty() {
                    let list: Vec<String> = r.wrong_answers.iter().map(Term::to_string).collect();
                    let _ = writeln!(
                        s,
                        "hint: incorrect answers were computed ({}); `diagnose corr` may locate their cause",
                        list.join(", ")
                    );
                }
            }
        }
        s
    }
}

fn instance_text(head: &Term, body: &[Term]) -> String {
    if body.is_empty() {
        format!("{head}.")
    } else {
        let b: Vec<String> = body.iter().map(Term::to_string).collect();
        format!("{head} :- {}.", b.join(", "))
    }
}

fn question_summary(qs: &[boxdiag::oracle::OracleVerdict]) -> String {
    let human = qs.iter().filter(|q| q.source == boxdiag::oracle::Source::Human).count();
    format!("questions: {} ({} machine, {} human)", qs.len(), qs.len() - human, human)
}

/// A short machine-readable name for a stop reason.
pub fn stop_kind(s: &Stop) -> &'static str {
    match s {
        Stop::NotASymptom(_) => "not-a-symptom",
        Stop::Undecided { .. } => "undecided",
        Stop::TruncatedTree { .. } => "truncated-tree",
        Stop::Awaiting(_) => "awaiting-answer",
        Stop::NotComputed(_) => "not-computed",
        Stop::NoSpecification(_) => "no-specification",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use boxdiag::kernel::{parse_atom, parse_program};

    const SPEC: &str = "%% corr\neven(0).\neven(s(s(X))) :- even(X).\n%% compl\neven(0).\neven(s(s(X))) :- even(X).\n";

    #[test]
    fn replay_of_a_machine_session() {
        let p = parse_program("even(0).\neven(s(X)) :- even(X).\n").unwrap();
        let spec = SpecFile::parse(SPEC).unwrap();
        let job = Job::new(
            Kind::Incorrectness,
            p.clone(),
            &spec,
            parse_atom("even(s(0))").unwrap(),
            Strategy::ProofTree,
            false,
            Budget::default(),
        )
        .unwrap();
        let (res, journal) = job.replay(&BTreeMap::new());
        assert!(journal.is_empty());
        let text = res.unwrap().render(&p);
        assert!(text.starts_with("incorrect clause 2: even(s(X)) :- even(X).\nerror instance: even(s(0)) :- even(0).\n"));
    }

    #[test]
    fn missing_section() {
        let spec = SpecFile::parse("%% corr\np.\n").unwrap();
        let err = Job::new(
            Kind::Incompleteness,
            parse_program("p.").unwrap(),
            &spec,
            parse_atom("p").unwrap(),
            Strategy::ProofTree,
            true,
            Budget::default(),
        )
        .unwrap_err();
        assert_eq!(err, SpecError::Missing(Role::Compl));
    }
}
