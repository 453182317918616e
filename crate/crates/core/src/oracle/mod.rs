//! Approximate specifications and the oracle that answers diagnosis
//! questions: decided by machine where the bounded specification allows,
//! otherwise passed to a human channel and journaled.

mod channel;
mod membership;
mod spec;

use std::collections::HashMap;
use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::kernel::{is_instance_of, Substitution, Term, Var};

pub use channel::{ChannelError, ClosedChannel, HumanChannel, OnMissing, ScriptedChannel};
pub use membership::{
    covered, covering_clause, find_uncovered_instance, ground_instances, incorrect_instance,
    is_incompleteness_symptom, is_incorrectness_symptom, universe_for, MissingCheck, TruncatedTree,
};
pub use spec::{inconsistent_atoms, Bounds, Role, SpecError, SpecFile, Specification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn negate(self) -> Verdict {
        match self {
            Verdict::Yes => Verdict::No,
            Verdict::No => Verdict::Yes,
            Verdict::Unknown => Verdict::Unknown,
        }
    }

    pub fn parse(s: &str) -> Option<Verdict> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "y" => Some(Verdict::Yes),
            "no" | "n" => Some(Verdict::No),
            "unknown" | "?" => Some(Verdict::Unknown),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Machine,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionKind {
    /// Is every instance of the atom in the specification?
    Holds,
    /// Does the atom have a required instance missing from the answers?
    Missing,
}

/// A question put to the human channel. `seq` counts human questions in a
/// session from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Question {
    pub seq: u64,
    pub role: Role,
    pub kind: QuestionKind,
    pub atom: Term,
    /// The computed answers, for `Missing` questions.
    pub answers: Vec<Term>,
    /// Where the question arises: a proof-tree path or a trace entry.
    pub context: String,
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            QuestionKind::Holds => write!(f, "is {} in the intended {} interpretation?", self.atom, self.role),
            QuestionKind::Missing => {
                write!(f, "should {} have an answer not among {{", self.atom)?;
                for (i, a) in self.answers.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("}?")
            }
        }
    }
}

/// One oracle query as recorded in a diagnosis's question log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub role: Role,
    pub kind: QuestionKind,
    pub atom: Term,
    pub value: Verdict,
    pub source: Source,
}

/// A human answer, for replay.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub seq: u64,
    pub role: Role,
    pub kind: QuestionKind,
    pub atom: String,
    pub verdict: Verdict,
    pub timestamp_ms: u64,
}

/// The question could not be answered yet; the session must wait for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Awaiting(pub Question);

/// Renames variables to `_1, _2, ...` in order of occurrence.
fn canonical(atoms: &[&Term]) -> String {
    let mut vars = Vec::new();
    for a in atoms {
        a.collect_vars(&mut vars);
    }
    let s = Substitution::from_bindings(
        vars.into_iter()
            .enumerate()
            .map(|(i, v)| (v, Term::Var(Var::new(&format!("_{}", i + 1))))),
    );
    atoms.iter().map(|a| s.apply(a).to_string()).collect::<Vec<_>>().join(" ; ")
}

/// Answers questions from the specifications, falling back to a human
/// channel. Each distinct question is asked once.
pub struct Oracle {
    pub corr: Option<Specification>,
    pub compl: Option<Specification>,
    channel: Box<dyn HumanChannel + Send>,
    cache: HashMap<(Role, QuestionKind, String), Verdict>,
    log: Vec<OracleVerdict>,
    journal: Vec<JournalEntry>,
    human_seq: u64,
}

impl Oracle {
    pub fn new(
        corr: Option<Specification>,
        compl: Option<Specification>,
        channel: Box<dyn HumanChannel + Send>,
    ) -> Self {
        Oracle {
            corr,
            compl,
            channel,
            cache: HashMap::new(),
            log: Vec::new(),
            journal: Vec::new(),
            human_seq: 0,
        }
    }

    /// Questions answered so far, excluding repeats.
    pub fn log(&self) -> &[OracleVerdict] {
        &self.log
    }

    pub fn journal(&self) -> &[JournalEntry] {
        &self.journal
    }

    pub fn questions_asked(&self) -> usize {
        self.log.len()
    }

    fn spec(&self, role: Role) -> &Specification {
        match role {
            Role::Corr => self.corr.as_ref(),
            Role::Compl => self.compl.as_ref(),
        }
        .unwrap_or_else(|| panic!("no {role} specification"))
    }

    /// Is every instance of `atom` in the `role` specification?
    ///
    /// Ground atoms are decided by membership. For a non-ground atom the
    /// machine says yes only when the atom is an instance of an answer the
    /// specification program computes for it, and no when a bounded ground
    /// instance is a non-member. Anything else goes to the human channel.
    /// `Unknown` means the channel is closed.
    pub fn judge(&mut self, role: Role, atom: &Term, context: &str) -> Result<Verdict, Awaiting> {
        let key = (role, QuestionKind::Holds, canonical(&[atom]));
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let machine = self.machine_holds(role, atom);
        self.settle(key, role, QuestionKind::Holds, atom, &[], machine, context)
    }

    fn machine_holds(&self, role: Role, atom: &Term) -> Verdict {
        let spec = self.spec(role);
        if atom.is_ground() {
            return spec.holds(atom);
        }
        if spec.general_answers(atom, 64).iter().any(|g| is_instance_of(atom, g)) {
            Verdict::Yes
        } else if ground_instances(spec, atom, None)
            .iter()
            .any(|g| spec.holds(g) == Verdict::No)
        {
            Verdict::No
        } else {
            // every bounded instance may hold, but that is no proof for all
            Verdict::Unknown
        }
    }

    /// Is `atom`, with complete answer set `answers`, an incompleteness
    /// symptom? `Ok(Some(w))` carries a ground witness when the machine found
    /// one.
    pub fn missing(
        &mut self,
        atom: &Term,
        answers: &[Term],
        truncated: bool,
        context: &str,
    ) -> Result<Result<(Verdict, Option<Term>), TruncatedTree>, Awaiting> {
        let check = match is_incompleteness_symptom(self.spec(Role::Compl), atom, answers, truncated) {
            Ok(c) => c,
            Err(t) => return Ok(Err(t)),
        };
        let mut parts = vec![atom];
        parts.extend(answers.iter());
        let key = (Role::Compl, QuestionKind::Missing, canonical(&parts));
        let (machine, witness) = match check {
            MissingCheck::Symptom { witness } => (Verdict::Yes, Some(witness)),
            MissingCheck::NotSymptom => (Verdict::No, None),
            MissingCheck::Unknown => (Verdict::Unknown, None),
        };
        if let Some(v) = self.cache.get(&key) {
            return Ok(Ok((*v, witness)));
        }
        let v = self.settle(key, Role::Compl, QuestionKind::Missing, atom, answers, machine, context)?;
        Ok(Ok((v, witness)))
    }

    #[allow(clippy::too_many_arguments)]
    fn settle(
        &mut self,
        key: (Role, QuestionKind, String),
        role: Role,
        kind: QuestionKind,
        atom: &Term,
        answers: &[Term],
        machine: Verdict,
        context: &str,
    ) -> Result<Verdict, Awaiting> {
        let (value, source) = if machine != Verdict::Unknown {
            (machine, Source::Machine)
        } else {
            let q = Question {
                seq: self.human_seq + 1,
                role,
                kind,
                atom: atom.clone(),
                answers: answers.to_vec(),
                context: context.to_string(),
            };
            match self.channel.ask(&q) {
                Ok(v) => {
                    self.human_seq += 1;
                    self.journal.push(JournalEntry {
                        seq: q.seq,
                        role,
                        kind,
                        atom: atom.to_string(),
                        verdict: v,
                        timestamp_ms: now_ms(),
                    });
                    (v, Source::Human)
                }
                Err(ChannelError::Closed) => (Verdict::Unknown, Source::Human),
                Err(ChannelError::Awaiting) => return Err(Awaiting(q)),
            }
        };
        self.cache.insert(key, value);
        self.log.push(OracleVerdict { role, kind, atom: atom.clone(), value, source });
        Ok(value)
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
