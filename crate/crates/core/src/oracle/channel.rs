//! Human channels.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Question, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("no human is available to answer")]
    Closed,
    /// The question is recorded and the caller should suspend until it is
    /// answered.
    #[error("waiting for an answer")]
    Awaiting,
}

pub trait HumanChannel {
    fn ask(&mut self, q: &Question) -> Result<Verdict, ChannelError>;
}

/// Never answers.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClosedChannel;

impl HumanChannel for ClosedChannel {
    fn ask(&mut self, _q: &Question) -> Result<Verdict, ChannelError> {
        Err(ChannelError::Closed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnMissing {
    Close,
    Await,
}

/// Answers from a script keyed by question number.
#[derive(Clone, Debug)]
pub struct ScriptedChannel {
    answers: BTreeMap<u64, Verdict>,
    on_missing: OnMissing,
}

impl ScriptedChannel {
    pub fn new(answers: BTreeMap<u64, Verdict>, on_missing: OnMissing) -> Self {
        ScriptedChannel { answers, on_missing }
    }
}

impl HumanChannel for ScriptedChannel {
    fn ask(&mut self, q: &Question) -> Result<Verdict, ChannelError> {
        match self.answers.get(&q.seq) {
            Some(v) => Ok(*v),
            None => Err(match self.on_missing {
                OnMissing::Close => ChannelError::Closed,
                OnMissing::Await => ChannelError::Awaiting,
            }),
        }
    }
}
