//! Box events and the views of a computation derived from them.

mod event;
mod reconstruct;
mod search;
mod subderivation;
mod wellformed;

pub use event::{parse_event_line, parse_events, render_events, sicstus_view, BoxEvent, MalformedTrace, Port};
pub use reconstruct::{reconstruct_from_events, reconstruct_success_trace};
pub use search::{all_answers_for, search_trace_for, search_trace_of, SearchEntry, TopLevelTrace};
pub use subderivation::{
    answer_exit, answer_views, exit_subderivation, proof_tree_for, subderivation_for, success_trace_at, success_trace_for, top_level_calls,
    ProofTree, Subderivation, SuccessTrace, TopLevelCall,
};
pub use wellformed::{check_events, events_wellformed, CheckMode, Violation};
