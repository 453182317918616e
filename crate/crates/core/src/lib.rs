//! Pure Prolog with a four-port box tracer and declarative diagnosis.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`]: terms, unification with occur-check, program syntax.
//! * [`engine`]: LD-resolution with a recorded LD-tree, and a bounded
//!   bottom-up model for cross-checking.
//! * [`boxtrace`]: Call/Exit/Redo/Fail events and the views derived from a
//!   computation (subderivations, success and search traces, proof trees).
//! * [`oracle`]: approximate specifications and the questions asked during
//!   diagnosis.
//! * [`diagnoser`]: incorrectness and incompleteness diagnosis.

pub mod boxtrace;
pub mod diagnoser;
pub mod engine;
pub mod kernel;
pub mod oracle;
