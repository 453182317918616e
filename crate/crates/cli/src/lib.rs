//! Command line front end and HTTP session service for boxdiag.

pub mod job;
pub mod json;
pub mod server;
