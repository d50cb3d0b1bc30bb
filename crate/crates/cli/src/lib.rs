//! Library side of the `qprob` command: scenario loading, suite execution
//! and one-shot evaluations.

pub mod commands;
pub mod error;
pub mod scenario;

pub use commands::{eval, render_structured, render_text, verify, Format, VerifyOptions};
pub use error::CliError;
pub use scenario::{Scenario, SuiteSection};
