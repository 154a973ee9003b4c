//! Library side of the `fricke` command-line tool: command implementations,
//! the check report type, and the built-in verification suite.

pub mod commands;
pub mod report;
pub mod verify;

pub use commands::{run, Cli, OutputFormat};
pub use report::{Check, Report};
pub use verify::{verify_reference_computations, Expectations};
