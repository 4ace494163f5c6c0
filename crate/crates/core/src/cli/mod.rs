//! Command-line orchestration over descriptors and the example catalog.

pub mod catalog;
pub mod descriptor;
pub mod run;

pub use descriptor::{parse_descriptor, Descriptor, ParseError, ParseErrorKind};
pub use run::{run, Command, ExitStatus, Outcome, RunConfig};
