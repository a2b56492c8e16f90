//! Problem files, command dispatch and result formatting for the `qwx` tool.

pub mod commands;
pub mod document;
pub mod render;

pub use commands::{run_command, Command, ResultDocument, RunOptions, Status, INPUT_ERROR_EXIT};
pub use document::{load_problem, parse_problem, validate, InputError, Problem, ProblemDocument};
