//! Library side of the `tailbridge` command-line tool.

pub mod claims;
pub mod commands;
pub mod error;
