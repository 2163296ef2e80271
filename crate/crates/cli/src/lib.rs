//! Library side of the `pluriharm` command-line tool: mapping-spec file
//! handling, the report envelope and the command handlers.

pub mod args;
pub mod commands;
pub mod report;
pub mod spec_file;
