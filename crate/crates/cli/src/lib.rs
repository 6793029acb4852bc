//! Library surface of the command-line driver: the program file schema and
//! the subcommand implementations.

pub mod commands;
pub mod file;

pub use commands::{cmd_beta, cmd_check_local, cmd_dag, cmd_messages, cmd_simulate, DagFormat};
pub use file::{build_program, load_program, load_values, CliError, ProgramFile};
