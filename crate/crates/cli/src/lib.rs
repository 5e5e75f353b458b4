//! File formats, certificates and subcommands behind the `rewlab` binary.

pub mod certificate;
pub mod commands;
pub mod files;
