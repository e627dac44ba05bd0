//! Oracles, file formats and the command-line runner around `ridgeless_core`.

// NaN must fail these checks, so comparisons are written negated
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod io;
pub mod oracle;
pub mod sweep;
