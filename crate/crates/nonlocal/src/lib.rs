//! Parameter scans over the `nonlocal-core` models, with TOML scan files and
//! CSV or JSON output.
//!
//! A [`ScanSpec`] names a subcommand, a grid of parameter values and a few
//! options. [`run_scan`] evaluates one row per grid point; each row holds
//! the parameter values, the computed outputs and an `error` cell that is
//! empty unless that row failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod kernels;
pub mod scan;
pub mod spec;

pub use scan::{run_scan, write_csv, write_json, write_table, ScanError, Table};
pub use spec::{load_config, Format, Grid, OptionValue, ScanSpec, SpecError, Subcommand};
