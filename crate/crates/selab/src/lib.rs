//! Scenario runner for `selab-core`: JSON scenarios in, JSON and CSV
//! reports out.
//!
//! ```no_run
//! use selab::{run_file, RunOptions};
//!
//! let out = run_file("scenarios/integral-flat-r3-dx1.json".as_ref(), &RunOptions::default()).unwrap();
//! std::process::exit(out.rendered.exit_code().into());
//! ```

// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod output;
pub mod profile;
pub mod report;
pub mod run;
pub mod scenario;
pub mod schema;

pub use error::RunError;
pub use exec::RayonExecutor;
pub use run::{evaluate, run_file, run_scenario, Outcome, Rendered, RunOptions};
pub use scenario::{Kind, Scenario};
