//! Numerical core for stress-energy tensors of bundle-valued forms, exhaustion
//! functions, monotonicity scans over sublevel sets, and extrinsic geometry of
//! parameterized immersions.
//!
//! `no_std` with `alloc`. Everything is evaluated on explicit coordinate charts.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments, clippy::type_complexity)]

extern crate alloc;

pub mod catalog;
pub mod error;
pub mod exhaustion;
pub mod fd;
pub mod forms;
pub mod linalg;
pub mod manifold;
pub mod math;
pub mod monotonicity;
pub mod quadrature;
pub mod submanifold;

pub use error::{Error, Result};
pub use linalg::Matrix;
