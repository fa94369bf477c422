//! Numerical laboratory for the growth rate of positive solutions of
//! sublinear functional differential equations with finite memory and
//! Volterra equations with unbounded memory.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod expr;
pub mod measures;
pub mod nonlinearity;
pub mod quadrature;
pub mod report;
pub mod runner;
pub mod trend;

pub use error::{Error, Result};
pub use exec::Execution;
