//! Distributionally robust log-optimal (Kelly) portfolios over discrete
//! return scenarios.
//!
//! The worst case of the expected log-growth over a polyhedral ambiguity set
//! is dualized into a maximization, each `log(1 + K'x)` term is replaced by
//! the lower envelope of tangent lines, and the whole problem becomes one
//! linear program. Fixed weights can then be backtested with proportional
//! transaction costs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambiguity;
pub mod backtest;
pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod hyperplane;
pub mod lp;
pub mod output;
pub mod robust;
pub mod scenarios;
mod weights;

pub use error::{Error, Result};
pub use exec::Execution;
pub use weights::Weights;
