//! Gravity-induced optical channel between two optomechanical systems.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod channel;
pub mod cli;
pub mod config;
pub mod criteria;
pub mod gaussian;
pub mod model;
pub mod oracle;
pub mod parallel;
pub mod protocols;
pub mod sweep;
pub mod table;

pub use error::{Error, Result};
