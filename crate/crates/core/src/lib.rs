//! Cyclic foam topological field theories over exact rationals.
#![allow(clippy::type_complexity, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod evaluate;
pub mod foams;
pub mod frobenius;
pub mod graphs;
pub mod groupcover;
pub mod linalg;
pub mod rational;
pub mod report;
pub mod text;

pub use error::{Error, Result};
