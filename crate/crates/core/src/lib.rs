//! Exact small-n tools for depth-3 formula size and one-sided CNF
//! approximation: truth tables, CNF and OR-of-CNF formulas, exact CNF
//! minimization, the set-cover LP over CNF columns, prefix-free coding of
//! isolated solutions, explicit constructions and the hitting-set extremal
//! problem.

pub mod acceptance;
pub mod boolfn;
pub mod cnfmin;
pub mod coding;
pub mod constructions;
mod cover;
pub mod duality;
pub mod error;
pub mod extremal;
pub mod formula;
pub mod io;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
pub use ratlp::Rational;
