//! Quadratic twists of automorphic L-functions: arithmetic of fundamental
//! discriminants, smoothed central values, the first nonvanishing twist,
//! double Dirichlet series coefficients and the functional-equation group.

pub mod arith;
pub mod central;
pub mod cli;
pub mod error;
pub mod fewalk;
pub mod lseries;
pub mod mds;
pub mod special;

pub use error::{Error, Result};

#[cfg(test)]
#[path = "../tests/common/oracles.rs"]
#[allow(dead_code)]
mod oracles;
