//! Classical stated SL_n-skein normal forms for marked 3-manifolds given by
//! group presentations: exact polynomial normal forms, Gröbner-backed
//! quotients, and numeric evaluation on SL_n(ℂ) representations.

pub mod combinatorics;
pub mod error;
pub mod polyring;

pub use error::{Error, Result};
pub mod groups;
pub mod ideals;
pub mod skein;
pub mod eval;
pub mod cli;
