//! Numerics for logarithmic capacity, relative extremal and Green functions,
//! log-Orlicz Bergman spaces, a Hartogs counterexample family, and the
//! step-count recursion behind triple-log Bergman distance bounds.
//!
//! Everything is planar or reduced to planar fibers. Results are plain data
//! and safe to share across threads.

pub mod capacity;
pub mod chain;
pub mod envelopes;
pub mod error;
pub mod geometry;
pub mod orlicz_bergman;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
