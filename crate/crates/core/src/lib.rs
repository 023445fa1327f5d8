//! Moment/cumulant calculus for second-order Wiener and Wigner chaos.
//!
//! The crate works entirely with the spectral coefficients of a second-chaos
//! random variable. From those it derives classical or free cumulants and
//! moments (exactly where the target laws allow it), evaluates the
//! characterization criteria and inequality ladders against the normal
//! product and tetilla target laws, samples classical chaos variables and
//! GUE proxies for the free side, and solves constrained moment-minimization
//! problems over coefficient sequences.

pub mod criteria;
pub mod error;
pub mod monte_carlo;
pub mod optimizer;
pub mod partitions;
pub mod spectral;
pub mod transforms;

pub use error::{Error, Result};
pub use spectral::{ChaosKind, CoefficientSequence, CumulantSequence, MomentSequence};
