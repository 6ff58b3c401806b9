//! Adaptive sparse FIR channel estimation with the mixed square/fourth
//! error criterion.
//!
//! The crate provides four layers:
//!
//! - [`filters`]: the LMS/F update rule, its zero-attracting (ZA) and
//!   reweighted zero-attracting (RZA) variants, and the fixed-step
//!   LMS-family baselines they are compared against.
//! - [`channel`]: sparse channel realizations, PN / Gaussian training
//!   signals, and the noisy linear observation model.
//! - [`theory`]: closed-form steady-state MSE predictions, the
//!   conditional step-size ratio β, the oracle bound, and the
//!   zero-attractor mean-bias and MSE-bound expressions.
//! - [`experiment`]: a seeded, paired Monte-Carlo harness producing
//!   averaged learning curves and parameter sweeps that are bitwise
//!   reproducible independent of thread count.

pub mod channel;
pub mod experiment;
pub mod filters;
pub mod taps;
pub mod theory;

pub use taps::TapVector;
