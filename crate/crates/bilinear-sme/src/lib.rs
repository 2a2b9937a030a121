//! Set-membership identification of discrete-time bilinear systems under
//! bounded noise.
//!
//! Given a single trajectory of `x⁺ = A x + Σ_i u[i] B_i x + w` with
//! `‖w‖_∞ ≤ w_max`, the feasible parameter set — every `[A  B_1 … B_m]`
//! consistent with the data and the noise bound — is an intersection of
//! halfspaces, one slab per sample and output row. This crate builds that
//! set, certifies its diameter with LP-based sandwich bounds, compares the
//! result against an ordinary-least-squares baseline with a self-normalized
//! confidence region, and evaluates how many samples the contraction
//! guarantee needs for a target diameter and confidence.
//!
//! Modules:
//! - [`tensor`]: dense matrices, Kronecker products, vectorization,
//!   spectral-radius estimation.
//! - [`lp`]: dense two-phase simplex over halfspace-described polytopes.
//! - [`model`]: the bilinear system, regressors, structured generation.
//! - [`stochastic`]: seeded split-stream RNG and bounded samplers.
//! - [`sme`]: feasible sets, membership, Chebyshev centers, diameters.
//! - [`ols`]: the least-squares baseline and its confidence diameter.
//! - [`complexity`]: growth certificates, excitation constants, covering
//!   numbers, and the minimal-sample-count evaluator.
//! - [`experiment`]: seeded sweeps and reports behind the CLI.
//!
//! Runnable walkthroughs for each capability live in `examples/`; the
//! `bilinear-sme` binary exposes the same flows as subcommands.

// Dense kernels index into several rows of one buffer at a time; explicit
// index loops are the clearer form there.
#![allow(clippy::needless_range_loop)]

pub mod complexity;
pub mod error;
pub mod experiment;
pub mod lp;
pub mod model;
pub mod ols;
pub mod sme;
pub mod stochastic;
pub mod tensor;
pub mod tol;

pub use error::{Error, Result};
