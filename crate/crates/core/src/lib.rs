//! Capacity numerics for the correlated block-fading channel
//! `y = diag(h) x + w`, with `h ~ CN(0, R)` and `w ~ CN(0, I_N)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: log-Gamma, `Γ(0, a)`, and `g(a) = E[log(a + |z|²)]`.
//! - [`channel`]: correlation matrices, fading samples, conditional output laws.
//! - [`asymptotics`]: pre-log and the high-SNR capacity expansions.
//! - [`bounds`]: finite-SNR lower and duality upper bounds, the isotropic
//!   Gamma-radial output density, and a Monte-Carlo duality evaluator.
//! - [`montecarlo`]: stochastic oracles for the identities the bounds rest on.
//! - [`quad`]: adaptive quadrature, used as an independent oracle.
//! - [`stream`]: seeded counter-based random streams and the sharded
//!   Monte-Carlo driver.
//! - [`snr`]: dB conversion and SNR grid parsing.
//!
//! Every information quantity is in nats per channel use.

#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference tables keep the digits they were computed with.
#![cfg_attr(test, allow(clippy::excessive_precision, clippy::approx_constant))]

pub mod asymptotics;
pub mod bounds;
pub mod channel;
mod error;
pub mod montecarlo;
pub mod quad;
pub mod snr;
pub mod specfun;
pub mod stream;

pub use error::{Error, Result};
pub use num_complex::Complex64;
