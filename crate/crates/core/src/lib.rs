//! Exact-arithmetic toolkit for interval exchange transformations (IETs).
//!
//! The crate provides:
//! - exact scalars over Q and the cubic field Q(a), a^3 + a^2 + a = 1 ([`scalar`]);
//! - IETs in canonical form with exact group operations ([`iet`]);
//! - the obstruction point sets X_q, Y_q, Z_q, the gap alpha_q and
//!   epsilon-neighborhood machinery ([`neighborhoods`]);
//! - admissibility, drifting directions via exact Fourier-Motzkin
//!   feasibility, and drift powers ([`drift`]);
//! - free words on two letters and certification of nontrivial relations
//!   between a fixed IET and perturbed rational IETs ([`word`], [`relation`]);
//! - q-rational approximation and the Arnoux-Yoccoz sweep ([`rational`]);
//! - affine IETs and a ping-pong freeness certifier ([`aiet`]).

pub mod aiet;
pub mod drift;
pub mod error;
pub mod iet;
pub mod neighborhoods;
pub mod rational;
pub mod relation;
pub mod scalar;
pub mod word;

pub use error::{Error, Result};
pub use iet::{Iet, Permutation};
pub use neighborhoods::{IntervalSet, PointSet};
pub use scalar::Scalar;
