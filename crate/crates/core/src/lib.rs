//! Numerical and symbolic certification of the constructive lemmas behind
//! polyharmonic neck analysis on annuli.
//!
//! The crate is organized around the objects those lemmas talk about:
//!
//! * [`operator_poly`] — the constant-coefficient polynomial `P_m(∂_t, Δ_S)`
//!   with `Δ^m u = e^{-2mt} P_m u` in cylinder coordinates, built by exact
//!   integer recursion and checked against an independent one-step oracle.
//! * [`sphere`] — the Killing-field basis of `S^{2m-1}` and the
//!   radial/tangential reproducing decomposition.
//! * [`modes`] — spherical eigendata, indicial exponents and weighted annulus
//!   energies of mode-coefficient fields.
//! * [`three_circle`] — positive-definiteness certificates for the
//!   three-circle inequality, per mode, plus the uniform gap search.
//! * [`gram`] — the exponential Gram pair `(M, M̄)`, its exact Cauchy
//!   determinant and the weak-orthogonality lower bound.
//! * [`jets`] — a commutative jet algebra used to verify the
//!   integration-by-parts identities and the radial Pohozaev form exactly.
//! * [`decay`] — certificates for the discrete exponential-decay lemma with
//!   the explicit proof constants.

pub mod decay;
pub mod error;
pub mod gram;
pub mod jacobi;
pub mod jets;
pub mod modes;
pub mod operator_poly;
pub mod sphere;
pub mod three_circle;

pub use error::{Error, Result};
