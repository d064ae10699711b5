//! Time evolution of a laser-pumped optomechanical cavity that contains a
//! two-level atom.
//!
//! Two independent routes are provided:
//!
//! * [`evolution`]: the approximate product-of-exponentials propagator. The
//!   pumped optomechanical part is handled by closed-form coefficients
//!   ([`coeffs`]), the atom–field coupling by two small Wei–Norman systems
//!   ([`dressing`]) that are solved per excitation ladder.
//! * [`oracle`]: brute-force integration of the full Schrödinger equation in
//!   a truncated cavity ⊗ atom ⊗ mirror Fock space ([`fock`]).
//!
//! Both produce the same [`evolution::ObservableSeries`] kinds so they can be
//! compared sample by sample.
//!
//! Units: ħ = 1 and every frequency is measured in units of the cavity
//! frequency, which is fixed to 1. Times are in units of 1/ω_c.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
// Index loops mirror the component formulas; negated comparisons also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod coeffs;
pub mod dressing;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod matrix;
pub mod model;
pub mod ode;
pub mod oracle;

mod math;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
