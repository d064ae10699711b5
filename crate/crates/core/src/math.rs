//! Thin wrappers over `libm` so the crate stays `no_std`.

use crate::C64;
use core::f64::consts::TAU;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Reduces a phase into [0, 2π).
#[inline]
pub(crate) fn wrap_phase(x: f64) -> f64 {
    let r = x % TAU;
    if r < 0.0 {
        r + TAU
    } else {
        r
    }
}

/// `e^{i·omega·t}` with the phase reduced into [0, 2π) first.
#[inline]
pub(crate) fn cis(omega: f64, t: f64) -> C64 {
    let phase = wrap_phase(omega * t);
    C64::new(cos(phase), sin(phase))
}

/// `e^{z}` for complex `z`.
#[inline]
pub(crate) fn cexp(z: C64) -> C64 {
    let r = exp(z.re);
    let phase = wrap_phase(z.im);
    C64::new(r * cos(phase), r * sin(phase))
}
