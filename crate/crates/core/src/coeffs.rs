//! Scalar coefficients of the pumped optomechanical propagator
//!
//! U₀(t) = e^{δ+|β|²/2} e^{α₁n} e^{α₂N} e^{(α₃+|α₄|²/2)n²} D_b(α₄n) D_a(β).
//!
//! α₁…α₄ and β are closed forms; δ is a quadrature of β·γ̇ with γ = −β*.
//! E(t) and F(t) measure the size of the terms dropped when the pump is
//! moved into the interaction picture; they are diagnostics only.

use alloc::vec::Vec;

use crate::math;
use crate::model::{SystemParams, TimeGrid};
use crate::C64;

/// Below this |ω_c − ω_L| (in units of ω_c) the resonant limit of β is used.
pub const RESONANCE_THRESHOLD: f64 = 1e-8;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptoCoeffs {
    pub t: f64,
    pub alpha1: C64,
    pub alpha2: C64,
    pub alpha3: C64,
    pub alpha4: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCoeffs {
    pub t: f64,
    pub beta: C64,
    pub delta: C64,
}

impl DriveCoeffs {
    /// Re δ + |β|²/2; zero for an exactly unitary U_I⁽⁰⁾.
    pub fn unitarity_defect(&self) -> f64 {
        self.delta.re + 0.5 * self.beta.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfFactors {
    pub t: f64,
    pub e_factor: f64,
    pub f_factor: f64,
}

/// α₁…α₄ of the exact optomechanical propagator.
pub fn opto_coeffs(p: &SystemParams, t: f64) -> OptoCoeffs {
    let r = p.coupling_ratio();
    let wt = p.omega_m * t;
    OptoCoeffs {
        t,
        alpha1: C64::new(0.0, -p.omega_c * t),
        alpha2: C64::new(0.0, -wt),
        alpha3: -r * r * (C64::new(0.0, -wt) + (C64::new(1.0, 0.0) - math::cis(-p.omega_m, t))),
        alpha4: alpha4(p, t),
    }
}

/// α₄(t) = −(G/ω_m)(1 − e^{iω_m t}).
pub fn alpha4(p: &SystemParams, t: f64) -> C64 {
    -p.coupling_ratio() * (C64::new(1.0, 0.0) - math::cis(p.omega_m, t))
}

/// (e^{iωt} − 1)/ω, continued to i·t − ωt²/2 for |ω| below the threshold.
fn phase_ramp(omega: f64, t: f64, threshold: f64) -> C64 {
    if math::abs(omega) < threshold {
        return C64::new(-0.5 * omega * t * t, t);
    }
    let s = math::sin(0.5 * omega * t);
    C64::new(-2.0 * s * s, math::sin(omega * t)) / omega
}

/// β(t), the exact antiderivative of β̇ = −iΩ cos(ω_L t) e^{iω_c t}.
pub fn drive_beta(p: &SystemParams, t: f64) -> C64 {
    let sum = p.omega_c + p.omega_l;
    let diff = p.omega_c - p.omega_l;
    -0.5 * p.pump_amp
        * (phase_ramp(sum, t, 0.0) + phase_ramp(diff, t, RESONANCE_THRESHOLD * p.omega_c))
}

/// β̇(t) = −iΩ cos(ω_L t) e^{iω_c t}.
pub fn drive_beta_dot(p: &SystemParams, t: f64) -> C64 {
    -I * p.pump_amp * math::cos(p.omega_l * t) * math::cis(p.omega_c, t)
}

/// γ̇(t) = −iΩ cos(ω_L t) e^{−iω_c t} = −β̇*.
pub fn drive_gamma_dot(p: &SystemParams, t: f64) -> C64 {
    -I * p.pump_amp * math::cos(p.omega_l * t) * math::cis(-p.omega_c, t)
}

// 5-point Gauss–Legendre on [−1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Widest quadrature panel, in units of the fastest drive period / 2π.
const PANEL_PHASE: f64 = 0.05;

fn integrate_panel(p: &SystemParams, a: f64, b: f64) -> C64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_NODES
        .iter()
        .zip(GL_WEIGHTS.iter())
        .map(|(&x, &w)| {
            let s = mid + half * x;
            w * drive_beta(p, s) * drive_gamma_dot(p, s)
        })
        .sum::<C64>()
        * half
}

/// δ on every grid sample, from composite Gauss–Legendre quadrature of
/// δ̇ = β·γ̇.
pub fn drive_delta(p: &SystemParams, grid: &TimeGrid) -> Vec<C64> {
    let times = grid.times();
    let fastest = p.omega_c + p.omega_l;
    let max_panel = PANEL_PHASE / fastest;
    let mut out = Vec::with_capacity(times.len());
    let mut acc = C64::default();
    let mut prev = 0.0;
    for &t in &times {
        let span = t - prev;
        if span > 0.0 && p.pump_amp != 0.0 {
            let panels = math::ceil(span / max_panel).max(1.0) as usize;
            let h = span / panels as f64;
            for k in 0..panels {
                let a = prev + h * k as f64;
                let b = if k + 1 == panels { t } else { a + h };
                acc += integrate_panel(p, a, b);
            }
        }
        out.push(acc);
        prev = t;
    }
    out
}

/// β and δ on every grid sample.
pub fn drive_coeffs(p: &SystemParams, grid: &TimeGrid) -> Vec<DriveCoeffs> {
    grid.times()
        .into_iter()
        .zip(drive_delta(p, grid))
        .map(|(t, delta)| DriveCoeffs {
            t,
            beta: drive_beta(p, t),
            delta,
        })
        .collect()
}

/// E(t) = (G/ω_m)²(ω_m t − sin ω_m t) and F(t) = 2(G/ω_m) sin(ω_m t/2).
pub fn ef_factors(p: &SystemParams, t: f64) -> EfFactors {
    let r = p.coupling_ratio();
    let wt = p.omega_m * t;
    EfFactors {
        t,
        e_factor: r * r * (wt - math::sin(wt)),
        f_factor: 2.0 * r * math::sin(0.5 * wt),
    }
}
