//! Atom-dressing and per-ladder coefficient systems.
//!
//! The atom part of the interaction-picture propagator is
//! `U₁ = e^{α_z σ_z} e^{α₊ σ₊} e^{α₋ σ₋}` and, on each excitation ladder
//! `{|n,e⟩, |n+1,g⟩}` with `M = n+1`, the field part is
//! `U₂ = e^{ε₁ c†} e^{ε₂ c} e^{ε₃ σ_z}`.
//!
//! The Wei–Norman equations for `U₁` follow from
//! `i U̇₁ = [(ω_a/2)σ_z + λ(β e^{−iω_c t} σ₊ + h.c.)] U₁`:
//!
//! ```text
//! α̇_z = −iω_a/2 + iλ β* e^{2α_z + iω_c t} α₊
//! α̇₊  = −iλ (β e^{−2α_z − iω_c t} + β* α₊² e^{2α_z + iω_c t})
//! α̇₋  = −iλ β* e^{2α_z + iω_c t}
//! ```
//!
//! The free rotation is split off as `α_z = ζ − iω_a t/2` so only slowly
//! varying phases `e^{±iΔt}` (Δ = ω_a − ω_c) enter the integrand.
//!
//! The ladder generator is `λ√M (K c + K* c†)` with `K = e^{−iω_c t − 2α_z}`.
//! Using `K*` instead of `1/K` for the `c†` coefficient keeps it Hermitian;
//! the two differ only by `|e^{2α_z}|² − 1 = O(|α₋|²)`, which is below the
//! order already dropped when conjugating by `U₁`. The ε equations are
//!
//! ```text
//! ε̇₁ = −iλ√M (K* − K ε₁²)
//! ε̇₂ = −iλ√M K (1 + 2ε₁ε₂)
//! ε̇₃ = −iλ√M K ε₁
//! ```
//!
//! `ε₁ = U₂[1][0] / U₂[0][0]` diverges whenever the upper-left entry passes
//! through zero (at λt = π/2 for the resonant vacuum Rabi problem, say). Each
//! ladder therefore also integrates the 2×2 propagator directly; at samples
//! where the factorization blew up the direct matrix is used instead, and
//! the ε system is restarted from it once it becomes regular again.

use alloc::vec::Vec;

use crate::coeffs::drive_beta;
use crate::error::{Error, Result};
use crate::math;
use crate::matrix::TwoByTwo;
use crate::model::{SystemParams, TimeGrid};
use crate::ode::{integrate, integrate_partial, Method, OdeStats, OdeSystem};
use crate::C64;

/// Tolerance (per unit time) for every dressing solve.
pub const DRESSING_TOL: f64 = 1e-11;

/// |ε₁|, |ε₂| or |α₊| beyond this counts as a factorization singularity.
pub const SINGULAR_LIMIT: f64 = 1e3;

/// The ε system is restarted once |U₂[0][0]| climbs back above this.
const RESTART_LEVEL: f64 = 1e-2;

const I: C64 = C64::new(0.0, 1.0);

fn method() -> Method {
    Method::Rk45Adaptive { tol: DRESSING_TOL }
}

/// `e^{2ζ − iΔt}`, which equals `e^{2α_z + iω_c t}`.
#[inline]
fn dressing_phase(p: &SystemParams, t: f64, zeta: C64) -> C64 {
    math::cexp(2.0 * zeta) * math::cis(-p.detuning(), t)
}

/// Right-hand side of the (ζ, α₊, α₋) system.
#[inline]
fn atom_rhs(p: &SystemParams, t: f64, y: &[C64], dy: &mut [C64]) -> C64 {
    let (zeta, ap) = (y[0], y[1]);
    let b = drive_beta(p, t);
    let w = dressing_phase(p, t, zeta);
    let lam = p.lambda_jc;
    let bw = b.conj() * w;
    dy[0] = I * lam * bw * ap;
    dy[1] = -I * lam * (b / w + bw * ap * ap);
    dy[2] = -I * lam * bw;
    w
}

struct AtomSystem<'a> {
    p: &'a SystemParams,
}

impl OdeSystem for AtomSystem<'_> {
    fn dim(&self) -> usize {
        3
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        atom_rhs(self.p, t, y, dy);
    }

    fn check(&self, t: f64, y: &[C64]) -> Result<()> {
        if y[1].norm() > SINGULAR_LIMIT {
            return Err(Error::FactorizationSingularity { t });
        }
        Ok(())
    }
}

/// Sampled U₁ coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomDressing {
    pub times: Vec<f64>,
    omega_a: f64,
    /// α_z with the free rotation −iω_a t/2 removed.
    pub zeta: Vec<C64>,
    pub alpha_p: Vec<C64>,
    pub alpha_m: Vec<C64>,
    pub stats: OdeStats,
}

impl AtomDressing {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn alpha_z(&self, k: usize) -> C64 {
        self.zeta[k] - I * (0.5 * self.omega_a * self.times[k])
    }

    /// `e^{α_z}` with the large free phase reduced first.
    pub fn exp_alpha_z(&self, k: usize) -> C64 {
        math::cexp(self.zeta[k]) * math::cis(-0.5 * self.omega_a, self.times[k])
    }
}

pub fn solve_atom_dressing(p: &SystemParams, grid: &TimeGrid) -> Result<AtomDressing> {
    let times = grid.times();
    let sol = integrate(&AtomSystem { p }, &[C64::default(); 3], &times, method())?;
    let n = sol.len();
    let (mut zeta, mut alpha_p, mut alpha_m) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    for k in 0..n {
        let y = sol.sample(k);
        zeta.push(y[0]);
        alpha_p.push(y[1]);
        alpha_m.push(y[2]);
    }
    Ok(AtomDressing {
        times: sol.times.clone(),
        omega_a: p.omega_a,
        zeta,
        alpha_p,
        alpha_m,
        stats: sol.stats,
    })
}

/// `e^{α_z σ_z} e^{α₊ σ₊} e^{α₋ σ₋}` in the (e, g) basis.
pub fn u1_matrix(d: &AtomDressing, k: usize) -> TwoByTwo {
    let ez = d.exp_alpha_z(k);
    let (ap, am) = (d.alpha_p[k], d.alpha_m[k]);
    let one = C64::new(1.0, 0.0);
    let inv = one / ez;
    TwoByTwo::new(ez * (one + ap * am), ez * ap, inv * am, inv)
}

/// `e^{ε₁ c†} e^{ε₂ c} e^{ε₃ σ_z}` in the (|n,e⟩, |n+1,g⟩) basis.
pub fn eps_matrix(eps: [C64; 3]) -> TwoByTwo {
    let [e1, e2, e3] = eps;
    let one = C64::new(1.0, 0.0);
    let up = math::cexp(e3);
    let down = one / up;
    TwoByTwo::new(up, e2 * down, e1 * up, (one + e1 * e2) * down)
}

/// Layout: ζ, α₊, α₋, ε₁, ε₂, ε₃, then U₂ row-major.
struct LadderSystem<'a> {
    p: &'a SystemParams,
    /// −iλ√M
    s: C64,
    with_eps: bool,
}

impl OdeSystem for LadderSystem<'_> {
    fn dim(&self) -> usize {
        10
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let w = atom_rhs(self.p, t, &y[..3], &mut dy[..3]);
        // K = 1/w; the Hermitian partner is its conjugate.
        let k = C64::new(1.0, 0.0) / w;
        let kc = k.conj();
        let s = self.s;
        if self.with_eps {
            let (e1, e2) = (y[3], y[4]);
            dy[3] = s * (kc - k * e1 * e1);
            dy[4] = s * k * (1.0 + 2.0 * e1 * e2);
            dy[5] = s * k * e1;
        } else {
            dy[3..6].fill(C64::default());
        }
        dy[6] = s * k * y[8];
        dy[7] = s * k * y[9];
        dy[8] = s * kc * y[6];
        dy[9] = s * kc * y[7];
    }

    fn check(&self, t: f64, y: &[C64]) -> Result<()> {
        let bad = y[1].norm() > SINGULAR_LIMIT
            || (self.with_eps && (y[3].norm() > SINGULAR_LIMIT || y[4].norm() > SINGULAR_LIMIT));
        if bad {
            Err(Error::FactorizationSingularity { t })
        } else {
            Ok(())
        }
    }
}

/// ε coefficients read off a direct ladder propagator (which has unit
/// determinant). `ε₃` takes the branch closest to `near`.
fn eps_from_direct(d: &TwoByTwo, near: C64) -> [C64; 3] {
    let u00 = d.get(0, 0);
    let e3 = u00.ln();
    let turns = libm::round((near.im - e3.im) / core::f64::consts::TAU);
    let e3 = e3 + I * (turns * core::f64::consts::TAU);
    [d.get(1, 0) / u00, d.get(0, 1) * u00, e3]
}

/// Sampled U₂ coefficients of one ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoeffs {
    /// Excitation number `M = n + 1`.
    pub m: usize,
    pub times: Vec<f64>,
    pub eps: Vec<[C64; 3]>,
    /// Directly integrated 2×2 propagator.
    pub direct: Vec<TwoByTwo>,
    /// True at samples where the factorized form was singular; there `eps`
    /// is read back from `direct` and `u2_matrix` returns `direct`.
    pub from_direct: Vec<bool>,
    pub stats: OdeStats,
}

impl LadderCoeffs {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Time of the first singular sample, if any.
    pub fn singular_from(&self) -> Option<f64> {
        self.from_direct
            .iter()
            .position(|&b| b)
            .map(|k| self.times[k])
    }

    pub fn singular_samples(&self) -> usize {
        self.from_direct.iter().filter(|&&b| b).count()
    }
}

fn add_stats(acc: &mut OdeStats, s: &OdeStats) {
    acc.steps += s.steps;
    acc.rejected += s.rejected;
    acc.rhs_evals += s.rhs_evals;
    acc.max_error_estimate = acc.max_error_estimate.max(s.max_error_estimate);
}

fn ladder_start() -> [C64; 10] {
    let mut y = [C64::default(); 10];
    y[6] = C64::new(1.0, 0.0);
    y[9] = C64::new(1.0, 0.0);
    y
}

pub fn solve_ladder(p: &SystemParams, m: usize, grid: &TimeGrid) -> Result<LadderCoeffs> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "ladder index must be at least 1".into(),
        ));
    }
    let times = grid.times();
    let s = -I * (p.lambda_jc * math::sqrt(m as f64));
    let mut out = LadderCoeffs {
        m,
        times: times.clone(),
        eps: Vec::with_capacity(times.len()),
        direct: Vec::with_capacity(times.len()),
        from_direct: Vec::with_capacity(times.len()),
        stats: OdeStats::default(),
    };
    let mut y = ladder_start();
    let mut k = 0;
    loop {
        // Regular stretch: everything integrated together.
        let sys = LadderSystem {
            p,
            s,
            with_eps: true,
        };
        let (sol, failure) = integrate_partial(&sys, &y, &times[k..], method())?;
        add_stats(&mut out.stats, &sol.stats);
        let first = if k == 0 { 0 } else { 1 };
        for j in first..sol.len() {
            let v = sol.sample(j);
            out.eps.push([v[3], v[4], v[5]]);
            out.direct.push(TwoByTwo::from_slice(&v[6..10]));
            out.from_direct.push(false);
        }
        k += sol.len() - 1;
        y.copy_from_slice(sol.last().expect("at least the start sample"));
        match failure {
            None => break,
            Some(Error::FactorizationSingularity { t }) => {
                log::debug!(
                    "ladder M={m}: factorization singular near t={t}, using direct propagator"
                );
            }
            Some(e) => return Err(e),
        }

        // Singular stretch: direct propagator only, one sample at a time.
        let sys = LadderSystem {
            p,
            s,
            with_eps: false,
        };
        let near = y[5];
        loop {
            if k + 1 >= times.len() {
                break;
            }
            let sol = integrate(&sys, &y, &times[k..k + 2], method())?;
            add_stats(&mut out.stats, &sol.stats);
            k += 1;
            y.copy_from_slice(sol.sample(1));
            let d = TwoByTwo::from_slice(&y[6..10]);
            let eps = eps_from_direct(&d, near);
            let regular = d.get(0, 0).norm() >= RESTART_LEVEL;
            out.eps.push(eps);
            out.direct.push(d);
            out.from_direct.push(!regular);
            if regular {
                y[3..6].copy_from_slice(&eps);
                break;
            }
        }
        if k + 1 >= times.len() {
            break;
        }
    }
    debug_assert_eq!(out.eps.len(), times.len());
    Ok(out)
}

/// Factorized U₂, or the direct matrix at samples flagged singular.
pub fn u2_matrix(l: &LadderCoeffs, k: usize) -> TwoByTwo {
    if l.from_direct[k] {
        l.direct[k]
    } else {
        eps_matrix(l.eps[k])
    }
}

/// Directly integrated ladder propagator on the grid.
pub fn direct_ladder_propagator(
    p: &SystemParams,
    m: usize,
    grid: &TimeGrid,
) -> Result<Vec<TwoByTwo>> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "ladder index must be at least 1".into(),
        ));
    }
    let sys = LadderSystem {
        p,
        s: -I * (p.lambda_jc * math::sqrt(m as f64)),
        with_eps: false,
    };
    let sol = integrate(&sys, &ladder_start(), &grid.times(), method())?;
    Ok((0..sol.len())
        .map(|k| TwoByTwo::from_slice(&sol.sample(k)[6..10]))
        .collect())
}

/// V = e^{iω_a t σ_z/2} U₁ obeys i V̇ = λ(β e^{iΔt} σ₊ + h.c.) V.
struct DirectAtom<'a> {
    p: &'a SystemParams,
}

impl OdeSystem for DirectAtom<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]) {
        let f = drive_beta(self.p, t) * math::cis(self.p.detuning(), t);
        let s = -I * self.p.lambda_jc;
        dy[0] = s * f * y[2];
        dy[1] = s * f * y[3];
        dy[2] = s * f.conj() * y[0];
        dy[3] = s * f.conj() * y[1];
    }
}

/// Directly integrated atom propagator in the (e, g) basis.
pub fn direct_atom_propagator(p: &SystemParams, grid: &TimeGrid) -> Result<Vec<TwoByTwo>> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::default();
    let sol = integrate(
        &DirectAtom { p },
        &[one, zero, zero, one],
        &grid.times(),
        method(),
    )?;
    Ok((0..sol.len())
        .map(|k| {
            let t = sol.times[k];
            let v = TwoByTwo::from_slice(sol.sample(k));
            let rot = TwoByTwo::diagonal(
                math::cis(-0.5 * p.omega_a, t),
                math::cis(0.5 * p.omega_a, t),
            );
            rot.mul(&v)
        })
        .collect())
}
