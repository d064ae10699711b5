//! Physical parameters, initial states, time grids and scenarios.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result, Violation};
use crate::fock::TruncationSpec;
use crate::math;
use crate::C64;

/// Ratio G/ω_m above which a scenario is rejected outright.
pub const MAX_COUPLING_RATIO: f64 = 0.5;
/// Ratio G/ω_m above which validation emits a warning.
pub const WARN_COUPLING_RATIO: f64 = 0.1;
/// Largest truncated tail mass accepted for an initial coherent state.
pub const MAX_TAIL_MASS: f64 = 1e-8;

/// Model frequencies and couplings, all in units of ω_c (ħ = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity frequency; the unit of every other frequency, always 1.
    pub omega_c: f64,
    /// Mechanical (mirror) frequency.
    pub omega_m: f64,
    /// Atomic transition frequency.
    pub omega_a: f64,
    /// Pump laser frequency.
    pub omega_l: f64,
    /// Optomechanical coupling G.
    pub g_om: f64,
    /// Atom–field coupling λ.
    pub lambda_jc: f64,
    /// Pump amplitude Ω.
    pub pump_amp: f64,
}

impl SystemParams {
    /// G/ω_m, the small parameter of the optomechanical approximation.
    pub fn coupling_ratio(&self) -> f64 {
        self.g_om / self.omega_m
    }

    /// Atom–cavity detuning ω_a − ω_c.
    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega_c
    }

    /// Mechanical period 2π/ω_m.
    pub fn mechanical_period(&self) -> f64 {
        core::f64::consts::TAU / self.omega_m
    }
}

/// Initial state of the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CavityInit {
    Fock(usize),
    Coherent(C64),
}

/// Atomic basis state. The discriminant is the atom index in the hybrid basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Atom {
    Excited = 0,
    Ground = 1,
}

impl Atom {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// |cavity⟩ ⊗ |atom⟩ ⊗ |Γ⟩ with the mirror always in a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub cavity: CavityInit,
    pub atom: Atom,
    /// Coherent amplitude Γ of the mechanical oscillator.
    pub mech: C64,
}

/// Uniform output sampling of `[0, t_end]`, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub n_samples: usize,
    /// Internal step of the fixed-step propagator.
    pub integrator_dt: f64,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_samples: usize, integrator_dt: f64) -> Self {
        Self {
            t_end,
            n_samples,
            integrator_dt,
        }
    }

    /// Time of sample `k`.
    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_end * k as f64 / (self.n_samples - 1) as f64
        }
    }

    pub fn spacing(&self) -> f64 {
        self.t_end / (self.n_samples - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub params: SystemParams,
    pub initial: InitialState,
    pub grid: TimeGrid,
    /// Fock cutoffs; filled in by [`validate_scenario`] when absent.
    pub cutoffs: Option<TruncationSpec>,
}

/// A scenario whose invariants have been checked and whose cutoffs are set.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedScenario {
    scenario: Scenario,
    trunc: TruncationSpec,
    warnings: Vec<String>,
}

impl ValidatedScenario {
    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn params(&self) -> &SystemParams {
        &self.scenario.params
    }

    pub fn initial(&self) -> &InitialState {
        &self.scenario.initial
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.scenario.grid
    }

    pub fn label(&self) -> &str {
        &self.scenario.label
    }

    pub fn trunc(&self) -> TruncationSpec {
        self.trunc
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn into_scenario(self) -> Scenario {
        self.scenario
    }
}

/// Fock amplitudes c_0 … c_{cutoff−1} of the coherent state |α⟩.
///
/// Uses the recurrence c_{n+1} = c_n·α/√(n+1) starting from e^{−|α|²/2}, so
/// no factorial is ever formed.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Result<Vec<C64>> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "coherent amplitude {alpha} is not finite"
        )));
    }
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be at least 1".to_string()));
    }
    let mut out = Vec::with_capacity(cutoff);
    let mut c = C64::new(math::exp(-0.5 * alpha.norm_sqr()), 0.0);
    for n in 0..cutoff {
        out.push(c);
        c = c * alpha / math::sqrt((n + 1) as f64);
    }
    Ok(out)
}

/// Probability mass of |α⟩ above the cutoff.
pub fn coherent_tail_mass(alpha: C64, cutoff: usize) -> Result<f64> {
    let kept: f64 = coherent_amplitudes(alpha, cutoff)?
        .iter()
        .map(|c| c.norm_sqr())
        .sum();
    Ok((1.0 - kept).max(0.0))
}

/// Cutoff with a ≥8σ Poisson margin: ⌈|α|² + 8|α| + 10⌉.
pub fn default_cutoff(amplitude: f64) -> usize {
    math::ceil(amplitude * amplitude + 8.0 * amplitude + 10.0) as usize
}

/// Default truncation for an initial state.
pub fn default_truncation(initial: &InitialState) -> TruncationSpec {
    let n_cav = match initial.cavity {
        CavityInit::Fock(n) => n + 10,
        CavityInit::Coherent(alpha) => default_cutoff(alpha.norm()),
    };
    TruncationSpec::new(n_cav, default_cutoff(initial.mech.norm()))
}

fn positive(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x.is_finite() && x > 0.0) {
        v.push(Violation {
            field,
            message: format!("must be finite and > 0, got {x}"),
        });
    }
}

fn nonnegative(v: &mut Vec<Violation>, field: &'static str, x: f64) {
    if !(x.is_finite() && x >= 0.0) {
        v.push(Violation {
            field,
            message: format!("must be finite and >= 0, got {x}"),
        });
    }
}

/// Checks every invariant of a scenario and fills in default cutoffs.
///
/// All violations are collected; the call is pure.
pub fn validate_scenario(s: &Scenario) -> Result<ValidatedScenario> {
    let mut v = Vec::new();
    let mut warnings = Vec::new();
    let p = &s.params;

    if s.label.trim().is_empty() {
        v.push(Violation {
            field: "label",
            message: "must not be empty".to_string(),
        });
    }

    if p.omega_c != 1.0 {
        v.push(Violation {
            field: "params.omega_c",
            message: format!("is the frequency unit and must be 1, got {}", p.omega_c),
        });
    }
    positive(&mut v, "params.omega_m", p.omega_m);
    positive(&mut v, "params.omega_a", p.omega_a);
    positive(&mut v, "params.omega_l", p.omega_l);
    nonnegative(&mut v, "params.g_om", p.g_om);
    nonnegative(&mut v, "params.lambda_jc", p.lambda_jc);
    nonnegative(&mut v, "params.pump_amp", p.pump_amp);
    if p.omega_m > 0.0 && p.g_om.is_finite() {
        let ratio = p.coupling_ratio();
        if ratio > MAX_COUPLING_RATIO {
            v.push(Violation {
                field: "params.g_om",
                message: format!("G/omega_m = {ratio} exceeds {MAX_COUPLING_RATIO}"),
            });
        } else if ratio > WARN_COUPLING_RATIO {
            let msg = format!(
                "G/omega_m = {ratio} is above {WARN_COUPLING_RATIO}; the product-form propagator may be inaccurate"
            );
            log::warn!("{}: {}", s.label, msg);
            warnings.push(msg);
        }
    }

    let init = &s.initial;
    let mut amplitudes_ok = true;
    if let CavityInit::Coherent(a) = init.cavity {
        if !(a.re.is_finite() && a.im.is_finite()) {
            amplitudes_ok = false;
            v.push(Violation {
                field: "initial.alpha",
                message: "must be finite".to_string(),
            });
        }
    }
    if !(init.mech.re.is_finite() && init.mech.im.is_finite()) {
        amplitudes_ok = false;
        v.push(Violation {
            field: "initial.gamma",
            message: "must be finite".to_string(),
        });
    }

    let g = &s.grid;
    positive(&mut v, "grid.t_end", g.t_end);
    if g.n_samples < 2 {
        v.push(Violation {
            field: "grid.n_samples",
            message: format!("must be at least 2, got {}", g.n_samples),
        });
    }
    positive(&mut v, "grid.integrator_dt", g.integrator_dt);
    if g.n_samples >= 1 && g.t_end > 0.0 && g.integrator_dt > g.t_end / g.n_samples as f64 {
        v.push(Violation {
            field: "grid.integrator_dt",
            message: format!(
                "must not exceed t_end/n_samples = {}",
                g.t_end / g.n_samples as f64
            ),
        });
    }

    let trunc = match s.cutoffs {
        Some(t) => t,
        None if amplitudes_ok => default_truncation(init),
        None => TruncationSpec::new(2, 2),
    };
    if let Err(msg) = trunc.check() {
        v.push(Violation {
            field: "cutoffs",
            message: msg,
        });
    }
    if amplitudes_ok {
        match init.cavity {
            CavityInit::Coherent(a) => {
                let tail = coherent_tail_mass(a, trunc.n_cav).unwrap_or(1.0);
                if tail > MAX_TAIL_MASS {
                    v.push(Violation {
                        field: "cutoffs.n_cav",
                        message: format!(
                            "cutoff {} leaves tail mass {tail:.3e} of |alpha|={} (limit {MAX_TAIL_MASS:e})",
                            trunc.n_cav,
                            a.norm()
                        ),
                    });
                }
            }
            CavityInit::Fock(n) => {
                if n + 1 >= trunc.n_cav {
                    v.push(Violation {
                        field: "cutoffs.n_cav",
                        message: format!("Fock state {n} needs n_cav > {}", n + 1),
                    });
                }
            }
        }
        let tail = coherent_tail_mass(init.mech, trunc.n_mech).unwrap_or(1.0);
        if tail > MAX_TAIL_MASS {
            v.push(Violation {
                field: "cutoffs.n_mech",
                message: format!(
                    "cutoff {} leaves tail mass {tail:.3e} of |gamma|={} (limit {MAX_TAIL_MASS:e})",
                    trunc.n_mech,
                    init.mech.norm()
                ),
            });
        }
    }

    if !v.is_empty() {
        return Err(Error::Validation(v));
    }
    let mut scenario = s.clone();
    scenario.cutoffs = Some(trunc);
    Ok(ValidatedScenario {
        scenario,
        trunc,
        warnings,
    })
}
