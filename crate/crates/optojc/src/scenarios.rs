//! Built-in parameter sets.

use optojc_core::fock::TruncationSpec;
use optojc_core::model::{Atom, CavityInit, InitialState, Scenario, SystemParams, TimeGrid};
use optojc_core::C64;

use crate::error::{HarnessError, Result};

pub const NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5", "jc_limit"];

/// Oracle step used by every built-in scenario.
pub const DEFAULT_DT: f64 = 0.005;

/// ω_a = 0.95, ω_L = 0.5, ω_m = 0.016, G = 0.00032, λ = 0.0125, Ω = 0.01.
pub fn reference_params() -> SystemParams {
    SystemParams {
        omega_c: 1.0,
        omega_m: 0.016,
        omega_a: 0.95,
        omega_l: 0.5,
        g_om: 0.00032,
        lambda_jc: 0.0125,
        pump_amp: 0.01,
    }
}

fn coherent(alpha: f64, gamma: f64) -> InitialState {
    InitialState {
        cavity: CavityInit::Coherent(C64::new(alpha, 0.0)),
        atom: Atom::Excited,
        mech: C64::new(gamma, 0.0),
    }
}

fn make(
    label: &str,
    params: SystemParams,
    initial: InitialState,
    t_end: f64,
    n_samples: usize,
) -> Scenario {
    Scenario {
        label: label.to_string(),
        params,
        initial,
        grid: TimeGrid::new(t_end, n_samples, DEFAULT_DT),
        cutoffs: None,
    }
}

/// Starting point for config files.
pub fn default_scenario() -> Scenario {
    make(
        "default",
        reference_params(),
        coherent(2.0, 1.0),
        500.0,
        2000,
    )
}

pub fn builtin_scenario(name: &str) -> Result<Scenario> {
    let p = reference_params();
    let s = match name {
        "fig1" => make(name, p, coherent(2.0, 1.0), 500.0, 2000),
        "fig2" => Scenario {
            cutoffs: Some(TruncationSpec::new(30, 25)),
            ..make(name, p, coherent(2.0, 1.0), 2000.0, 8000)
        },
        "fig3" => make(name, p, coherent(2.0, 1.0), 500.0, 2000),
        "fig4a" => make(
            name,
            SystemParams { omega_l: 0.9, ..p },
            coherent(2.0, 2.0),
            2000.0,
            8000,
        ),
        "fig4b" => make(
            name,
            SystemParams { omega_l: 0.9, ..p },
            coherent(3.0, 2.0),
            2000.0,
            8000,
        ),
        "fig5" => make(name, p, coherent(2.0, 1.0), 500.0, 2000),
        "jc_limit" => make(
            name,
            SystemParams {
                pump_amp: 0.0,
                g_om: 0.0,
                ..p
            },
            coherent(2.0, 1.0),
            500.0,
            2000,
        ),
        _ => return Err(HarnessError::UnknownScenario(name.to_string())),
    };
    Ok(s)
}

/// One-line description for `list-scenarios`.
pub fn describe(name: &str) -> &'static str {
    match name {
        "fig1" => "P_e with pumping, alpha=2, t in [0,500]",
        "fig2" => "photon and phonon numbers, alpha=2, Gamma=1, t in [0,2000], cutoffs (30,25)",
        "fig3" => "photon number and P_e, alpha=2, t in [0,500]",
        "fig4a" => "phonon number near resonant pump (omega_L=0.9), alpha=2, Gamma=2",
        "fig4b" => "phonon number near resonant pump (omega_L=0.9), alpha=3, Gamma=2",
        "fig5" => "Mandel Q, alpha=2, t in [0,500]",
        "jc_limit" => "fig1 without pump or optomechanical coupling",
        _ => "",
    }
}
