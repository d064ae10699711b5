//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! label = fig2
//! mode = compare
//! params.omega_l = 0.9
//! initial.alpha = 3
//! grid.t_end = 500
//! ```
//!
//! Unknown keys and repeated keys are rejected. Every physical key is
//! optional; the defaults are the [`crate::scenarios::default_scenario`] set.

use std::str::FromStr;

use optojc_core::fock::TruncationSpec;
use optojc_core::model::{Atom, CavityInit, Scenario};
use optojc_core::C64;

use crate::compare::Thresholds;
use crate::error::{HarnessError, Result};
use crate::scenarios::default_scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Mode {
    #[default]
    Analytic,
    Numeric,
    Compare,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "numeric" => Ok(Mode::Numeric),
            "compare" => Ok(Mode::Compare),
            _ => Err(format!("expected analytic, numeric or compare, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub mode: Option<Mode>,
    pub out: Option<String>,
    pub thresholds: Thresholds,
}

pub const KEYS: &[&str] = &[
    "label",
    "mode",
    "out",
    "params.omega_c",
    "params.omega_m",
    "params.omega_a",
    "params.omega_l",
    "params.g_om",
    "params.lambda_jc",
    "params.pump_amp",
    "initial.cavity",
    "initial.n",
    "initial.alpha",
    "initial.alpha_im",
    "initial.atom",
    "initial.gamma",
    "initial.gamma_im",
    "grid.t_end",
    "grid.n_samples",
    "grid.dt",
    "cutoffs.n_cav",
    "cutoffs.n_mech",
    "compare.pe",
    "compare.photon_n",
    "compare.photon_n2",
    "compare.phonon_n",
    "compare.mandel_q",
];

fn num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| HarnessError::Config {
        line,
        key: key.to_string(),
        message: format!("cannot parse `{v}` as a number"),
    })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut s = default_scenario();
    let mut mode = None;
    let mut out = None;
    let mut thresholds = Thresholds::default();
    let mut seen: Vec<&str> = Vec::new();

    let mut cavity_kind: Option<(usize, String)> = None;
    let mut fock_n: Option<usize> = None;
    let mut alpha = match s.initial.cavity {
        CavityInit::Coherent(a) => a,
        CavityInit::Fock(_) => C64::default(),
    };
    let mut gamma = s.initial.mech;
    let (mut n_cav, mut n_mech) = (None, None);

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(HarnessError::Config {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(&key) = KEYS.iter().find(|&&known| known == k) else {
            return Err(HarnessError::Config {
                line,
                key: k.to_string(),
                message: "unknown key".into(),
            });
        };
        if seen.contains(&key) {
            return Err(HarnessError::Config {
                line,
                key: k.to_string(),
                message: "given more than once".into(),
            });
        }
        seen.push(key);

        let p = &mut s.params;
        match key {
            "label" => s.label = v.to_string(),
            "mode" => {
                mode = Some(v.parse().map_err(|message| HarnessError::Config {
                    line,
                    key: k.to_string(),
                    message,
                })?)
            }
            "out" => out = Some(v.to_string()),
            "params.omega_c" => p.omega_c = num(line, key, v)?,
            "params.omega_m" => p.omega_m = num(line, key, v)?,
            "params.omega_a" => p.omega_a = num(line, key, v)?,
            "params.omega_l" => p.omega_l = num(line, key, v)?,
            "params.g_om" => p.g_om = num(line, key, v)?,
            "params.lambda_jc" => p.lambda_jc = num(line, key, v)?,
            "params.pump_amp" => p.pump_amp = num(line, key, v)?,
            "initial.cavity" => cavity_kind = Some((line, v.to_string())),
            "initial.n" => fock_n = Some(num(line, key, v)?),
            "initial.alpha" => alpha.re = num(line, key, v)?,
            "initial.alpha_im" => alpha.im = num(line, key, v)?,
            "initial.atom" => {
                s.initial.atom = match v {
                    "excited" | "e" => Atom::Excited,
                    "ground" | "g" => Atom::Ground,
                    _ => {
                        return Err(HarnessError::Config {
                            line,
                            key: k.to_string(),
                            message: format!("expected excited or ground, got `{v}`"),
                        })
                    }
                }
            }
            "initial.gamma" => gamma.re = num(line, key, v)?,
            "initial.gamma_im" => gamma.im = num(line, key, v)?,
            "grid.t_end" => s.grid.t_end = num(line, key, v)?,
            "grid.n_samples" => s.grid.n_samples = num(line, key, v)?,
            "grid.dt" => s.grid.integrator_dt = num(line, key, v)?,
            "cutoffs.n_cav" => n_cav = Some(num(line, key, v)?),
            "cutoffs.n_mech" => n_mech = Some(num(line, key, v)?),
            "compare.pe" => thresholds.pe = num(line, key, v)?,
            "compare.photon_n" => thresholds.photon_n = num(line, key, v)?,
            "compare.photon_n2" => thresholds.photon_n2 = num(line, key, v)?,
            "compare.phonon_n" => thresholds.phonon_n = num(line, key, v)?,
            "compare.mandel_q" => thresholds.mandel_q = num(line, key, v)?,
            _ => unreachable!("key list and match arms out of sync: {key}"),
        }
    }

    let fock = match cavity_kind {
        None => fock_n.is_some(),
        Some((_, ref kind)) if kind == "fock" => true,
        Some((_, ref kind)) if kind == "coherent" => false,
        Some((line, kind)) => {
            return Err(HarnessError::Config {
                line,
                key: "initial.cavity".into(),
                message: format!("expected coherent or fock, got `{kind}`"),
            })
        }
    };
    s.initial.cavity = if fock {
        CavityInit::Fock(fock_n.unwrap_or(0))
    } else {
        CavityInit::Coherent(alpha)
    };
    s.initial.mech = gamma;

    s.cutoffs = match (n_cav, n_mech) {
        (None, None) => None,
        (c, m) => {
            let d = optojc_core::model::default_truncation(&s.initial);
            Some(TruncationSpec::new(
                c.unwrap_or(d.n_cav),
                m.unwrap_or(d.n_mech),
            ))
        }
    };

    Ok(RunConfig {
        scenario: s,
        mode,
        out,
        thresholds,
    })
}
