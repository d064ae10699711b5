//! Interaction-picture state assembly and observables of the analytic route.
//!
//! The full propagator is `U₀ U₁ U₂`. `U₁ U₂` never touches the mirror, so the
//! interaction-picture state is a cavity ⊗ atom vector times the initial
//! mirror coherent state `|Γ⟩`. Observables are taken with the
//! interaction-picture operators
//!
//! ```text
//! n_I = U₀† n U₀ = n + β* a + β a† + |β|²
//! N_I = U₀† N U₀ = N + (α₄ b† + α₄* b) n_I + |α₄|² n_I²
//! ```
//!
//! Both are exact for the `U₀` used: `n` commutes with every factor except
//! the cavity displacement, and `N` only feels the conditional mirror
//! displacement `D_b(α₄ n)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::coeffs::{alpha4, drive_beta};
use crate::dressing::{
    solve_atom_dressing, solve_ladder, u1_matrix, u2_matrix, AtomDressing, LadderCoeffs,
};
use crate::error::{Error, Result};
use crate::math;
use crate::model::{
    coherent_amplitudes, Atom, CavityInit, InitialState, SystemParams, TimeGrid, ValidatedScenario,
};
use crate::C64;

/// ⟨n⟩ at or below this makes the Mandel parameter undefined.
pub const Q_MEAN_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObservableKind {
    Pe,
    PhotonN,
    PhotonN2,
    PhononN,
    MandelQ,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 5] = [
        ObservableKind::Pe,
        ObservableKind::PhotonN,
        ObservableKind::PhotonN2,
        ObservableKind::PhononN,
        ObservableKind::MandelQ,
    ];

    /// Short name used for file names and reports.
    pub fn name(self) -> &'static str {
        match self {
            ObservableKind::Pe => "pe",
            ObservableKind::PhotonN => "photon_n",
            ObservableKind::PhotonN2 => "photon_n2",
            ObservableKind::PhononN => "phonon_n",
            ObservableKind::MandelQ => "mandel_q",
        }
    }
}

/// Real-valued time series of one observable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub kind: ObservableKind,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(kind: ObservableKind, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            kind,
            times,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Samples with `t` in `[a, b]`.
    pub fn window(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(move |(t, _)| *t >= a && *t <= b)
    }
}

/// Observables shared by both routes.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub pe: ObservableSeries,
    pub photon_n: ObservableSeries,
    pub photon_n2: ObservableSeries,
    pub phonon_n: ObservableSeries,
    /// Absent when ⟨n⟩ vanishes somewhere.
    pub mandel_q: Option<ObservableSeries>,
    pub notes: Vec<String>,
}

impl ObservableSet {
    pub fn get(&self, kind: ObservableKind) -> Option<&ObservableSeries> {
        match kind {
            ObservableKind::Pe => Some(&self.pe),
            ObservableKind::PhotonN => Some(&self.photon_n),
            ObservableKind::PhotonN2 => Some(&self.photon_n2),
            ObservableKind::PhononN => Some(&self.phonon_n),
            ObservableKind::MandelQ => self.mandel_q.as_ref(),
        }
    }

    pub fn series(&self) -> impl Iterator<Item = &ObservableSeries> {
        ObservableKind::ALL.into_iter().filter_map(|k| self.get(k))
    }

    /// Builds the set from the four primary series, deriving Q.
    pub fn from_parts(
        pe: ObservableSeries,
        photon_n: ObservableSeries,
        photon_n2: ObservableSeries,
        phonon_n: ObservableSeries,
    ) -> Result<Self> {
        let mut notes = Vec::new();
        let mandel_q = match mandel_q_series(&photon_n, &photon_n2) {
            Ok(q) => Some(q),
            Err(e @ Error::UndefinedQ { .. }) => {
                log::warn!("Mandel Q omitted: {e}");
                notes.push(format!("mandel_q omitted: {e}"));
                None
            }
            Err(e) => return Err(e),
        };
        Ok(Self {
            pe,
            photon_n,
            photon_n2,
            phonon_n,
            mandel_q,
            notes,
        })
    }
}

/// Q = (⟨n²⟩ − ⟨n⟩²)/⟨n⟩ − 1, pointwise.
pub fn mandel_q_series(n: &ObservableSeries, n2: &ObservableSeries) -> Result<ObservableSeries> {
    if n.times != n2.times {
        return Err(Error::GridMismatch(
            "⟨n⟩ and ⟨n²⟩ sampled on different grids".into(),
        ));
    }
    let mut values = Vec::with_capacity(n.len());
    for ((&t, &m), &m2) in n.times.iter().zip(&n.values).zip(&n2.values) {
        if !(m > Q_MEAN_FLOOR) {
            return Err(Error::UndefinedQ { t, mean: m });
        }
        values.push((m2 - m * m) / m - 1.0);
    }
    ObservableSeries::new(ObservableKind::MandelQ, n.times.clone(), values)
}

/// Amplitudes of `U₁U₂|n,e⟩` on |n,e⟩, |n,g⟩, |n+1,g⟩, |n+1,e⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderAmplitudes {
    pub n: usize,
    pub c1: C64,
    pub c2: C64,
    pub c3: C64,
    pub c4: C64,
}

impl LadderAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr() + self.c4.norm_sqr()
    }
}

/// `U₁U₂|n,e⟩` for the ladder `l` (which must have `M = n + 1`).
pub fn ladder_amplitudes(d: &AtomDressing, l: &LadderCoeffs, k: usize) -> LadderAmplitudes {
    let u1 = u1_matrix(d, k);
    let [up, low] = u2_matrix(l, k).column(0);
    LadderAmplitudes {
        n: l.m - 1,
        c1: u1.get(0, 0) * up,
        c2: u1.get(1, 0) * up,
        c3: u1.get(1, 1) * low,
        c4: u1.get(0, 1) * low,
    }
}

/// Cavity ⊗ atom amplitudes; the mirror stays in its initial coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityAtomState {
    /// Indexed by `2·n + atom`.
    pub amps: Vec<C64>,
}

impl CavityAtomState {
    pub fn zeros(levels: usize) -> Self {
        Self {
            amps: vec![C64::default(); 2 * levels],
        }
    }

    pub fn levels(&self) -> usize {
        self.amps.len() / 2
    }

    pub fn amp(&self, n: usize, atom: Atom) -> C64 {
        self.amps[2 * n + atom.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn excited_population(&self) -> f64 {
        self.amps.iter().step_by(2).map(|z| z.norm_sqr()).sum()
    }

    /// `n_I φ`. Contributions pushed above the top level are dropped.
    pub fn apply_n_interaction(&self, beta: C64) -> Self {
        let levels = self.levels();
        let mut out = Self::zeros(levels);
        let b2 = beta.norm_sqr();
        for n in 0..levels {
            for a in 0..2 {
                let mut v = self.amps[2 * n + a] * (n as f64 + b2);
                if n + 1 < levels {
                    v += beta.conj() * math::sqrt((n + 1) as f64) * self.amps[2 * (n + 1) + a];
                }
                if n > 0 {
                    v += beta * math::sqrt(n as f64) * self.amps[2 * (n - 1) + a];
                }
                out.amps[2 * n + a] = v;
            }
        }
        out
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `(⟨n_I⟩, ⟨n_I²⟩)` for a state and drive amplitude β.
pub fn photon_moments(state: &CavityAtomState, beta: C64) -> (f64, f64) {
    let once = state.apply_n_interaction(beta);
    let n = state.inner(&once).re;
    // n_I is Hermitian, so ⟨n_I²⟩ = ‖n_I φ‖² up to the top-level truncation.
    let twice = once.apply_n_interaction(beta);
    let n2 = state.inner(&twice).re;
    (n, n2)
}

/// ⟨N⟩ = |Γ|² + 2 Re(α₄ Γ*)⟨n_I⟩ + |α₄|²⟨n_I²⟩.
pub fn phonon_mean(gamma: C64, a4: C64, n: f64, n2: f64) -> f64 {
    gamma.norm_sqr() + 2.0 * (a4 * gamma.conj()).re * n + a4.norm_sqr() * n2
}

/// Everything the analytic route needs before the coefficient solves.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticPlan {
    pub params: SystemParams,
    pub grid: TimeGrid,
    pub atom: Atom,
    pub mech: C64,
    /// Initial cavity amplitudes c_n, n < cutoff.
    pub cavity_amps: Vec<C64>,
}

impl AnalyticPlan {
    pub fn new(vs: &ValidatedScenario) -> Result<Self> {
        Self::from_parts(*vs.params(), *vs.grid(), vs.initial(), vs.trunc().n_cav)
    }

    pub fn from_parts(
        params: SystemParams,
        grid: TimeGrid,
        initial: &InitialState,
        cutoff: usize,
    ) -> Result<Self> {
        let cavity_amps = match initial.cavity {
            CavityInit::Coherent(alpha) => coherent_amplitudes(alpha, cutoff)?,
            CavityInit::Fock(n) => {
                if n >= cutoff {
                    return Err(Error::CutoffTooSmall {
                        mode: "cavity",
                        cutoff,
                        tail: 1.0,
                    });
                }
                let mut v = vec![C64::default(); cutoff];
                v[n] = C64::new(1.0, 0.0);
                v
            }
        };
        Ok(Self {
            params,
            grid,
            atom: initial.atom,
            mech: initial.mech,
            cavity_amps,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cavity_amps.len()
    }

    /// Ladder indices that carry initial amplitude.
    pub fn required_ladders(&self) -> Vec<usize> {
        self.cavity_amps
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::default())
            .filter_map(|(n, _)| match self.atom {
                Atom::Excited => Some(n + 1),
                Atom::Ground => (n > 0).then_some(n),
            })
            .collect()
    }

    pub fn solve_dressing(&self) -> Result<AtomDressing> {
        solve_atom_dressing(&self.params, &self.grid)
    }

    pub fn solve_ladder(&self, m: usize) -> Result<LadderCoeffs> {
        solve_ladder(&self.params, m, &self.grid)
    }

    /// Combines externally solved coefficients into a run.
    pub fn finish(self, dressing: AtomDressing, ladders: Vec<LadderCoeffs>) -> Result<AnalyticRun> {
        let n = self.grid.n_samples;
        if dressing.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dressing.len(),
            });
        }
        let mut slots: Vec<Option<LadderCoeffs>> = vec![None; self.cutoff() + 1];
        for l in ladders {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.len(),
                });
            }
            if l.m == 0 || l.m >= slots.len() {
                return Err(Error::InvalidInput(format!(
                    "ladder M={} outside the cutoff",
                    l.m
                )));
            }
            let m = l.m;
            slots[m] = Some(l);
        }
        if let Some(m) = self
            .required_ladders()
            .into_iter()
            .find(|&m| slots[m].is_none())
        {
            return Err(Error::InvalidInput(format!("ladder M={m} was not solved")));
        }
        Ok(AnalyticRun {
            plan: self,
            dressing,
            ladders: slots,
        })
    }
}

/// Solved analytic propagator for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticRun {
    pub plan: AnalyticPlan,
    pub dressing: AtomDressing,
    /// Indexed by M; unused ladders are `None`.
    ladders: Vec<Option<LadderCoeffs>>,
}

/// Solves every coefficient system serially.
pub fn run_analytic(vs: &ValidatedScenario) -> Result<AnalyticRun> {
    let plan = AnalyticPlan::new(vs)?;
    let dressing = plan.solve_dressing()?;
    let ladders = plan
        .required_ladders()
        .into_iter()
        .map(|m| plan.solve_ladder(m))
        .collect::<Result<Vec<_>>>()?;
    plan.finish(dressing, ladders)
}

impl AnalyticRun {
    pub fn times(&self) -> &[f64] {
        &self.dressing.times
    }

    pub fn ladder(&self, m: usize) -> Option<&LadderCoeffs> {
        self.ladders.get(m).and_then(Option::as_ref)
    }

    pub fn ladders(&self) -> impl Iterator<Item = &LadderCoeffs> {
        self.ladders.iter().flatten()
    }

    /// Number of (ladder, sample) pairs served by the direct propagator.
    pub fn singular_samples(&self) -> usize {
        self.ladders().map(LadderCoeffs::singular_samples).sum()
    }

    /// `U₁U₂|ψ_cav, atom⟩` at sample `k`.
    pub fn state(&self, k: usize) -> CavityAtomState {
        let cut = self.plan.cutoff();
        let mut s = CavityAtomState::zeros(cut + 1);
        let atom = self.plan.atom;
        for (n, &c) in self.plan.cavity_amps.iter().enumerate() {
            if c != C64::default() {
                s.amps[2 * n + atom.index()] = c;
            }
        }
        // U₂ acts on each ladder {|M−1,e⟩, |M,g⟩}; |0,g⟩ is left alone.
        for l in self.ladders() {
            let m = l.m;
            let (ie, ig) = (2 * (m - 1), 2 * m + 1);
            let v = u2_matrix(l, k).apply([s.amps[ie], s.amps[ig]]);
            s.amps[ie] = v[0];
            s.amps[ig] = v[1];
        }
        let u1 = u1_matrix(&self.dressing, k);
        for n in 0..=cut {
            let v = u1.apply([s.amps[2 * n], s.amps[2 * n + 1]]);
            s.amps[2 * n] = v[0];
            s.amps[2 * n + 1] = v[1];
        }
        s
    }

    /// Largest |‖φ(t)‖² − ‖φ(0)‖²| over the grid.
    pub fn max_norm_defect(&self) -> f64 {
        let n0 = self.state(0).norm_sqr();
        (0..self.times().len())
            .map(|k| math::abs(self.state(k).norm_sqr() - n0))
            .fold(0.0, f64::max)
    }

    pub fn observables(&self) -> Result<ObservableSet> {
        let p = &self.plan.params;
        let times = self.times().to_vec();
        let n = times.len();
        let (mut pe, mut pn, mut pn2, mut ph) = (
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        );
        for (k, &t) in times.iter().enumerate() {
            let s = self.state(k);
            pe.push(s.excited_population());
            let (m1, m2) = photon_moments(&s, drive_beta(p, t));
            pn.push(m1);
            pn2.push(m2);
            ph.push(phonon_mean(self.plan.mech, alpha4(p, t), m1, m2));
        }
        let mut set = ObservableSet::from_parts(
            ObservableSeries::new(ObservableKind::Pe, times.clone(), pe)?,
            ObservableSeries::new(ObservableKind::PhotonN, times.clone(), pn)?,
            ObservableSeries::new(ObservableKind::PhotonN2, times.clone(), pn2)?,
            ObservableSeries::new(ObservableKind::PhononN, times, ph)?,
        )?;
        let singular = self.singular_samples();
        if singular > 0 {
            set.notes.push(format!(
                "{singular} ladder samples taken from the direct propagator (factorization singular)"
            ));
        }
        Ok(set)
    }
}

/// Closed-form Jaynes–Cummings P_e for the undriven, uncoupled-mirror limit.
pub fn jc_exact_pe(
    p: &SystemParams,
    cavity: &CavityInit,
    grid: &TimeGrid,
    cutoff: usize,
) -> Result<ObservableSeries> {
    let weights: Vec<f64> = match *cavity {
        CavityInit::Coherent(alpha) => coherent_amplitudes(alpha, cutoff)?
            .iter()
            .map(|c| c.norm_sqr())
            .collect(),
        CavityInit::Fock(n) => {
            let mut w = vec![0.0; n + 1];
            w[n] = 1.0;
            w
        }
    };
    let delta = p.detuning();
    let lam2 = p.lambda_jc * p.lambda_jc;
    let times = grid.times();
    let values = times
        .iter()
        .map(|&t| {
            weights
                .iter()
                .enumerate()
                .map(|(n, &w)| {
                    let g2 = lam2 * (n + 1) as f64;
                    let om2 = g2 + 0.25 * delta * delta;
                    if om2 == 0.0 {
                        return w;
                    }
                    let s = math::sin(math::sqrt(om2) * t);
                    w * (1.0 - g2 / om2 * s * s)
                })
                .sum()
        })
        .collect();
    ObservableSeries::new(ObservableKind::Pe, times, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_operator, OperatorKind, SparseOp, TruncationSpec};
    use crate::model::{validate_scenario, Scenario};

    fn fig2() -> SystemParams {
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

    fn scenario(
        params: SystemParams,
        cavity: CavityInit,
        atom: Atom,
        t_end: f64,
        n: usize,
    ) -> ValidatedScenario {
        validate_scenario(&Scenario {
            label: "t".into(),
            params,
            initial: InitialState {
                cavity,
                atom,
                mech: C64::new(1.0, 0.0),
            },
            grid: TimeGrid::new(t_end, n, 0.005),
            cutoffs: None,
        })
        .unwrap()
    }

    fn coherent2() -> CavityInit {
        CavityInit::Coherent(C64::new(2.0, 0.0))
    }

    #[test]
    fn starts_from_initial_state() {
        let vs = scenario(fig2(), coherent2(), Atom::Excited, 20.0, 5);
        let run = run_analytic(&vs).unwrap();
        let s = run.state(0);
        let c = coherent_amplitudes(C64::new(2.0, 0.0), 30).unwrap();
        for n in 0..30 {
            assert_eq!(s.amp(n, Atom::Excited), c[n]);
            assert_eq!(s.amp(n, Atom::Ground), C64::default());
        }
        let l = run.ladder(1).unwrap();
        let a = ladder_amplitudes(&run.dressing, l, 0);
        assert_eq!(
            (a.c1, a.c2, a.c3, a.c4),
            (
                C64::new(1.0, 0.0),
                C64::default(),
                C64::default(),
                C64::default()
            )
        );
        let obs = run.observables().unwrap();
        assert!((obs.photon_n.values[0] - 4.0).abs() < 1e-9);
        assert!((obs.phonon_n.values[0] - 1.0).abs() < 1e-12);
        assert!(obs.mandel_q.as_ref().unwrap().values[0].abs() < 1e-9);
        assert_eq!(
            obs.pe.values[0],
            c.iter().map(|z| z.norm_sqr()).sum::<f64>()
        );
    }

    #[test]
    fn ladder_amplitudes_normalized_and_match_state() {
        let vs = scenario(fig2(), coherent2(), Atom::Excited, 300.0, 150);
        let run = run_analytic(&vs).unwrap();
        for k in 0..run.times().len() {
            for m in [1, 4, 9] {
                let a = ladder_amplitudes(&run.dressing, run.ladder(m).unwrap(), k);
                assert!((a.norm_sqr() - 1.0).abs() < 1e-8);
            }
        }
        assert!(run.max_norm_defect() < 1e-7);
        // Assembling by hand from c1..c4 reproduces the state.
        let k = 77;
        let c = &run.plan.cavity_amps;
        let s = run.state(k);
        for m in 0..c.len() {
            let am = ladder_amplitudes(&run.dressing, run.ladder(m + 1).unwrap(), k);
            let mut e = c[m] * am.c1;
            let mut g = c[m] * am.c2;
            if m > 0 {
                let prev = ladder_amplitudes(&run.dressing, run.ladder(m).unwrap(), k);
                e += c[m - 1] * prev.c4;
                g += c[m - 1] * prev.c3;
            }
            assert!((s.amp(m, Atom::Excited) - e).norm() < 1e-14);
            assert!((s.amp(m, Atom::Ground) - g).norm() < 1e-14);
        }
    }

    #[test]
    fn no_drive_keeps_ground_channel_empty_and_conserves_excitations() {
        let p = SystemParams {
            pump_amp: 0.0,
            ..fig2()
        };
        let vs = scenario(p, coherent2(), Atom::Excited, 500.0, 1000);
        let run = run_analytic(&vs).unwrap();
        for k in 0..run.times().len() {
            let a = ladder_amplitudes(&run.dressing, run.ladder(3).unwrap(), k);
            assert_eq!(a.c2, C64::default());
        }
        let obs = run.observables().unwrap();
        let e0 = obs.photon_n.values[0] + obs.pe.values[0];
        for k in 0..obs.pe.len() {
            let e = obs.photon_n.values[k] + obs.pe.values[k];
            assert!((e - e0).abs() < 1e-6);
        }
        let jc = jc_exact_pe(&p, &coherent2(), vs.grid(), 30).unwrap();
        for k in 0..jc.len() {
            assert!(
                (jc.values[k] - obs.pe.values[k]).abs() < 1e-6,
                "t={}",
                jc.times[k]
            );
        }
    }

    #[test]
    fn pumping_breaks_excitation_conservation() {
        let vs = scenario(fig2(), coherent2(), Atom::Excited, 500.0, 500);
        let obs = run_analytic(&vs).unwrap().observables().unwrap();
        let e0 = obs.photon_n.values[0] + obs.pe.values[0];
        let worst = (0..obs.pe.len())
            .map(|k| (obs.photon_n.values[k] + obs.pe.values[k] - e0).abs())
            .fold(0.0, f64::max);
        assert!(worst > 0.1, "{worst}");
    }

    #[test]
    fn fock_state_has_sub_poissonian_start() {
        let vs = scenario(fig2(), CavityInit::Fock(3), Atom::Excited, 10.0, 3);
        let run = run_analytic(&vs).unwrap();
        assert_eq!(run.plan.required_ladders(), vec![4]);
        let q = run.observables().unwrap().mandel_q.unwrap();
        assert!((q.values[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_ground_has_undefined_q_but_other_series() {
        let p = SystemParams {
            pump_amp: 0.0,
            ..fig2()
        };
        let vs = scenario(p, CavityInit::Fock(0), Atom::Ground, 10.0, 3);
        let run = run_analytic(&vs).unwrap();
        assert!(run.plan.required_ladders().is_empty());
        let obs = run.observables().unwrap();
        assert!(obs.mandel_q.is_none());
        assert_eq!(obs.notes.len(), 1);
        assert!(obs.pe.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ground_start_matches_jc_in_lower_ladder() {
        let p = SystemParams {
            pump_amp: 0.0,
            ..fig2()
        };
        let vs = scenario(p, CavityInit::Fock(2), Atom::Ground, 400.0, 200);
        let run = run_analytic(&vs).unwrap();
        let delta = p.detuning();
        let g2 = p.lambda_jc * p.lambda_jc * 2.0;
        let om = (g2 + delta * delta / 4.0).sqrt();
        let obs = run.observables().unwrap();
        for (k, &t) in run.times().iter().enumerate() {
            let exact = g2 / (om * om) * (om * t).sin().powi(2);
            assert!((obs.pe.values[k] - exact).abs() < 1e-7);
        }
    }

    #[test]
    fn mandel_q_guards() {
        let t = vec![0.0, 1.0];
        let n = ObservableSeries::new(ObservableKind::PhotonN, t.clone(), vec![4.0, 0.0]).unwrap();
        let n2 =
            ObservableSeries::new(ObservableKind::PhotonN2, t.clone(), vec![20.0, 0.0]).unwrap();
        assert_eq!(
            mandel_q_series(&n, &n2),
            Err(Error::UndefinedQ { t: 1.0, mean: 0.0 })
        );
        let n = ObservableSeries::new(ObservableKind::PhotonN, t.clone(), vec![4.0, 2.0]).unwrap();
        let q = mandel_q_series(&n, &n2).unwrap();
        assert_eq!(q.values, vec![0.0, -3.0]);
        let other = ObservableSeries::new(ObservableKind::PhotonN2, vec![0.0, 2.0], vec![1.0, 1.0])
            .unwrap();
        assert!(matches!(
            mandel_q_series(&n, &other),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn jc_closed_form_limits() {
        let p = SystemParams {
            pump_amp: 0.0,
            g_om: 0.0,
            omega_a: 1.0,
            ..fig2()
        };
        let g = TimeGrid::new(300.0, 31, 0.005);
        let s = jc_exact_pe(&p, &CavityInit::Fock(0), &g, 1).unwrap();
        for (t, v) in s.times.iter().zip(&s.values) {
            assert!((v - (p.lambda_jc * t).cos().powi(2)).abs() < 1e-14);
        }
        let free = SystemParams {
            lambda_jc: 0.0,
            ..p
        };
        let s = jc_exact_pe(&free, &coherent2(), &g, 30).unwrap();
        assert!(s.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    /// Dense displacement e^{βa† − β*a} on a cutoff well above the state's
    /// support, by Taylor series.
    fn displace(beta: C64, x: &[C64]) -> Vec<C64> {
        let mut acc = x.to_vec();
        let mut term = x.to_vec();
        for j in 1..40 {
            let mut next = vec![C64::default(); x.len()];
            for n in 0..x.len() {
                if n + 1 < x.len() {
                    next[n] -= beta.conj() * ((n + 1) as f64).sqrt() * term[n + 1];
                }
                if n > 0 {
                    next[n] += beta * (n as f64).sqrt() * term[n - 1];
                }
            }
            term = next.into_iter().map(|z| z / j as f64).collect();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
        }
        acc
    }

    #[test]
    fn photon_operator_matches_conjugated_number() {
        let vs = scenario(fig2(), coherent2(), Atom::Excited, 100.0, 11);
        let run = run_analytic(&vs).unwrap();
        for k in [3, 10] {
            let t = run.times()[k];
            let beta = drive_beta(&fig2(), t);
            let s = run.state(k);
            let (n1, n2) = photon_moments(&s, beta);
            // Pad to a larger cutoff, displace each atom slice, take ⟨n⟩.
            let levels = 60;
            let (mut m1, mut m2) = (0.0, 0.0);
            for a in 0..2 {
                let mut x = vec![C64::default(); levels];
                for n in 0..s.levels() {
                    x[n] = s.amps[2 * n + a];
                }
                let y = displace(beta, &x);
                for (n, z) in y.iter().enumerate() {
                    m1 += n as f64 * z.norm_sqr();
                    m2 += (n * n) as f64 * z.norm_sqr();
                }
            }
            assert!((n1 - m1).abs() < 1e-10, "{n1} vs {m1}");
            assert!((n2 - m2).abs() < 1e-9, "{n2} vs {m2}");
        }
    }

    #[test]
    fn phonon_formula_matches_sparse_operator() {
        let p = SystemParams {
            g_om: 0.004,
            ..fig2()
        };
        let vs = scenario(p, coherent2(), Atom::Excited, 300.0, 4);
        let run = run_analytic(&vs).unwrap();
        let obs = run.observables().unwrap();
        let gamma = C64::new(1.0, 0.0);
        let k = 3;
        let t = run.times()[k];
        let (beta, a4) = (drive_beta(&p, t), alpha4(&p, t));
        let s = run.state(k);
        let trunc = TruncationSpec::new(s.levels(), 25);
        let mech = coherent_amplitudes(gamma, 25).unwrap();
        let mut psi = vec![C64::default(); trunc.dim()];
        for (i, c, a, m) in trunc.basis() {
            psi[i] = s.amp(c, a) * mech[m];
        }
        let op = |k| build_operator(k, trunc);
        let n = op(OperatorKind::Ncav);
        let n_i = n
            .add_scaled(beta.conj(), &op(OperatorKind::A))
            .add_scaled(beta, &op(OperatorKind::Adag))
            .add_scaled(
                C64::new(beta.norm_sqr(), 0.0),
                &SparseOp::identity(trunc.dim()),
            );
        let coupling = op(OperatorKind::Bdag)
            .scaled(a4)
            .add_scaled(a4.conj(), &op(OperatorKind::B));
        let big_n = op(OperatorKind::Nmech)
            .add_scaled(C64::new(1.0, 0.0), &coupling.mul(&n_i))
            .add_scaled(C64::new(a4.norm_sqr(), 0.0), &n_i.mul(&n_i));
        let direct = big_n.expectation(&psi).re;
        assert!(
            (direct - obs.phonon_n.values[k]).abs() < 1e-8,
            "{direct} vs {}",
            obs.phonon_n.values[k]
        );
    }

    #[test]
    fn finish_rejects_missing_ladder() {
        let vs = scenario(fig2(), coherent2(), Atom::Excited, 10.0, 3);
        let plan = AnalyticPlan::new(&vs).unwrap();
        let d = plan.solve_dressing().unwrap();
        let l = plan.solve_ladder(1).unwrap();
        assert!(plan.finish(d, vec![l]).is_err());
    }
}
