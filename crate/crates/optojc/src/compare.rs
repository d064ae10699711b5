//! Sample-by-sample comparison of two observable series.

use std::fmt::Write as _;

use optojc_core::evolution::{ObservableKind, ObservableSeries, ObservableSet};
use optojc_core::Error as CoreError;

/// Max-abs gap allowed per observable in compare mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub pe: f64,
    pub photon_n: f64,
    pub photon_n2: f64,
    pub phonon_n: f64,
    pub mandel_q: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            pe: 0.05,
            photon_n: 0.05,
            // ⟨n²⟩ is ~20 for the reference state; scale the bound with it.
            photon_n2: 0.5,
            phonon_n: 0.05,
            mandel_q: 0.05,
        }
    }
}

impl Thresholds {
    pub fn get(&self, kind: ObservableKind) -> f64 {
        match kind {
            ObservableKind::Pe => self.pe,
            ObservableKind::PhotonN => self.photon_n,
            ObservableKind::PhotonN2 => self.photon_n2,
            ObservableKind::PhononN => self.phonon_n,
            ObservableKind::MandelQ => self.mandel_q,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonEntry {
    pub kind: ObservableKind,
    pub max_abs: f64,
    pub rms: f64,
    pub t_at_max: f64,
    pub threshold: f64,
}

impl ComparisonEntry {
    pub fn passed(&self) -> bool {
        self.max_abs <= self.threshold
    }
}

/// Max-abs, RMS and arg-max time of `a − b`. Grids must be identical.
pub fn compare_series(
    a: &ObservableSeries,
    b: &ObservableSeries,
) -> Result<ComparisonEntry, CoreError> {
    if a.times != b.times {
        return Err(CoreError::GridMismatch(format!(
            "{} series have {} and {} samples on different grids",
            a.kind.name(),
            a.len(),
            b.len()
        )));
    }
    let (mut max_abs, mut t_at_max, mut sq) =
        (0.0f64, a.times.first().copied().unwrap_or(0.0), 0.0f64);
    for ((&t, &x), &y) in a.times.iter().zip(&a.values).zip(&b.values) {
        let d = (x - y).abs();
        sq += d * d;
        if d > max_abs {
            max_abs = d;
            t_at_max = t;
        }
    }
    let rms = if a.is_empty() {
        0.0
    } else {
        (sq / a.len() as f64).sqrt()
    };
    Ok(ComparisonEntry {
        kind: a.kind,
        max_abs,
        rms,
        t_at_max,
        threshold: f64::INFINITY,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub label: String,
    pub entries: Vec<ComparisonEntry>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn build(
        label: &str,
        analytic: &ObservableSet,
        numeric: &ObservableSet,
        th: &Thresholds,
    ) -> Result<Self, CoreError> {
        let mut report = ComparisonReport {
            label: label.to_string(),
            ..Default::default()
        };
        for kind in ObservableKind::ALL {
            match (analytic.get(kind), numeric.get(kind)) {
                (Some(a), Some(b)) => {
                    let mut e = compare_series(a, b)?;
                    e.threshold = th.get(kind);
                    report.entries.push(e);
                }
                _ => report.notes.push(format!(
                    "{} not compared: missing from one route",
                    kind.name()
                )),
            }
        }
        for n in analytic.notes.iter() {
            report.notes.push(format!("analytic: {n}"));
        }
        for n in numeric.notes.iter() {
            report.notes.push(format!("numeric: {n}"));
        }
        Ok(report)
    }

    pub fn entry(&self, kind: ObservableKind) -> Option<&ComparisonEntry> {
        self.entries.iter().find(|e| e.kind == kind)
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(ComparisonEntry::passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.label);
        let _ = writeln!(
            s,
            "{:<10} {:>24} {:>24} {:>24} {:>10} result",
            "observable", "max_abs", "rms", "t_at_max", "threshold"
        );
        for e in &self.entries {
            let _ = writeln!(
                s,
                "{:<10} {:>24.16e} {:>24.16e} {:>24.16e} {:>10} {}",
                e.kind.name(),
                e.max_abs,
                e.rms,
                e.t_at_max,
                e.threshold,
                if e.passed() { "PASS" } else { "FAIL" }
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(
            s,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        s
    }
}
