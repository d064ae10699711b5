use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// A single violated invariant found while validating a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scenario failed validation ({} problem(s)): {}", .0.len(), join(.0))]
    Validation(Vec<Violation>),

    #[error("{mode} cutoff {cutoff} too small: truncated tail mass {tail:.3e} exceeds 1e-8")]
    CutoffTooSmall {
        mode: &'static str,
        cutoff: usize,
        tail: f64,
    },

    #[error("step size underflow at t = {t}; the system looks stiff")]
    Stiffness { t: f64 },

    #[error("non-finite derivative at t = {t}")]
    Divergence { t: f64 },

    #[error("exponential-product factorization became singular at t = {t}")]
    FactorizationSingularity { t: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("norm drift {drift:.3e} exceeds {bound:.0e} at dt = {dt}; retry with dt = {}", .dt / 2.0)]
    NormDrift { drift: f64, bound: f64, dt: f64 },

    #[error("Mandel Q undefined at t = {t}: mean photon number {mean:.3e} is not positive")]
    UndefinedQ { t: f64, mean: f64 },

    #[error("time grids differ: {0}")]
    GridMismatch(String),
}

fn join(v: &[Violation]) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str("; ");
        }
        let _ = write!(s, "{x}");
    }
    s
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
