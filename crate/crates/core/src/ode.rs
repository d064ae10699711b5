//! Small initial-value-problem integrator for complex systems.
//!
//! Two methods: classical fixed-step RK4, and Dormand–Prince 5(4) with an
//! error-per-unit-time controller. Both land exactly on every requested
//! output time (the last step before a sample is shortened), so results are
//! never interpolated. Identical inputs give bitwise-identical outputs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::C64;

/// Right-hand side of ẏ = f(t, y).
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[C64], dy: &mut [C64]);

    /// Called after every accepted step. Returning an error stops the
    /// integration at that point.
    fn check(&self, _t: f64, _y: &[C64]) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4Fixed { dt: f64 },
    Rk45Adaptive { tol: f64 },
}

impl Method {
    /// Default for coefficient systems.
    pub const fn adaptive() -> Self {
        Method::Rk45Adaptive { tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Largest accepted local error estimate per unit time (adaptive only).
    pub max_error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    dim: usize,
    values: Vec<C64>,
    pub stats: OdeStats,
}

impl OdeSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn sample(&self, k: usize) -> &[C64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last(&self) -> Option<&[C64]> {
        self.len().checked_sub(1).map(|k| self.sample(k))
    }

    fn push(&mut self, t: f64, y: &[C64]) {
        self.times.push(t);
        self.values.extend_from_slice(y);
    }
}

/// Integrates from `times[0]` (where `y0` holds) through every later time.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[C64],
    times: &[f64],
    method: Method,
) -> Result<OdeSolution> {
    match integrate_partial(sys, y0, times, method)? {
        (sol, None) => Ok(sol),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`integrate`] but, when the integration fails midway, returns the
/// samples reached so far together with the error.
pub fn integrate_partial<S: OdeSystem + ?Sized>(
    sys: &S,
    y0: &[C64],
    times: &[f64],
    method: Method,
) -> Result<(OdeSolution, Option<Error>)> {
    let dim = sys.dim();
    if y0.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: y0.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::InvalidInput("no output times requested".into()));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput(
            "output times must be nondecreasing".into(),
        ));
    }
    match method {
        Method::Rk4Fixed { dt } if !(dt > 0.0 && dt.is_finite()) => {
            return Err(Error::InvalidInput("fixed step must be positive".into()))
        }
        Method::Rk45Adaptive { tol } if !(tol > 0.0 && tol.is_finite()) => {
            return Err(Error::InvalidInput("tolerance must be positive".into()))
        }
        _ => {}
    }

    let mut sol = OdeSolution {
        times: Vec::with_capacity(times.len()),
        dim,
        values: Vec::with_capacity(times.len() * dim),
        stats: OdeStats::default(),
    };
    let mut y = y0.to_vec();
    sol.push(times[0], &y);
    let failure = match method {
        Method::Rk4Fixed { dt } => run_rk4(sys, &mut y, times, dt, &mut sol),
        Method::Rk45Adaptive { tol } => run_dopri(sys, &mut y, times, tol, &mut sol),
    };
    Ok((sol, failure.err()))
}

fn finite(v: &[C64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Scratch space for one RK4 step.
struct Rk4Work {
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4Work {
    fn new(dim: usize) -> Self {
        let z = vec![C64::default(); dim];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

fn rk4_step<S: OdeSystem + ?Sized>(sys: &S, t: f64, h: f64, y: &mut [C64], w: &mut Rk4Work) {
    sys.rhs(t, y, &mut w.k1);
    for i in 0..y.len() {
        w.tmp[i] = y[i] + 0.5 * h * w.k1[i];
    }
    sys.rhs(t + 0.5 * h, &w.tmp, &mut w.k2);
    for i in 0..y.len() {
        w.tmp[i] = y[i] + 0.5 * h * w.k2[i];
    }
    sys.rhs(t + 0.5 * h, &w.tmp, &mut w.k3);
    for i in 0..y.len() {
        w.tmp[i] = y[i] + h * w.k3[i];
    }
    sys.rhs(t + h, &w.tmp, &mut w.k4);
    let h6 = h / 6.0;
    for i in 0..y.len() {
        y[i] += h6 * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
    }
}

fn run_rk4<S: OdeSystem + ?Sized>(
    sys: &S,
    y: &mut [C64],
    times: &[f64],
    dt: f64,
    sol: &mut OdeSolution,
) -> Result<()> {
    let mut w = Rk4Work::new(y.len());
    for pair in times.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let span = b - a;
        if span > 0.0 {
            // Guard against span/dt landing a rounding error above an integer.
            let n = math::ceil(span / dt * (1.0 - 1e-12)).max(1.0) as usize;
            let h = span / n as f64;
            for k in 0..n {
                let t = a + h * k as f64;
                rk4_step(sys, t, h, y, &mut w);
                sol.stats.steps += 1;
                sol.stats.rhs_evals += 4;
                let t_new = if k + 1 == n { b } else { t + h };
                if !finite(y) {
                    return Err(Error::Divergence { t: t_new });
                }
                sys.check(t_new, y)?;
            }
        }
        sol.push(b, y);
    }
    Ok(())
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b* (fifth minus fourth order weights).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

struct DopriWork {
    k: [Vec<C64>; 7],
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

fn run_dopri<S: OdeSystem + ?Sized>(
    sys: &S,
    y: &mut Vec<C64>,
    times: &[f64],
    tol: f64,
    sol: &mut OdeSolution,
) -> Result<()> {
    let dim = y.len();
    let z = vec![C64::default(); dim];
    let mut w = DopriWork {
        k: [
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
        ],
        tmp: z.clone(),
        y_new: z,
    };
    let mut t = times[0];
    let total = times[times.len() - 1] - t;
    let mut h = (total * 1e-3).clamp(1e-6, 0.05);

    sys.rhs(t, y, &mut w.k[0]);
    sol.stats.rhs_evals += 1;
    if !finite(&w.k[0]) {
        return Err(Error::Divergence { t });
    }

    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            let clamped = h >= remaining;
            let step = if clamped { remaining } else { h };
            let min_step = 1e-14 * t.abs().max(1.0);
            if step < min_step && !clamped {
                return Err(Error::Stiffness { t });
            }

            let stage = |w: &mut DopriWork, coeffs: &[f64]| {
                for i in 0..dim {
                    let mut acc = C64::default();
                    for (j, &c) in coeffs.iter().enumerate() {
                        acc += c * w.k[j][i];
                    }
                    w.tmp[i] = y[i] + step * acc;
                }
            };

            stage(&mut w, &[A21]);
            sys.rhs(t + C2 * step, &w.tmp, &mut w.k[1]);
            stage(&mut w, &[A31, A32]);
            sys.rhs(t + C3 * step, &w.tmp, &mut w.k[2]);
            stage(&mut w, &[A41, A42, A43]);
            sys.rhs(t + C4 * step, &w.tmp, &mut w.k[3]);
            stage(&mut w, &[A51, A52, A53, A54]);
            sys.rhs(t + C5 * step, &w.tmp, &mut w.k[4]);
            stage(&mut w, &[A61, A62, A63, A64, A65]);
            sys.rhs(t + step, &w.tmp, &mut w.k[5]);
            for i in 0..dim {
                w.y_new[i] = y[i]
                    + step
                        * (B1 * w.k[0][i]
                            + B3 * w.k[2][i]
                            + B4 * w.k[3][i]
                            + B5 * w.k[4][i]
                            + B6 * w.k[5][i]);
            }
            let t_new = if clamped { target } else { t + step };
            sys.rhs(t_new, &w.y_new, &mut w.k[6]);
            sol.stats.rhs_evals += 6;

            if !finite(&w.y_new) || !finite(&w.k[6]) {
                if step <= min_step {
                    return Err(Error::Divergence { t });
                }
                h = step * MIN_FACTOR;
                sol.stats.rejected += 1;
                continue;
            }

            let mut ratio: f64 = 0.0;
            for i in 0..dim {
                let e = step
                    * (E1 * w.k[0][i]
                        + E3 * w.k[2][i]
                        + E4 * w.k[3][i]
                        + E5 * w.k[4][i]
                        + E6 * w.k[5][i]
                        + E7 * w.k[6][i]);
                let scale = tol * step * (1.0 + y[i].norm().max(w.y_new[i].norm()));
                ratio = ratio.max(e.norm() / scale);
            }

            let factor = if ratio == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * libm::pow(ratio, -0.25)).clamp(MIN_FACTOR, MAX_FACTOR)
            };

            if ratio <= 1.0 {
                sol.stats.steps += 1;
                let per_time = ratio * tol;
                if per_time > sol.stats.max_error_estimate {
                    sol.stats.max_error_estimate = per_time;
                }
                t = t_new;
                core::mem::swap(y, &mut w.y_new);
                w.k.swap(0, 6);
                sys.check(t, y)?;
                // A clamped step says nothing about the natural step size.
                if !clamped || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                sol.stats.rejected += 1;
                h = step * factor.min(1.0);
            }
        }
        sol.push(target, y);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    struct Rotation(f64);

    impl OdeSystem for Rotation {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
            dy[0] = C64::new(0.0, -self.0) * y[0];
        }
    }

    struct Still;

    impl OdeSystem for Still {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, _y: &[C64], dy: &mut [C64]) {
            dy.fill(C64::default());
        }
    }

    /// ẏ = −iHy for a fixed Hermitian 2×2 H.
    struct TwoLevel {
        h: [[C64; 2]; 2],
    }

    impl OdeSystem for TwoLevel {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
            let mi = C64::new(0.0, -1.0);
            dy[0] = mi * (self.h[0][0] * y[0] + self.h[0][1] * y[1]);
            dy[1] = mi * (self.h[1][0] * y[0] + self.h[1][1] * y[1]);
        }
    }

    /// ẏ = y², blows up at t = 1 for y(0) = 1.
    struct Blowup;

    impl OdeSystem for Blowup {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, _t: f64, y: &[C64], dy: &mut [C64]) {
            dy[0] = y[0] * y[0];
        }
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn exponential_adaptive() {
        let sol = integrate(
            &Rotation(1.0),
            &[one()],
            &[0.0, PI],
            Method::Rk45Adaptive { tol: 1e-10 },
        )
        .unwrap();
        assert!((sol.sample(1)[0] + one()).norm() < 1e-8);
        assert_eq!(sol.times, vec![0.0, PI]);
    }

    #[test]
    fn constant_solution_exact() {
        let y0 = [C64::new(0.3, -1.2), C64::new(2.0, 0.5)];
        for m in [Method::Rk4Fixed { dt: 0.1 }, Method::adaptive()] {
            let sol = integrate(&Still, &y0, &[0.0, 1.0, 7.5, 100.0], m).unwrap();
            for k in 0..sol.len() {
                assert_eq!(sol.sample(k), &y0);
            }
        }
    }

    #[test]
    fn two_level_norm_and_exact_propagator() {
        // H = ε σ_z + v σ_x, exp(−iHt) = cos(ωt) I − i sin(ωt) H/ω.
        let (eps, v) = (0.3, 0.7);
        let h = [
            [C64::new(eps, 0.0), C64::new(v, 0.0)],
            [C64::new(v, 0.0), C64::new(-eps, 0.0)],
        ];
        let sys = TwoLevel { h };
        let times: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let sol = integrate(
            &sys,
            &[one(), C64::default()],
            &times,
            Method::Rk45Adaptive { tol: 1e-10 },
        )
        .unwrap();
        let w = (eps * eps + v * v).sqrt();
        for (k, &t) in times.iter().enumerate() {
            let y = sol.sample(k);
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-9, "t = {t}");
            let exact0 = C64::new((w * t).cos(), -(w * t).sin() * eps / w);
            let exact1 = C64::new(0.0, -(w * t).sin() * v / w);
            assert!((y[0] - exact0).norm() < 1e-8);
            assert!((y[1] - exact1).norm() < 1e-8);
        }
    }

    #[test]
    fn rk4_fourth_order() {
        let err = |dt: f64| {
            let sol = integrate(
                &Rotation(1.0),
                &[one()],
                &[0.0, 10.0],
                Method::Rk4Fixed { dt },
            )
            .unwrap();
            (sol.sample(1)[0] - C64::new(10f64.cos(), -10f64.sin())).norm()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn reproducible() {
        let run = || {
            integrate(
                &Rotation(2.3),
                &[one()],
                &[0.0, 1.0, 50.0],
                Method::adaptive(),
            )
            .unwrap()
        };
        let (a, b) = (run(), run());
        assert_eq!(a, b);
        assert_eq!(a.sample(2)[0].re.to_bits(), b.sample(2)[0].re.to_bits());
    }

    #[test]
    fn blowup_reports_failure_time() {
        let (sol, err) =
            integrate_partial(&Blowup, &[one()], &[0.0, 0.5, 2.0], Method::adaptive()).unwrap();
        assert_eq!(sol.len(), 2);
        match err {
            Some(Error::Stiffness { t }) | Some(Error::Divergence { t }) => {
                assert!(t > 0.99 && t <= 1.0, "t = {t}")
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = integrate(
            &Blowup,
            &[one()],
            &[0.0, 2.0],
            Method::Rk4Fixed { dt: 0.01 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn bad_inputs() {
        assert!(integrate(&Rotation(1.0), &[one(), one()], &[0.0], Method::adaptive()).is_err());
        assert!(integrate(
            &Rotation(1.0),
            &[one()],
            &[0.0, 1.0],
            Method::Rk4Fixed { dt: 0.0 }
        )
        .is_err());
        assert!(integrate(&Rotation(1.0), &[one()], &[1.0, 0.0], Method::adaptive()).is_err());
    }
}
