//! Truncated cavity ⊗ atom ⊗ mirror Hilbert space.
//!
//! Basis index: `((cav · 2) + atom) · n_mech + mech`, with atom 0 = |e⟩ and
//! 1 = |g⟩. σ_z is +1 on |e⟩.
//!
//! Bosonic operators are the usual truncated ladder matrices, so
//! `[a, a†] = I` holds on every level except the top one of each mode, where
//! the commutator equals `1 − n_cav`. Nothing here tries to hide that; the
//! cutoffs have to be large enough for it not to matter.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{
    coherent_amplitudes, Atom, CavityInit, InitialState, SystemParams, MAX_TAIL_MASS,
};
use crate::C64;

/// Default bound on the total Hilbert dimension.
pub const DEFAULT_MAX_DIM: usize = 200_000;

/// Fock cutoffs (dimensions) of the cavity and mechanical modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationSpec {
    pub n_cav: usize,
    pub n_mech: usize,
}

impl TruncationSpec {
    pub const fn new(n_cav: usize, n_mech: usize) -> Self {
        Self { n_cav, n_mech }
    }

    pub fn dim(&self) -> usize {
        self.n_cav * 2 * self.n_mech
    }

    pub fn index(&self, cav: usize, atom: Atom, mech: usize) -> usize {
        (cav * 2 + atom.index()) * self.n_mech + mech
    }

    /// Inverse of [`index`](Self::index).
    pub fn decompose(&self, idx: usize) -> (usize, Atom, usize) {
        let mech = idx % self.n_mech;
        let rest = idx / self.n_mech;
        let atom = if rest % 2 == 0 {
            Atom::Excited
        } else {
            Atom::Ground
        };
        (rest / 2, atom, mech)
    }

    pub fn check(&self) -> core::result::Result<(), String> {
        self.check_with_bound(DEFAULT_MAX_DIM)
    }

    pub fn check_with_bound(&self, max_dim: usize) -> core::result::Result<(), String> {
        if self.n_cav < 2 || self.n_mech < 2 {
            return Err(format!(
                "cutoffs must be at least 2, got n_cav = {}, n_mech = {}",
                self.n_cav, self.n_mech
            ));
        }
        if self.dim() > max_dim {
            return Err(format!(
                "dimension {} exceeds the memory bound {max_dim}",
                self.dim()
            ));
        }
        Ok(())
    }

    /// Iterates over `(index, cav, atom, mech)` for every basis state.
    pub fn basis(&self) -> impl Iterator<Item = (usize, usize, Atom, usize)> + '_ {
        (0..self.dim()).map(move |i| {
            let (c, a, m) = self.decompose(i);
            (i, c, a, m)
        })
    }
}

/// Square complex matrix in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl SparseOp {
    /// Builds a matrix from `(row, col, value)` entries; duplicates are summed.
    pub fn from_triplets(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut e: Vec<(usize, usize, C64)> = entries.into_iter().collect();
        e.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(e.len());
        let mut vals: Vec<C64> = Vec::with_capacity(e.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in e {
            assert!(
                r < dim && c < dim,
                "entry ({r}, {c}) outside dimension {dim}"
            );
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| C64::new(1.0, 0.0)))
    }

    pub fn diagonal(diag: impl IntoIterator<Item = C64>) -> Self {
        let d: Vec<C64> = diag.into_iter().collect();
        let n = d.len();
        Self::from_triplets(n, d.into_iter().enumerate().map(|(i, v)| (i, i, v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether this operator has been verified Hermitian.
    pub fn is_marked_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Verifies exact Hermiticity and records it.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let dev = self.hermiticity_defect();
        if dev != 0.0 {
            return Err(Error::InvalidInput(format!(
                "operator claimed Hermitian but max |H - H†| = {dev:e}"
            )));
        }
        self.hermitian = true;
        Ok(self)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C64::default(),
        }
    }

    /// `(row, col, value)` of every stored entry, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    /// `y = A·x`.
    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// `y += s·A·x`.
    pub fn matvec_acc(&self, s: C64, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out += s * acc;
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::default(); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// ⟨x|A|x⟩.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        let mut acc = C64::default();
        for r in 0..self.dim {
            let mut row = C64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * x[self.cols[k]];
            }
            acc += x[r].conj() * row;
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scaled(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= s);
        out.hermitian = false;
        out
    }

    /// `self + s·other`.
    pub fn add_scaled(&self, s: C64, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(
            self.dim,
            self.entries()
                .chain(other.entries().map(|(r, c, v)| (r, c, s * v))),
        )
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Vec::new();
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let mid = self.cols[k];
                let a = self.vals[k];
                for j in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    out.push((r, other.cols[j], a * other.vals[j]));
                }
            }
        }
        Self::from_triplets(self.dim, out)
    }

    /// max |A − B| over all entries.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add_scaled(C64::new(-1.0, 0.0), other)
            .vals
            .iter()
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// max |A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }
}

/// Operators that [`build_operator`] knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Cavity annihilation a.
    A,
    /// Cavity creation a†.
    Adag,
    /// Mechanical annihilation b.
    B,
    /// Mechanical creation b†.
    Bdag,
    /// Photon number n = a†a.
    Ncav,
    /// Phonon number N = b†b.
    Nmech,
    SigmaZ,
    /// σ₊ = |e⟩⟨g|.
    SigmaP,
    /// σ₋ = |g⟩⟨e|.
    SigmaM,
}

const ONE: C64 = C64::new(1.0, 0.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn build_operator(kind: OperatorKind, trunc: TruncationSpec) -> SparseOp {
    let dim = trunc.dim();
    let atoms = [Atom::Excited, Atom::Ground];
    let mut e = Vec::new();
    match kind {
        OperatorKind::A | OperatorKind::Adag => {
            for c in 1..trunc.n_cav {
                for &a in &atoms {
                    for m in 0..trunc.n_mech {
                        let lo = trunc.index(c - 1, a, m);
                        let hi = trunc.index(c, a, m);
                        let v = real(math::sqrt(c as f64));
                        e.push(if kind == OperatorKind::A {
                            (lo, hi, v)
                        } else {
                            (hi, lo, v)
                        });
                    }
                }
            }
        }
        OperatorKind::B | OperatorKind::Bdag => {
            for (i, c, a, m) in trunc.basis() {
                if m + 1 < trunc.n_mech {
                    let hi = trunc.index(c, a, m + 1);
                    let v = real(math::sqrt((m + 1) as f64));
                    e.push(if kind == OperatorKind::B {
                        (i, hi, v)
                    } else {
                        (hi, i, v)
                    });
                }
            }
        }
        OperatorKind::Ncav => e.extend(trunc.basis().map(|(i, c, _, _)| (i, i, real(c as f64)))),
        OperatorKind::Nmech => e.extend(trunc.basis().map(|(i, _, _, m)| (i, i, real(m as f64)))),
        OperatorKind::SigmaZ => e.extend(
            trunc
                .basis()
                .map(|(i, _, a, _)| (i, i, if a == Atom::Excited { ONE } else { -ONE })),
        ),
        OperatorKind::SigmaP | OperatorKind::SigmaM => {
            for c in 0..trunc.n_cav {
                for m in 0..trunc.n_mech {
                    let up = trunc.index(c, Atom::Excited, m);
                    let down = trunc.index(c, Atom::Ground, m);
                    e.push(if kind == OperatorKind::SigmaP {
                        (up, down, ONE)
                    } else {
                        (down, up, ONE)
                    });
                }
            }
        }
    }
    let op = SparseOp::from_triplets(dim, e);
    match kind {
        OperatorKind::Ncav | OperatorKind::Nmech | OperatorKind::SigmaZ => {
            op.into_hermitian().expect("diagonal real operator")
        }
        _ => op,
    }
}

/// Static and driven pieces of H(t) = H_static + Ω cos(ω_L t)·(a + a†).
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    /// ω_c n + ω_m N − G n(b + b†) + (ω_a/2)σ_z + λ(aσ₊ + a†σ₋).
    pub static_part: SparseOp,
    /// a + a†, to be scaled by Ω cos(ω_L t).
    pub pump: SparseOp,
}

/// Static Hamiltonian with the given cavity and atom frequencies. Passing
/// `omega_c = 0` and `omega_a − omega_c` gives the generator in the frame
/// rotating at ω_c(n + σ_z/2).
pub(crate) fn static_hamiltonian(
    params: &SystemParams,
    cavity_freq: f64,
    atom_freq: f64,
    trunc: TruncationSpec,
) -> SparseOp {
    let mut e = Vec::new();
    for (i, c, a, m) in trunc.basis() {
        let sz = if a == Atom::Excited { 1.0 } else { -1.0 };
        let d = cavity_freq * c as f64 + params.omega_m * m as f64 + 0.5 * atom_freq * sz;
        e.push((i, i, real(d)));
        // −G n (b + b†)
        if m + 1 < trunc.n_mech && c > 0 && params.g_om != 0.0 {
            let j = trunc.index(c, a, m + 1);
            let v = real(-params.g_om * c as f64 * math::sqrt((m + 1) as f64));
            e.push((i, j, v));
            e.push((j, i, v));
        }
        // λ (a σ₊ + a† σ₋): |c, g⟩ ↔ |c−1, e⟩
        if a == Atom::Ground && c > 0 && params.lambda_jc != 0.0 {
            let j = trunc.index(c - 1, Atom::Excited, m);
            let v = real(params.lambda_jc * math::sqrt(c as f64));
            e.push((i, j, v));
            e.push((j, i, v));
        }
    }
    SparseOp::from_triplets(trunc.dim(), e)
        .into_hermitian()
        .expect("static Hamiltonian is Hermitian by construction")
}

pub fn hamiltonian_parts(params: &SystemParams, trunc: TruncationSpec) -> HamiltonianParts {
    let a = build_operator(OperatorKind::A, trunc);
    let pump = a
        .add_scaled(ONE, &a.adjoint())
        .into_hermitian()
        .expect("a + a† is Hermitian");
    HamiltonianParts {
        static_part: static_hamiltonian(params, params.omega_c, params.omega_a, trunc),
        pump,
    }
}

/// Full H(t) of the hybrid system as one sparse matrix.
pub fn hamiltonian_at(params: &SystemParams, t: f64, trunc: TruncationSpec) -> SparseOp {
    let parts = hamiltonian_parts(params, trunc);
    let drive = params.pump_amp * math::cos(params.omega_l * t);
    parts
        .static_part
        .add_scaled(real(drive), &parts.pump)
        .into_hermitian()
        .expect("sum of Hermitian operators with real weight")
}

/// State vector over the truncated hybrid basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridState {
    pub amplitudes: Vec<C64>,
    pub trunc: TruncationSpec,
}

impl HybridState {
    pub fn new(amplitudes: Vec<C64>, trunc: TruncationSpec) -> Result<Self> {
        if amplitudes.len() != trunc.dim() {
            return Err(Error::DimensionMismatch {
                expected: trunc.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, trunc })
    }

    pub fn basis_state(trunc: TruncationSpec, cav: usize, atom: Atom, mech: usize) -> Self {
        let mut amplitudes = vec![C64::default(); trunc.dim()];
        amplitudes[trunc.index(cav, atom, mech)] = ONE;
        Self { amplitudes, trunc }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of finding the atom in |e⟩.
    pub fn excited_population(&self) -> f64 {
        self.trunc
            .basis()
            .filter(|&(_, _, a, _)| a == Atom::Excited)
            .map(|(i, ..)| self.amplitudes[i].norm_sqr())
            .sum()
    }

    pub fn expectation(&self, op: &SparseOp) -> Result<C64> {
        if op.dim() != self.trunc.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.trunc.dim(),
                found: op.dim(),
            });
        }
        Ok(op.expectation(&self.amplitudes))
    }
}

/// Matrix–vector product `op · s`.
pub fn apply(op: &SparseOp, s: &HybridState) -> Result<HybridState> {
    if op.dim() != s.amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: s.amplitudes.len(),
            found: op.dim(),
        });
    }
    Ok(HybridState {
        amplitudes: op.matvec(&s.amplitudes),
        trunc: s.trunc,
    })
}

fn mode_amplitudes(alpha: C64, cutoff: usize, mode: &'static str) -> Result<Vec<C64>> {
    let amps = coherent_amplitudes(alpha, cutoff)?;
    let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    let tail = (1.0 - kept).max(0.0);
    if tail > MAX_TAIL_MASS {
        return Err(Error::CutoffTooSmall { mode, cutoff, tail });
    }
    Ok(amps)
}

/// |cavity⟩ ⊗ |atom⟩ ⊗ |Γ⟩ on the truncated basis (not renormalized).
pub fn product_state(initial: &InitialState, trunc: TruncationSpec) -> Result<HybridState> {
    let cav = match initial.cavity {
        CavityInit::Coherent(alpha) => mode_amplitudes(alpha, trunc.n_cav, "cavity")?,
        CavityInit::Fock(n) => {
            if n >= trunc.n_cav {
                return Err(Error::CutoffTooSmall {
                    mode: "cavity",
                    cutoff: trunc.n_cav,
                    tail: 1.0,
                });
            }
            let mut v = vec![C64::default(); trunc.n_cav];
            v[n] = ONE;
            v
        }
    };
    let mech = mode_amplitudes(initial.mech, trunc.n_mech, "mechanical")?;
    let mut amplitudes = vec![C64::default(); trunc.dim()];
    for (c, &cc) in cav.iter().enumerate() {
        for (m, &mm) in mech.iter().enumerate() {
            amplitudes[trunc.index(c, initial.atom, m)] = cc * mm;
        }
    }
    Ok(HybridState { amplitudes, trunc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use OperatorKind::*;

    const T: TruncationSpec = TruncationSpec::new(6, 4);

    fn params() -> SystemParams {
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

    #[test]
    fn annihilation_on_single_photon() {
        let s = HybridState::basis_state(T, 1, Atom::Excited, 0);
        let out = apply(&build_operator(A, T), &s).unwrap();
        let target = HybridState::basis_state(T, 0, Atom::Excited, 0);
        assert_eq!(out, target);
    }

    #[test]
    fn commutator_is_identity_below_top_level() {
        let a = build_operator(A, T);
        let ad = build_operator(Adag, T);
        let comm = a.mul(&ad).add_scaled(-ONE, &ad.mul(&a));
        for (i, c, _, _) in T.basis() {
            let expected = if c + 1 < T.n_cav {
                1.0
            } else {
                1.0 - T.n_cav as f64
            };
            assert!((comm.get(i, i) - real(expected)).norm() < 1e-12);
        }
        assert_eq!(comm.nnz(), T.dim());
    }

    #[test]
    fn number_operator_is_exact() {
        // √n·√n rounds back to n to within one ulp.
        let ulp = |n: usize| 2.0 * f64::EPSILON * n as f64;
        let a = build_operator(A, T);
        let n = a.adjoint().mul(&a);
        assert!(n.max_abs_diff(&build_operator(Ncav, T)) <= ulp(T.n_cav));
        let b = build_operator(B, T);
        assert!(b.adjoint().mul(&b).max_abs_diff(&build_operator(Nmech, T)) <= ulp(T.n_mech));
        assert_eq!(build_operator(Adag, T).max_abs_diff(&a.adjoint()), 0.0);
    }

    #[test]
    fn sigma_plus_action() {
        let sp = build_operator(SigmaP, T);
        let g = HybridState::basis_state(T, 2, Atom::Ground, 1);
        assert_eq!(
            apply(&sp, &g).unwrap(),
            HybridState::basis_state(T, 2, Atom::Excited, 1)
        );
        let e = HybridState::basis_state(T, 2, Atom::Excited, 1);
        assert!(apply(&sp, &e).unwrap().norm_sqr() == 0.0);
        let sz = build_operator(SigmaZ, T);
        assert_eq!(sz.expectation(&e.amplitudes), ONE);
    }

    #[test]
    fn basis_index_round_trip() {
        for i in 0..T.dim() {
            let (c, a, m) = T.decompose(i);
            assert_eq!(T.index(c, a, m), i);
        }
    }

    #[test]
    fn hamiltonian_hermitian_and_static_without_pump() {
        let mut p = params();
        let h = hamiltonian_at(&p, 3.7, T);
        assert_eq!(h.hermiticity_defect(), 0.0);
        assert!(h.is_marked_hermitian());
        p.pump_amp = 0.0;
        assert_eq!(hamiltonian_at(&p, 1.0, T), hamiltonian_at(&p, 17.0, T));
    }

    #[test]
    fn hamiltonian_matches_operator_algebra() {
        let p = params();
        let t = 2.3;
        let op = |k| build_operator(k, T);
        let n = op(Ncav);
        let x_m = op(B).add_scaled(ONE, &op(Bdag));
        let jc = op(A)
            .mul(&op(SigmaP))
            .add_scaled(ONE, &op(Adag).mul(&op(SigmaM)));
        let pump = op(A).add_scaled(ONE, &op(Adag));
        let h = n
            .scaled(real(p.omega_c))
            .add_scaled(real(p.omega_m), &op(Nmech))
            .add_scaled(real(-p.g_om), &n.mul(&x_m))
            .add_scaled(real(p.pump_amp * (p.omega_l * t).cos()), &pump)
            .add_scaled(real(p.omega_a / 2.0), &op(SigmaZ))
            .add_scaled(real(p.lambda_jc), &jc);
        assert!(h.max_abs_diff(&hamiltonian_at(&p, t, T)) < 1e-15);
    }

    #[test]
    fn diagonal_case_eigenvalues() {
        let mut p = params();
        p.g_om = 0.0;
        p.lambda_jc = 0.0;
        p.pump_amp = 0.0;
        let h = hamiltonian_at(&p, 0.0, T);
        for (c, a, m) in [
            (2, Atom::Excited, 3),
            (0, Atom::Ground, 1),
            (5, Atom::Excited, 0),
        ] {
            let s = HybridState::basis_state(T, c, a, m);
            let hs = apply(&h, &s).unwrap();
            let sz = if a == Atom::Excited { 1.0 } else { -1.0 };
            let e = c as f64 + p.omega_m * m as f64 + p.omega_a / 2.0 * sz;
            for (x, y) in hs.amplitudes.iter().zip(&s.amplitudes) {
                assert!((x - y * e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn photon_number_of_coherent_state() {
        let t = TruncationSpec::new(30, 3);
        let init = InitialState {
            cavity: CavityInit::Coherent(C64::new(2.0, 0.0)),
            atom: Atom::Excited,
            mech: C64::default(),
        };
        let s = product_state(&init, t).unwrap();
        let n = s.expectation(&build_operator(Ncav, t)).unwrap();
        assert!((n.re - 4.0).abs() < 1e-8);
    }

    #[test]
    fn identity_and_dimension_checks() {
        let s = HybridState::basis_state(T, 1, Atom::Ground, 2);
        assert_eq!(apply(&SparseOp::identity(T.dim()), &s).unwrap(), s);
        assert!(matches!(
            apply(&SparseOp::identity(3), &s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn product_states() {
        let t = TruncationSpec::new(30, 19);
        let vac = InitialState {
            cavity: CavityInit::Fock(0),
            atom: Atom::Ground,
            mech: C64::default(),
        };
        let s = product_state(&vac, t).unwrap();
        assert_eq!(s, HybridState::basis_state(t, 0, Atom::Ground, 0));

        let coh = InitialState {
            cavity: CavityInit::Coherent(C64::new(2.0, 0.0)),
            atom: Atom::Excited,
            mech: C64::new(1.0, 0.0),
        };
        assert!((product_state(&coh, t).unwrap().norm_sqr() - 1.0).abs() < 1e-9);

        let big = InitialState {
            cavity: CavityInit::Coherent(C64::new(3.0, 0.0)),
            ..coh
        };
        assert!(matches!(
            product_state(&big, TruncationSpec::new(10, 19)),
            Err(Error::CutoffTooSmall { mode: "cavity", .. })
        ));
    }

    #[test]
    fn hermitian_claim_verified() {
        assert!(build_operator(A, T).into_hermitian().is_err());
        assert!(build_operator(SigmaZ, T).is_marked_hermitian());
    }

    proptest::proptest! {
        #[test]
        fn apply_is_linear(xs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 48),
                           ys in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 48)) {
            let x: Vec<C64> = xs.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let y: Vec<C64> = ys.iter().map(|&(a, b)| C64::new(a, b)).collect();
            let h = hamiltonian_at(&params(), 1.3, T);
            let sum: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let lhs = h.matvec(&sum);
            let (hx, hy) = (h.matvec(&x), h.matvec(&y));
            for k in 0..T.dim() {
                proptest::prop_assert!((lhs[k] - hx[k] - hy[k]).norm() < 1e-14);
            }
        }

        #[test]
        fn hamiltonian_always_hermitian(t in 0.0f64..2000.0, g in 0.0f64..0.01, lam in 0.0f64..0.1) {
            let mut p = params();
            p.g_om = g;
            p.lambda_jc = lam;
            proptest::prop_assert_eq!(hamiltonian_at(&p, t, T).hermiticity_defect(), 0.0);
        }
    }
}
