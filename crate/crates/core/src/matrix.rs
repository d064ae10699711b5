//! Dense 2×2 complex matrices.
//!
//! Atomic matrices use the basis order (e, g). Ladder matrices use
//! (|n,e⟩, |n+1,g⟩).

use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwo {
    pub m: [[C64; 2]; 2],
}

impl TwoByTwo {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub const fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn diagonal(d0: C64, d1: C64) -> Self {
        Self::new(d0, C64::default(), C64::default(), d1)
    }

    /// Builds from a row-major slice of length 4.
    pub fn from_slice(v: &[C64]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.m[r][c]
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.m;
        Self::new(
            a[0][0].conj(),
            a[1][0].conj(),
            a[0][1].conj(),
            a[1][1].conj(),
        )
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    pub fn column(&self, c: usize) -> [C64; 2] {
        [self.m[0][c], self.m[1][c]]
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.m[r][c] - o.m[r][c]).norm());
            }
        }
        d
    }

    /// ‖U†U − I‖ in the max-entry norm.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().mul(self).max_abs_diff(&Self::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Default for TwoByTwo {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn algebra() {
        let a = TwoByTwo::new(c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(3.0, 0.0));
        assert_eq!(a.mul(&TwoByTwo::identity()), a);
        assert_eq!(a.adjoint().adjoint(), a);
        let b = TwoByTwo::new(c(0.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(-1.0, 0.0));
        assert!((a.mul(&b).det() - a.det() * b.det()).norm() < 1e-12);
        let v = a.apply([c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(v, a.column(0));
    }

    #[test]
    fn rotation_is_unitary() {
        let (s, co) = 0.3f64.sin_cos();
        let u = TwoByTwo::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0));
        assert!(u.unitarity_defect() < 1e-15);
        assert!((u.det() - c(1.0, 0.0)).norm() < 1e-15);
        let scaled = TwoByTwo::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
        assert!((scaled.unitarity_defect() - 3.0).abs() < 1e-15);
    }
}
