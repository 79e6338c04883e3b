//! Small fixed-size complex linear algebra used throughout the solver.
//!
//! Everything here is 2x2 or 4x4 at most, so the implementations are direct:
//! closed-form determinants and inverses, and a Jacobi sweep for the few
//! places that need eigenvalues of a symmetric/Hermitian matrix.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;

pub type C64 = Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Complex 2-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2(pub [C64; 2]);

impl Vec2 {
    pub fn zero() -> Self {
        Vec2([C64::ZERO; 2])
    }

    pub fn conj(&self) -> Self {
        Vec2([self.0[0].conj(), self.0[1].conj()])
    }

    /// Bilinear dot product (no conjugation).
    pub fn dot(&self, other: &Vec2) -> C64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.0[0].norm_sqr() + self.0[1].norm_sqr())
    }

    pub fn scale(&self, k: C64) -> Self {
        Vec2([self.0[0] * k, self.0[1] * k])
    }

    pub fn sub(&self, other: &Vec2) -> Self {
        Vec2([self.0[0] - other.0[0], self.0[1] - other.0[1]])
    }

    pub fn max_imag(&self) -> f64 {
        let a = self.0[0].im.abs();
        let b = self.0[1].im.abs();
        if a > b {
            a
        } else {
            b
        }
    }
}

/// Complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[C64::ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2([[cr(m[0][0]), cr(m[0][1])], [cr(m[1][0]), cr(m[1][1])]])
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Self {
        Mat2([[self.0[0][0], self.0[1][0]], [self.0[0][1], self.0[1][1]]])
    }

    pub fn conj(&self) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j].conj();
            }
        }
        r
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn mul(&self, other: &Mat2) -> Self {
        let mut r = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][0] * other.0[0][j] + self.0[i][1] * other.0[1][j];
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        Vec2([
            self.0[0][0] * v.0[0] + self.0[0][1] * v.0[1],
            self.0[1][0] * v.0[0] + self.0[1][1] * v.0[1],
        ])
    }

    pub fn add(&self, other: &Mat2) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j] + other.0[i][j];
            }
        }
        r
    }

    pub fn sub(&self, other: &Mat2) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j] - other.0[i][j];
            }
        }
        r
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut r = *self;
        for i in 0..2 {
            for j in 0..2 {
                r.0[i][j] = self.0[i][j] * k;
            }
        }
        r
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        let scale = self.max_abs();
        if d.norm() <= 1e-300 * (1.0 + scale * scale) {
            return None;
        }
        let inv = C64::ONE / d;
        Some(Mat2([
            [self.0[1][1] * inv, -self.0[0][1] * inv],
            [-self.0[1][0] * inv, self.0[0][0] * inv],
        ]))
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.0[i][j].norm();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += self.0[i][j].norm_sqr();
            }
        }
        libm::sqrt(s)
    }

    pub fn max_imag(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let a = self.0[i][j].im.abs();
                if a > m {
                    m = a;
                }
            }
        }
        m
    }

    /// Hermitian defect ||M - M*||_max.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn col(&self, j: usize) -> Vec2 {
        Vec2([self.0[0][j], self.0[1][j]])
    }

    pub fn row(&self, i: usize) -> Vec2 {
        Vec2([self.0[i][0], self.0[i][1]])
    }

    pub fn from_cols(c0: Vec2, c1: Vec2) -> Self {
        Mat2([[c0.0[0], c1.0[0]], [c0.0[1], c1.0[1]]])
    }

    pub fn from_rows(r0: Vec2, r1: Vec2) -> Self {
        Mat2([[r0.0[0], r0.0[1]], [r1.0[0], r1.0[1]]])
    }

    /// Smallest singular value, from the eigenvalues of M* M.
    pub fn smallest_singular_value(&self) -> f64 {
        let g = self.adjoint().mul(self);
        // g is Hermitian PSD 2x2; eigenvalues by the closed form.
        let tr = g.trace().re;
        let det = g.det().re.max(0.0);
        let disc = (tr * tr / 4.0 - det).max(0.0);
        let lo = tr / 2.0 - libm::sqrt(disc);
        libm::sqrt(lo.max(0.0))
    }
}

/// Eigenvalues of a real symmetric 2x2 matrix, ascending.
pub fn sym2_eigenvalues(m: &Mat2) -> [f64; 2] {
    let a = m.0[0][0].re;
    let b = 0.5 * (m.0[0][1].re + m.0[1][0].re);
    let d = m.0[1][1].re;
    let tr = a + d;
    let disc = libm::sqrt(((a - d) * 0.5) * ((a - d) * 0.5) + b * b);
    [tr * 0.5 - disc, tr * 0.5 + disc]
}

/// Eigenvalues of a real symmetric n x n matrix by cyclic Jacobi, ascending.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i][j] * m[i][j];
            }
        }
        let scale: f64 = (0..n).map(|i| m[i][i] * m[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let cth = 1.0 / libm::sqrt(1.0 + t * t);
                let sth = t * cth;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = cth * mkp - sth * mkq;
                    m[k][q] = sth * mkp + cth * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = cth * mpk - sth * mqk;
                    m[q][k] = sth * mpk + cth * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Eigenvalues of a Hermitian n x n matrix (given as rows), ascending.
///
/// Uses the real symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is
/// that of the Hermitian matrix with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &[Vec<C64>]) -> Vec<f64> {
    let n = h.len();
    let mut s = vec![vec![0.0f64; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = h[i][j].re;
            s[i][j + n] = -h[i][j].im;
            s[i + n][j] = h[i][j].im;
            s[i + n][j + n] = h[i][j].re;
        }
    }
    let all = jacobi_eigenvalues(&s);
    // Each eigenvalue appears twice; take every other entry of the sorted list.
    all.into_iter().step_by(2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat2([[c(1.0, 2.0), c(0.5, -1.0)], [c(3.0, 0.0), c(-1.0, 0.25)]]);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert!(id.sub(&Mat2::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_closed_form() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let e = jacobi_eigenvalues(&a);
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_embedding() {
        let h = vec![
            vec![cr(2.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), cr(2.0)],
        ];
        let e = hermitian_eigenvalues(&h);
        assert!((e[0] - 1.0).abs() < 1e-10 && (e[1] - 3.0).abs() < 1e-10);
    }
}
