//! Quasi-derivative state, the Hamiltonian matrices J and S, and the
//! Lagrangian bracket.
//!
//! The fourth-order equation l y = lambda y is equivalent to the first-order
//! Hamiltonian system J z' = S(x, lambda) z in the state
//! z = (y^[0], y^[1], y^[3], y^[2]) — note that position 3 holds the THIRD
//! quasi-derivative and position 4 the second. That ordering makes the u/v
//! split free: u = (y^[0], y^[1]) carries the "Dirichlet" data and
//! v = (y^[3], y^[2]) the "natural" data.

use crate::error::Result;
use crate::linalg::{cr, C64, Mat2, Vec2};
use crate::problem::ProblemSpec;
use alloc::vec::Vec;

/// State vector (y^[0], y^[1], y^[3], y^[2]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiVector {
    pub z: [C64; 4],
}

impl QuasiVector {
    pub fn new(z: [C64; 4]) -> Self {
        QuasiVector { z }
    }

    pub fn from_real(z: [f64; 4]) -> Self {
        QuasiVector { z: [cr(z[0]), cr(z[1]), cr(z[2]), cr(z[3])] }
    }

    pub fn zero() -> Self {
        QuasiVector { z: [C64::ZERO; 4] }
    }

    /// Standard basis vector e_i, i in 1..=4.
    pub fn basis(i: usize) -> Self {
        let mut z = [C64::ZERO; 4];
        z[i - 1] = C64::ONE;
        QuasiVector { z }
    }

    /// u = (y^[0], y^[1]).
    pub fn u(&self) -> Vec2 {
        Vec2([self.z[0], self.z[1]])
    }

    /// v = (y^[3], y^[2]).
    pub fn v(&self) -> Vec2 {
        Vec2([self.z[2], self.z[3]])
    }

    pub fn conj(&self) -> Self {
        QuasiVector {
            z: [self.z[0].conj(), self.z[1].conj(), self.z[2].conj(), self.z[3].conj()],
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        QuasiVector { z: [self.z[0] * k, self.z[1] * k, self.z[2] * k, self.z[3] * k] }
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.z.iter().map(|c| c.norm_sqr()).sum())
    }

    pub fn max_imag(&self) -> f64 {
        let mut m = 0.0f64;
        for c in &self.z {
            if c.im.abs() > m {
                m = c.im.abs();
            }
        }
        m
    }
}

/// J (constant) and S(x, lambda) of the Hamiltonian system J z' = S z.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    /// Block form with -I2 upper-right, I2 lower-left.
    pub j: [[f64; 4]; 4],
    /// Symmetric; S[0][0] = lambda*w - q, S[1][1] = -s, S[1][2] = S[2][1] = 1,
    /// S[3][3] = 1/p, all other entries zero. Complex only through lambda.
    pub s: [[C64; 4]; 4],
}

pub const J: [[f64; 4]; 4] = [
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
];

pub fn system_matrices(problem: &ProblemSpec, x: f64, lambda: C64) -> Result<SystemMatrices> {
    let (p, s, q, w) = problem.evaluate_coefficients(x)?;
    let mut sm = [[C64::ZERO; 4]; 4];
    sm[0][0] = lambda * w - q;
    sm[1][1] = cr(-s);
    sm[1][2] = C64::ONE;
    sm[2][1] = C64::ONE;
    sm[3][3] = cr(1.0 / p);
    Ok(SystemMatrices { j: J, s: sm })
}

/// Right-hand side of z' = -J S z, assembled directly from the coefficients.
///
/// Expanded: y' = y^[1]; (y^[1])' = y^[2]/p; (y^[3])' = (q - lambda w) y;
/// (y^[2])' = s y^[1] - y^[3].
#[inline]
pub fn hamiltonian_rhs(coeff: (f64, f64, f64, f64), lambda: C64, z: &[C64; 4]) -> [C64; 4] {
    let (p, s, q, w) = coeff;
    [
        z[1],
        z[3] / p,
        (cr(q) - lambda * w) * z[0],
        z[1] * s - z[2],
    ]
}

/// Lagrangian form [f,g] = u_f^T conj(v_g) - v_f^T conj(u_g).
pub fn lagrangian_bracket(zf: &QuasiVector, zg: &QuasiVector) -> C64 {
    zf.u().dot(&zg.v().conj()) - zf.v().dot(&zg.u().conj())
}

/// Matrix of pairwise brackets: entry (j,k) = [states[j], states[k]].
pub fn bracket_matrix(states: &[QuasiVector]) -> Vec<Vec<C64>> {
    states
        .iter()
        .map(|f| states.iter().map(|g| lagrangian_bracket(f, g)).collect())
        .collect()
}

/// Hermitian 2x2 Weyl matrix W = V U^{-1} at a point, with the symmetrization
/// defect recorded for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylMatrix {
    pub w: Mat2,
    /// ||W - W*|| before symmetrization (0 when lambda is not real and no
    /// symmetrization was applied).
    pub hermitian_defect: f64,
}

impl WeylMatrix {
    /// k = W[1,1] in the sigma formulas.
    pub fn k(&self) -> C64 {
        self.w.0[0][0]
    }

    /// m = W[1,2].
    pub fn m(&self) -> C64 {
        self.w.0[0][1]
    }

    /// n = W[2,2].
    pub fn n(&self) -> C64 {
        self.w.0[1][1]
    }
}
