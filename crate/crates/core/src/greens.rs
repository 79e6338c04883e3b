//! Green's-function kernels at nonreal lambda: dual-normalized solution
//! bases, truncated-kernel corrections, resolvent application, and
//! Hilbert-Schmidt distances by Gauss-Legendre quadrature.

use crate::bc::BoundaryForm;
use crate::error::{Error, Result};
use crate::hamiltonian::{lagrangian_bracket, QuasiVector};
use crate::linalg::{cr, C64, Mat2, Vec2};
use crate::problem::ProblemSpec;
use crate::propagate::{solve_scalar, ScalarTrajectory, StepControl};
use alloc::vec::Vec;

/// Dual-normalized solution basis at a nonreal lambda: a left pair phi_1,
/// phi_2 satisfying the left conditions with [phi_1, conj phi_2](a) = 0, and
/// a right pair psi_1, psi_2 satisfying the right conditions, normalized so
/// that U_R^T V_L - V_R^T U_L = I (and, in the complex-conditions case,
/// [psi_1, conj psi_2](b) = 1).
#[derive(Debug, Clone)]
pub struct SolutionBasis {
    pub lambda: C64,
    phi: [ScalarTrajectory; 2],
    psi: [ScalarTrajectory; 2],
    /// Column-coefficient matrices: the basis member i is
    /// sum_j mix[j][i] * trajectory_j.
    phi_mix: Mat2,
    psi_mix: Mat2,
    /// Right-pair bilinear bracket is nonzero: the kernel carries the
    /// antisymmetric phi correction.
    pub complex_bc: bool,
    pub normalized: bool,
}

fn bilinear_bracket(f: &QuasiVector, g: &QuasiVector) -> C64 {
    // [f, conj g]: no conjugation survives
    f.u().dot(&g.v()) - f.v().dot(&g.u())
}

fn mix_at(traj: &[ScalarTrajectory; 2], mix: &Mat2, i: usize, x: f64) -> QuasiVector {
    let z0 = traj[0].at(x);
    let z1 = traj[1].at(x);
    let mut z = [C64::ZERO; 4];
    for c in 0..4 {
        z[c] = z0.z[c] * mix.0[0][i] + z1.z[c] * mix.0[1][i];
    }
    QuasiVector::new(z)
}

impl SolutionBasis {
    pub fn phi_at(&self, i: usize, x: f64) -> QuasiVector {
        mix_at(&self.phi, &self.phi_mix, i, x)
    }

    pub fn psi_at(&self, i: usize, x: f64) -> QuasiVector {
        mix_at(&self.psi, &self.psi_mix, i, x)
    }

    /// (U_L, V_L, U_R, V_R) blocks at x.
    pub fn blocks_at(&self, x: f64) -> (Mat2, Mat2, Mat2, Mat2) {
        let p0 = self.phi_at(0, x);
        let p1 = self.phi_at(1, x);
        let q0 = self.psi_at(0, x);
        let q1 = self.psi_at(1, x);
        (
            Mat2::from_cols(p0.u(), p1.u()),
            Mat2::from_cols(p0.v(), p1.v()),
            Mat2::from_cols(q0.u(), q1.u()),
            Mat2::from_cols(q0.v(), q1.v()),
        )
    }

    /// ||U_R^T V_L - V_R^T U_L - I|| at x (constant along x up to
    /// integration error).
    pub fn dual_defect(&self, x: f64) -> f64 {
        let (ul, vl, ur, vr) = self.blocks_at(x);
        ur.transpose()
            .mul(&vl)
            .sub(&vr.transpose().mul(&ul))
            .sub(&Mat2::identity())
            .max_abs()
    }

    /// Max deviation of [[-V_R^T, U_R^T], [V_L^T, -U_L^T]] * [[U_L, U_R],
    /// [V_L, V_R]] from the 4x4 identity at x (real-conditions case).
    pub fn inverse_identity_defect(&self, x: f64) -> f64 {
        let (ul, vl, ur, vr) = self.blocks_at(x);
        let b11 = ur.transpose().mul(&vl).sub(&vr.transpose().mul(&ul));
        let b12 = ur.transpose().mul(&vr).sub(&vr.transpose().mul(&ur));
        let b21 = vl.transpose().mul(&ul).sub(&ul.transpose().mul(&vl));
        let b22 = vl.transpose().mul(&ur).sub(&ul.transpose().mul(&vr));
        let mut d = b11.sub(&Mat2::identity()).max_abs();
        d = d.max(b12.max_abs());
        d = d.max(b21.max_abs());
        d = d.max(b22.sub(&Mat2::identity()).max_abs());
        d
    }
}

/// Build the dual-normalized basis on the (regular) interval of `problem`.
///
/// phi columns are initialized from the left pair, psi columns from the right
/// pair; the psi bilinear bracket is scaled to 1 when nonzero (complex
/// conditions), and the phi pair is then re-mixed by X^{-1} so the dual
/// identity holds.
pub fn build_basis(
    problem: &ProblemSpec,
    lambda: C64,
    left_bc: &BoundaryForm,
    right_bc: &BoundaryForm,
    ctrl: &StepControl,
) -> Result<SolutionBasis> {
    if lambda.im == 0.0 {
        return Err(Error::InvalidProblem("Green's basis needs nonreal lambda".into()));
    }
    let (a, b) = (problem.interval.a, problem.interval.b);
    let column = |a1: &Mat2, a2: &Mat2, j: usize| -> QuasiVector {
        let u = a2.adjoint().scale(cr(-1.0));
        let v = a1.adjoint();
        QuasiVector::new([u.0[0][j], u.0[1][j], v.0[0][j], v.0[1][j]])
    };
    let (l1, l2) = left_bc.as_pair()?;
    let (r1, r2) = right_bc.as_pair()?;
    let phi0_init = column(&l1, &l2, 0);
    let phi1_init = column(&l1, &l2, 1);
    let psi0_init = column(&r1, &r2, 0);
    let psi1_init = column(&r1, &r2, 1);

    let scale_l = phi0_init.norm() * phi1_init.norm();
    let bl = bilinear_bracket(&phi0_init, &phi1_init);
    if bl.norm() > 1e-9 * scale_l.max(1e-300) {
        return Err(Error::BracketNotVanishing { value: bl.norm() });
    }
    let scale_r = psi0_init.norm() * psi1_init.norm();
    let beta = bilinear_bracket(&psi0_init, &psi1_init);
    let complex_bc = beta.norm() > 1e-9 * scale_r.max(1e-300);

    let phi = [
        solve_scalar(problem, lambda, &phi0_init, a, b, ctrl)?,
        solve_scalar(problem, lambda, &phi1_init, a, b, ctrl)?,
    ];
    let psi = [
        solve_scalar(problem, lambda, &psi0_init, b, a, ctrl)?,
        solve_scalar(problem, lambda, &psi1_init, b, a, ctrl)?,
    ];

    let psi_mix = if complex_bc {
        // scale the bilinear bracket to exactly 1
        Mat2([[C64::ONE / beta, C64::ZERO], [C64::ZERO, C64::ONE]])
    } else {
        Mat2::identity()
    };

    let mut basis = SolutionBasis {
        lambda,
        phi,
        psi,
        phi_mix: Mat2::identity(),
        psi_mix,
        complex_bc,
        normalized: false,
    };
    let c = 0.5 * (a + b);
    let (ul, vl, ur, vr) = basis.blocks_at(c);
    let x = ur.transpose().mul(&vl).sub(&vr.transpose().mul(&ul));
    let det = x.det().norm();
    if det <= 1e-10 * x.frobenius() * x.frobenius() {
        return Err(Error::EigenvalueCollision { det_magnitude: det });
    }
    basis.phi_mix = x.inverse().ok_or(Error::EigenvalueCollision { det_magnitude: det })?;
    basis.normalized = true;
    Ok(basis)
}

/// Kernel value G(x, t). Real-conditions case: sum_i phi_i(min) psi_i(max),
/// symmetric in (x, t); complex case adds phi_1(x)phi_2(t) - phi_2(x)phi_1(t)
/// on x < t.
pub fn greens_value(basis: &SolutionBasis, x: f64, t: f64) -> C64 {
    let y = |z: QuasiVector| z.z[0];
    let mut g = if x <= t {
        y(basis.phi_at(0, x)) * y(basis.psi_at(0, t))
            + y(basis.phi_at(1, x)) * y(basis.psi_at(1, t))
    } else {
        y(basis.phi_at(0, t)) * y(basis.psi_at(0, x))
            + y(basis.phi_at(1, t)) * y(basis.psi_at(1, x))
    };
    if basis.complex_bc && x < t {
        g += y(basis.phi_at(0, x)) * y(basis.phi_at(1, t))
            - y(basis.phi_at(1, x)) * y(basis.phi_at(0, t));
    }
    g
}

/// Coefficients (c1, c2, d1, d2) of the truncated right pair
/// psi_i^{(j)} = psi_i + c/d_1 phi_1 + c/d_2 phi_2 satisfying
/// [psi_i^{(j)}, theta_k](b_j) = 0 for the frozen condition data theta_k.
pub fn truncated_coefficients(
    basis: &SolutionBasis,
    theta1: &QuasiVector,
    theta2: &QuasiVector,
    b_j: f64,
) -> Result<[C64; 4]> {
    let m = |k: &QuasiVector, i: usize| lagrangian_bracket(&basis.phi_at(i, b_j), k);
    let mm = Mat2([
        [m(theta1, 0), m(theta1, 1)],
        [m(theta2, 0), m(theta2, 1)],
    ]);
    let delta = mm.det();
    if delta.norm() <= 1e-12 * mm.frobenius() * mm.frobenius() {
        return Err(Error::SingularBracketSystem { x: b_j });
    }
    let solve = |psi_idx: usize| -> Vec2 {
        let r = Vec2([
            -lagrangian_bracket(&basis.psi_at(psi_idx, b_j), theta1),
            -lagrangian_bracket(&basis.psi_at(psi_idx, b_j), theta2),
        ]);
        // Cramer on mm * c = r
        Vec2([
            (r.0[0] * mm.0[1][1] - r.0[1] * mm.0[0][1]) / delta,
            (mm.0[0][0] * r.0[1] - mm.0[1][0] * r.0[0]) / delta,
        ])
    };
    let c = solve(0);
    let d = solve(1);
    Ok([c.0[0], c.0[1], d.0[0], d.0[1]])
}

/// Kernel of the truncated problem on [a, b_j]^2: same formula with the
/// corrected psi pair.
pub fn truncated_value(basis: &SolutionBasis, coeffs: &[C64; 4], x: f64, t: f64) -> C64 {
    let y = |z: QuasiVector| z.z[0];
    let psi_j = |i: usize, s: f64| -> C64 {
        let base = y(basis.psi_at(i, s));
        let (k1, k2) = if i == 0 { (coeffs[0], coeffs[1]) } else { (coeffs[2], coeffs[3]) };
        base + k1 * y(basis.phi_at(0, s)) + k2 * y(basis.phi_at(1, s))
    };
    let mut g = if x <= t {
        y(basis.phi_at(0, x)) * psi_j(0, t) + y(basis.phi_at(1, x)) * psi_j(1, t)
    } else {
        y(basis.phi_at(0, t)) * psi_j(0, x) + y(basis.phi_at(1, t)) * psi_j(1, x)
    };
    if basis.complex_bc && x < t {
        g += y(basis.phi_at(0, x)) * y(basis.phi_at(1, t))
            - y(basis.phi_at(1, x)) * y(basis.phi_at(0, t));
    }
    g
}

// 8-point Gauss-Legendre rule on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.9602898564975363,
    -0.7966664774136267,
    -0.5255324099163290,
    -0.1834346424956498,
    0.1834346424956498,
    0.5255324099163290,
    0.7966664774136267,
    0.9602898564975363,
];
const GL8_W: [f64; 8] = [
    0.1012285362903763,
    0.2223810344533745,
    0.3137066458778873,
    0.3626837833783620,
    0.3626837833783620,
    0.3137066458778873,
    0.2223810344533745,
    0.1012285362903763,
];

/// Quadrature nodes and weights on (a, b), panel boundaries at the supplied
/// breakpoints (plus a and b), `panels` Gauss-Legendre panels per segment.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn kernel_grid(a: f64, b: f64, breakpoints: &[f64], panels: usize) -> KernelGrid {
    let mut bounds: Vec<f64> = [a, b]
        .iter()
        .chain(breakpoints.iter())
        .cloned()
        .filter(|x| *x >= a && *x <= b)
        .collect();
    bounds.sort_by(|p, q| p.partial_cmp(q).unwrap());
    bounds.dedup();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for seg in bounds.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for (xg, wg) in GL8_X.iter().zip(GL8_W.iter()) {
                nodes.push(mid + 0.5 * h * xg);
                weights.push(0.5 * h * wg);
            }
        }
    }
    KernelGrid { nodes, weights }
}

/// Hilbert-Schmidt distance between G and the truncated kernel extended by
/// zero outside [a, b_j]^2, w(x)w(t)-weighted.
pub fn hs_distance(
    problem: &ProblemSpec,
    basis: &SolutionBasis,
    coeffs: &[C64; 4],
    b_j: f64,
    grid: &KernelGrid,
) -> Result<f64> {
    let w: Vec<f64> = grid
        .nodes
        .iter()
        .map(|x| problem.eval_raw(*x).map(|c| c.3))
        .collect::<Result<_>>()?;
    let mut acc = 0.0f64;
    for (i, &x) in grid.nodes.iter().enumerate() {
        for (j, &t) in grid.nodes.iter().enumerate() {
            let g = greens_value(basis, x, t);
            let gj = if x <= b_j && t <= b_j {
                truncated_value(basis, coeffs, x, t)
            } else {
                C64::ZERO
            };
            acc += (g - gj).norm_sqr() * w[i] * w[j] * grid.weights[i] * grid.weights[j];
        }
    }
    Ok(libm::sqrt(acc))
}

/// (R_lambda f)(x) = integral of G(x, t) f(t) w(t) dt, with the quadrature
/// panels split at the diagonal kink t = x.
pub fn apply_resolvent<F: Fn(f64) -> C64>(
    basis: &SolutionBasis,
    problem: &ProblemSpec,
    f: &F,
    x: f64,
    panels: usize,
) -> Result<C64> {
    let (a, b) = (problem.interval.a, problem.interval.b);
    let mut acc = C64::ZERO;
    for (lo, hi) in [(a, x), (x, b)] {
        if hi - lo <= 0.0 {
            continue;
        }
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let mid = lo + h * (p as f64 + 0.5);
            for (xg, wg) in GL8_X.iter().zip(GL8_W.iter()) {
                let t = mid + 0.5 * h * xg;
                let wt = problem.eval_raw(t)?.3;
                acc += greens_value(basis, x, t) * f(t) * (wt * 0.5 * h * wg);
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::{dirichlet_pair, natural_pair};
    use crate::linalg::c;

    fn beam() -> ProblemSpec {
        ProblemSpec::constant_coefficients(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)
    }

    fn real_basis() -> SolutionBasis {
        build_basis(
            &beam(),
            c(0.0, 2.0),
            &dirichlet_pair(),
            &dirichlet_pair(),
            &StepControl::tight(),
        )
        .unwrap()
    }

    /// Complex right conditions H u + v = 0 with H = [[0, i], [-i, 0]]
    /// (Hermitian, so the pair is self-adjoint, but the bilinear right
    /// bracket is nonzero).
    fn complex_right() -> BoundaryForm {
        BoundaryForm::RegularPair {
            a1: Mat2([[C64::ZERO, c(0.0, 1.0)], [c(0.0, -1.0), C64::ZERO]]),
            a2: Mat2::identity(),
        }
    }

    #[test]
    fn dual_defect_small_and_constant() {
        let basis = real_basis();
        for x in [0.2, 0.5, 0.8] {
            assert!(basis.dual_defect(x) < 1e-9, "defect {} at {x}", basis.dual_defect(x));
        }
        assert!(!basis.complex_bc);
    }

    #[test]
    fn inverse_identity_real_case() {
        let basis = real_basis();
        for x in [0.1, 0.4, 0.65, 0.9] {
            let d = basis.inverse_identity_defect(x);
            assert!(d < 1e-8, "inverse defect {d} at {x}");
        }
    }

    #[test]
    fn kernel_symmetry_real_case() {
        let basis = real_basis();
        for (x, t) in [(0.2, 0.7), (0.15, 0.35), (0.9, 0.4)] {
            let g = greens_value(&basis, x, t);
            let gt = greens_value(&basis, t, x);
            assert!((g - gt).norm() < 1e-10 * (1.0 + g.norm()));
        }
    }

    fn bump(x: f64) -> f64 {
        // x^4 (1-x)^4: vanishes with three derivatives at both endpoints
        let u = x * (1.0 - x);
        u * u * u * u
    }

    fn bump_4th(x: f64) -> f64 {
        // fourth derivative of x^4 - 4x^5 + 6x^6 - 4x^7 + x^8
        24.0 - 480.0 * x + 2160.0 * x * x - 3360.0 * x * x * x
            + 1680.0 * x * x * x * x
    }

    #[test]
    fn resolvent_recovers_domain_function() {
        // h in the domain (satisfies any separated conditions at both ends),
        // f = (l - lambda) h; then R f must equal h
        let p = beam();
        let lambda = c(0.0, 2.0);
        let basis = real_basis();
        let f = |t: f64| cr(bump_4th(t)) - lambda * bump(t);
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 1..20 {
            let x = i as f64 / 20.0;
            let got = apply_resolvent(&basis, &p, &f, x, 8).unwrap();
            num += (got - cr(bump(x))).norm_sqr();
            den += bump(x) * bump(x);
        }
        let rel = libm::sqrt(num / den);
        assert!(rel < 1e-6, "resolvent residual {rel}");
    }

    #[test]
    fn complex_case_structure() {
        let p = beam();
        let basis = build_basis(
            &p,
            c(0.0, 2.0),
            &dirichlet_pair(),
            &complex_right(),
            &StepControl::tight(),
        )
        .unwrap();
        assert!(basis.complex_bc);
        // normalized bilinear right bracket = 1 at b
        let k = bilinear_bracket(&basis.psi_at(0, 1.0), &basis.psi_at(1, 1.0));
        assert!((k - C64::ONE).norm() < 1e-9, "K = {k}");
        // U_R^T V_R - V_R^T U_R = [[0, 1], [-1, 0]] along the mesh
        for x in [0.3, 0.7, 1.0] {
            let (_, _, ur, vr) = basis.blocks_at(x);
            let kmat = ur.transpose().mul(&vr).sub(&vr.transpose().mul(&ur));
            let expect = Mat2([[C64::ZERO, C64::ONE], [-C64::ONE, C64::ZERO]]);
            assert!(kmat.sub(&expect).max_abs() < 1e-8, "K(x={x}) = {kmat:?}");
        }
        assert!(basis.dual_defect(0.5) < 1e-9);
        // continuity across the diagonal
        let lim_lo = greens_value(&basis, 0.5 - 1e-9, 0.5);
        let lim_hi = greens_value(&basis, 0.5 + 1e-9, 0.5);
        assert!((lim_lo - lim_hi).norm() < 1e-6);
    }

    #[test]
    fn complex_case_resolvent() {
        let p = beam();
        let lambda = c(0.0, 2.0);
        let basis = build_basis(
            &p,
            lambda,
            &dirichlet_pair(),
            &complex_right(),
            &StepControl::tight(),
        )
        .unwrap();
        let f = |t: f64| cr(bump_4th(t)) - lambda * bump(t);
        let mut worst = 0.0f64;
        for x in [0.25, 0.5, 0.75] {
            let got = apply_resolvent(&basis, &p, &f, x, 8).unwrap();
            let err = (got - cr(bump(x))).norm() / (1.0 + bump(x));
            worst = worst.max(err);
        }
        assert!(worst < 1e-6, "complex-case residual {worst}");
    }

    #[test]
    fn truncated_coefficients_zero_when_conditions_hold() {
        // theta data = the right-pair initial columns at b: the psi pair
        // satisfies those conditions already, so all coefficients vanish
        let basis = build_basis(
            &beam(),
            c(0.0, 2.0),
            &dirichlet_pair(),
            &natural_pair(),
            &StepControl::tight(),
        )
        .unwrap();
        // natural pair initial data: columns of (-A2*; A1*) = (-I; 0)
        let theta1 = QuasiVector::from_real([-1.0, 0.0, 0.0, 0.0]);
        let theta2 = QuasiVector::from_real([0.0, -1.0, 0.0, 0.0]);
        let coeffs = truncated_coefficients(&basis, &theta1, &theta2, 1.0).unwrap();
        for c in coeffs {
            assert!(c.norm() < 1e-8, "coefficient {c} should vanish");
        }
    }

    #[test]
    fn hs_distance_vanishes_at_full_interval() {
        let basis = build_basis(
            &beam(),
            c(0.0, 2.0),
            &dirichlet_pair(),
            &natural_pair(),
            &StepControl::tight(),
        )
        .unwrap();
        let theta1 = QuasiVector::from_real([-1.0, 0.0, 0.0, 0.0]);
        let theta2 = QuasiVector::from_real([0.0, -1.0, 0.0, 0.0]);
        let coeffs = truncated_coefficients(&basis, &theta1, &theta2, 1.0).unwrap();
        let grid = kernel_grid(0.0, 1.0, &[], 4);
        let d = hs_distance(&beam(), &basis, &coeffs, 1.0, &grid).unwrap();
        assert!(d < 1e-8, "distance {d} should be quadrature noise only");
    }

    #[test]
    fn grid_weights_sum_to_length() {
        let grid = kernel_grid(0.0, 2.0, &[0.5], 3);
        let total: f64 = grid.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
        assert!(grid.nodes.iter().all(|x| *x > 0.0 && *x < 2.0));
    }
}
