//! Boundary-form construction and validation: regular self-adjoint pairs,
//! Dirichlet truncation conditions, lim-3 W_R matrices with a prescribed
//! sigma, and lim-4 conditions frozen from real-lambda solutions.

use crate::error::{Error, Result};
use crate::hamiltonian::{lagrangian_bracket, QuasiVector, WeylMatrix};
use crate::linalg::{cr, Mat2, Vec2};

/// A separated boundary condition at one endpoint.
///
/// `RegularPair` carries two conditions A1 u + A2 v = 0; `WeylForm` the two
/// conditions v = W_R u; `LagrangeCondition` one (lim-3) or two (lim-4)
/// bracket conditions [y, psi] = 0 against frozen quasi-vector data.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryForm {
    RegularPair { a1: Mat2, a2: Mat2 },
    WeylForm { wr: Mat2 },
    LagrangeCondition { psi: QuasiVector, psi2: Option<QuasiVector> },
}

impl BoundaryForm {
    /// Resolve any variant into a validated regular pair.
    pub fn as_pair(&self) -> Result<(Mat2, Mat2)> {
        match self {
            BoundaryForm::RegularPair { a1, a2 } => {
                validate_pair(a1, a2)?;
                Ok((*a1, *a2))
            }
            BoundaryForm::WeylForm { wr } => match weyl_to_pair(wr)? {
                BoundaryForm::RegularPair { a1, a2 } => Ok((a1, a2)),
                _ => unreachable!(),
            },
            BoundaryForm::LagrangeCondition { psi, psi2 } => {
                let form = match psi2 {
                    Some(second) => lim4_pair_from_solutions(psi, second, 1e-9)?,
                    None => lim3_condition_completion(psi)?,
                };
                form.as_pair()
            }
        }
    }
}

/// Dirichlet conditions y = y' = 0: A1 = I, A2 = 0.
pub fn dirichlet_pair() -> BoundaryForm {
    BoundaryForm::RegularPair { a1: Mat2::identity(), a2: Mat2::zero() }
}

/// Hinged conditions y = y^[2] = 0 (rows selecting y and p y'').
pub fn hinged_pair() -> BoundaryForm {
    BoundaryForm::RegularPair {
        a1: Mat2::from_real([[1.0, 0.0], [0.0, 0.0]]),
        a2: Mat2::from_real([[0.0, 0.0], [0.0, 1.0]]),
    }
}

/// "Natural"/free conditions y^[3] = y^[2] = 0: A1 = 0, A2 = I.
pub fn natural_pair() -> BoundaryForm {
    BoundaryForm::RegularPair { a1: Mat2::zero(), a2: Mat2::identity() }
}

/// Check rank 2 of (A1 A2) and Hermitian A1 A2*.
pub fn validate_pair(a1: &Mat2, a2: &Mat2) -> Result<()> {
    // rank of the 2x4 block via the 2x2 Gram matrix M M*
    let g = a1.mul(&a1.adjoint()).add(&a2.mul(&a2.adjoint()));
    let tr = g.trace().re;
    let det = g.det().re.max(0.0);
    let disc = (tr * tr / 4.0 - det).max(0.0);
    let lo = (tr / 2.0 - libm::sqrt(disc)).max(0.0);
    let smin = libm::sqrt(lo);
    let smax = libm::sqrt(tr.max(0.0));
    if smin <= 1e-12 * smax.max(1e-300) {
        return Err(Error::RankDeficientPair { smallest_singular_value: smin });
    }
    let h = a1.mul(&a2.adjoint());
    let defect = h.hermitian_defect();
    let scale = a1.max_abs().max(a2.max_abs());
    if defect > 1e-12 * scale.max(1.0) * scale.max(1.0) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    Ok(())
}

/// Conditions v = W_R u as a regular pair (A1 = -W_R, A2 = I).
pub fn weyl_to_pair(wr: &Mat2) -> Result<BoundaryForm> {
    if wr.max_imag() != 0.0 {
        return Err(Error::InvalidProblem("W_R must be real".into()));
    }
    if (wr.0[0][1].re - wr.0[1][0].re).abs() > 1e-12 * wr.max_abs().max(1.0) {
        return Err(Error::InvalidProblem("W_R must be symmetric".into()));
    }
    let a1 = wr.scale(cr(-1.0));
    let a2 = Mat2::identity();
    validate_pair(&a1, &a2)?;
    Ok(BoundaryForm::RegularPair { a1, a2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeParam {
    Kappa,
    Nu,
}

/// Diagnostic record of a lim-3 W_R synthesis.
#[derive(Debug, Clone, Copy)]
pub struct Lim3Synthesis {
    pub u_psi: [f64; 2],
    pub v_psi: [f64; 2],
    pub free_param: FreeParam,
    pub value: f64,
    /// Constant term of the affine det formula (C for the kappa branch, D for
    /// the nu branch).
    pub c_or_d: f64,
    /// Coupling g = u^T v - u^T W_L u; the free parameter is ineffective when
    /// it vanishes.
    pub g: f64,
    /// Set when the free parameter hit the 1e6 clamp and the sigma target may
    /// not be met exactly.
    pub ill_conditioned: bool,
}

const PARAM_CLAMP: f64 = 1e6;

/// Build a real symmetric W_R with v_psi = W_R u_psi and
/// nu_neg(W_L - W_R) = target_sigma.
///
/// The constraint leaves one free diagonal entry; which one is free follows
/// the larger-magnitude component of u_psi (division by the larger component
/// is stabler). det(W_L - W_R) is affine in the free parameter with slope
/// g / (dominant component)^2, so sigma = 1 is forced by solving det = -1 and
/// sigma = 0 by det = +1 with the trace sign checked (moving along the trace
/// formula when det = +1 alone lands on the negative-definite side).
pub fn lim3_wr(
    u_psi: [f64; 2],
    v_psi: [f64; 2],
    w_l: &WeylMatrix,
    target_sigma: u8,
    tol: f64,
) -> Result<(Mat2, Lim3Synthesis)> {
    let unorm = libm::hypot(u_psi[0], u_psi[1]);
    if unorm == 0.0 {
        return Err(Error::InvalidProblem("lim3_wr needs u_psi != 0".into()));
    }
    if target_sigma > 1 {
        return Err(Error::InvalidProblem("sigma targets are 0 or 1".into()));
    }
    let swap = u_psi[0].abs() > u_psi[1].abs();
    // canonical view: psi1 (the divisor) is the dominant u component
    let (p0, p1) = if swap { (u_psi[1], u_psi[0]) } else { (u_psi[0], u_psi[1]) };
    let (p3, p2) = if swap { (v_psi[1], v_psi[0]) } else { (v_psi[0], v_psi[1]) };
    let (k, n) = if swap {
        (w_l.n().re, w_l.k().re)
    } else {
        (w_l.k().re, w_l.n().re)
    };
    let m = w_l.m().re;
    let det_wl = k * n - m * m;
    let tr_wl = k + n;

    let g = u_psi[0] * v_psi[0] + u_psi[1] * v_psi[1]
        - (k_of(w_l, u_psi));
    if g.abs() <= tol {
        return Err(Error::DegenerateG);
    }

    let p1sq = p1 * p1;
    let c = det_wl + (k * (p0 * p3 - p1 * p2) - p3 * p3 + 2.0 * m * p1 * p3) / p1sq;
    let det_slope = g / p1sq;
    let tr_const = tr_wl + (p0 * p3 - p1 * p2) / p1sq;
    let tr_slope = -(1.0 + (p0 * p0) / p1sq);

    let mut ill = false;
    let mut free = if target_sigma == 1 {
        (-1.0 - c) / det_slope
    } else {
        // det = +1 candidate; fall back to the feasible (det>0, trace>0) set
        let cand = (1.0 - c) / det_slope;
        if tr_const + tr_slope * cand > tol {
            cand
        } else {
            // trace > margin  <=>  free < t_star (tr_slope < 0)
            let margin = tol.max(1e-9) * (1.0 + tr_const.abs());
            let t_star = (tr_const - margin) / (-tr_slope);
            let dmargin = tol.max(1e-9) * (1.0 + c.abs());
            // det > dmargin boundary
            let d_star = (dmargin - c) / det_slope;
            if det_slope > 0.0 {
                // need free > d_star and free < t_star
                if d_star >= t_star {
                    return Err(Error::TargetInfeasible);
                }
                0.5 * (d_star + t_star)
            } else {
                // need free < d_star and free < t_star: always feasible
                let top = d_star.min(t_star);
                top - 1.0 - 0.1 * top.abs()
            }
        }
    };
    if free.abs() > PARAM_CLAMP {
        free = free.clamp(-PARAM_CLAMP, PARAM_CLAMP);
        ill = true;
    }

    // assemble W_R in the canonical view, then undo the swap
    let mu = (p3 - free * p0) / p1;
    let nu = p2 / p1 - p0 * (p3 - free * p0) / p1sq;
    let (w11, w22) = if swap { (nu, free) } else { (free, nu) };
    let wr = Mat2::from_real([[w11, mu], [mu, w22]]);

    let synthesis = Lim3Synthesis {
        u_psi,
        v_psi,
        free_param: if swap { FreeParam::Nu } else { FreeParam::Kappa },
        value: free,
        c_or_d: c,
        g,
        ill_conditioned: ill,
    };
    Ok((wr, synthesis))
}

/// u^T W u for real u (quadratic form of the Weyl matrix).
fn k_of(w: &WeylMatrix, u: [f64; 2]) -> f64 {
    let k = w.k().re;
    let m = w.m().re;
    let n = w.n().re;
    k * u[0] * u[0] + 2.0 * m * u[0] * u[1] + n * u[1] * u[1]
}

/// Two-condition lim-4 pair from frozen solutions: rows
/// (conj(v_theta_i)^T, -conj(u_theta_i)^T), so each row encodes
/// [y, theta_i](x) = 0.
pub fn lim4_pair_from_solutions(
    theta1: &QuasiVector,
    theta2: &QuasiVector,
    tol: f64,
) -> Result<BoundaryForm> {
    let scale = theta1.norm().max(theta2.norm()).max(1e-300);
    for (f, g) in [(theta1, theta2), (theta1, theta1), (theta2, theta2)] {
        let b = lagrangian_bracket(f, g).norm();
        if b > tol * scale * scale {
            return Err(Error::BracketNotVanishing { value: b });
        }
    }
    let row = |t: &QuasiVector| -> (Vec2, Vec2) {
        (t.v().conj(), t.u().conj().scale(cr(-1.0)))
    };
    let (a1r1, a2r1) = row(theta1);
    let (a1r2, a2r2) = row(theta2);
    let a1 = Mat2::from_rows(a1r1, a1r2);
    let a2 = Mat2::from_rows(a2r1, a2r2);
    match validate_pair(&a1, &a2) {
        Ok(()) => Ok(BoundaryForm::RegularPair { a1, a2 }),
        Err(Error::RankDeficientPair { smallest_singular_value }) => {
            Err(Error::RankDeficientPair { smallest_singular_value })
        }
        Err(e) => Err(e),
    }
}

/// One lim-3 bracket condition [y, psi] = 0 completed to a full self-adjoint
/// pair that psi itself satisfies.
///
/// With u_psi != 0 the completion takes the W_R route with the free parameter
/// set to 0; with u_psi = 0 the condition only constrains u_y, and the
/// completion is the bracket-orthogonal second row on u.
pub fn lim3_condition_completion(psi: &QuasiVector) -> Result<BoundaryForm> {
    if psi.max_imag() != 0.0 {
        return Err(Error::InvalidProblem("lim-3 condition data must be real".into()));
    }
    let nrm = psi.norm();
    if nrm == 0.0 {
        return Err(Error::InvalidProblem("lim-3 condition data must be nonzero".into()));
    }
    let u = [psi.z[0].re, psi.z[1].re];
    let v = [psi.z[2].re, psi.z[3].re];
    let unorm = libm::hypot(u[0], u[1]);
    if unorm > 1e-12 * nrm {
        // W_R route, free parameter 0
        let swap = u[0].abs() > u[1].abs();
        let (p0, p1) = if swap { (u[1], u[0]) } else { (u[0], u[1]) };
        let (p3, p2) = if swap { (v[1], v[0]) } else { (v[0], v[1]) };
        let mu = p3 / p1;
        let nu = p2 / p1 - p0 * p3 / (p1 * p1);
        let (w11, w22) = if swap { (nu, 0.0) } else { (0.0, nu) };
        weyl_to_pair(&Mat2::from_real([[w11, mu], [mu, w22]]))
    } else {
        // condition is v_psi^T u_y = 0; complete with the orthogonal row on u
        let a1 = Mat2::from_real([[v[0], v[1]], [-v[1], v[0]]]);
        let a2 = Mat2::zero();
        validate_pair(&a1, &a2)?;
        Ok(BoundaryForm::RegularPair { a1, a2 })
    }
}

/// Self-adjoint pair whose form domain extends the Dirichlet form domain by
/// exactly one direction: the trace u_y must be collinear with u_psi, and the
/// Lagrange bracket against psi must vanish. Because the form-domain gap is
/// one-dimensional, eigenvalues of this pair interlace the Dirichlet
/// eigenvalues with index shift one (unlike the rank-two relaxation produced
/// by the W-form completion). Requires real psi with u_psi != 0.
pub fn rank_one_extension_pair(psi: &QuasiVector) -> Result<BoundaryForm> {
    if psi.max_imag() != 0.0 {
        return Err(Error::InvalidProblem("extension data must be real".into()));
    }
    let u = [psi.z[0].re, psi.z[1].re];
    let v = [psi.z[2].re, psi.z[3].re];
    let unorm = libm::hypot(u[0], u[1]);
    if unorm <= 1e-12 * psi.norm() || unorm == 0.0 {
        return Err(Error::InvalidProblem(
            "rank-one extension needs a nonzero u component".into(),
        ));
    }
    // row 1: u_y collinear with u_psi; row 2: [y, psi] = 0
    let a1 = Mat2::from_real([[-u[1], u[0]], [v[0], v[1]]]);
    let a2 = Mat2::from_real([[0.0, 0.0], [-u[0], -u[1]]]);
    validate_pair(&a1, &a2)?;
    Ok(BoundaryForm::RegularPair { a1, a2 })
}
