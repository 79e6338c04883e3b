//! Eigenvalue counting for regular problems: the negative-index formula for
//! 2x2 symmetric matrices, the matched spectral count
//! N(lambda) = delta_L + delta_R + sigma, and bisection on N for the k-th
//! eigenvalue.

use crate::bc::BoundaryForm;
use crate::error::{Error, Result};
use crate::linalg::{cr, sym2_eigenvalues, Mat2};
use crate::problem::{ProblemSpec, Side};
use crate::propagate::{init_fundamental, propagate, weyl_at, FundamentalSolution, StepControl};
use alloc::string::String;
use alloc::vec::Vec;

/// Number of negative eigenvalues of a real symmetric 2x2 matrix, resolved by
/// det/trace signs; only the near-singular case falls back to the explicit
/// eigenvalues.
pub fn nu_neg(m: &Mat2, tol: f64) -> Result<usize> {
    let a = m.0[0][0].re;
    let b = 0.5 * (m.0[0][1].re + m.0[1][0].re);
    let d = m.0[1][1].re;
    if !(a.is_finite() && b.is_finite() && d.is_finite()) {
        return Err(Error::InvalidProblem("nu_neg on non-finite matrix".into()));
    }
    let det = a * d - b * b;
    let tr = a + d;
    if det < -tol {
        return Ok(1);
    }
    if det > tol {
        return Ok(if tr < 0.0 { 2 } else { 0 });
    }
    let [lo, hi] = sym2_eigenvalues(m);
    Ok((lo < -tol) as usize + (hi < -tol) as usize)
}

/// A regular problem ready for oscillation counting: finite interval, both
/// endpoint conditions resolved to validated pairs.
#[derive(Debug, Clone)]
pub struct RegularProblem {
    pub spec: ProblemSpec,
    pub left: BoundaryForm,
    pub right: BoundaryForm,
}

impl RegularProblem {
    pub fn new(spec: ProblemSpec, left: BoundaryForm, right: BoundaryForm) -> Result<Self> {
        if !spec.is_declared_regular() {
            return Err(Error::NotRegular(String::from(
                "oscillation counting needs a regular problem on a finite interval",
            )));
        }
        left.as_pair()?;
        right.as_pair()?;
        Ok(RegularProblem { spec, left, right })
    }
}

/// Breakdown of one evaluation of N(lambda).
#[derive(Debug, Clone)]
pub struct SpectralCount {
    /// Eigenvalues strictly below lambda.
    pub n: usize,
    pub delta_left: usize,
    pub delta_right: usize,
    pub sigma: usize,
    /// Matching point actually used (after any nudging).
    pub matching_point: f64,
    pub warnings: Vec<String>,
}

const NU_TOL: f64 = 1e-9;

/// Count eigenvalues below `lambda` by matching two fundamental solutions at
/// an interior point c: det-U zeros of the left trajectory on (a, c), of the
/// right trajectory on (c, b), plus the index correction
/// sigma = nu_neg(W_L(c) - W_R(c)).
///
/// If either Weyl matrix is singular at c (an event sits exactly there), c is
/// nudged by multiples of (b-a)/1000 until both exist.
pub fn count_below(
    rp: &RegularProblem,
    lambda: f64,
    ctrl: &StepControl,
) -> Result<SpectralCount> {
    let (a, b) = (rp.spec.interval.a, rp.spec.interval.b);
    let span = b - a;
    let mid = 0.5 * (a + b);

    let mut last_err = Error::MatchingPointFailure;
    for m in 0..=10u32 {
        let offsets: &[f64] = if m == 0 { &[0.0] } else { &[1.0, -1.0] };
        for sgn in offsets {
            let c = mid + sgn * (m as f64) * span * 1e-3;
            if !(c > a && c < b) {
                continue;
            }
            match count_at(rp, lambda, c, ctrl) {
                Ok(sc) => return Ok(sc),
                Err(e @ (Error::SingularU { .. } | Error::EigenvalueCollision { .. })) => {
                    last_err = e;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let _ = last_err;
    Err(Error::MatchingPointFailure)
}

/// Like [`count_below`], but at a caller-chosen interior matching point; the
/// total is independent of c, which makes this useful for invariance checks.
pub fn count_at(
    rp: &RegularProblem,
    lambda: f64,
    c: f64,
    ctrl: &StepControl,
) -> Result<SpectralCount> {
    let (a, b) = (rp.spec.interval.a, rp.spec.interval.b);
    let fl = shoot(rp, Side::Left, lambda, c, ctrl)?;
    let fr = shoot(rp, Side::Right, lambda, c, ctrl)?;
    let wl = weyl_at(&fl, c)?;
    let wr = weyl_at(&fr, c)?;
    let diff = wl.w.sub(&wr.w);
    let sigma = nu_neg(&diff, NU_TOL)?;
    let delta_left = fl.deficiency_on(a, c);
    let delta_right = fr.deficiency_on(c, b);
    let mut warnings = fl.warnings.clone();
    warnings.extend(fr.warnings.iter().cloned());
    Ok(SpectralCount {
        n: delta_left + delta_right + sigma,
        delta_left,
        delta_right,
        sigma,
        matching_point: c,
        warnings,
    })
}

fn shoot(
    rp: &RegularProblem,
    side: Side,
    lambda: f64,
    c: f64,
    ctrl: &StepControl,
) -> Result<FundamentalSolution> {
    let (bc, x0) = match side {
        Side::Left => (&rp.left, rp.spec.interval.a),
        Side::Right => (&rp.right, rp.spec.interval.b),
    };
    let (a1, a2) = bc.as_pair()?;
    let fund = init_fundamental(
        &BoundaryForm::RegularPair { a1, a2 },
        side,
        cr(lambda),
        x0,
    )?;
    propagate(&rp.spec, fund, c, ctrl)
}

/// k-th eigenvalue (k = 0 is the lowest) by bisection on the monotone count
/// N(lambda): the answer is inf { lambda : N(lambda) >= k + 1 }.
///
/// The bracket starts at [-1, 1] around zero and doubles outward until it
/// encloses the index; `tol` is relative (|hi - lo| <= tol * (1 + |hi|)).
pub fn kth_eigenvalue(
    rp: &RegularProblem,
    k: usize,
    tol: f64,
    ctrl: &StepControl,
) -> Result<f64> {
    let mut hi = 1.0f64;
    let mut grow = 0;
    while count_below(rp, hi, ctrl)?.n < k + 1 {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::BracketExhausted { k });
        }
    }
    let mut lo = -1.0f64;
    grow = 0;
    while count_below(rp, lo, ctrl)?.n > k {
        lo *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::BracketExhausted { k });
        }
    }
    while (hi - lo).abs() > tol * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if count_below(rp, mid, ctrl)?.n >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// First `count` eigenvalues in ascending order.
pub fn eigenvalues(
    rp: &RegularProblem,
    count: usize,
    tol: f64,
    ctrl: &StepControl,
) -> Result<Vec<f64>> {
    (0..count).map(|k| kth_eigenvalue(rp, k, tol, ctrl)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::{dirichlet_pair, hinged_pair};

    fn beam() -> ProblemSpec {
        ProblemSpec::constant_coefficients(1.0, 0.0, 0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn nu_neg_cases() {
        let m = |a: f64, b: f64, d: f64| Mat2::from_real([[a, b], [b, d]]);
        assert_eq!(nu_neg(&m(1.0, 0.0, 1.0), 1e-9).unwrap(), 0);
        assert_eq!(nu_neg(&m(-1.0, 0.0, -1.0), 1e-9).unwrap(), 2);
        assert_eq!(nu_neg(&m(1.0, 0.0, -1.0), 1e-9).unwrap(), 1);
        // singular: diag(0, -3) has one negative eigenvalue
        assert_eq!(nu_neg(&m(0.0, 0.0, -3.0), 1e-9).unwrap(), 1);
        assert_eq!(nu_neg(&m(0.0, 0.0, 3.0), 1e-9).unwrap(), 0);
        assert_eq!(nu_neg(&m(0.0, 0.0, 0.0), 1e-9).unwrap(), 0);
    }

    #[test]
    fn hinged_beam_counts() {
        // hinged-hinged y'''' = lambda y on (0,1): lambda_k = ((k+1) pi)^4
        let rp = RegularProblem::new(beam(), hinged_pair(), hinged_pair()).unwrap();
        let ctrl = StepControl::default();
        let pi4 = libm::pow(core::f64::consts::PI, 4.0);
        assert_eq!(count_below(&rp, 0.0, &ctrl).unwrap().n, 0);
        assert_eq!(count_below(&rp, 0.9 * pi4, &ctrl).unwrap().n, 0);
        assert_eq!(count_below(&rp, 1.1 * pi4, &ctrl).unwrap().n, 1);
        assert_eq!(count_below(&rp, 17.0 * pi4, &ctrl).unwrap().n, 2);
    }

    #[test]
    fn hinged_beam_eigenvalues() {
        let rp = RegularProblem::new(beam(), hinged_pair(), hinged_pair()).unwrap();
        let ctrl = StepControl::default();
        let pi = core::f64::consts::PI;
        for k in 0..3usize {
            let expect = libm::pow(((k + 1) as f64) * pi, 4.0);
            let got = kth_eigenvalue(&rp, k, 1e-10, &ctrl).unwrap();
            assert!(
                (got - expect).abs() < 1e-6 * expect,
                "lambda_{k}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn clamped_beam_ground_state() {
        // clamped-clamped: cos(k) cosh(k) = 1, k0 = 4.73004074..., lambda0 = k0^4
        let rp = RegularProblem::new(beam(), dirichlet_pair(), dirichlet_pair()).unwrap();
        let got = kth_eigenvalue(&rp, 0, 1e-10, &StepControl::default()).unwrap();
        let k0 = 4.730040744862704f64;
        let expect = libm::pow(k0, 4.0);
        assert!((got - expect).abs() < 1e-5 * expect, "got {got}, expect {expect}");
    }

    #[test]
    fn negative_lambda_counts_zero() {
        let rp = RegularProblem::new(beam(), dirichlet_pair(), dirichlet_pair()).unwrap();
        let sc = count_below(&rp, -100.0, &StepControl::default()).unwrap();
        assert_eq!(sc.n, 0);
    }
}
