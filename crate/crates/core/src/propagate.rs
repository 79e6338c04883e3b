//! Adaptive integration of the Hamiltonian system: scalar solutions and 4x2
//! fundamental solutions with det-U event logging, column renormalization,
//! and Weyl-matrix extraction.
//!
//! The stepper is an embedded Dormand-Prince 5(4) pair with cubic-Hermite
//! dense output (used for event bisection). The system is linear, but the
//! coefficients are arbitrary user expressions, so no constant-coefficient
//! shortcuts are taken.

use crate::bc::BoundaryForm;
use crate::error::{Error, Result};
use crate::hamiltonian::{hamiltonian_rhs, QuasiVector, WeylMatrix};
use crate::linalg::{cr, C64, Mat2};
use crate::problem::{ProblemSpec, Side};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Event locations are refined to this fraction of the span.
    pub event_refine_tol: f64,
    /// Rank-2 drop detection: smallest singular value below this times the
    /// largest flags deficiency 2.
    pub deficiency2_threshold: f64,
    /// Allow column renormalization (disable when the columns must remain
    /// fixed global solutions, e.g. for Green's bases).
    pub renorm: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_step: f64::INFINITY,
            event_refine_tol: 1e-10,
            deficiency2_threshold: 1e-10,
            renorm: true,
        }
    }
}

impl StepControl {
    pub fn tight() -> Self {
        StepControl { rel_tol: 1e-12, abs_tol: 1e-15, ..StepControl::default() }
    }
}

// Dormand-Prince 5(4) tableau.
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
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

const OVERFLOW_GUARD: f64 = 1e140;

/// One accepted step, with enough data for cubic-Hermite dense output.
pub(crate) struct StepRecord<'a> {
    pub x0: f64,
    pub x1: f64,
    pub y0: &'a [C64],
    pub y1: &'a [C64],
    pub f0: &'a [C64],
    pub f1: &'a [C64],
}

impl StepRecord<'_> {
    pub fn interp(&self, x: f64, out: &mut [C64]) {
        let h = self.x1 - self.x0;
        let t = (x - self.x0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        for i in 0..out.len() {
            out[i] = self.y0[i] * h00
                + self.f0[i] * (h10 * h)
                + self.y1[i] * h01
                + self.f1[i] * (h11 * h);
        }
    }
}

/// Adaptive DP5(4) driver. `on_step` sees every accepted step in order.
pub(crate) fn integrate_with<F, CB>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: &[C64],
    ctrl: &StepControl,
    mut on_step: CB,
) -> Result<Vec<C64>>
where
    F: Fn(f64, &[C64], &mut [C64]) -> Result<()>,
    CB: FnMut(&StepRecord<'_>) -> Result<()>,
{
    let n = y0.len();
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k1 = vec![C64::ZERO; n];
    f(x, &y, &mut k1)?;
    let mut h = (span / 64.0).abs().min(ctrl.max_step) * dir;
    let hmin = 1e-14 * span.abs().max(x0.abs()).max(x1.abs()).max(1.0);

    let mut k2 = vec![C64::ZERO; n];
    let mut k3 = vec![C64::ZERO; n];
    let mut k4 = vec![C64::ZERO; n];
    let mut k5 = vec![C64::ZERO; n];
    let mut k6 = vec![C64::ZERO; n];
    let mut k7 = vec![C64::ZERO; n];
    let mut ytmp = vec![C64::ZERO; n];
    let mut ynew = vec![C64::ZERO; n];

    loop {
        if (x1 - x) * dir <= 0.0 {
            return Ok(y);
        }
        if (x1 - x) * dir < h.abs() {
            h = x1 - x;
        }
        if h.abs() < hmin {
            return Err(Error::StepSizeUnderflow { x });
        }

        for i in 0..n {
            ytmp[i] = y[i] + k1[i] * (A21 * h);
        }
        f(x + C2 * h, &ytmp, &mut k2)?;
        for i in 0..n {
            ytmp[i] = y[i] + k1[i] * (A31 * h) + k2[i] * (A32 * h);
        }
        f(x + C3 * h, &ytmp, &mut k3)?;
        for i in 0..n {
            ytmp[i] = y[i] + k1[i] * (A41 * h) + k2[i] * (A42 * h) + k3[i] * (A43 * h);
        }
        f(x + C4 * h, &ytmp, &mut k4)?;
        for i in 0..n {
            ytmp[i] = y[i]
                + k1[i] * (A51 * h)
                + k2[i] * (A52 * h)
                + k3[i] * (A53 * h)
                + k4[i] * (A54 * h);
        }
        f(x + C5 * h, &ytmp, &mut k5)?;
        for i in 0..n {
            ytmp[i] = y[i]
                + k1[i] * (A61 * h)
                + k2[i] * (A62 * h)
                + k3[i] * (A63 * h)
                + k4[i] * (A64 * h)
                + k5[i] * (A65 * h);
        }
        f(x + h, &ytmp, &mut k6)?;
        for i in 0..n {
            ynew[i] = y[i]
                + k1[i] * (B1 * h)
                + k3[i] * (B3 * h)
                + k4[i] * (B4 * h)
                + k5[i] * (B5 * h)
                + k6[i] * (B6 * h);
        }
        f(x + h, &ynew, &mut k7)?;

        let mut err_sq = 0.0f64;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                + k7[i] * E7)
                * h;
            let scale = ctrl.abs_tol + ctrl.rel_tol * y[i].norm().max(ynew[i].norm());
            err_sq += (e.norm() / scale) * (e.norm() / scale);
        }
        let err = libm::sqrt(err_sq / n as f64);

        if err <= 1.0 || h.abs() <= hmin * 2.0 {
            let rec = StepRecord { x0: x, x1: x + h, y0: &y, y1: &ynew, f0: &k1, f1: &k7 };
            on_step(&rec)?;
            x += h;
            core::mem::swap(&mut y, &mut ynew);
            core::mem::swap(&mut k1, &mut k7);
            let mut big = 0.0f64;
            for v in &y {
                if v.norm() > big {
                    big = v.norm();
                }
            }
            if big > OVERFLOW_GUARD {
                return Err(Error::BlowUp { x });
            }
        }
        let factor = if err <= 1e-30 {
            5.0
        } else {
            (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).abs().min(ctrl.max_step).copysign(h);
    }
}

/// Plain integration with no step observation.
pub(crate) fn integrate_raw<F>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: &[C64],
    ctrl: &StepControl,
) -> Result<Vec<C64>>
where
    F: Fn(f64, &[C64], &mut [C64]) -> Result<()>,
{
    integrate_with(f, x0, x1, y0, ctrl, |_| Ok(()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    FromLeft,
    FromRight,
}

/// One recorded trajectory point of a fundamental solution.
///
/// The stored (U, V) differ from the true fundamental matrices by a cumulative
/// right factor from renormalization; only det U bookkeeping needs it, tracked
/// through `det_log_offset` (log-magnitude) and `det_phase_offset` (unit
/// modulus, just +/-1 for real data): true det U = det(stored U) *
/// exp(det_log_offset) * det_phase_offset. Weyl matrices V U^{-1} are
/// invariant under the right factor.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub x: f64,
    pub u: Mat2,
    pub v: Mat2,
    pub det_log_offset: f64,
    pub det_phase_offset: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub x: f64,
    pub deficiency: u8,
}

#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub direction: Direction,
    pub lambda: C64,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub warnings: Vec<String>,
    /// True when lambda and the generating pair are real, enabling signed
    /// det-U event detection.
    pub is_real: bool,
}

fn split_uv(y: &[C64]) -> (Mat2, Mat2) {
    // columns are two quasi-vector solutions (y0, y1, y3, y2)
    let u = Mat2([[y[0], y[4]], [y[1], y[5]]]);
    let v = Mat2([[y[2], y[6]], [y[3], y[7]]]);
    (u, v)
}

fn pack_uv(u: &Mat2, v: &Mat2) -> [C64; 8] {
    [
        u.0[0][0], u.0[1][0], v.0[0][0], v.0[1][0],
        u.0[0][1], u.0[1][1], v.0[0][1], v.0[1][1],
    ]
}

/// Initialize a fundamental solution from a regular self-adjoint pair:
/// (U; V)(x0) = (-A2*; A1*). The columns span exactly the solutions
/// satisfying A1 u + A2 v = 0 at x0 (same formula both sides; a FromRight
/// trajectory is simply integrated leftward).
pub fn init_fundamental(
    bc: &BoundaryForm,
    side: Side,
    lambda: C64,
    x0: f64,
) -> Result<FundamentalSolution> {
    let (a1, a2) = match bc {
        BoundaryForm::RegularPair { a1, a2 } => (*a1, *a2),
        other => {
            return Err(Error::InvalidProblem(format!(
                "init_fundamental needs a RegularPair, got {other:?}"
            )))
        }
    };
    crate::bc::validate_pair(&a1, &a2)?;
    let u = a2.adjoint().scale(cr(-1.0));
    let v = a1.adjoint();
    let is_real = lambda.im == 0.0 && u.max_imag() == 0.0 && v.max_imag() == 0.0;
    Ok(FundamentalSolution {
        direction: match side {
            Side::Left => Direction::FromLeft,
            Side::Right => Direction::FromRight,
        },
        lambda,
        samples: vec![Sample {
            x: x0,
            u,
            v,
            det_log_offset: 0.0,
            det_phase_offset: C64::ONE,
        }],
        events: Vec::new(),
        warnings: Vec::new(),
        is_real,
    })
}

/// Extend the trajectory to `x_to`, logging det-U events on the way.
///
/// Sign changes of the (continuously rescaled) real det U are isolated by
/// bisection on the dense output and logged with deficiency 1. Interior
/// near-tangential zeros with no sign change are probed via the smallest
/// singular value of U and logged with deficiency 2. Columns are renormalized
/// by a common right factor when conditioning degrades.
pub fn propagate(
    problem: &ProblemSpec,
    fund: FundamentalSolution,
    x_to: f64,
    ctrl: &StepControl,
) -> Result<FundamentalSolution> {
    let last_x = fund.samples.last().expect("nonempty trajectory").x;
    if x_to == last_x {
        return Ok(fund);
    }
    propagate_segmented(problem, fund, x_to, ctrl)
}

fn qr_normalize(u: &Mat2, v: &Mat2) -> (Mat2, Mat2, f64) {
    // Gram-Schmidt on the two stacked 4-columns; R has positive diagonal so
    // det R > 0 and sign bookkeeping is unaffected.
    let col = |j: usize| -> [C64; 4] {
        [u.0[0][j], u.0[1][j], v.0[0][j], v.0[1][j]]
    };
    let c0 = col(0);
    let c1 = col(1);
    let nrm = |c: &[C64; 4]| libm::sqrt(c.iter().map(|z| z.norm_sqr()).sum());
    let r11 = nrm(&c0).max(1e-300);
    let q0: [C64; 4] = [c0[0] / r11, c0[1] / r11, c0[2] / r11, c0[3] / r11];
    let r12: C64 = q0.iter().zip(c1.iter()).map(|(a, b)| a.conj() * b).sum();
    let mut w = [C64::ZERO; 4];
    for i in 0..4 {
        w[i] = c1[i] - q0[i] * r12;
    }
    let r22 = nrm(&w).max(1e-300);
    let q1: [C64; 4] = [w[0] / r22, w[1] / r22, w[2] / r22, w[3] / r22];
    let un = Mat2([[q0[0], q1[0]], [q0[1], q1[1]]]);
    let vn = Mat2([[q0[2], q1[2]], [q0[3], q1[3]]]);
    (un, vn, r11 * r22)
}

/// Segment-wise propagation used when renormalization fires: each segment is
/// integrated from the (renormalized) last stored sample so the driver state
/// matches the bookkeeping.
fn propagate_segmented(
    problem: &ProblemSpec,
    fund: FundamentalSolution,
    x_to: f64,
    ctrl: &StepControl,
) -> Result<FundamentalSolution> {
    let mut current = fund;
    loop {
        let last = *current.samples.last().unwrap();
        if last.x == x_to {
            return Ok(current);
        }
        let next = propagate_one_segment(problem, current, x_to, ctrl)?;
        current = next;
    }
}

/// Integrate until either x_to is reached or one renormalization happens
/// (ending the segment at the renormalization point).
fn propagate_one_segment(
    problem: &ProblemSpec,
    mut fund: FundamentalSolution,
    x_to: f64,
    ctrl: &StepControl,
) -> Result<FundamentalSolution> {
    let last = *fund.samples.last().unwrap();
    let lambda = fund.lambda;
    let rhs = |x: f64, st: &[C64], out: &mut [C64]| -> Result<()> {
        let coeff = problem.eval_raw(x)?;
        for k in 0..2 {
            let z = [st[4 * k], st[4 * k + 1], st[4 * k + 2], st[4 * k + 3]];
            let dz = hamiltonian_rhs(coeff, lambda, &z);
            out[4 * k..4 * k + 4].copy_from_slice(&dz);
        }
        Ok(())
    };
    let span = (x_to - last.x).abs();
    let refine = ctrl.event_refine_tol * span.max(1.0);
    let is_real = fund.is_real;
    let det_log = last.det_log_offset;
    let det_phase = last.det_phase_offset;
    let mut prev_det = last.u.det() * det_phase;

    let y0 = pack_uv(&last.u, &last.v);
    let res = integrate_with(&rhs, last.x, x_to, &y0, ctrl, |rec| {
        let (u1, v1) = split_uv(rec.y1);
        let d1 = u1.det() * det_phase;
        if is_real {
            let s0 = prev_det.re;
            let s1 = d1.re;
            if s0 != 0.0 && s1 != 0.0 && s0.signum() != s1.signum() {
                let mut lo = rec.x0;
                let mut hi = rec.x1;
                let mut buf = [C64::ZERO; 8];
                let flo_sign = s0.signum();
                while (hi - lo).abs() > refine {
                    let mid = 0.5 * (lo + hi);
                    rec.interp(mid, &mut buf);
                    let (um, _) = split_uv(&buf);
                    if (um.det() * det_phase).re.signum() == flo_sign {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let x_star = 0.5 * (lo + hi);
                if let Some(prev) = fund.events.last() {
                    if (x_star - prev.x).abs() < 2.0 * refine {
                        fund.warnings.push(format!(
                            "det-U zeros at {:.12e} and {:.12e} closer than the refinement tolerance",
                            prev.x, x_star
                        ));
                    }
                }
                fund.events.push(Event { x: x_star, deficiency: 1 });
            } else if s0 != 0.0 && s1 != 0.0 {
                let mut buf = [C64::ZERO; 8];
                let mut min_val = f64::INFINITY;
                let mut min_x = rec.x0;
                for i in 1..=4 {
                    let xs = rec.x0 + (rec.x1 - rec.x0) * (i as f64) / 5.0;
                    rec.interp(xs, &mut buf);
                    let (us, _) = split_uv(&buf);
                    let dv = us.det().norm();
                    if dv < min_val {
                        min_val = dv;
                        min_x = xs;
                    }
                }
                let scale = u1.max_abs().max(1e-300);
                if min_val < ctrl.deficiency2_threshold * scale * scale {
                    let mut buf2 = [C64::ZERO; 8];
                    rec.interp(min_x, &mut buf2);
                    let (us, _) = split_uv(&buf2);
                    if us.smallest_singular_value() < ctrl.deficiency2_threshold * us.frobenius() {
                        fund.events.push(Event { x: min_x, deficiency: 2 });
                    }
                }
            }
        }
        prev_det = d1;

        let mut u_store = u1;
        let mut v_store = v1;
        let mut new_log = det_log;
        let mut new_phase = det_phase;
        let mut renormed = false;
        if ctrl.renorm {
            let norm = u_store.frobenius().max(v_store.frobenius());
            let smin = u_store.smallest_singular_value();
            let cond = if smin > 0.0 { u_store.frobenius() / smin } else { f64::INFINITY };
            if cond > 1e8 || norm > 1e12 {
                let det_mag = u_store.det().norm();
                if det_mag > 1e-8 * u_store.max_abs() * u_store.max_abs() {
                    let t = u_store.inverse().expect("det checked");
                    let du = u_store.det();
                    new_log += libm::log(du.norm());
                    new_phase *= du / du.norm();
                    u_store = Mat2::identity();
                    v_store = v_store.mul(&t);
                } else {
                    let (qu, qv, rdet) = qr_normalize(&u_store, &v_store);
                    new_log += libm::log(rdet);
                    u_store = qu;
                    v_store = qv;
                }
                renormed = true;
            }
        }
        fund.samples.push(Sample {
            x: rec.x1,
            u: u_store,
            v: v_store,
            det_log_offset: new_log,
            det_phase_offset: new_phase,
        });
        if renormed {
            // abort this driver run; the caller restarts from the
            // renormalized sample so driver state and bookkeeping agree
            return Err(Error::Inconclusive(String::from(SEGMENT_BREAK)));
        }
        Ok(())
    });
    match res {
        Ok(_) => Ok(fund),
        Err(Error::Inconclusive(s)) if s == SEGMENT_BREAK => Ok(fund),
        Err(e) => Err(e),
    }
}

const SEGMENT_BREAK: &str = "__segment_break__";

impl FundamentalSolution {
    pub fn last_x(&self) -> f64 {
        self.samples.last().expect("nonempty").x
    }

    fn sample_at(&self, x: f64) -> Option<&Sample> {
        let tol = 1e-9 * (1.0 + x.abs());
        self.samples
            .iter()
            .min_by(|a, b| {
                (a.x - x).abs().partial_cmp(&(b.x - x).abs()).unwrap()
            })
            .filter(|s| (s.x - x).abs() <= tol)
    }

    /// Events strictly inside the open interval (lo, hi), total deficiency.
    pub fn deficiency_on(&self, lo: f64, hi: f64) -> usize {
        let eps = 1e-9 * (hi - lo).abs().max(1.0);
        self.events
            .iter()
            .filter(|e| e.x > lo + eps && e.x < hi - eps)
            .map(|e| e.deficiency as usize)
            .sum()
    }

    /// Signed true det U at a sample (real trajectories).
    pub fn det_u_sign_at(&self, x: f64) -> Option<f64> {
        self.sample_at(x)
            .map(|s| (s.u.det() * s.det_phase_offset).re.signum())
    }

    /// CSV dump: x, Re/Im of U and V entries, log|det U|, sign.
    pub fn dump_csv(&self) -> String {
        let mut out = String::from(
            "x,reU11,imU11,reU12,imU12,reU21,imU21,reU22,imU22,reV11,imV11,reV12,imV12,reV21,imV21,reV22,imV22,logdetU,sign\n",
        );
        for s in &self.samples {
            let d = s.u.det();
            let logmag = if d.norm() > 0.0 {
                libm::log(d.norm()) + s.det_log_offset
            } else {
                f64::NEG_INFINITY
            };
            let sign = (d * s.det_phase_offset).re.signum();
            out += &format!("{:.12e}", s.x);
            for m in [&s.u, &s.v] {
                for i in 0..2 {
                    for j in 0..2 {
                        out += &format!(",{:.12e},{:.12e}", m.0[i][j].re, m.0[i][j].im);
                    }
                }
            }
            out += &format!(",{:.12e},{}\n", logmag, sign);
        }
        out
    }
}

/// Weyl matrix W = V U^{-1} at a recorded sample point.
pub fn weyl_at(fund: &FundamentalSolution, x: f64) -> Result<WeylMatrix> {
    let s = fund
        .sample_at(x)
        .ok_or_else(|| Error::InvalidProblem(format!("x = {x} is not a sample point")))?;
    let smax = s.u.frobenius();
    let smin = s.u.smallest_singular_value();
    if smin <= 1e-10 * smax.max(1e-300) {
        return Err(Error::SingularU { x, det_magnitude: s.u.det().norm() });
    }
    let uinv = s
        .u
        .inverse()
        .ok_or(Error::SingularU { x, det_magnitude: s.u.det().norm() })?;
    let mut w = s.v.mul(&uinv);
    let mut defect = 0.0;
    if fund.lambda.im == 0.0 {
        defect = w.hermitian_defect();
        w = w.add(&w.adjoint()).scale(cr(0.5));
    }
    Ok(WeylMatrix { w, hermitian_defect: defect })
}

/// A scalar solution of J z' = S z, sampled densely with derivative data so
/// brackets can be evaluated at arbitrary mesh points by Hermite interpolation.
#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    pub lambda: C64,
    pub samples: Vec<(f64, [C64; 4], [C64; 4])>, // (x, z, z')
}

impl ScalarTrajectory {
    pub fn start_x(&self) -> f64 {
        self.samples.first().expect("nonempty").0
    }

    pub fn end_x(&self) -> f64 {
        self.samples.last().expect("nonempty").0
    }

    /// Quasi-vector at x by dense-output interpolation (x within the span).
    pub fn at(&self, x: f64) -> QuasiVector {
        let n = self.samples.len();
        if n == 1 {
            return QuasiVector::new(self.samples[0].1);
        }
        let ascending = self.samples[n - 1].0 >= self.samples[0].0;
        // locate the bracketing pair
        let mut idx = 0;
        for i in 0..n - 1 {
            let (x0, x1) = (self.samples[i].0, self.samples[i + 1].0);
            let inside = if ascending { x >= x0 && x <= x1 } else { x <= x0 && x >= x1 };
            if inside {
                idx = i;
                break;
            }
            idx = i;
        }
        let (x0, z0, f0) = &self.samples[idx];
        let (x1, z1, f1) = &self.samples[idx + 1];
        let rec = StepRecord { x0: *x0, x1: *x1, y0: z0, y1: z1, f0, f1 };
        let mut out = [C64::ZERO; 4];
        rec.interp(x, &mut out);
        QuasiVector::new(out)
    }
}

/// Integrate a single solution z(x) with z(x0) = z0 over [x0, x1].
pub fn solve_scalar(
    problem: &ProblemSpec,
    lambda: C64,
    z0: &QuasiVector,
    x0: f64,
    x1: f64,
    ctrl: &StepControl,
) -> Result<ScalarTrajectory> {
    let rhs = |x: f64, st: &[C64], out: &mut [C64]| -> Result<()> {
        let coeff = problem.eval_raw(x)?;
        let z = [st[0], st[1], st[2], st[3]];
        let dz = hamiltonian_rhs(coeff, lambda, &z);
        out.copy_from_slice(&dz);
        Ok(())
    };
    let mut samples: Vec<(f64, [C64; 4], [C64; 4])> = Vec::new();
    let y0 = z0.z;
    let mut f0 = [C64::ZERO; 4];
    rhs(x0, &y0, &mut f0)?;
    samples.push((x0, y0, f0));
    if x1 == x0 {
        return Ok(ScalarTrajectory { lambda, samples });
    }
    integrate_with(&rhs, x0, x1, &y0, ctrl, |rec| {
        let mut z = [C64::ZERO; 4];
        let mut f = [C64::ZERO; 4];
        z.copy_from_slice(rec.y1);
        f.copy_from_slice(rec.f1);
        samples.push((rec.x1, z, f));
        Ok(())
    })?;
    Ok(ScalarTrajectory { lambda, samples })
}
