//! Interval-truncation regularization of singular problems: truncation
//! schedules, per-endpoint boundary recipes, Friedrichs (Dirichlet) sweeps,
//! the sigma-forced lim-3 sweep, double-truncation sweeps, and the
//! interlacing / spurious-eigenvalue diagnostics.

use crate::bc::{dirichlet_pair, lim3_condition_completion, lim3_wr, lim4_pair_from_solutions,
    weyl_to_pair, BoundaryForm};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::hamiltonian::QuasiVector;
use crate::linalg::cr;
use crate::oscillation::{kth_eigenvalue, RegularProblem};
use crate::problem::{EndpointClass, EndpointKind, Interval, ProblemSpec, Side};
use crate::propagate::{init_fundamental, propagate, solve_scalar, weyl_at, StepControl};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleRule {
    Geometric,
    Linear,
    Explicit,
}

/// Strictly monotone sequence of truncation points approaching one endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationSchedule {
    pub side: Side,
    pub points: Vec<f64>,
    pub rule: ScheduleRule,
}

impl TruncationSchedule {
    fn validate(self) -> Result<Self> {
        if self.points.is_empty() {
            return Err(Error::InvalidProblem("empty truncation schedule".into()));
        }
        let toward = match self.side {
            Side::Right => 1.0,
            Side::Left => -1.0,
        };
        for w in self.points.windows(2) {
            if !((w[1] - w[0]) * toward > 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "schedule not strictly monotone toward the endpoint: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.points.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidProblem("schedule points must be finite".into()));
        }
        Ok(self)
    }

    pub fn explicit(side: Side, points: Vec<f64>) -> Result<Self> {
        TruncationSchedule { side, points, rule: ScheduleRule::Explicit }.validate()
    }

    /// Finite endpoint: halve the offset from `start`; infinite endpoint:
    /// double outward from `start`.
    pub fn geometric(side: Side, endpoint: f64, start: f64, count: usize) -> Result<Self> {
        let points = if endpoint.is_finite() {
            let d0 = endpoint - start;
            (0..count).map(|j| endpoint - d0 * libm::pow(0.5, j as f64)).collect()
        } else {
            (0..count).map(|j| start * libm::pow(2.0, j as f64)).collect()
        };
        TruncationSchedule { side, points, rule: ScheduleRule::Geometric }.validate()
    }

    pub fn linear(side: Side, start: f64, step: f64, count: usize) -> Result<Self> {
        let points = (0..count).map(|j| start + step * j as f64).collect();
        TruncationSchedule { side, points, rule: ScheduleRule::Linear }.validate()
    }
}

/// A solution of the equation at a fixed real lambda, frozen by its
/// quasi-vector value at one anchor point; evaluated elsewhere by integration.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenSolution {
    pub x0: f64,
    pub z0: QuasiVector,
    pub lambda: f64,
}

impl FrozenSolution {
    pub fn at(&self, problem: &ProblemSpec, x: f64, ctrl: &StepControl) -> Result<QuasiVector> {
        if x == self.x0 {
            return Ok(self.z0);
        }
        let t = solve_scalar(problem, cr(self.lambda), &self.z0, self.x0, x, ctrl)?;
        Ok(t.at(x))
    }
}

/// Boundary data for a lim-3 condition function psi along a schedule: either
/// closed-form quasi-derivative components or an anchor sample to propagate.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiData {
    /// Components (y, y', y^[3], y^[2]) as expressions in x.
    Exprs(Vec<Expr>),
    Frozen(FrozenSolution),
}

impl PsiData {
    pub fn at(&self, problem: &ProblemSpec, x: f64, ctrl: &StepControl) -> Result<QuasiVector> {
        let z = match self {
            PsiData::Exprs(components) => {
                if components.len() != 4 {
                    return Err(Error::InvalidProblem(
                        "psi needs 4 quasi-derivative components".into(),
                    ));
                }
                let vals = [
                    components[0].eval(x),
                    components[1].eval(x),
                    components[2].eval(x),
                    components[3].eval(x),
                ];
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::BadCoefficient {
                        name: "psi",
                        x,
                        detail: "non-finite component".into(),
                    });
                }
                QuasiVector::from_real(vals)
            }
            PsiData::Frozen(f) => f.at(problem, x, ctrl)?,
        };
        if z.max_imag() > 1e-10 * (1.0 + z.norm()) {
            return Err(Error::InvalidProblem("psi data must be real".into()));
        }
        Ok(z)
    }
}

/// Boundary rule applied at one side of a truncated interval.
#[derive(Debug, Clone, PartialEq)]
pub enum BcRule {
    /// Regular original endpoint: keep its declared conditions.
    Inherit,
    /// Friedrichs / lim-2 rule: y = y' = 0 at the truncation point.
    Dirichlet,
    /// One lim-3 condition [y, psi] = 0; with a sigma target the completion
    /// is the sigma-forced W_R built at a lambda in [lambda_star,
    /// lambda_star + epsilon].
    Lim3 { psi: PsiData, sigma_target: Option<u8>, lambda_star: f64, epsilon: f64 },
    /// Two lim-4 conditions frozen from real-lambda solutions.
    Lim4 { theta1: FrozenSolution, theta2: FrozenSolution },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndpointRecipe {
    pub left: BcRule,
    pub right: BcRule,
}

impl EndpointRecipe {
    /// Dirichlet at every singular end, inherited conditions at regular ends.
    pub fn friedrichs(problem: &ProblemSpec) -> EndpointRecipe {
        let rule = |c: EndpointClass| {
            if c.kind == EndpointKind::Regular {
                BcRule::Inherit
            } else {
                BcRule::Dirichlet
            }
        };
        EndpointRecipe { left: rule(problem.left_class), right: rule(problem.right_class) }
    }
}

/// Regular restriction of `problem` to [a_j, b_j] with boundary conditions
/// synthesized per the recipe. `lambda_context` is the real lambda used for
/// any propagation the synthesis needs (Weyl matrices for sigma forcing).
pub fn truncate(
    problem: &ProblemSpec,
    a_j: f64,
    b_j: f64,
    recipe: &EndpointRecipe,
    lambda_context: f64,
    ctrl: &StepControl,
) -> Result<RegularProblem> {
    if !(a_j < b_j) || a_j < problem.interval.a || b_j > problem.interval.b {
        return Err(Error::InvalidProblem(format!(
            "truncated interval [{a_j}, {b_j}] not inside ({}, {})",
            problem.interval.a, problem.interval.b
        )));
    }
    let sub = ProblemSpec {
        coefficients: problem.coefficients.clone(),
        interval: Interval::new(a_j, b_j)?,
        left_class: EndpointClass::declared(EndpointKind::Regular),
        right_class: EndpointClass::declared(EndpointKind::Regular),
        left_bc: Vec::new(),
        right_bc: Vec::new(),
        essential_spectrum_floor: problem.essential_spectrum_floor,
    };

    let sigma_on = |r: &BcRule| {
        matches!(r, BcRule::Lim3 { sigma_target: Some(_), .. })
    };
    if sigma_on(&recipe.left) && sigma_on(&recipe.right) {
        return Err(Error::InvalidProblem(
            "sigma forcing is supported at one endpoint at a time".into(),
        ));
    }

    // Resolve the plain side first; a sigma-forced side needs the opposite
    // boundary form to compute the Weyl matrix at the truncation point.
    let (left, right);
    if sigma_on(&recipe.right) {
        left = resolve_plain(problem, &recipe.left, Side::Left, a_j, lambda_context, ctrl)?;
        right = resolve_sigma(problem, &sub, &recipe.right, Side::Right, &left, ctrl)?;
    } else if sigma_on(&recipe.left) {
        right = resolve_plain(problem, &recipe.right, Side::Right, b_j, lambda_context, ctrl)?;
        left = resolve_sigma(problem, &sub, &recipe.left, Side::Left, &right, ctrl)?;
    } else {
        left = resolve_plain(problem, &recipe.left, Side::Left, a_j, lambda_context, ctrl)?;
        right = resolve_plain(problem, &recipe.right, Side::Right, b_j, lambda_context, ctrl)?;
    }
    RegularProblem::new(sub, left, right)
}

fn inherited(problem: &ProblemSpec, side: Side) -> Result<BoundaryForm> {
    let list = match side {
        Side::Left => &problem.left_bc,
        Side::Right => &problem.right_bc,
    };
    list.first().cloned().ok_or_else(|| {
        Error::InvalidProblem(format!("no boundary condition to inherit on the {side:?} side"))
    })
}

fn resolve_plain(
    problem: &ProblemSpec,
    rule: &BcRule,
    side: Side,
    x_trunc: f64,
    lambda_context: f64,
    ctrl: &StepControl,
) -> Result<BoundaryForm> {
    match rule {
        BcRule::Inherit => inherited(problem, side),
        BcRule::Dirichlet => Ok(dirichlet_pair()),
        BcRule::Lim3 { psi, sigma_target: None, .. } => {
            let z = psi.at(problem, x_trunc, ctrl)?;
            lim3_condition_completion(&z)
        }
        BcRule::Lim3 { sigma_target: Some(_), .. } => unreachable!("handled by resolve_sigma"),
        BcRule::Lim4 { theta1, theta2 } => {
            let _ = lambda_context;
            let t1 = theta1.at(problem, x_trunc, ctrl)?;
            let t2 = theta2.at(problem, x_trunc, ctrl)?;
            lim4_pair_from_solutions(&t1, &t2, 1e-8)
        }
    }
}

/// Sigma-forced lim-3 synthesis: the Weyl matrix of the solutions satisfying
/// the opposite boundary condition is evaluated at the truncation point, and
/// lim3_wr pins nu_neg of the Weyl difference to the target. DegenerateG and
/// singular-U hits move lambda upward inside [lambda_star, lambda_star + eps].
fn resolve_sigma(
    problem: &ProblemSpec,
    sub: &ProblemSpec,
    rule: &BcRule,
    side: Side,
    opposite_form: &BoundaryForm,
    ctrl: &StepControl,
) -> Result<BoundaryForm> {
    let (psi, target, lambda_star, epsilon) = match rule {
        BcRule::Lim3 { psi, sigma_target: Some(t), lambda_star, epsilon } => {
            (psi, *t, *lambda_star, *epsilon)
        }
        _ => unreachable!(),
    };
    if side == Side::Left && target == 0 {
        return Err(Error::InvalidProblem(
            "sigma target 0 is not supported on the left side".into(),
        ));
    }
    let (x_trunc, x_opp, opp_side) = match side {
        Side::Right => (sub.interval.b, sub.interval.a, Side::Left),
        Side::Left => (sub.interval.a, sub.interval.b, Side::Right),
    };
    let z = psi.at(problem, x_trunc, ctrl)?;
    let u = [z.z[0].re, z.z[1].re];
    let v = [z.z[2].re, z.z[3].re];
    if libm::hypot(u[0], u[1]) <= 1e-12 * z.norm() {
        return Err(Error::InvalidProblem(
            "sigma forcing needs u_psi != 0 at the truncation point".into(),
        ));
    }
    let (a1, a2) = opposite_form.as_pair()?;
    let steps = 8u32;
    let mut last = Error::MatchingPointFailure;
    for t in 0..=steps {
        let lambda = lambda_star + epsilon * (t as f64) / (steps as f64);
        let fund = init_fundamental(
            &BoundaryForm::RegularPair { a1, a2 },
            opp_side,
            cr(lambda),
            x_opp,
        )?;
        let fund = match propagate(sub, fund, x_trunc, ctrl) {
            Ok(f) => f,
            Err(e @ (Error::BlowUp { .. } | Error::StepSizeUnderflow { .. })) => {
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        let w = match weyl_at(&fund, x_trunc) {
            Ok(w) => w,
            Err(e @ Error::SingularU { .. }) => {
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        };
        match lim3_wr(u, v, &w, target, 1e-9) {
            Ok((wr, _syn)) => return weyl_to_pair(&wr),
            Err(e @ (Error::DegenerateG | Error::TargetInfeasible)) => {
                last = e;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    let _ = last;
    Err(Error::Inconclusive(format!(
        "sigma forcing infeasible across [{lambda_star}, {}] at x = {x_trunc}; \
         schedule may be too coarse",
        lambda_star + epsilon
    )))
}

/// One row of a sweep: truncated interval and the eigenvalues found on it.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub j: usize,
    pub a_j: f64,
    pub b_j: f64,
    /// lambda_k for k = 0..=k_max; None when location failed (see flags).
    pub lambdas: Vec<Option<f64>>,
    /// Per-k annotations, parallel to `lambdas`.
    pub flags: Vec<Vec<String>>,
    pub row_flags: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceSummary {
    pub k: usize,
    pub converged: bool,
    pub final_estimate: Option<f64>,
    pub last_increment: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub converged: Vec<ConvergenceSummary>,
}

impl SweepResult {
    /// CSV with one line per (j, k).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,a_j,b_j,k,lambda_k,flags\n");
        for row in &self.rows {
            for (k, lam) in row.lambdas.iter().enumerate() {
                let mut flags: Vec<String> = row.row_flags.clone();
                flags.extend(row.flags[k].iter().cloned());
                let lam_s = match lam {
                    Some(v) => format!("{v:.12e}"),
                    None => String::from("nan"),
                };
                out += &format!(
                    "{},{:.12e},{:.12e},{},{},{}\n",
                    row.j,
                    row.a_j,
                    row.b_j,
                    k,
                    lam_s,
                    flags.join(";")
                );
            }
        }
        out
    }
}

const MONOTONE_SLACK: f64 = 1e-8;

fn eig_tol(tol: f64) -> f64 {
    (tol * 1e-2).clamp(1e-12, 1e-8)
}

fn solve_row(
    rp: &RegularProblem,
    j: usize,
    k_max: usize,
    tol: f64,
    ctrl: &StepControl,
) -> SweepRow {
    let mut lambdas = Vec::with_capacity(k_max + 1);
    let mut flags: Vec<Vec<String>> = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        match kth_eigenvalue(rp, k, eig_tol(tol), ctrl) {
            Ok(v) => {
                lambdas.push(Some(v));
                flags.push(Vec::new());
            }
            Err(e) => {
                lambdas.push(None);
                flags.push([format!("error:{e}")].to_vec());
            }
        }
    }
    SweepRow {
        j,
        a_j: rp.spec.interval.a,
        b_j: rp.spec.interval.b,
        lambdas,
        flags,
        row_flags: Vec::new(),
    }
}

fn annotate_monotonicity(rows: &mut [SweepRow]) {
    for j in 1..rows.len() {
        let prev: Vec<Option<f64>> = rows[j - 1].lambdas.clone();
        for (k, lam) in rows[j].lambdas.clone().iter().enumerate() {
            if let (Some(cur), Some(Some(before))) = (lam, prev.get(k)) {
                if *cur > before + MONOTONE_SLACK {
                    rows[j].flags[k].push(format!(
                        "monotonicity-alarm:+{:.3e}",
                        cur - before
                    ));
                }
            }
        }
    }
}

fn summarize(rows: &[SweepRow], k_max: usize, tol: f64) -> Vec<ConvergenceSummary> {
    (0..=k_max)
        .map(|k| {
            let vals: Vec<f64> = rows.iter().filter_map(|r| r.lambdas.get(k).copied().flatten()).collect();
            let n = vals.len();
            if n == 0 {
                return ConvergenceSummary {
                    k,
                    converged: false,
                    final_estimate: None,
                    last_increment: None,
                };
            }
            let inc = if n >= 2 { Some((vals[n - 1] - vals[n - 2]).abs()) } else { None };
            ConvergenceSummary {
                k,
                converged: inc.map(|i| i < tol).unwrap_or(false),
                final_estimate: Some(vals[n - 1]),
                last_increment: inc,
            }
        })
        .collect()
}

/// Dirichlet truncation at every singular end; eigenvalues mu_k^{(j)} for
/// each schedule row. Regular problems yield a single row and ignore the
/// schedules. Eigenvalue failures are recorded in the row flags, not fatal.
pub fn friedrichs_sweep(
    problem: &ProblemSpec,
    k_max: usize,
    left_schedule: Option<&TruncationSchedule>,
    right_schedule: Option<&TruncationSchedule>,
    tol: f64,
    ctrl: &StepControl,
) -> Result<SweepResult> {
    let recipe = EndpointRecipe::friedrichs(problem);
    let mut rows = Vec::new();
    if problem.is_declared_regular() {
        let rp = truncate(
            problem,
            problem.interval.a,
            problem.interval.b,
            &EndpointRecipe { left: BcRule::Inherit, right: BcRule::Inherit },
            0.0,
            ctrl,
        )?;
        rows.push(solve_row(&rp, 0, k_max, tol, ctrl));
        let converged = summarize(&rows, k_max, tol);
        return Ok(SweepResult { rows, converged });
    }
    let n_rows = match (left_schedule, right_schedule) {
        (Some(l), Some(r)) => {
            if l.points.len() != r.points.len() {
                return Err(Error::InvalidProblem(
                    "two-sided sweep needs schedules of equal length".into(),
                ));
            }
            l.points.len()
        }
        (Some(l), None) => l.points.len(),
        (None, Some(r)) => r.points.len(),
        (None, None) => {
            return Err(Error::InvalidProblem(
                "singular problem needs at least one truncation schedule".into(),
            ))
        }
    };
    for j in 0..n_rows {
        let a_j = left_schedule.map(|s| s.points[j]).unwrap_or(problem.interval.a);
        let b_j = right_schedule.map(|s| s.points[j]).unwrap_or(problem.interval.b);
        match truncate(problem, a_j, b_j, &recipe, 0.0, ctrl) {
            Ok(rp) => rows.push(solve_row(&rp, j, k_max, tol, ctrl)),
            Err(e) => rows.push(SweepRow {
                j,
                a_j,
                b_j,
                lambdas: [None].repeat(k_max + 1),
                flags: (0..=k_max).map(|_| Vec::new()).collect(),
                row_flags: [format!("truncate-error:{e}")].to_vec(),
            }),
        }
    }
    annotate_monotonicity(&mut rows);
    let converged = summarize(&rows, k_max, tol);
    Ok(SweepResult { rows, converged })
}

/// Sigma-forced lim-3 sweep on one singular side (the other end regular):
/// at each truncation point the right condition is [y, psi] = 0 completed by
/// the W_R that forces sigma = 1 at a lambda in [lambda_star, lambda_star +
/// epsilon]. Points where u_psi vanishes fall back to Dirichlet and are
/// flagged.
pub fn lim3_exact_sweep(
    problem: &ProblemSpec,
    n: usize,
    lambda_star: f64,
    epsilon: f64,
    psi: &PsiData,
    schedule: &TruncationSchedule,
    tol: f64,
    ctrl: &StepControl,
) -> Result<SweepResult> {
    let mut rows = Vec::new();
    for (j, &point) in schedule.points.iter().enumerate() {
        let (a_j, b_j) = match schedule.side {
            Side::Right => (problem.interval.a, point),
            Side::Left => (point, problem.interval.b),
        };
        let z = psi.at(problem, point, ctrl)?;
        let u_small = libm::hypot(z.z[0].re, z.z[1].re) <= 1e-9 * z.norm().max(1e-300);
        let trunc_rule = if u_small {
            BcRule::Dirichlet
        } else {
            BcRule::Lim3 {
                psi: psi.clone(),
                sigma_target: Some(1),
                lambda_star,
                epsilon,
            }
        };
        let recipe = match schedule.side {
            Side::Right => EndpointRecipe { left: BcRule::Inherit, right: trunc_rule },
            Side::Left => EndpointRecipe { left: trunc_rule, right: BcRule::Inherit },
        };
        let mut row = match truncate(problem, a_j, b_j, &recipe, lambda_star, ctrl) {
            Ok(rp) => solve_row(&rp, j, n, tol, ctrl),
            Err(e) => SweepRow {
                j,
                a_j,
                b_j,
                lambdas: [None].repeat(n + 1),
                flags: (0..=n).map(|_| Vec::new()).collect(),
                row_flags: [format!("truncate-error:{e}")].to_vec(),
            },
        };
        if u_small {
            row.row_flags.push("dirichlet-fallback".to_string());
        }
        rows.push(row);
    }
    let converged = summarize(&rows, n, tol);
    Ok(SweepResult { rows, converged })
}

/// Two-sided truncation with a nested selection: for each outer point b_j the
/// inner (left) point a_i advances until the eigenvalue increment drops below
/// max(1/(j+1), tol), and the diagonal row (a_{i(j)}, b_j) is emitted.
pub fn double_sweep(
    problem: &ProblemSpec,
    n: usize,
    lambda_context: f64,
    left_schedule: &TruncationSchedule,
    right_schedule: &TruncationSchedule,
    recipe: &EndpointRecipe,
    tol: f64,
    ctrl: &StepControl,
) -> Result<SweepResult> {
    let mut rows = Vec::new();
    let mut i_sel = 0usize;
    for (j, &b_j) in right_schedule.points.iter().enumerate() {
        let budget = (1.0 / (j + 1) as f64).max(tol);
        let mut prev: Option<Vec<Option<f64>>> = None;
        let mut chosen: Option<SweepRow> = None;
        let mut i = i_sel;
        while i < left_schedule.points.len() {
            let a_i = left_schedule.points[i];
            let row = match truncate(problem, a_i, b_j, recipe, lambda_context, ctrl) {
                Ok(rp) => solve_row(&rp, j, n, tol, ctrl),
                Err(e) => SweepRow {
                    j,
                    a_j: a_i,
                    b_j,
                    lambdas: [None].repeat(n + 1),
                    flags: (0..=n).map(|_| Vec::new()).collect(),
                    row_flags: [format!("truncate-error:{e}")].to_vec(),
                },
            };
            let settled = match &prev {
                None => false,
                Some(p) => row
                    .lambdas
                    .iter()
                    .zip(p.iter())
                    .all(|(cur, before)| match (cur, before) {
                        (Some(c), Some(bf)) => (c - bf).abs() < budget,
                        _ => false,
                    }),
            };
            prev = Some(row.lambdas.clone());
            chosen = Some(row);
            if settled || i + 1 == left_schedule.points.len() {
                break;
            }
            i += 1;
        }
        i_sel = i;
        if let Some(mut row) = chosen {
            row.row_flags.push(format!("inner-index:{i}"));
            rows.push(row);
        }
    }
    annotate_monotonicity(&mut rows);
    let converged = summarize(&rows, n, tol);
    Ok(SweepResult { rows, converged })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterlacingReport {
    pub pass: bool,
    /// (k, violation amount) of the first failed inequality.
    pub first_violation: Option<(usize, f64)>,
}

const INTERLACE_SLACK: f64 = 1e-8;

/// Check lambda_0 <= mu_0 and mu_{k-1} <= lambda_k <= mu_k within slack.
pub fn interlacing_check(lambda: &[f64], mu: &[f64]) -> Result<InterlacingReport> {
    if lambda.len() != mu.len() || lambda.is_empty() {
        return Err(Error::InvalidProblem(
            "interlacing check needs equal-length nonempty lists".into(),
        ));
    }
    for list in [lambda, mu] {
        if list.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidProblem("eigenvalue lists must be nondecreasing".into()));
        }
    }
    for k in 0..lambda.len() {
        if lambda[k] > mu[k] + INTERLACE_SLACK {
            return Ok(InterlacingReport {
                pass: false,
                first_violation: Some((k, lambda[k] - mu[k])),
            });
        }
        if k > 0 && mu[k - 1] > lambda[k] + INTERLACE_SLACK {
            return Ok(InterlacingReport {
                pass: false,
                first_violation: Some((k, mu[k - 1] - lambda[k])),
            });
        }
    }
    Ok(InterlacingReport { pass: true, first_violation: None })
}

/// Locate beta with mu_k(beta) = lambda_star by bisection on the monotone
/// decreasing map beta -> mu_k(beta) over a family of regular problems on
/// (a, beta).
pub fn spurious_locator<F>(
    family: F,
    lambda_star: f64,
    k: usize,
    beta_lo: f64,
    beta_hi: f64,
    tol: f64,
    ctrl: &StepControl,
) -> Result<f64>
where
    F: Fn(f64) -> Result<RegularProblem>,
{
    let mu = |beta: f64| -> Result<f64> {
        kth_eigenvalue(&family(beta)?, k, eig_tol(tol), ctrl)
    };
    let mut lo = beta_lo;
    let mut hi = beta_hi;
    if !(mu(lo)? > lambda_star && mu(hi)? < lambda_star) {
        return Err(Error::BracketExhausted { k });
    }
    while (hi - lo).abs() > tol * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if mu(mid)? > lambda_star {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone)]
pub struct SigmaProbeRow {
    pub point: f64,
    /// Minimal feasible sigma target at this truncation point; None when both
    /// targets failed.
    pub sigma: Option<u8>,
    pub note: String,
}

/// At each schedule point, attempt sigma targets 0 then 1 via lim3_wr against
/// the Weyl matrix propagated from the regular end, and report the minimal
/// feasible value.
pub fn proposition_probe(
    problem: &ProblemSpec,
    lambda: f64,
    psi: &PsiData,
    schedule: &TruncationSchedule,
    ctrl: &StepControl,
) -> Result<Vec<SigmaProbeRow>> {
    if schedule.side != Side::Right {
        return Err(Error::InvalidProblem(
            "sigma probe runs on a right-side schedule".into(),
        ));
    }
    let left = inherited(problem, Side::Left)?;
    let (a1, a2) = left.as_pair()?;
    let mut out = Vec::new();
    for &b_j in &schedule.points {
        let z = psi.at(problem, b_j, ctrl)?;
        let u = [z.z[0].re, z.z[1].re];
        let v = [z.z[2].re, z.z[3].re];
        let sub = ProblemSpec {
            coefficients: problem.coefficients.clone(),
            interval: Interval::new(problem.interval.a, b_j)?,
            left_class: EndpointClass::declared(EndpointKind::Regular),
            right_class: EndpointClass::declared(EndpointKind::Regular),
            left_bc: Vec::new(),
            right_bc: Vec::new(),
            essential_spectrum_floor: problem.essential_spectrum_floor,
        };
        let fund = init_fundamental(
            &BoundaryForm::RegularPair { a1, a2 },
            Side::Left,
            cr(lambda),
            problem.interval.a,
        )?;
        let row = (|| -> Result<SigmaProbeRow> {
            let fund = propagate(&sub, fund, b_j, ctrl)?;
            let w = weyl_at(&fund, b_j)?;
            for target in [0u8, 1u8] {
                match lim3_wr(u, v, &w, target, 1e-9) {
                    Ok((_, syn)) if !syn.ill_conditioned => {
                        return Ok(SigmaProbeRow {
                            point: b_j,
                            sigma: Some(target),
                            note: String::new(),
                        })
                    }
                    Ok(_) | Err(Error::DegenerateG) | Err(Error::TargetInfeasible) => continue,
                    Err(e) => return Err(e),
                }
            }
            Ok(SigmaProbeRow {
                point: b_j,
                sigma: None,
                note: "both sigma targets infeasible".into(),
            })
        })();
        match row {
            Ok(r) => out.push(r),
            Err(e) => out.push(SigmaProbeRow {
                point: b_j,
                sigma: None,
                note: format!("error:{e}"),
            }),
        }
    }
    Ok(out)
}
