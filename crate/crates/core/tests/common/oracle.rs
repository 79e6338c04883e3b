//! Finite-difference eigenvalue oracle, fully independent of the shooting
//! code: the quadratic form
//!
//!   t[y] = int p y''^2 + s y'^2 + q y^2 dx  (+/- boundary forms)
//!
//! is discretized on a uniform grid as a pentadiagonal symmetric pencil
//! (A, B), essential constraints are eliminated exactly, and eigenvalues are
//! located by inertia bisection on a banded LDL^T factorization.

/// Symmetric pentadiagonal matrix, lower storage: diag[i], sub1[i] = (i, i-1),
/// sub2[i] = (i, i-2).
#[derive(Clone)]
pub struct Banded {
    pub n: usize,
    pub diag: Vec<f64>,
    pub sub1: Vec<f64>,
    pub sub2: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize) -> Banded {
        Banded {
            n,
            diag: vec![0.0; n],
            sub1: vec![0.0; n],
            sub2: vec![0.0; n],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.diag[hi] += v,
            1 => self.sub1[hi] += v,
            2 => self.sub2[hi] += v,
            _ => panic!("bandwidth overflow at ({i}, {j})"),
        }
    }

    /// Rank-one update A += c * v v^T for a short stencil v given as
    /// (index, coefficient) pairs; indices must be distinct within a stencil.
    pub fn add_outer(&mut self, stencil: &[(usize, f64)], c: f64) {
        for &(i, vi) in stencil {
            for &(j, vj) in stencil {
                if i >= j {
                    self.add(i, j, c * vi * vj);
                }
            }
        }
    }

    pub fn scale_norm(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.sub1.iter())
            .chain(self.sub2.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Number of negative pivots of the LDL^T factorization of A - shift * B,
/// i.e. the number of pencil eigenvalues below `shift`. Pivots smaller than
/// pivmin are clamped (counted negative), so shifts landing exactly on an
/// eigenvalue stay resolved.
pub fn count_below(a: &Banded, b_diag: &[f64], shift: f64) -> usize {
    let n = a.n;
    let scale =
        a.scale_norm() + shift.abs() * b_diag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pivmin = 1e-64 * scale.max(1e-300);
    let mut d = vec![0.0f64; n];
    let mut l1 = vec![0.0f64; n];
    let mut l2 = vec![0.0f64; n];
    let mut neg = 0usize;
    for i in 0..n {
        let aii = a.diag[i] - shift * b_diag[i];
        if i >= 2 {
            l2[i] = a.sub2[i] / d[i - 2];
        }
        if i >= 1 {
            let mut v = a.sub1[i];
            if i >= 2 {
                v -= l2[i] * d[i - 2] * l1[i - 1];
            }
            l1[i] = v / d[i - 1];
        }
        let mut dv = aii;
        if i >= 1 {
            dv -= l1[i] * l1[i] * d[i - 1];
        }
        if i >= 2 {
            dv -= l2[i] * l2[i] * d[i - 2];
        }
        if dv.abs() < pivmin {
            dv = -pivmin;
        }
        if dv < 0.0 {
            neg += 1;
        }
        d[i] = dv;
    }
    neg
}

/// k-th pencil eigenvalue (k = 0 lowest) by doubling bracket + bisection.
/// The pencil is first symmetrically scaled to B = I, which keeps the
/// bisection roundoff floor at eps * ||A_scaled|| instead of
/// eps * ||A|| / min(B).
pub fn kth_eigenvalue(a_raw: &Banded, b_raw: &[f64], k: usize, tol: f64) -> f64 {
    let d: Vec<f64> = b_raw.iter().map(|b| 1.0 / b.sqrt()).collect();
    let mut a = a_raw.clone();
    for i in 0..a.n {
        a.diag[i] *= d[i] * d[i];
        a.sub1[i] *= d[i] * if i >= 1 { d[i - 1] } else { 0.0 };
        a.sub2[i] *= d[i] * if i >= 2 { d[i - 2] } else { 0.0 };
    }
    let ones = vec![1.0f64; a.n];
    let a = &a;
    let b_diag = &ones[..];
    let mut hi = 1.0f64;
    while count_below(a, b_diag, hi) < k + 1 {
        hi *= 2.0;
        assert!(hi < 1e60, "oracle bracket exhausted for k = {k}");
    }
    let mut lo = -1.0f64;
    while count_below(a, b_diag, lo) > k {
        lo *= 2.0;
        assert!(lo > -1e60, "oracle bracket exhausted for k = {k}");
    }
    while (hi - lo).abs() > tol * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if count_below(a, b_diag, mid) >= k + 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary condition kinds the oracle understands. `Weyl` is the natural
/// condition v = W u of the form with boundary term -u^T W u at the right end
/// (+ at the left end), W real symmetric.
#[derive(Clone, Copy, Debug)]
pub enum OracleBc {
    Clamped,
    Hinged,
    Free,
    Weyl([[f64; 2]; 2]),
}

/// Exact elimination of essential boundary constraints: each full-grid index
/// maps to None (forced to zero) or a surviving reduced index with a factor.
struct Reduction {
    map: Vec<Option<(usize, f64)>>,
    reduced_n: usize,
}

impl Reduction {
    fn build(n: usize, left: OracleBc, right: OracleBc) -> Reduction {
        // full-grid substitutions before reindexing
        let mut subst: Vec<Option<(usize, f64)>> = (0..=n).map(|i| Some((i, 1.0))).collect();
        // clamped: y0 = 0 plus a ghost reflection handled in `assemble`
        match left {
            OracleBc::Clamped | OracleBc::Hinged => subst[0] = None,
            _ => {}
        }
        match right {
            OracleBc::Clamped | OracleBc::Hinged => subst[n] = None,
            _ => {}
        }
        // reindex the surviving targets
        let mut new_index = vec![usize::MAX; n + 1];
        let mut count = 0usize;
        for i in 0..=n {
            let survives = matches!(subst[i], Some((j, _)) if j == i);
            if survives {
                new_index[i] = count;
                count += 1;
            }
        }
        let map = subst
            .into_iter()
            .map(|slot| slot.map(|(j, f)| (new_index[j], f)))
            .collect();
        Reduction { map, reduced_n: count }
    }

    /// Push a full-grid stencil through the substitutions, merging entries
    /// that land on the same reduced index.
    fn stencil(&self, raw: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for &(i, c) in raw {
            if let Some((j, f)) = self.map[i] {
                if let Some(slot) = out.iter_mut().find(|(k, _)| *k == j) {
                    slot.1 += c * f;
                } else {
                    out.push((j, c * f));
                }
            }
        }
        out
    }
}

/// Assemble the pencil on [a, b] with n subintervals from coefficient
/// samples provided by `coeff(x) -> (p, s, q, w)`.
pub fn assemble<F: Fn(f64) -> (f64, f64, f64, f64)>(
    coeff: F,
    a: f64,
    b: f64,
    n: usize,
    bc_left: OracleBc,
    bc_right: OracleBc,
) -> (Banded, Vec<f64>) {
    assert!(n >= 8, "oracle grid too coarse");
    let h = (b - a) / n as f64;
    let x = |i: usize| a + h * i as f64;
    let red = Reduction::build(n, bc_left, bc_right);
    let mut amat = Banded::zeros(red.reduced_n);
    let mut bdiag = vec![0.0f64; red.reduced_n];

    // bending energy: sum over interior nodes of h * p_i * (D2 y)_i^2
    for i in 1..n {
        let (p, _, _, _) = coeff(x(i));
        let inv = 1.0 / (h * h);
        let st = red.stencil(&[(i - 1, inv), (i, -2.0 * inv), (i + 1, inv)]);
        amat.add_outer(&st, h * p);
    }
    // clamped ends: y' = 0 by the central-difference ghost reflection
    // y_{-1} = y_1, which activates the boundary bending term (trapezoid
    // half weight) with stencil value 2 y_1 / h^2 since y_0 = 0
    if matches!(bc_left, OracleBc::Clamped) {
        let (p, _, _, _) = coeff(x(0));
        let st = red.stencil(&[(1, 2.0 / (h * h))]);
        amat.add_outer(&st, 0.5 * h * p);
    }
    if matches!(bc_right, OracleBc::Clamped) {
        let (p, _, _, _) = coeff(x(n));
        let st = red.stencil(&[(n - 1, 2.0 / (h * h))]);
        amat.add_outer(&st, 0.5 * h * p);
    }

    // shear/tension: midpoint forward differences
    for i in 0..n {
        let (_, s, _, _) = coeff(x(i) + 0.5 * h);
        let inv = 1.0 / h;
        let st = red.stencil(&[(i, -inv), (i + 1, inv)]);
        amat.add_outer(&st, h * s);
    }
    // potential and weight: trapezoid; substitutions keep B diagonal because
    // each full index maps to at most one reduced index
    for i in 0..=n {
        let (_, _, q, w) = coeff(x(i));
        let tw = if i == 0 || i == n { 0.5 } else { 1.0 };
        if let Some((j, f)) = red.map[i] {
            amat.add(j, j, h * tw * q * f * f);
            bdiag[j] += h * tw * w * f * f;
        }
    }

    // natural boundary forms (Weyl sides carry no essential constraints, so
    // the trace stencils pass through the reduction unchanged)
    let du_a: [(usize, f64); 3] = [
        (0, -3.0 / (2.0 * h)),
        (1, 4.0 / (2.0 * h)),
        (2, -1.0 / (2.0 * h)),
    ];
    let du_b: [(usize, f64); 3] = [
        (n, 3.0 / (2.0 * h)),
        (n - 1, -4.0 / (2.0 * h)),
        (n - 2, 1.0 / (2.0 * h)),
    ];
    let mut apply = |bc: OracleBc, val: [(usize, f64); 1], deriv: [(usize, f64); 3], sign: f64| {
        if let OracleBc::Weyl(w) = bc {
            // sign * u^T W u with u = (y, y'); the cross term enters by
            // polarization: 2 u1 u2 = [(u1+u2)^2 - (u1-u2)^2] / 2
            let val = red.stencil(&val);
            let deriv = red.stencil(&deriv);
            let mut plus = val.clone();
            let mut minus = val.clone();
            for &(j, c) in &deriv {
                plus.push((j, c));
                minus.push((j, -c));
            }
            let plus = red_merge(plus);
            let minus = red_merge(minus);
            amat.add_outer(&val, sign * w[0][0]);
            amat.add_outer(&deriv, sign * w[1][1]);
            amat.add_outer(&plus, sign * 0.5 * w[0][1]);
            amat.add_outer(&minus, -sign * 0.5 * w[0][1]);
        }
    };
    apply(bc_left, [(0, 1.0)], du_a, 1.0);
    apply(bc_right, [(n, 1.0)], du_b, -1.0);

    (amat, bdiag)
}

/// Merge duplicate indices in a stencil (add_outer needs them distinct).
fn red_merge(raw: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, c) in raw {
        if let Some(slot) = out.iter_mut().find(|(k, _)| *k == i) {
            slot.1 += c;
        } else {
            out.push((i, c));
        }
    }
    out
}

/// Convenience: k-th eigenvalue with a grid-doubling self-check; panics if
/// the two grids disagree beyond `grid_tol` relative.
pub fn eigenvalue_checked<F: Fn(f64) -> (f64, f64, f64, f64) + Copy>(
    coeff: F,
    a: f64,
    b: f64,
    n: usize,
    bc_left: OracleBc,
    bc_right: OracleBc,
    k: usize,
    grid_tol: f64,
) -> f64 {
    let (a1, b1) = assemble(coeff, a, b, n, bc_left, bc_right);
    let (a2, b2) = assemble(coeff, a, b, 2 * n, bc_left, bc_right);
    let e1 = kth_eigenvalue(&a1, &b1, k, 1e-10);
    let e2 = kth_eigenvalue(&a2, &b2, k, 1e-10);
    let denom = 1.0 + e2.abs();
    assert!(
        (e1 - e2).abs() / denom < grid_tol,
        "oracle grids disagree for k = {k}: {e1} vs {e2}"
    );
    // second-order scheme: Richardson extrapolation of the pair
    (4.0 * e2 - e1) / 3.0
}
