//! Property tests for the structural invariants: bracket algebra, bracket
//! constancy along trajectories, matching-point invariance and monotonicity
//! of the eigenvalue count, and scale invariance of boundary pairs.

mod common;

use proptest::prelude::*;
use sl4_core::bc::{validate_pair, BoundaryForm};
use sl4_core::hamiltonian::{lagrangian_bracket, QuasiVector};
use sl4_core::linalg::{c, cr, Mat2};
use sl4_core::oscillation::{count_at, count_below, nu_neg, RegularProblem};
use sl4_core::problem::ProblemSpec;
use sl4_core::propagate::{solve_scalar, StepControl};

fn small() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn quasi() -> impl Strategy<Value = QuasiVector> {
    [small(), small(), small(), small(), small(), small(), small(), small()].prop_map(|v| {
        QuasiVector::new([c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7])])
    })
}

fn constant_problem() -> impl Strategy<Value = ProblemSpec> {
    (0.3..3.0f64, small(), small(), 0.3..3.0f64, 0.5..2.0f64)
        .prop_map(|(p, s, q, w, len)| ProblemSpec::constant_coefficients(p, s, q, w, 0.0, len))
}

fn hinged() -> BoundaryForm {
    sl4_core::bc::hinged_pair()
}

proptest! {
    #[test]
    fn bracket_antisymmetry(f in quasi(), g in quasi()) {
        let fg = lagrangian_bracket(&f, &g);
        let gf = lagrangian_bracket(&g, &f);
        let scale = 1.0 + f.norm() * g.norm();
        prop_assert!((fg + gf.conj()).norm() < 1e-12 * scale, "{fg} vs {gf}");
    }

    #[test]
    fn nu_neg_flip_complement(a in small(), b in small(), d in small()) {
        let m = Mat2::from_real([[a, b], [b, d]]);
        let neg = nu_neg(&m, 1e-9).unwrap();
        let pos = nu_neg(&m.scale(cr(-1.0)), 1e-9).unwrap();
        // counts of strictly negative and strictly positive eigenvalues
        prop_assert!(neg + pos <= 2);
        if m.det().norm() > 1e-6 {
            prop_assert_eq!(neg + pos, 2);
        }
    }

    #[test]
    fn pair_scale_invariance(sc in 0.1..10.0f64, flip in proptest::bool::ANY) {
        // scaling both matrices of a valid pair keeps it valid
        let factor = if flip { -sc } else { sc };
        for form in [sl4_core::bc::dirichlet_pair(), hinged(), sl4_core::bc::natural_pair()] {
            let (a1, a2) = form.as_pair().unwrap();
            let s1 = a1.scale(cr(factor));
            let s2 = a2.scale(cr(factor));
            prop_assert!(validate_pair(&s1, &s2).is_ok());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bracket_constant_along_trajectories(
        spec in constant_problem(),
        f0 in quasi(),
        g0 in quasi(),
        lam in -20.0..60.0f64,
    ) {
        let ctrl = StepControl::default();
        let (a, b) = (spec.interval.a, spec.interval.b);
        let tf = solve_scalar(&spec, cr(lam), &f0, a, b, &ctrl).unwrap();
        let tg = solve_scalar(&spec, cr(lam), &g0, a, b, &ctrl).unwrap();
        let base = lagrangian_bracket(&f0, &g0);
        let scale = 1.0 + f0.norm() * g0.norm();
        for frac in [0.25, 0.5, 0.75, 1.0] {
            let x = a + frac * (b - a);
            let br = lagrangian_bracket(&tf.at(x), &tg.at(x));
            prop_assert!(
                (br - base).norm() < 1e-8 * scale,
                "bracket drifted at {x}: {br} vs {base}"
            );
        }
    }

    #[test]
    fn count_is_matching_point_invariant(
        spec in constant_problem(),
        lam in -20.0..400.0f64,
        fracs in proptest::collection::vec(0.15..0.85f64, 3),
    ) {
        let rp = RegularProblem::new(spec, hinged(), hinged()).unwrap();
        let ctrl = StepControl::default();
        let (a, b) = (rp.spec.interval.a, rp.spec.interval.b);
        let mut seen = None;
        for frac in fracs {
            let cpt = a + frac * (b - a);
            let sc = match count_at(&rp, lam, cpt, &ctrl) {
                Ok(sc) => sc,
                // an event can sit exactly on the matching point; skip it
                Err(_) => continue,
            };
            if let Some(prev) = seen {
                prop_assert_eq!(sc.n, prev, "count changed with matching point");
            }
            seen = Some(sc.n);
        }
    }

    #[test]
    fn count_is_monotone_in_lambda(
        spec in constant_problem(),
        lams in proptest::collection::vec(-50.0..600.0f64, 4),
    ) {
        let rp = RegularProblem::new(spec, hinged(), hinged()).unwrap();
        let ctrl = StepControl::default();
        let mut sorted = lams.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut last = None;
        for lam in sorted {
            let n = count_below(&rp, lam, &ctrl).unwrap().n;
            if let Some(prev) = last {
                prop_assert!(n >= prev, "count dropped: {prev} -> {n} at {lam}");
            }
            last = Some(n);
        }
    }
}
