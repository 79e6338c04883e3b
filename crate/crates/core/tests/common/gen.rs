//! Seeded random problems for the integration suites.

use super::oracle::OracleBc;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sl4_core::bc::{dirichlet_pair, hinged_pair, natural_pair, weyl_to_pair, BoundaryForm};
use sl4_core::linalg::Mat2;
use sl4_core::problem::ProblemSpec;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random regular problem with matching solver-side and oracle-side
/// boundary conditions.
pub struct RandomRegular {
    pub spec: ProblemSpec,
    pub left: BoundaryForm,
    pub right: BoundaryForm,
    pub left_oracle: OracleBc,
    pub right_oracle: OracleBc,
    pub label: String,
}

/// Smooth positive-p, positive-w coefficients: trigonometric perturbations of
/// constants, uniformly bounded away from zero by construction.
pub fn random_coefficients(r: &mut ChaCha8Rng) -> (String, String, String, String) {
    let mut trig = |lo: f64, hi: f64, positive: bool| -> String {
        let amp: f64 = r.gen_range(0.1..0.8);
        let freq: f64 = r.gen_range(0.5..2.5);
        let phase: f64 = r.gen_range(0.0..6.28);
        let base: f64 = if positive {
            r.gen_range((1.0 + amp)..(1.0 + amp + hi))
        } else {
            r.gen_range(lo..hi)
        };
        format!("{base:.6} + {amp:.6}*sin({freq:.6}*x + {phase:.6})")
    };
    let p = trig(0.0, 1.5, true);
    let s = trig(-1.0, 1.0, false);
    let q = trig(-5.0, 5.0, false);
    let w = trig(0.0, 1.0, true);
    (p, s, q, w)
}

fn random_bc(r: &mut ChaCha8Rng) -> (BoundaryForm, OracleBc, &'static str) {
    match r.gen_range(0..4u32) {
        0 => (dirichlet_pair(), OracleBc::Clamped, "clamped"),
        1 => (hinged_pair(), OracleBc::Hinged, "hinged"),
        2 => (natural_pair(), OracleBc::Free, "free"),
        _ => {
            let a: f64 = r.gen_range(-2.0..2.0);
            let b: f64 = r.gen_range(-2.0..2.0);
            let d: f64 = r.gen_range(-2.0..2.0);
            let w = Mat2::from_real([[a, b], [b, d]]);
            (weyl_to_pair(&w).unwrap(), OracleBc::Weyl([[a, b], [b, d]]), "weyl")
        }
    }
}

pub fn random_regular(r: &mut ChaCha8Rng) -> RandomRegular {
    random_regular_len(r, 0.6, 2.0)
}

/// Like [`random_regular`] with a caller-chosen interval length range. The
/// finite-difference oracle's roundoff floor grows like (n / len)^4, so
/// comparisons on fine grids want lengths bounded away from zero.
pub fn random_regular_len(r: &mut ChaCha8Rng, len_lo: f64, len_hi: f64) -> RandomRegular {
    let (p, s, q, w) = random_coefficients(r);
    let a: f64 = r.gen_range(-1.5..1.0);
    let len: f64 = r.gen_range(len_lo..len_hi);
    let spec = ProblemSpec::from_exprs(&p, &s, &q, &w, a, a + len).unwrap();
    let (left, left_oracle, ln) = random_bc(r);
    let (right, right_oracle, rn) = random_bc(r);
    RandomRegular {
        spec,
        left,
        right,
        left_oracle,
        right_oracle,
        label: format!("[{ln}|{rn}] on [{a:.3}, {:.3}], p = {p}", a + len),
    }
}
