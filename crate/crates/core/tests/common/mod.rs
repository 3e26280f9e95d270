//! Independent oracles and generators shared by the integration tests.
//!
//! The oracles below never call the bound formulas under test. They work
//! straight from the structural model or by brute force.

#![allow(dead_code)]

use counterbound::{Level, ObservedJoint, Scm, SensitivityParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Worked-example population: majority/minority confounder, treatment, survival.
pub fn paper_scm() -> Scm<f64> {
    Scm::new(0.9, [0.2, 0.6], [[0.4, 0.6], [0.1, 0.3]]).unwrap()
}

pub fn paper_obs() -> ObservedJoint<f64> {
    ObservedJoint::new(0.108, 0.132, 0.084, 0.676).unwrap()
}

/// Range of `p(benefit)` over all couplings of the potential outcomes
/// that are consistent with the model, stratum by stratum in `U`:
/// within a stratum the joint of `(Y_x, Y_x')` is only pinned down up to
/// its Fréchet bounds. Computed by brute force over a fine grid of
/// per-stratum couplings, independently of any closed form.
pub fn frechet_benefit(scm: &Scm<f64>, grid: usize) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for u in Level::BOTH {
        let a = scm.p_y_given_x_u(Level::Base, u);
        let b = scm.p_y_given_x_u(Level::Prime, u);
        // benefit in stratum = P(Y_x = 1, Y_x' = 0) = a - P(both = 1)
        // with P(both = 1) ranging over [max(0, a + b - 1), min(a, b)]
        let (mut s_lo, mut s_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let both_lo = (a + b - 1.0).max(0.0);
        let both_hi = a.min(b);
        for k in 0..=grid {
            let both = both_lo + (both_hi - both_lo) * k as f64 / grid as f64;
            let benefit = a - both;
            s_lo = s_lo.min(benefit);
            s_hi = s_hi.max(benefit);
        }
        lo += scm.p_u(u) * s_lo;
        hi += scm.p_u(u) * s_hi;
    }
    (lo, hi)
}

/// `p(harm)` counterpart of [`frechet_benefit`].
pub fn frechet_harm(scm: &Scm<f64>, grid: usize) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for u in Level::BOTH {
        let a = scm.p_y_given_x_u(Level::Base, u);
        let b = scm.p_y_given_x_u(Level::Prime, u);
        let both_lo = (a + b - 1.0).max(0.0);
        let both_hi = a.min(b);
        let (mut s_lo, mut s_hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..=grid {
            let both = both_lo + (both_hi - both_lo) * k as f64 / grid as f64;
            let harm = b - both;
            s_lo = s_lo.min(harm);
            s_hi = s_hi.max(harm);
        }
        lo += scm.p_u(u) * s_lo;
        hi += scm.p_u(u) * s_hi;
    }
    (lo, hi)
}

/// `Σ_v p(y|x,v) p(v)` computed by direct enumeration over `U` and `V`.
pub fn partial_adjusted(scm: &Scm<f64>, x: Level) -> f64 {
    let mut total = 0.0;
    for v in Level::BOTH {
        let mut p_v = 0.0;
        let mut p_xv = 0.0;
        let mut p_xyv = 0.0;
        for u in Level::BOTH {
            let pu = scm.p_u(u);
            let pv = scm.p_v_given_u(v, u).unwrap();
            let px = scm.p_x_given_u(x, u);
            let py = scm.p_y_given_x_u(x, u);
            p_v += pu * pv;
            p_xv += pu * pv * px;
            p_xyv += pu * pv * px * py;
        }
        total += p_xyv / p_xv * p_v;
    }
    total
}

/// Random joint over four cells, every cell at least `floor`.
pub fn random_obs(rng: &mut impl Rng, floor: f64) -> ObservedJoint<f64> {
    loop {
        let raw: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
        let s: f64 = raw.iter().sum();
        let cells = raw.map(|v| v / s);
        if cells.iter().all(|&c| c >= floor) {
            let fix = 1.0 - cells[..3].iter().sum::<f64>();
            return ObservedJoint::new(cells[0], cells[1], cells[2], fix).unwrap();
        }
    }
}

/// Random parameters inside the possible region of `obs`.
pub fn random_params(rng: &mut impl Rng, obs: &ObservedJoint<f64>) -> SensitivityParams<f64> {
    let yx = obs.p_y_given_x().unwrap();
    let yxp = obs.p_y_given_xp().unwrap();
    SensitivityParams::new(
        rng.random::<f64>() * yx,
        yx + rng.random::<f64>() * (1.0 - yx),
        rng.random::<f64>() * yxp,
        yxp + rng.random::<f64>() * (1.0 - yxp),
    )
    .unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
