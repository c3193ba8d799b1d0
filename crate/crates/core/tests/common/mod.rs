//! Random instances shared by the integration and acceptance tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use reebkit::cone::reeb_chamber;
use reebkit::{LabeledPolytope, Rational, Scalar};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// A polygon with `3..=7` integer normals and rational offsets in `[1/2, 3]`,
/// so the origin is interior.
pub fn polygon(rng: &mut TestRng) -> LabeledPolytope<Rational> {
    loop {
        let m = rng.gen_range(3..=7);
        let mut angles: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let gap = (0..m)
            .map(|i| if i + 1 < m { angles[i + 1] - angles[i] } else { angles[0] + std::f64::consts::TAU - angles[i] })
            .fold(0.0, f64::max);
        if gap > std::f64::consts::PI - 0.2 {
            continue;
        }
        let normals: Vec<Vec<Rational>> = angles
            .iter()
            .map(|t| vec![q((8.0 * t.cos()).round() as i64, 1), q((8.0 * t.sin()).round() as i64, 1)])
            .collect();
        let offsets = (0..m).map(|_| q(rng.gen_range(1..=6), 2)).collect();
        if let Ok(p) = LabeledPolytope::from_halfspaces(normals, offsets) {
            return p;
        }
    }
}

/// A simple 3-polytope with `5..=8` small integer normals and offsets in `[1, 3]`.
pub fn polytope3(rng: &mut TestRng) -> LabeledPolytope<Rational> {
    loop {
        let m = rng.gen_range(5..=8);
        let normals: Vec<Vec<Rational>> =
            (0..m).map(|_| (0..3).map(|_| q(rng.gen_range(-3..=3), 1)).collect()).collect();
        if normals.iter().any(|u| u.iter().all(|x| *x == q(0, 1))) {
            continue;
        }
        let offsets = (0..m).map(|_| q(rng.gen_range(2..=6), 2)).collect();
        if let Ok(p) = LabeledPolytope::from_halfspaces(normals, offsets) {
            return p;
        }
    }
}

/// A point `β` of the Reeb chamber with `min_ν (1 + ⟨β, ν⟩) ≥ margin`.
pub fn chamber_point<S: Scalar>(p: &LabeledPolytope<S>, margin: f64, rng: &mut TestRng) -> Vec<f64> {
    let chamber = reeb_chamber(&p.to_f64()).expect("origin is interior");
    let (lo, hi) = chamber.bounding_box();
    loop {
        let beta: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
        if chamber.min_value(&beta) >= margin {
            return beta;
        }
    }
}

/// A point in the chamber with small rational coordinates.
pub fn rational_chamber_point(p: &LabeledPolytope<Rational>, rng: &mut TestRng) -> Vec<Rational> {
    let chamber = reeb_chamber(p).expect("origin is interior");
    loop {
        let beta: Vec<Rational> = chamber_point(p, 0.1, rng).iter().map(|x| q((x * 64.0).round() as i64, 64)).collect();
        if chamber.min_value(&beta) > q(1, 20) {
            return beta;
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
