//! The labeled cone over a polytope, its Reeb chamber and characteristic
//! polytopes, lattices and goodness.

mod lattice;

pub use lattice::{is_good, is_good_quadcone, lattice_from_labels, primitive_in, smith_normal_form, Lattice};

use crate::error::{Error, Result};
use crate::geometry::{AffineFunction, LabeledPolytope};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// A polyhedral cone `{y : ⟨y, L_i⟩ ≥ 0}` in `ℝ^{n+1}` with its labels.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledCone<S> {
    labels: Vec<Vec<S>>,
}

impl<S: Scalar> LabeledCone<S> {
    /// Validates full dimension and strict convexity: the labels must span
    /// and their sum must be positive on every extreme ray.
    pub fn new(labels: Vec<Vec<S>>) -> Result<Self> {
        let Some(first) = labels.first() else {
            return Err(Error::InvalidInput("a cone needs labels".into()));
        };
        let m = first.len();
        if m < 2 {
            return Err(Error::InvalidInput("cone dimension must be at least 2".into()));
        }
        if let Some(bad) = labels.iter().find(|l| l.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, found: bad.len() });
        }
        if linalg::rank(&labels) < m {
            return Err(Error::InvalidInput("labels do not span; the cone is not strictly convex".into()));
        }
        let cone = Self { labels };
        cone.slice(&cone.interior_covector())?;
        Ok(cone)
    }

    pub fn dim(&self) -> usize {
        self.labels[0].len()
    }

    pub fn labels(&self) -> &[Vec<S>] {
        &self.labels
    }

    /// `Σ L_i`, interior to the dual cone whenever the cone is strictly convex.
    pub fn interior_covector(&self) -> Vec<S> {
        self.labels.iter().fold(vec![S::zero(); self.dim()], |acc, l| linalg::add(&acc, l))
    }

    /// The characteristic polytope `C ∩ {⟨y, b⟩ = 1}` with quotient labels.
    ///
    /// Chart: for the first `k` with `b_k ≠ 0`, the origin is `e_k / b_k` and
    /// the coordinates are dual to `w_j = e_j − (b_j / b_k) e_k`, `j ≠ k`. A
    /// label `L` restricts to normal `(L_j − b_j L_k / b_k)_{j≠k}` and offset
    /// `L_k / b_k`. At `b = 𝟏 = e_0` this is the identity on `(Δ, u)`.
    pub fn slice(&self, b: &[S]) -> Result<LabeledPolytope<S>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: b.len() });
        }
        let scale = S::max_abs(b);
        let Some(k) = b.iter().position(|x| !x.is_negligible(scale)) else {
            return Err(Error::ReebVectorOutsideChamber);
        };
        let bk = b[k].clone();
        let mut normals = Vec::with_capacity(self.labels.len());
        let mut offsets = Vec::with_capacity(self.labels.len());
        for l in &self.labels {
            let lk = l[k].clone() / bk.clone();
            normals
                .push((0..self.dim()).filter(|&j| j != k).map(|j| l[j].clone() - b[j].clone() * lk.clone()).collect());
            offsets.push(lk);
        }
        LabeledPolytope::from_halfspaces(normals, offsets).map_err(|e| match e {
            Error::UnboundedRegion | Error::EmptyInterior => Error::ReebVectorOutsideChamber,
            other => other,
        })
    }
}

/// `C(Δ)` labeled by `L_l = λ_l 𝟏 + u_l`, written in the basis `(𝟏, μ_1, …, μ_n)`.
pub fn cone_over<S: Scalar>(p: &LabeledPolytope<S>) -> LabeledCone<S> {
    let labels = (0..p.num_facets()).map(|l| p.label(l).coefficients()).collect();
    LabeledCone { labels }
}

/// `Ω = {b : b(0) = 1, b(ν) > 0 for every vertex ν}` in the coefficients `(b_1, …, b_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReebChamber<S> {
    /// One inequality `1 + ⟨β, ν⟩ > 0` per vertex `ν`.
    pub vertices: Vec<Vec<S>>,
    /// Vertices `u_l / λ_l` of the closure.
    pub corners: Vec<Vec<S>>,
}

impl<S: Scalar> ReebChamber<S> {
    pub fn contains(&self, beta: &[S]) -> bool {
        self.vertices.iter().all(|v| (S::one() + linalg::dot(beta, v)).is_positive())
    }

    /// Smallest value of `1 + ⟨β, ν⟩` over the vertices.
    pub fn min_value(&self, beta: &[S]) -> S {
        let mut values = self.vertices.iter().map(|v| S::one() + linalg::dot(beta, v));
        let first = values.next().expect("a polytope has vertices");
        values.fold(first, |m, x| if x < m { x } else { m })
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.corners[0].len();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for c in &self.corners {
            for j in 0..n {
                lo[j] = lo[j].min(c[j].to_f64());
                hi[j] = hi[j].max(c[j].to_f64());
            }
        }
        (lo, hi)
    }

    pub fn reeb(&self, beta: &[S]) -> AffineFunction<S> {
        AffineFunction::new(S::one(), beta.to_vec())
    }
}

pub fn reeb_chamber<S: Scalar>(p: &LabeledPolytope<S>) -> Result<ReebChamber<S>> {
    let scale = S::max_abs(p.offsets());
    if p.offsets().iter().any(|lam| !lam.is_clearly_positive(scale)) {
        return Err(Error::OriginNotInterior);
    }
    let corners = p
        .normals()
        .iter()
        .zip(p.offsets())
        .map(|(u, lam)| u.iter().map(|x| x.clone() / lam.clone()).collect())
        .collect();
    Ok(ReebChamber { vertices: p.vertices().to_vec(), corners })
}

/// Whether `b` is positive at every vertex of `Δ`.
pub fn is_reeb<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> bool {
    p.vertices().iter().all(|v| b.eval(v).is_positive())
}

/// `(Δ_b, u_b)`: the slice of `C(Δ)` at `⟨y, b⟩ = 1`, whose vertices are the
/// images `e_ν / b(ν)` of the vertices of `Δ`.
pub fn characteristic_polytope<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<LabeledPolytope<S>> {
    if b.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: b.dim() });
    }
    if !is_reeb(p, b) {
        return Err(Error::ReebVectorOutsideChamber);
    }
    cone_over(p).slice(&b.coefficients())
}

/// Points of the chart of `{⟨y, b⟩ = 1}` used by [`LabeledCone::slice`].
pub fn slice_coordinates<S: Scalar>(b: &[S], y: &[S]) -> Vec<S> {
    let scale = S::max_abs(b);
    let k = b.iter().position(|x| !x.is_negligible(scale)).expect("nonzero covector");
    (0..y.len()).filter(|&j| j != k).map(|j| y[j].clone()).collect()
}

/// The cone point `e_μ / b(μ) = (1, μ) / b(μ)`.
pub fn psi<S: Scalar>(b: &AffineFunction<S>, mu: &[S]) -> Vec<S> {
    let value = b.eval(mu);
    let mut y = vec![S::one() / value.clone()];
    y.extend(mu.iter().map(|x| x.clone() / value.clone()));
    y
}

/// Linear map of the cone space induced by translating `Δ` by `t`: labels
/// transform by `L ↦ L(· − t)`.
pub fn translation_on_labels<S: Scalar>(t: &[S]) -> Matrix<S> {
    let n = t.len();
    let mut m = linalg::identity(n + 1);
    for j in 0..n {
        m[0][j + 1] = -t[j].clone();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::affine_equivalent;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn square(r: [i64; 4]) -> LabeledPolytope<Rational> {
        LabeledPolytope::from_halfspaces(
            vec![
                vec![q(1, r[0]), q(0, 1)],
                vec![q(0, 1), q(-1, r[1])],
                vec![q(-1, r[2]), q(0, 1)],
                vec![q(0, 1), q(1, r[3])],
            ],
            r.iter().map(|&x| q(1, x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cone_over_unit_square() {
        let c = cone_over(&square([1, 1, 1, 1]));
        let expected = vec![
            vec![q(1, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(-1, 1)],
            vec![q(1, 1), q(-1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(1, 1)],
        ];
        assert_eq!(c.labels(), &expected[..]);
        assert!(LabeledCone::new(expected).is_ok());
    }

    #[test]
    fn cone_over_interval() {
        let p = LabeledPolytope::from_halfspaces(vec![vec![q(1, 1)], vec![q(-1, 1)]], vec![q(1, 1), q(1, 1)]).unwrap();
        assert_eq!(cone_over(&p).labels(), &[vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]][..]);
    }

    #[test]
    fn non_strictly_convex_cone_rejected() {
        // A half-plane in ℝ².
        assert!(LabeledCone::new(vec![vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(0, 1)]]).is_err());
    }

    #[test]
    fn unit_square_chamber() {
        let omega = reeb_chamber(&square([1, 1, 1, 1])).unwrap();
        assert!(omega.contains(&[q(0, 1), q(0, 1)]));
        assert!(!omega.contains(&[q(1, 1), q(0, 1)]));
        assert!(omega.contains(&[q(1, 3), q(-1, 2)]));
        assert!(!omega.contains(&[q(1, 2), q(1, 2)]));
        let (lo, hi) = omega.bounding_box();
        assert_eq!((lo, hi), (vec![-1.0, -1.0], vec![1.0, 1.0]));
        let shifted = square([1, 1, 1, 1]).translate(&[q(5, 1), q(0, 1)]);
        assert_eq!(reeb_chamber(&shifted).unwrap_err(), Error::OriginNotInterior);
    }

    #[test]
    fn characteristic_at_one_is_identity() {
        let p = square([2, 3, 4, 5]);
        let c = characteristic_polytope(&p, &AffineFunction::one(2)).unwrap();
        assert_eq!(c.normals(), p.normals());
        assert_eq!(c.offsets(), p.offsets());
        assert!(affine_equivalent(&p, &c).unwrap().is_some());
    }

    #[test]
    fn characteristic_vertices_are_psi_images() {
        let p = square([7, 1, 7, 1]);
        let b = AffineFunction::new(q(1, 1), vec![q(1, 5), q(-1, 3)]);
        let c = characteristic_polytope(&p, &b).unwrap();
        let mut expected: Vec<Vec<Rational>> =
            p.vertices().iter().map(|v| slice_coordinates(&b.coefficients(), &psi(&b, v))).collect();
        let mut got = c.vertices().to_vec();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
        // A generic slice of the square's cone is not a square.
        assert!(affine_equivalent(&p, &c).unwrap().is_none());
        let outside = AffineFunction::new(q(1, 1), vec![q(1, 1), q(0, 1)]);
        assert_eq!(characteristic_polytope(&p, &outside).unwrap_err(), Error::ReebVectorOutsideChamber);
    }

    #[test]
    fn interval_slice_is_interval() {
        let p = LabeledPolytope::from_halfspaces(vec![vec![q(1, 1)], vec![q(-1, 1)]], vec![q(1, 1), q(1, 1)]).unwrap();
        let b = AffineFunction::new(q(1, 1), vec![q(1, 2)]);
        let c = characteristic_polytope(&p, &b).unwrap();
        let mut v = c.vertices().to_vec();
        v.sort();
        // μ / b(μ) at μ = ±1 with b(μ) = 1 + μ/2.
        assert_eq!(v, vec![vec![q(-2, 1)], vec![q(2, 3)]]);
    }

    #[test]
    fn translation_gives_equivalent_slices() {
        let p = square([2, 1, 3, 1]);
        let t = vec![q(3, 10), q(1, 10)];
        let moved = p.translate(&t);
        let m = translation_on_labels(&t);
        assert_eq!(
            linalg::mat_mul(&cone_over(&p).labels().to_vec(), &linalg::transpose(&m)),
            cone_over(&moved).labels()
        );
        // b on Δ corresponds to b(· − t) on Δ + t.
        let b = AffineFunction::new(q(1, 1), vec![q(1, 4), q(-1, 5)]);
        let moved_b = AffineFunction::new(b.constant.clone() - linalg::dot(&b.linear, &t), b.linear.clone());
        let c1 = characteristic_polytope(&p, &b).unwrap();
        let c2 = characteristic_polytope(&moved, &moved_b).unwrap();
        assert!(affine_equivalent(&c1, &c2).unwrap().is_some());
    }
}
