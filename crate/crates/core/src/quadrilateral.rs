//! Quadrilaterals: reduction to the model square and the Wang–Ziller family.
//!
//! The model cone `C_o` has normals `δ₁ = (1, 1, 0)`, `δ₂ = (1, 0, −1)`,
//! `δ₃ = (1, −1, 0)`, `δ₄ = (1, 0, 1)` in the basis `(𝟏, μ₁, μ₂)`; slicing it at
//! `𝟏` gives `[−1, 1]²` with labels `δ_l / r_l`. Any four cone labels in
//! cyclic order satisfy `L₄ = c₁L₁ + c₂L₂ + c₃L₃`, and `δ₄ = δ₁ − δ₂ + δ₃`, so the
//! linear map with `T L_i = δ_i / r_i` exists exactly when `c₁, −c₂, c₃ > 0`,
//! with `r_i = r₄ |c_i|`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::cone::{cone_over, is_good_quadcone, lattice_from_labels, primitive_in, LabeledCone, Lattice};
use crate::error::{Error, Result};
use crate::geometry::{AffineFunction, LabeledPolytope};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// `δ_l` in the basis `(𝟏, μ₁, μ₂)`.
pub const MODEL_NORMALS: [[i64; 3]; 4] = [[1, 1, 0], [1, 0, -1], [1, -1, 0], [1, 0, 1]];

/// Vertices of the model square: `p₁ ∈ E₁∩E₄`, `p₂ ∈ E₁∩E₂`, `p₃ ∈ E₂∩E₃`, `p₄ ∈ E₃∩E₄`.
pub const MODEL_VERTICES: [[i64; 2]; 4] = [[-1, -1], [-1, 1], [1, 1], [1, -1]];

/// `[−1, 1]²` labeled by `L_l = δ_l(1, μ) / r_l`.
pub fn model_square<S: Scalar>(r: &[S; 4]) -> Result<LabeledPolytope<S>> {
    if r.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidInput("square weights must be positive".into()));
    }
    let normals = (0..4)
        .map(|l| vec![S::from_int(MODEL_NORMALS[l][1]) / r[l].clone(), S::from_int(MODEL_NORMALS[l][2]) / r[l].clone()])
        .collect();
    let offsets = r.iter().map(|x| S::one() / x.clone()).collect();
    LabeledPolytope::from_halfspaces(normals, offsets)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareNormalForm<S> {
    /// Linear map of the cone space (acting on labels and Reeb covectors)
    /// with `map · L_{order[l]} = δ_l / r_l`.
    pub map: Matrix<S>,
    pub r: [S; 4],
    /// Input facet sent to model facet `l`.
    pub order: [usize; 4],
    /// Input vertex sent to model vertex `p_l`.
    pub vertices: [usize; 4],
    /// The image of `𝟏`, normalized to constant term 1: the Reeb vector of the
    /// model at which the characteristic polytope is equivalent to the input.
    pub reeb: AffineFunction<S>,
}

impl<S: Scalar> SquareNormalForm<S> {
    /// The model Reeb vector corresponding to `b` on the input.
    pub fn transform_reeb(&self, b: &AffineFunction<S>) -> AffineFunction<S> {
        AffineFunction::from_coefficients(&linalg::mat_vec(&self.map, &b.coefficients()))
    }

    pub fn to_json(&self) -> Value {
        let row = |v: &[S]| Value::Array(v.iter().map(Scalar::to_json).collect());
        json!({
            "r": row(&self.r),
            "map": Value::Array(self.map.iter().map(|r| row(r)).collect()),
            "facet_order": self.order,
            "vertex_order": self.vertices,
            "reeb": row(&self.reeb.coefficients()),
        })
    }
}

fn cyclic_order<S: Scalar>(p: &LabeledPolytope<S>) -> [usize; 4] {
    let adjacent = |a: usize, b: usize| p.vertex_facets().iter().any(|vf| vf.contains(&a) && vf.contains(&b));
    let mut order = [0usize; 4];
    for k in 1..4 {
        order[k] = (0..4)
            .find(|&j| !order[..k].contains(&j) && adjacent(order[k - 1], j))
            .expect("facets of a quadrilateral form a cycle");
    }
    order
}

fn candidate<S: Scalar>(labels: &[Vec<S>], one: &[S], order: [usize; 4]) -> Result<Option<(Matrix<S>, [S; 4])>> {
    let basis: Matrix<S> = linalg::transpose(&order[..3].iter().map(|&i| labels[i].clone()).collect());
    let Some(c) = linalg::solve(&basis, &labels[order[3]]) else {
        return Err(Error::DegenerateConfiguration("three facet normals are linearly dependent".into()));
    };
    let signs = [S::one(), -S::one(), S::one()];
    if !(0..3).all(|i| (c[i].clone() * signs[i].clone()).is_positive()) {
        return Ok(None);
    }
    // With r₄ = 1: r_i = |c_i|; then rescale so that T(𝟏) has constant term 1.
    let mut r: [S; 4] = [c[0].abs(), c[1].abs(), c[2].abs(), S::one()];
    let images: Matrix<S> = linalg::transpose(
        &(0..3).map(|i| MODEL_NORMALS[i].iter().map(|&x| S::from_int(x) / r[i].clone()).collect()).collect(),
    );
    let inverse = linalg::inverse(&basis).expect("solve succeeded");
    let mut map = linalg::mat_mul(&images, &inverse);
    let tau = linalg::mat_vec(&map, one)[0].clone();
    if !tau.is_positive() {
        return Ok(None);
    }
    map = map.iter().map(|row| linalg::scaled(row, &(S::one() / tau.clone()))).collect();
    for x in r.iter_mut() {
        *x = x.clone() * tau.clone();
    }
    Ok(Some((map, r)))
}

/// The square normal form. Over the eight dihedral relabelings, the one with
/// the lexicographically smallest `r` is reported.
pub fn normalize_quadrilateral<S: Scalar>(p: &LabeledPolytope<S>) -> Result<SquareNormalForm<S>> {
    if p.dim() != 2 || p.num_facets() != 4 {
        return Err(Error::NotAQuadrilateral);
    }
    let labels: Vec<Vec<S>> = cone_over(p).labels().to_vec();
    let one = AffineFunction::<S>::one(2).coefficients();
    let base = cyclic_order(p);
    let mut best: Option<(Matrix<S>, [S; 4], [usize; 4])> = None;
    for reverse in [false, true] {
        for shift in 0..4 {
            let order: [usize; 4] = std::array::from_fn(|k| {
                let idx = if reverse { (4 + shift - k) % 4 } else { (shift + k) % 4 };
                base[idx]
            });
            let Some((map, r)) = candidate(&labels, &one, order)? else { continue };
            let better = match &best {
                None => true,
                Some((_, br, _)) => r.iter().zip(br).find(|(a, b)| a != b).is_some_and(|(a, b)| a < b),
            };
            if better {
                best = Some((map, r, order));
            }
        }
    }
    let Some((map, r, order)) = best else {
        return Err(Error::DegenerateConfiguration("no facet ordering maps onto the model cone".into()));
    };
    let corner = |a: usize, b: usize| {
        (0..p.vertices().len())
            .find(|&v| p.vertex_facets()[v].contains(&order[a]) && p.vertex_facets()[v].contains(&order[b]))
            .expect("adjacent facets meet in a vertex")
    };
    let vertices = [corner(0, 3), corner(0, 1), corner(1, 2), corner(2, 3)];
    let reeb = AffineFunction::from_coefficients(&linalg::mat_vec(&map, &one));
    Ok(SquareNormalForm { map, r, order, vertices, reeb })
}

/// Integer coefficients `c_l` with primitive normals `û_l ∝ c_l δ_l`, for a
/// cone whose labels are positive multiples of the model normals.
pub fn primitive_square_coefficients(cone: &LabeledCone<Rational>, lattice: &Lattice) -> Result<[u64; 4]> {
    if cone.labels().len() != 4 || cone.dim() != 3 {
        return Err(Error::NotAQuadrilateral);
    }
    let mut t = Vec::with_capacity(4);
    for (l, label) in cone.labels().iter().enumerate() {
        let coords: Vec<Rational> = primitive_in(lattice, label).into_iter().map(Rational::from_integer).collect();
        let u = linalg::mat_vec(lattice.basis(), &coords);
        let scale = u[0].clone();
        let parallel =
            scale.is_positive() && (0..3).all(|j| u[j] == scale.clone() * Rational::from_int(MODEL_NORMALS[l][j]));
        if !parallel {
            return Err(Error::DegenerateConfiguration(format!("label {l} is not a positive multiple of δ_{}", l + 1)));
        }
        t.push(scale);
    }
    let den = t.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = t.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let out: Vec<u64> = ints.iter().map(|x| (x / &g).to_u64().expect("small coefficients")).collect();
    Ok([out[0], out[1], out[2], out[3]])
}

#[derive(Clone, Debug)]
pub struct WangZiller {
    pub p: u64,
    pub q: u64,
    /// The square with `r = (p, q, p, q)`.
    pub polytope: LabeledPolytope<Rational>,
    /// The lattice spanned by the labels.
    pub lattice: Lattice,
    pub good: bool,
    /// `a = √(1 − 4q/(p − q))` when `p > 5q`.
    pub a: Option<f64>,
    /// Expected critical points `(b₁, b₂)`: `(0, −a), (0, 0), (0, a)`, or just the origin.
    pub expected: Vec<[f64; 2]>,
}

pub fn wang_ziller(p: u64, q: u64) -> Result<WangZiller> {
    if p == 0 || q == 0 || p.gcd(&q) != 1 {
        return Err(Error::NotCoprime { p, q });
    }
    let r = [p, q, p, q].map(|x| Rational::from_integer(BigInt::from(x)));
    let polytope = model_square(&r)?;
    let lattice = lattice_from_labels(&cone_over(&polytope))?.expect("rational labels span");
    // Relation p(L₁ + L₃) = q(L₂ + L₄): coefficients proportional to 1/p, 1/q.
    let good = is_good_quadcone([q, p, q, p]);
    let a = (p > 5 * q).then(|| (1.0 - 4.0 * q as f64 / (p - q) as f64).sqrt());
    let expected = match a {
        Some(a) => vec![[0.0, -a], [0.0, 0.0], [0.0, a]],
        None => vec![[0.0, 0.0]],
    };
    Ok(WangZiller { p, q, polytope, lattice, good, a, expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::characteristic_polytope;
    use crate::cone::is_good;
    use crate::geometry::affine_equivalent;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn rs(v: [i64; 4]) -> [Rational; 4] {
        v.map(Rational::from_int)
    }

    #[test]
    fn model_square_is_a_fixed_point() {
        let p = model_square(&rs([2, 3, 4, 5])).unwrap();
        let nf = normalize_quadrilateral(&p).unwrap();
        assert_eq!(nf.r, rs([2, 3, 4, 5]));
        assert_eq!(nf.map, linalg::identity(3));
        assert_eq!(nf.reeb, AffineFunction::one(2));
        assert_eq!(nf.order, [0, 1, 2, 3]);
    }

    #[test]
    fn orbit_representative() {
        let p = model_square(&rs([4, 3, 2, 5])).unwrap();
        assert_eq!(normalize_quadrilateral(&p).unwrap().r, rs([2, 3, 4, 5]));
    }

    #[test]
    fn translated_square() {
        let p = model_square(&rs([2, 3, 4, 5])).unwrap().translate(&[q(3, 10), q(1, 10)]);
        let nf = normalize_quadrilateral(&p).unwrap();
        assert_eq!(nf.r, rs([2, 3, 4, 5]));
        assert_ne!(nf.map, linalg::identity(3));
        assert_eq!(nf.reeb, AffineFunction::one(2));
    }

    #[test]
    fn trapezoid_normal_form_is_equivalent_and_idempotent() {
        let trap = LabeledPolytope::from_halfspaces(
            vec![vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(-1, 2)], vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(-1, 2)]],
            vec![q(1, 1), q(1, 1), q(1, 1), q(1, 1)],
        )
        .unwrap();
        let nf = normalize_quadrilateral(&trap).unwrap();
        assert!(nf.r.iter().all(|x| x.is_positive()));
        let model = model_square(&nf.r).unwrap();
        let slice = characteristic_polytope(&model, &nf.reeb).unwrap();
        assert!(affine_equivalent(&slice, &trap).unwrap().is_some());
        for (l, &i) in nf.order.iter().enumerate() {
            let image = linalg::mat_vec(&nf.map, &trap.label(i).coefficients());
            let expected: Vec<Rational> =
                MODEL_NORMALS[l].iter().map(|&x| Rational::from_int(x) / nf.r[l].clone()).collect();
            assert_eq!(image, expected);
        }
        let again = normalize_quadrilateral(&model).unwrap();
        assert_eq!(again.r, nf.r);
        assert_eq!(again.map, linalg::identity(3));
    }

    #[test]
    fn rejects_non_quadrilaterals() {
        let tri = LabeledPolytope::from_halfspaces(
            vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)], vec![q(-1, 1), q(-1, 1)]],
            vec![q(1, 1), q(1, 1), q(1, 1)],
        )
        .unwrap();
        assert_eq!(normalize_quadrilateral(&tri).unwrap_err(), Error::NotAQuadrilateral);
    }

    #[test]
    fn wang_ziller_family() {
        let wz = wang_ziller(7, 1).unwrap();
        assert!(wz.good);
        assert!((wz.a.unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(wz.expected.len(), 3);
        assert!(is_good(&cone_over(&wz.polytope), &wz.lattice).unwrap());
        let wz = wang_ziller(3, 1).unwrap();
        assert!(wz.good && wz.a.is_none() && wz.expected.len() == 1);
        assert_eq!(wang_ziller(4, 2).unwrap_err(), Error::NotCoprime { p: 4, q: 2 });
        let c = primitive_square_coefficients(
            &cone_over(&wang_ziller(11, 2).unwrap().polytope),
            &wang_ziller(11, 2).unwrap().lattice,
        )
        .unwrap();
        assert_eq!(c, [2, 11, 2, 11]);
    }
}
