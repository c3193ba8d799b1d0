//! Rational moments `∫ μ^a / b^k` over a polytope and over its boundary.
//!
//! When `k` is the homogeneous exponent (`n + 1 + |a|` inside, `n + |a|` on
//! the boundary) every simplex of the triangulation contributes a closed form
//! in the vertex values of `b`; this is the evaluator for both pipelines and
//! is exact over rationals. Other exponents go through adaptive quadrature,
//! available in floating point only.

mod closed_form;
pub mod quadrature;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AffineFunction, LabeledPolytope};
use crate::linalg::{self, Matrix};
use crate::scalar::{Pipeline, Scalar};

use closed_form::{simplex_moments, vertex_values};

/// Relative distance to the chamber wall below which the floating pipeline
/// refuses to evaluate.
pub const WALL_PROXIMITY: f64 = 1e-9;

/// Default relative target of the quadrature path.
pub const QUADRATURE_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Interior,
    Boundary,
}

/// The integrand `μ_{a_1}⋯μ_{a_m} / b^power` (coordinate indices are 0-based,
/// `m ≤ 2`) over `Δ` with `dϖ` or over `∂Δ` with `dσ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSpec {
    pub numerator: Vec<usize>,
    pub power: u32,
    pub region: Region,
}

impl MomentSpec {
    pub fn interior(numerator: &[usize], power: u32) -> Self {
        Self { numerator: numerator.to_vec(), power, region: Region::Interior }
    }

    pub fn boundary(numerator: &[usize], power: u32) -> Self {
        Self { numerator: numerator.to_vec(), power, region: Region::Boundary }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.power == 0 {
            return Err(Error::InvalidInput("denominator power must be at least 1".into()));
        }
        if self.numerator.len() > 2 {
            return Err(Error::InvalidInput("numerator degree must be at most 2".into()));
        }
        if let Some(&i) = self.numerator.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidInput(format!("numerator index {i} out of range for dimension {n}")));
        }
        Ok(())
    }

    /// The exponent for which the closed form applies.
    fn homogeneous_power(&self, n: usize) -> u32 {
        let base = match self.region {
            Region::Interior => n + 1,
            Region::Boundary => n,
        };
        (base + self.numerator.len()) as u32
    }
}

/// All pulled-back moments at one Reeb vector.
///
/// `w[i][j] = ∫ μ_iμ_j / b^{n+1+|a|} dϖ` with `μ_0 = 1` marking the missing
/// factors (so `w[0][0] = ∫ 1/b^{n+1}`), `z[i] = 2∫_∂ μ_i / b^{n+|a|} dσ`, and
/// `zz[i][j]` the degree-two boundary moments, also doubled.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments<S> {
    pub w: Matrix<S>,
    pub z: Vec<S>,
    pub zz: Matrix<S>,
}

/// Vertex values of `b`, rejecting `b ≤ 0` anywhere on `Δ` and, in floating
/// point, values within [`WALL_PROXIMITY`] of the wall.
pub fn check_positive<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Vec<S>> {
    if b.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: b.dim() });
    }
    let values = vertex_values(b, p.vertices());
    let min = values.iter().cloned().fold(None, |acc: Option<S>, v| match acc {
        Some(m) if m <= v => Some(m),
        _ => Some(v),
    });
    let min = min.expect("polytopes have vertices");
    if !min.is_positive() {
        return Err(Error::ReebNotPositive);
    }
    if S::PIPELINE == Pipeline::Float {
        let scale = S::max_abs(&values);
        if min.to_f64() < WALL_PROXIMITY * scale {
            return Err(Error::ChamberBoundaryProximity { min_value: min.to_f64() });
        }
    }
    Ok(values)
}

fn accumulate<S: Scalar>(
    p: &LabeledPolytope<S>,
    values: &[S],
    simplices: &[crate::geometry::Simplex<S>],
    scale: &S,
    m0: &mut S,
    m1: &mut [S],
    m2: &mut Matrix<S>,
) {
    for s in simplices {
        let points: Vec<&[S]> = s.vertices.iter().map(|&v| p.vertices()[v].as_slice()).collect();
        let vals: Vec<S> = s.vertices.iter().map(|&v| values[v].clone()).collect();
        let sm = simplex_moments(&points, &s.measure, &vals);
        *m0 = m0.clone() + sm.m0 * scale.clone();
        for i in 0..m1.len() {
            m1[i] = m1[i].clone() + sm.m1[i].clone() * scale.clone();
            for j in 0..m1.len() {
                m2[i][j] = m2[i][j].clone() + sm.m2[i][j].clone() * scale.clone();
            }
        }
    }
}

fn bordered<S: Scalar>(m0: S, m1: Vec<S>, m2: Matrix<S>) -> Matrix<S> {
    let n = m1.len();
    let mut out = linalg::zeros(n + 1, n + 1);
    out[0][0] = m0;
    for i in 0..n {
        out[0][i + 1] = m1[i].clone();
        out[i + 1][0] = m1[i].clone();
        for j in 0..n {
            out[i + 1][j + 1] = m2[i][j].clone();
        }
    }
    out
}

/// Interior and boundary moments of `Δ` at `b` in one pass over the
/// triangulations.
pub fn moments<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Moments<S>> {
    let values = check_positive(p, b)?;
    let n = p.dim();
    let (mut w0, mut w1, mut w2) = (S::zero(), vec![S::zero(); n], linalg::zeros(n, n));
    accumulate(p, &values, p.simplices(), &S::one(), &mut w0, &mut w1, &mut w2);
    let (mut z0, mut z1, mut z2) = (S::zero(), vec![S::zero(); n], linalg::zeros(n, n));
    let two = S::from_int(2);
    for l in 0..p.num_facets() {
        accumulate(p, &values, p.facet_simplices(l), &two, &mut z0, &mut z1, &mut z2);
    }
    let zz = bordered(z0, z1, z2);
    Ok(Moments { w: bordered(w0, w1, w2), z: zz[0].clone(), zz })
}

/// `W_ij(b)`, the Gram matrix of the characteristic polytope at `b` pulled back to `Δ`.
pub fn w_matrix<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Matrix<S>> {
    Ok(moments(p, b)?.w)
}

/// `Z_i(b) = 2∫_∂Δ μ_i / b^{n+|a|} dσ` with `μ_0 = 1`.
pub fn z_vector<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Vec<S>> {
    Ok(moments(p, b)?.z)
}

/// `x_l = ∫_{F_l} 1/bⁿ dσ` for every facet.
pub fn facet_moments<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Vec<S>> {
    let values = check_positive(p, b)?;
    Ok((0..p.num_facets())
        .map(|l| {
            p.facet_simplices(l).iter().fold(S::zero(), |acc, s| {
                let points: Vec<&[S]> = s.vertices.iter().map(|&v| p.vertices()[v].as_slice()).collect();
                let vals: Vec<S> = s.vertices.iter().map(|&v| values[v].clone()).collect();
                acc + simplex_moments(&points, &s.measure, &vals).m0
            })
        })
        .collect())
}

/// A single moment. Homogeneous exponents use the closed form; anything else
/// is integrated numerically in floating point and rejected with
/// [`Error::UnsupportedExponent`] over rationals.
pub fn moment_integral<S: Scalar>(p: &LabeledPolytope<S>, spec: &MomentSpec, b: &AffineFunction<S>) -> Result<S> {
    spec.validate(p.dim())?;
    if spec.power == spec.homogeneous_power(p.dim()) {
        let m = moments(p, b)?;
        let table = match spec.region {
            Region::Interior => &m.w,
            Region::Boundary => &m.zz,
        };
        let value = match spec.numerator.as_slice() {
            [] => table[0][0].clone(),
            [i] => table[0][i + 1].clone(),
            [i, j] => table[i + 1][j + 1].clone(),
            _ => unreachable!("validated"),
        };
        return Ok(match spec.region {
            Region::Interior => value,
            Region::Boundary => value / S::from_int(2),
        });
    }
    match S::PIPELINE {
        Pipeline::Exact => Err(Error::UnsupportedExponent { power: spec.power as usize }),
        Pipeline::Float => {
            check_positive(p, b)?;
            let value = quadrature_moment(&p.to_f64(), spec, &b.to_f64(), QUADRATURE_TOL)?;
            Ok(S::from_f64_exact(value))
        }
    }
}

/// The quadrature path for any exponent, used directly for cross-checks.
pub fn quadrature_moment(
    p: &LabeledPolytope<f64>,
    spec: &MomentSpec,
    b: &AffineFunction<f64>,
    rel_tol: f64,
) -> Result<f64> {
    spec.validate(p.dim())?;
    check_positive(p, b)?;
    let power = spec.power as i32;
    let f = |x: &[f64]| {
        let num: f64 = spec.numerator.iter().map(|&i| x[i]).product();
        num / b.eval(x).powi(power)
    };
    integrate_over(p, spec.region, &f, rel_tol)
}

/// `∫_Δ f dϖ` or `∫_∂Δ f dσ` by adaptive quadrature.
pub fn integrate_over(
    p: &LabeledPolytope<f64>,
    region: Region,
    f: &dyn Fn(&[f64]) -> f64,
    rel_tol: f64,
) -> Result<f64> {
    let pieces: Vec<(Vec<Vec<f64>>, f64)> = match region {
        Region::Interior => p
            .simplices()
            .iter()
            .map(|s| (s.vertices.iter().map(|&v| p.vertices()[v].clone()).collect(), s.measure))
            .collect(),
        Region::Boundary => (0..p.num_facets())
            .flat_map(|l| p.facet_simplices(l).iter())
            .map(|s| (s.vertices.iter().map(|&v| p.vertices()[v].clone()).collect(), s.measure))
            .collect(),
    };
    quadrature::integrate(&pieces, f, rel_tol)
}

/// One edge of a polygon with its coefficients in `W₀₀` and `Z₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTerm<S> {
    pub facet: usize,
    pub endpoints: (usize, usize),
    pub alpha: S,
    pub beta: S,
}

/// `W₀₀(b) = Σ α(E)/(b(p_E) b(q_E))` and `Z₀(b) = Σ β(E)/(b(p_E) b(q_E))` for
/// every `b` with `b(0) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCoefficients<S> {
    pub edges: Vec<EdgeTerm<S>>,
}

impl<S: Scalar> EdgeCoefficients<S> {
    fn sum(&self, p: &LabeledPolytope<S>, b: &AffineFunction<S>, pick: impl Fn(&EdgeTerm<S>) -> S) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| {
            let bp = b.eval(&p.vertices()[e.endpoints.0]);
            let bq = b.eval(&p.vertices()[e.endpoints.1]);
            acc + pick(e) / (bp * bq)
        })
    }

    pub fn w00(&self, p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> S {
        self.sum(p, b, |e| e.alpha.clone())
    }

    pub fn z0(&self, p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> S {
        self.sum(p, b, |e| e.beta.clone())
    }
}

/// Edge coefficients of a polygon containing the origin: `α(E) = λ_E ρ_E / n`
/// and `β(E) = 2ρ_E` with `ρ_E` the `dσ`-length of `E`, from
/// `∫_E dσ/b² = ρ_E/(b(p_E) b(q_E))` and the divergence identity
/// `n b(0) W₀₀ = Σ λ_l x_l`.
pub fn edge_coefficients<S: Scalar>(p: &LabeledPolytope<S>) -> Result<EdgeCoefficients<S>> {
    if p.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, found: p.dim() });
    }
    if !p.contains_in_interior(&[S::zero(), S::zero()]) {
        return Err(Error::OriginNotInterior);
    }
    let n = S::from_int(2);
    let edges = (0..p.num_facets())
        .map(|l| {
            let rho = p.facet_measure(l);
            let ends = &p.facets()[l];
            EdgeTerm {
                facet: l,
                endpoints: (ends[0], ends[1]),
                alpha: p.offsets()[l].clone() * rho.clone() / n.clone(),
                beta: S::from_int(2) * rho,
            }
        })
        .collect();
    Ok(EdgeCoefficients { edges })
}
