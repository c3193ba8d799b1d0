//! The extremal affine function `ζ` and the torus-restricted Futaki covector,
//! for a labeled polytope and along its Reeb family.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{AffineFunction, LabeledPolytope};
use crate::linalg::{self, LinalgError, Matrix};
use crate::moments::{self, Region, QUADRATURE_TOL};
use crate::scalar::{Pipeline, Scalar};

/// Condition estimate beyond which `W ζ = Z` is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative threshold on `‖ζ_lin‖∞ / max(1, |ζ₀|)` in the floating pipeline.
pub const CONSTANCY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct FutakiData<S> {
    pub w: Matrix<S>,
    pub z: Vec<S>,
    pub zeta: AffineFunction<S>,
    /// `𝓕_i = W₀₀ Z_i − W_{i0} Z₀`, the value of the Futaki functional on the
    /// mean-zero affine function `f_{e_i}`.
    pub futaki: Vec<S>,
    /// `max |W ζ − Z|`.
    pub residual: f64,
}

impl<S: Scalar> FutakiData<S> {
    /// Exact zero over rationals; `‖ζ_lin‖∞ ≤ 1e-8 · max(1, |ζ₀|)` in floating point.
    pub fn zeta_is_constant(&self) -> bool {
        match S::PIPELINE {
            Pipeline::Exact => self.zeta.linear.iter().all(|x| x.is_zero()),
            Pipeline::Float => {
                S::max_abs(&self.zeta.linear) <= CONSTANCY_TOL * self.zeta.constant.to_f64().abs().max(1.0)
            }
        }
    }

    /// Exact zero over rationals; otherwise small against the two products it is a difference of.
    pub fn futaki_vanishes(&self) -> bool {
        match S::PIPELINE {
            Pipeline::Exact => self.futaki.iter().all(|x| x.is_zero()),
            Pipeline::Float => {
                let w00 = self.w[0][0].to_f64().abs();
                let z0 = self.z[0].to_f64().abs();
                (0..self.futaki.len()).all(|i| {
                    let scale = (w00 * self.z[i + 1].to_f64().abs()).max(self.w[i + 1][0].to_f64().abs() * z0);
                    self.futaki[i].to_f64().abs() <= CONSTANCY_TOL * scale.max(w00 * z0)
                })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let row = |v: &[S]| Value::Array(v.iter().map(Scalar::to_json).collect());
        json!({
            "zeta": row(&self.zeta.coefficients()),
            "futaki": row(&self.futaki),
            "W": Value::Array(self.w.iter().map(|r| row(r)).collect()),
            "Z": row(&self.z),
            "residual": self.residual,
            "zeta_constant": self.zeta_is_constant(),
            "futaki_vanishes": self.futaki_vanishes(),
        })
    }
}

fn from_moments<S: Scalar>(w: Matrix<S>, z: Vec<S>) -> Result<FutakiData<S>> {
    let (coeffs, _cond) = linalg::solve_gram(&w, &z, MAX_CONDITION).map_err(|e| match e {
        LinalgError::IllConditioned(condition) => Error::IllConditioned { condition },
        other => other.into(),
    })?;
    let wz = linalg::mat_vec(&w, &coeffs);
    let residual = wz.iter().zip(&z).map(|(a, b)| (a.clone() - b.clone()).to_f64().abs()).fold(0.0, f64::max);
    let n = z.len() - 1;
    let futaki = (1..=n).map(|i| w[0][0].clone() * z[i].clone() - w[i][0].clone() * z[0].clone()).collect();
    Ok(FutakiData { zeta: AffineFunction::from_coefficients(&coeffs), w, z, futaki, residual })
}

/// `ζ` of `(Δ_b, u_b)` computed from pulled-back moments on `Δ`.
pub fn zeta_on_family<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<FutakiData<S>> {
    let m = moments::moments(p, b).map_err(|e| match e {
        Error::ReebNotPositive => Error::ReebVectorOutsideChamber,
        other => other,
    })?;
    from_moments(m.w, m.z)
}

/// `ζ` of the polytope itself, the solution of `Σ_j W_ij ζ_j = Z_i` at `b = 𝟏`.
pub fn extremal_affine<S: Scalar>(p: &LabeledPolytope<S>) -> Result<FutakiData<S>> {
    zeta_on_family(p, &AffineFunction::one(p.dim()))
}

/// The data at `r b` from the data at `b`: `ζ₀ ↦ rζ₀`, `ζ_i ↦ r²ζ_i`, and every
/// moment rescaled by its homogeneity.
pub fn zeta_rescaled<S: Scalar>(data: &FutakiData<S>, r: &S) -> Result<FutakiData<S>> {
    if !r.is_positive() {
        return Err(Error::NonPositiveScale);
    }
    let n = data.z.len() - 1;
    let inv = S::one() / r.clone();
    let pow = |k: usize| (0..k).fold(S::one(), |acc, _| acc * inv.clone());
    let deg = |i: usize| usize::from(i > 0);
    let w = (0..=n).map(|i| (0..=n).map(|j| data.w[i][j].clone() * pow(n + 1 + deg(i) + deg(j))).collect()).collect();
    let z = (0..=n).map(|i| data.z[i].clone() * pow(n + deg(i))).collect();
    let r2 = r.clone() * r.clone();
    let zeta = AffineFunction::new(data.zeta.constant.clone() * r.clone(), linalg::scaled(&data.zeta.linear, &r2));
    let futaki = data.futaki.iter().map(|x| x.clone() * pow(2 * n + 2)).collect();
    Ok(FutakiData { w, z, zeta, futaki, residual: data.residual })
}

/// `𝓛(f) = ∫_∂Δ f dσ − ½ ∫_Δ f ζ dϖ`, by quadrature, with `ζ` the extremal
/// affine function of the polytope.
pub fn donaldson_functional<S: Scalar>(p: &LabeledPolytope<S>, f: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
    let zeta = extremal_affine(p)?.zeta.to_f64();
    let fp = p.to_f64();
    let boundary = moments::integrate_over(&fp, Region::Boundary, f, QUADRATURE_TOL)?;
    let interior = moments::integrate_over(&fp, Region::Interior, &|x: &[f64]| f(x) * zeta.eval(x), QUADRATURE_TOL)?;
    Ok(boundary - 0.5 * interior)
}
