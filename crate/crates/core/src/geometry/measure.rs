use crate::scalar::Scalar;

/// Affine chart of the hyperplane `{L_l = 0}` and the density of `dσ`.
///
/// With `k` the coordinate where `|u_k|` is largest, the chart is
/// `x ↦ o + Σ_{j≠k} x_j w_j` with `o = −(λ/u_k) e_k` and
/// `w_j = e_j − (u_j/u_k) e_k`, all rational. In these coordinates
/// `dσ = density · dx` with `density = 1/|u_k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct FacetChart<S> {
    pub pivot: usize,
    pub origin: Vec<S>,
    pub basis: Vec<Vec<S>>,
    pub density: S,
}

impl<S: Scalar> FacetChart<S> {
    pub fn new(normal: &[S], offset: &S) -> Self {
        let n = normal.len();
        let mut pivot = 0;
        for k in 0..n {
            if normal[k].to_f64().abs() > normal[pivot].to_f64().abs() || normal[pivot].is_zero() {
                pivot = k;
            }
        }
        let uk = normal[pivot].clone();
        let mut origin = vec![S::zero(); n];
        origin[pivot] = -offset.clone() / uk.clone();
        let basis = (0..n)
            .filter(|&j| j != pivot)
            .map(|j| {
                let mut w = vec![S::zero(); n];
                w[j] = S::one();
                w[pivot] = -normal[j].clone() / uk.clone();
                w
            })
            .collect();
        Self { pivot, origin, basis, density: S::one() / uk.abs() }
    }

    /// Chart coordinates of a point on the hyperplane.
    pub fn to_chart(&self, point: &[S]) -> Vec<S> {
        (0..point.len()).filter(|&j| j != self.pivot).map(|j| point[j].clone()).collect()
    }

    pub fn from_chart(&self, x: &[S]) -> Vec<S> {
        let mut p = self.origin.clone();
        for (xj, w) in x.iter().zip(&self.basis) {
            for (pi, wi) in p.iter_mut().zip(w) {
                *pi = pi.clone() + xj.clone() * wi.clone();
            }
        }
        p
    }
}
