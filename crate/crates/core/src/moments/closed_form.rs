use crate::geometry::AffineFunction;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Moments of a `d`-simplex against the homogeneous exponents
/// `∫1/b^{d+1}`, `∫μ_i/b^{d+2}`, `∫μ_iμ_j/b^{d+3}`.
#[derive(Clone, Debug)]
pub(crate) struct SimplexMoments<S> {
    pub m0: S,
    pub m1: Vec<S>,
    pub m2: Matrix<S>,
}

/// With `ℓ_v = b(ν_v) > 0` and `s = Σ ν_v/ℓ_v`:
///
/// ```text
/// ∫ 1/b^{d+1}       = m / Πℓ
/// ∫ μ_i/b^{d+2}     = m / ((d+1) Πℓ) · s_i
/// ∫ μ_iμ_j/b^{d+3}  = m / ((d+1)(d+2) Πℓ) · (s_i s_j + Σ ν_vi ν_vj / ℓ_v²)
/// ```
///
/// where `m` is the measure and `d + 1` the number of vertices.
pub(crate) fn simplex_moments<S: Scalar>(points: &[&[S]], measure: &S, values: &[S]) -> SimplexMoments<S> {
    let n = points[0].len();
    let d = points.len() - 1;
    let prod = values.iter().fold(S::one(), |acc, l| acc * l.clone());
    let base = measure.clone() / prod;
    let inv: Vec<S> = values.iter().map(|l| S::one() / l.clone()).collect();
    let mut s = vec![S::zero(); n];
    let mut sq = vec![vec![S::zero(); n]; n];
    for (p, w) in points.iter().zip(&inv) {
        let w2 = w.clone() * w.clone();
        for i in 0..n {
            s[i] = s[i].clone() + p[i].clone() * w.clone();
            for j in i..n {
                sq[i][j] = sq[i][j].clone() + p[i].clone() * p[j].clone() * w2.clone();
            }
        }
    }
    let c1 = base.clone() / S::from_int(d as i64 + 1);
    let c2 = c1.clone() / S::from_int(d as i64 + 2);
    let m1 = s.iter().map(|x| c1.clone() * x.clone()).collect();
    let mut m2 = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = c2.clone() * (s[i].clone() * s[j].clone() + sq[i][j].clone());
            m2[j][i] = v.clone();
            m2[i][j] = v;
        }
    }
    SimplexMoments { m0: base, m1, m2 }
}

pub(crate) fn vertex_values<S: Scalar>(b: &AffineFunction<S>, vertices: &[Vec<S>]) -> Vec<S> {
    vertices.iter().map(|v| b.eval(v)).collect()
}
