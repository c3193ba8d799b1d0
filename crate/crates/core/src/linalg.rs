//! Small dense linear algebra over any [`Scalar`].
//!
//! Matrices are row-major `Vec<Vec<S>>`; sizes here never exceed a dozen rows.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

pub type Matrix<S> = Vec<Vec<S>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("condition estimate {0:.3e} exceeds the limit")]
    IllConditioned(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
}

pub fn zeros<S: Scalar>(rows: usize, cols: usize) -> Matrix<S> {
    vec![vec![S::zero(); cols]; rows]
}

pub fn identity<S: Scalar>(n: usize) -> Matrix<S> {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = S::one();
    }
    m
}

pub fn transpose<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec<S: Scalar>(m: &Matrix<S>, v: &[S]) -> Vec<S> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
    let bt = transpose(b);
    a.iter().map(|row| bt.iter().map(|col| dot(row, col)).collect()).collect()
}

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scaled<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

/// Row echelon reduction in place with partial pivoting on |entry|.
/// Returns the pivot columns.
fn row_reduce<S: Scalar>(m: &mut Matrix<S>, cols: usize, scale: f64) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .max_by(|&a, &b| {
                m[a][c].to_f64().abs().partial_cmp(&m[b][c].to_f64().abs()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        // Rationals: the float magnitude may underflow, so fall back to any nonzero entry.
        let pivot_row = if m[best][c].is_negligible(scale) {
            match (r..rows).find(|&i| !m[i][c].is_negligible(scale)) {
                Some(i) => i,
                None => continue,
            }
        } else {
            best
        };
        m.swap(r, pivot_row);
        let p = m[r][c].clone();
        for j in c..m[r].len() {
            m[r][j] = m[r][j].clone() / p.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..m[i].len() {
                    let delta = f.clone() * m[r][j].clone();
                    m[i][j] = m[i][j].clone() - delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn matrix_scale<S: Scalar>(m: &Matrix<S>) -> f64 {
    m.iter().map(|row| S::max_abs(row)).fold(0.0, f64::max)
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let scale = matrix_scale(m);
    let mut work = m.clone();
    let cols = work[0].len();
    row_reduce(&mut work, cols, scale).len()
}

pub fn determinant<S: Scalar>(m: &Matrix<S>) -> S {
    let n = m.len();
    let mut a = m.clone();
    let mut det = S::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return S::zero();
        };
        let p = (c..n)
            .filter(|&i| !a[i][c].is_zero())
            .max_by(|&x, &y| {
                a[x][c].to_f64().abs().partial_cmp(&a[y][c].to_f64().abs()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(p);
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det = det * piv.clone();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone() / piv.clone();
            for j in c..n {
                let delta = f.clone() * a[c][j].clone();
                a[i][j] = a[i][j].clone() - delta;
            }
        }
    }
    det
}

/// Solves a (possibly overdetermined) system `m x = rhs`.
///
/// Returns `None` unless the solution exists and is unique. Consistency of
/// the surplus equations is exact for rationals and tolerance-based for floats.
pub fn solve<S: Scalar>(m: &Matrix<S>, rhs: &[S]) -> Option<Vec<S>> {
    let unknowns = m.first()?.len();
    let scale = matrix_scale(m).max(S::max_abs(rhs));
    let mut aug: Matrix<S> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = row_reduce(&mut aug, unknowns, scale);
    if pivots.len() < unknowns {
        return None;
    }
    for row in aug.iter().skip(unknowns) {
        if !row[unknowns].is_negligible(scale) {
            return None;
        }
    }
    Some(aug.iter().take(unknowns).map(|row| row[unknowns].clone()).collect())
}

pub fn inverse<S: Scalar>(m: &Matrix<S>) -> Option<Matrix<S>> {
    let n = m.len();
    let scale = matrix_scale(m);
    let mut aug: Matrix<S> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    if row_reduce(&mut aug, n, scale).len() < n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn to_f64_matrix<S: Scalar>(m: &Matrix<S>) -> Matrix<f64> {
    m.iter().map(|row| row.iter().map(Scalar::to_f64).collect()).collect()
}

/// 2-norm condition number of a symmetric matrix from its eigenvalues.
pub fn symmetric_condition(m: &Matrix<f64>) -> f64 {
    let n = m.len();
    let dm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let eig = dm.symmetric_eigen();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e.abs());
        hi = hi.max(e.abs());
    }
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Cholesky solve with two rounds of iterative refinement.
pub fn spd_solve(m: &Matrix<f64>, rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.len();
    let dm = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let chol = dm.clone().cholesky().ok_or(LinalgError::NotPositiveDefinite)?;
    let b = DVector::from_column_slice(rhs);
    let mut x = chol.solve(&b);
    for _ in 0..2 {
        let r = &b - &dm * &x;
        x += chol.solve(&r);
    }
    Ok(x.iter().copied().collect())
}

/// Gram-system solve used for the extremal affine function.
///
/// Floats go through Cholesky, rationals through exact elimination. Either way
/// the condition estimate is computed in floating point and capped at `max_cond`.
pub fn solve_gram<S: Scalar>(m: &Matrix<S>, rhs: &[S], max_cond: f64) -> Result<(Vec<S>, f64), LinalgError> {
    let mf = to_f64_matrix(m);
    let cond = symmetric_condition(&mf);
    if !(cond <= max_cond) {
        return Err(LinalgError::IllConditioned(cond));
    }
    let x = match S::PIPELINE {
        crate::scalar::Pipeline::Float => {
            let rf: Vec<f64> = rhs.iter().map(Scalar::to_f64).collect();
            spd_solve(&mf, &rf)?.into_iter().map(S::from_f64_exact).collect()
        }
        crate::scalar::Pipeline::Exact => solve(m, rhs).ok_or(LinalgError::Singular)?,
    };
    Ok((x, cond))
}
