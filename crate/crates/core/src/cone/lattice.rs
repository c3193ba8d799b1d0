use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LabeledCone;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// A full-rank lattice `Λ ⊂ ℝ^{n+1}` generated by the columns of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    basis: Matrix<Rational>,
    inverse: Matrix<Rational>,
}

impl Lattice {
    pub fn new(basis: Matrix<Rational>) -> Result<Self> {
        let inverse = linalg::inverse(&basis).ok_or_else(|| Error::InvalidInput("lattice basis is singular".into()))?;
        Ok(Self { basis, inverse })
    }

    pub fn basis(&self) -> &Matrix<Rational> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coordinates(&self, v: &[Rational]) -> Vec<Rational> {
        linalg::mat_vec(&self.inverse, v)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).iter().all(|x| x.is_integer())
    }
}

/// Lattice coordinates of the primitive vector on the ray through `v`.
pub fn primitive_in(lattice: &Lattice, v: &[Rational]) -> Vec<BigInt> {
    let coords = lattice.coordinates(v);
    let denom = coords.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = coords.iter().map(|x| (x * Rational::from_integer(denom.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter().map(|x| x / &content).collect()
}

/// Echelon basis of the ℤ-row-span of an integer matrix.
fn integer_row_basis(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        loop {
            let nonzero: Vec<usize> = (r..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let pivot = *nonzero.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            m.swap(r, pivot);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].div_floor(&m[r][c]);
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                r += 1;
                break;
            }
        }
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// The ℤ-span of the labels, if they are rational and span `ℝ^{n+1}`.
///
/// Rank-deficient labels give `Ok(None)`; floating labels that cannot be
/// certified rational give `IrrationalLabels`.
pub fn lattice_from_labels<S: Scalar>(cone: &LabeledCone<S>) -> Result<Option<Lattice>> {
    let labels: Vec<Vec<Rational>> = cone
        .labels()
        .iter()
        .map(|l| l.iter().map(Scalar::as_rational).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::IrrationalLabels)?;
    let denom = labels.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scale = Rational::from_integer(denom.clone());
    let ints: Vec<Vec<BigInt>> = labels.iter().map(|l| l.iter().map(|x| (x * &scale).to_integer()).collect()).collect();
    let rows = integer_row_basis(ints);
    if rows.len() < cone.dim() {
        return Ok(None);
    }
    let basis_rows: Matrix<Rational> =
        rows.iter().map(|row| row.iter().map(|x| Rational::new(x.clone(), denom.clone())).collect()).collect();
    Lattice::new(linalg::transpose(&basis_rows)).map(Some)
}

/// Invariant factors (nonzero diagonal of the Smith normal form), ascending by divisibility.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return factors;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let delta = &f * &a[t][j];
                    a[i][j] -= delta;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let delta = &f * &a[i][t];
                    a[i][j] -= delta;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            // The pivot must divide the remaining block; otherwise fold a row in.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => {
                    factors.push(a[t][t].abs());
                    break;
                }
            }
        }
    }
    factors
}

/// Definition of goodness: for every face `F_I` of the cone, including the
/// apex, `span_ℤ{û_i : i ∈ I} = Λ ∩ span_ℝ{û_i : i ∈ I}`. Checked by requiring
/// every invariant factor of the matrix of primitive normals to be 1.
pub fn is_good<S: Scalar>(cone: &LabeledCone<S>, lattice: &Lattice) -> Result<bool> {
    if lattice.dim() != cone.dim() {
        return Err(Error::DimensionMismatch { expected: cone.dim(), found: lattice.dim() });
    }
    let mut primitive = Vec::with_capacity(cone.labels().len());
    for (i, l) in cone.labels().iter().enumerate() {
        let exact: Option<Vec<Rational>> = l.iter().map(Scalar::as_rational).collect();
        let exact = exact.ok_or(Error::NormalNotInLatticeDirection { facet: i })?;
        primitive.push(primitive_in(lattice, &exact));
    }
    let slice = cone.slice(&cone.interior_covector())?;
    let mut faces = slice.proper_faces();
    faces.push((0..cone.labels().len()).collect());
    Ok(faces.iter().all(|face| {
        let m: Vec<Vec<BigInt>> = face.iter().map(|&i| primitive[i].clone()).collect();
        smith_normal_form(&m).iter().all(|f| f.is_one())
    }))
}

/// Goodness of the square cone with normals `c_i δ_i`: the four lcm's of
/// adjacent pairs coincide.
pub fn is_good_quadcone(c: [u64; 4]) -> bool {
    let l12 = c[0].lcm(&c[1]);
    l12 == c[0].lcm(&c[3]) && l12 == c[2].lcm(&c[1]) && l12 == c[2].lcm(&c[3])
}
