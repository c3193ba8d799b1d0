//! Exact polynomials over ℚ: arithmetic, Sturm sequences, real root isolation,
//! real algebraic numbers, and resultants of bivariate polynomials.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::linalg;
use crate::scalar::{rational_to_string, Rational, Scalar};

/// A univariate polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_int(x)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x − a`
    pub fn linear_root(a: &Rational) -> Self {
        Self::new(vec![-a.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + Scalar::to_f64(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_int(i as i64)).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let lead = d.lead();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    /// Monic greatest common divisor (zero only if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// The product of the distinct irreducible factors, monic.
    pub fn square_free(&self) -> Self {
        if self.degree().is_none_or(|d| d == 0) {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// The Sturm sequence `p, p', −rem(p, p'), …`.
    pub fn sturm(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rational::one()));
        }
        seq
    }

    /// Real roots, each isolated (for a square-free input the roots are
    /// exactly the distinct real roots).
    pub fn real_roots(&self) -> Vec<AlgebraicReal> {
        if self.degree().is_none_or(|d| d == 0) {
            return Vec::new();
        }
        let p = self.square_free();
        let sturm = p.sturm();
        let lead = p.lead();
        let bound = p.coeffs.iter().map(|c| (c / &lead).abs()).fold(Rational::zero(), |a, b| if b > a { b } else { a })
            + Rational::one();
        let mut out = Vec::new();
        isolate(&p, &sturm, -bound.clone(), bound, &mut out);
        out
    }
}

fn sign_changes(seq: &[UPoly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None;
    for p in seq {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            count += 1;
        }
        last = Some(pos);
    }
    count
}

/// Distinct roots of the head of `seq` in `(lo, hi]`.
fn count_roots(seq: &[UPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_changes(seq, lo) - sign_changes(seq, hi)
}

fn isolate(p: &UPoly, sturm: &[UPoly], lo: Rational, hi: Rational, out: &mut Vec<AlgebraicReal>) {
    match count_roots(sturm, &lo, &hi) {
        0 => {}
        1 => out.push(AlgebraicReal::from_interval(p.clone(), lo, hi)),
        _ => {
            let mid = (&lo + &hi) / Rational::from_int(2);
            isolate(p, sturm, lo, mid.clone(), out);
            isolate(p, sturm, mid, hi, out);
        }
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let c = rational_to_string(c);
            terms.push(match i {
                0 => c,
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

/// A real root of a square-free polynomial, located in `(lo, hi]` and the
/// only root there; `lo == hi` marks a rational root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicReal {
    poly: UPoly,
    lo: Rational,
    hi: Rational,
}

impl AlgebraicReal {
    /// Rational roots are detected exactly: with integer coefficients, a root
    /// `p/q` has `q ≤ |a_n|`, and an interval narrower than `1/a_n²` holds at
    /// most one such fraction, necessarily its simplest element.
    fn from_interval(poly: UPoly, lo: Rational, hi: Rational) -> Self {
        if poly.eval(&hi).is_zero() {
            return Self { poly, lo: hi.clone(), hi };
        }
        if poly.degree() == Some(1) {
            let root = -poly.coeff(0) / poly.coeff(1);
            return Self { poly, lo: root.clone(), hi: root };
        }
        let denominators =
            poly.coeffs.iter().fold(num_bigint::BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let lead = (poly.lead() * Rational::from_integer(denominators)).abs();
        let width = Rational::one() / (&lead * &lead * Rational::from_int(2));
        let mut root = Self { poly, lo, hi };
        root.refine(&width);
        if root.lo != root.hi {
            let candidate = simplest_between(&root.lo, &root.hi);
            if candidate > root.lo && root.poly.eval(&candidate).is_zero() {
                root.lo = candidate.clone();
                root.hi = candidate;
            }
        }
        root
    }

    pub fn rational(value: Rational) -> Self {
        Self { poly: UPoly::linear_root(&value), lo: value.clone(), hi: value }
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        (self.lo == self.hi).then_some(&self.lo)
    }

    /// Halves the isolating interval once.
    fn bisect(&mut self) {
        if self.lo == self.hi {
            return;
        }
        let mid = (&self.lo + &self.hi) / Rational::from_int(2);
        let at_mid = self.poly.eval(&mid);
        if at_mid.is_zero() {
            self.lo = mid.clone();
            self.hi = mid;
            return;
        }
        let at_hi = self.poly.eval(&self.hi);
        if at_mid.is_positive() == at_hi.is_positive() {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    /// Shrinks the interval below `width`.
    pub fn refine(&mut self, width: &Rational) {
        while &(&self.hi - &self.lo) > width {
            self.bisect();
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mut r = self.clone();
        let scale = Scalar::to_f64(&self.hi).abs().max(Scalar::to_f64(&self.lo).abs()).max(1.0);
        r.refine(&Scalar::from_f64_exact(scale * 1e-18));
        Scalar::to_f64(&((&r.lo + &r.hi) / Rational::from_int(2)))
    }

    /// A rational within `width` of the root.
    pub fn approximation(&self, width: &Rational) -> Rational {
        let mut r = self.clone();
        r.refine(width);
        (&r.lo + &r.hi) / Rational::from_int(2)
    }

    /// The exact sign of `q` at this root.
    pub fn sign_of(&self, q: &UPoly) -> Ordering {
        if q.is_zero() {
            return Ordering::Equal;
        }
        if let Some(x) = self.as_rational() {
            return q.eval(x).cmp(&Rational::zero());
        }
        let g = self.poly.gcd(q);
        if g.degree().is_some_and(|d| d > 0) && count_roots(&g.sturm(), &self.lo, &self.hi) > 0 {
            return Ordering::Equal;
        }
        let q_sturm = q.square_free().sturm();
        let mut r = self.clone();
        loop {
            let clear = q.degree() == Some(0) || (count_roots(&q_sturm, &r.lo, &r.hi) == 0 && !q.eval(&r.lo).is_zero());
            if clear {
                return q.eval(&r.hi).cmp(&Rational::zero());
            }
            r.bisect();
            if let Some(x) = r.as_rational() {
                return q.eval(x).cmp(&Rational::zero());
            }
        }
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, c: &Rational) -> Ordering {
        self.sign_of(&UPoly::linear_root(c))
    }
}

/// The rational with smallest denominator in `[lo, hi]`.
fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    if !lo.is_positive() {
        return Rational::zero();
    }
    let f = lo.floor();
    if &f == lo {
        return f;
    }
    let next = &f + Rational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(Rational::one() / (hi - &f)), &(Rational::one() / (lo - &f)));
    f + Rational::one() / inner
}

/// A polynomial in `(x, y)`: `coeffs[i][j]` multiplies `xⁱ yʲ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BPoly {
    coeffs: Vec<Vec<Rational>>,
}

impl BPoly {
    pub fn new(mut coeffs: Vec<Vec<Rational>>) -> Self {
        for row in &mut coeffs {
            while row.last().is_some_and(Zero::is_zero) {
                row.pop();
            }
        }
        while coeffs.last().is_some_and(Vec::is_empty) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// From `(i, j, c)` terms.
    pub fn from_terms(terms: &[(usize, usize, Rational)]) -> Self {
        let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coeffs = vec![vec![Rational::zero(); dy + 1]; dx + 1];
        for (i, j, c) in terms {
            coeffs[*i][*j] += c;
        }
        Self::new(coeffs)
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Zero::is_zero)
    }

    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        self.in_y().iter().rev().fold(Rational::zero(), |acc, c| acc * y + c.eval(x))
    }

    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                s += Scalar::to_f64(c) * x.powi(i as i32) * y.powi(j as i32);
            }
        }
        s
    }

    /// Exchanges the two variables.
    pub fn swap(&self) -> Self {
        let dx = self.coeffs.len();
        let dy = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        Self::new((0..dy).map(|j| (0..dx).map(|i| self.coeff(i, j)).collect()).collect())
    }

    /// Coefficients as polynomials in `x`, indexed by the power of `y`; trailing zero entries dropped.
    pub fn in_y(&self) -> Vec<UPoly> {
        let dy = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        let mut out: Vec<UPoly> =
            (0..dy).map(|j| UPoly::new((0..self.coeffs.len()).map(|i| self.coeff(i, j)).collect())).collect();
        while out.last().is_some_and(UPoly::is_zero) {
            out.pop();
        }
        out
    }

    pub fn partial_x(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|c| c * Rational::from_int(i as i64)).collect())
                .collect(),
        )
    }

    pub fn partial_y(&self) -> Self {
        self.swap().partial_x().swap()
    }
}

impl fmt::Display for BPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate().rev() {
            for (j, c) in row.iter().enumerate().rev() {
                if c.is_zero() {
                    continue;
                }
                let mut t = rational_to_string(c);
                for (v, e) in [("x", i), ("y", j)] {
                    match e {
                        0 => {}
                        1 => t.push_str(&format!("*{v}")),
                        _ => t.push_str(&format!("*{v}^{e}")),
                    }
                }
                terms.push(t);
            }
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&terms.join(" + "))
    }
}

/// `Res_y(p, q)` as a polynomial in `x`, by evaluating the Sylvester determinant
/// at enough integer points and interpolating.
pub fn sylvester_resultant(p: &BPoly, q: &BPoly) -> UPoly {
    let pc = p.in_y();
    let qc = q.in_y();
    if pc.is_empty() || qc.is_empty() {
        return UPoly::zero();
    }
    let (m, k) = (pc.len() - 1, qc.len() - 1);
    let bound = p.total_degree() * q.total_degree();
    let xs: Vec<Rational> = (0..=bound as i64).map(Rational::from_int).collect();
    let ys: Vec<Rational> = xs
        .iter()
        .map(|x| {
            let a: Vec<Rational> = pc.iter().map(|c| c.eval(x)).collect();
            let b: Vec<Rational> = qc.iter().map(|c| c.eval(x)).collect();
            let size = m + k;
            if size == 0 {
                return Rational::one();
            }
            let mut s = vec![vec![Rational::zero(); size]; size];
            for r in 0..k {
                for (j, c) in a.iter().rev().enumerate() {
                    s[r][r + j] = c.clone();
                }
            }
            for r in 0..m {
                for (j, c) in b.iter().rev().enumerate() {
                    s[k + r][r + j] = c.clone();
                }
            }
            linalg::determinant(&s)
        })
        .collect();
    interpolate(&xs, &ys)
}

/// Newton interpolation through `(xs[i], ys[i])`.
pub fn interpolate(xs: &[Rational], ys: &[Rational]) -> UPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    let mut result = UPoly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        result = result.mul(&UPoly::linear_root(&xs[i])).add(&UPoly::constant(dd[i].clone()));
    }
    result
}
