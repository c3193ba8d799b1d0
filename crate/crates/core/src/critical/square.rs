//! The critical-point system of the model square `[−1, 1]²`.
//!
//! Facets `μ₁ = −1, μ₂ = 1, μ₁ = 1, μ₂ = −1` carry labels of weights
//! `r₁, …, r₄`; the Reeb vector `b = 1 + b₁μ₁ + b₂μ₂` is written in
//! `a₁ = b₁ − b₂`, `a₂ = b₁ + b₂`, so the chamber is the open square
//! `|a_i| < 1`. With `N = b(p₁)⋯` the common denominator,
//! `∂_{a₁} log F = P / ((1 − a₁²) N)` and `∂_{a₂} log F = Q / ((1 − a₂²) N)`.

use std::cmp::Ordering;

use num_traits::Signed;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::{AlgebraicReal, BPoly, UPoly};
use crate::scalar::{rational_to_string, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct SquareSystem {
    pub r: [Rational; 4],
    /// `r₁ + r₃ − r₂ − r₄`
    pub k: Rational,
    /// `r₁ + r₂ − r₃ − r₄`
    pub a: Rational,
    /// `r₁ − r₂ − r₃ + r₄`
    pub b: Rational,
    /// `r₁ + r₂ + r₃ + r₄`
    pub s: Rational,
    /// `−K a₁²a₂ − A a₁² + 2B a₁a₂ + 2S a₁ + 3K a₂ + 3A`
    pub p: BPoly,
    /// `−K a₁a₂² − B a₂² + 2A a₁a₂ + 2S a₂ + 3K a₁ + 3B`
    pub q: BPoly,
}

pub fn square_system(r: &[Rational; 4]) -> Result<SquareSystem> {
    if r.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidInput("square weights must be positive".into()));
    }
    let [r1, r2, r3, r4] = r.clone();
    let k = &r1 + &r3 - &r2 - &r4;
    let a = &r1 + &r2 - &r3 - &r4;
    let b = &r1 - &r2 - &r3 + &r4;
    let s = &r1 + &r2 + &r3 + &r4;
    let two = Rational::from_int(2);
    let three = Rational::from_int(3);
    let p = BPoly::from_terms(&[
        (2, 1, -k.clone()),
        (2, 0, -a.clone()),
        (1, 1, &two * &b),
        (1, 0, &two * &s),
        (0, 1, &three * &k),
        (0, 0, &three * &a),
    ]);
    let q = BPoly::from_terms(&[
        (1, 2, -k.clone()),
        (0, 2, -b.clone()),
        (1, 1, &two * &a),
        (0, 1, &two * &s),
        (1, 0, &three * &k),
        (0, 0, &three * &b),
    ]);
    Ok(SquareSystem { r: r.clone(), k, a, b, s, p, q })
}

impl SquareSystem {
    /// `F = Z₀³/W₀₀²` of the model square at `(a₁, a₂)` from the edge formulas.
    pub fn f_value(&self, a1: f64, a2: f64) -> f64 {
        let b1 = 0.5 * (a1 + a2);
        let b2 = 0.5 * (a2 - a1);
        let corners = [(-1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (1.0, -1.0)];
        let v: Vec<f64> = corners.iter().map(|(x, y)| 1.0 + b1 * x + b2 * y).collect();
        let r: Vec<f64> = self.r.iter().map(Scalar::to_f64).collect();
        let w = 1.0 / (v[0] * v[1]) + 1.0 / (v[1] * v[2]) + 1.0 / (v[2] * v[3]) + 1.0 / (v[3] * v[0]);
        let z = 4.0 * (r[0] / (v[0] * v[1]) + r[1] / (v[1] * v[2]) + r[2] / (v[2] * v[3]) + r[3] / (v[3] * v[0]));
        z.powi(3) / w.powi(2)
    }
}

/// How a root was certified.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactPoint {
    /// Coordinate `a_{free}` (0 or 1) is the given algebraic number and the
    /// other coordinate is `numerator / denominator` evaluated there.
    Parametrized { free: usize, root: AlgebraicReal, numerator: UPoly, denominator: UPoly },
    /// Both coordinates are independent algebraic numbers.
    Independent { a1: AlgebraicReal, a2: AlgebraicReal },
}

impl ExactPoint {
    fn rational_approximations(&self) -> (Rational, Rational) {
        let width = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(40));
        match self {
            ExactPoint::Parametrized { free, root, numerator, denominator } => {
                let x = match root.as_rational() {
                    Some(x) => x.clone(),
                    None => root.approximation(&width),
                };
                let y = numerator.eval(&x) / denominator.eval(&x);
                if *free == 0 {
                    (x, y)
                } else {
                    (y, x)
                }
            }
            ExactPoint::Independent { a1, a2 } => (a1.approximation(&width), a2.approximation(&width)),
        }
    }

    /// Both coordinates, when rational.
    pub fn as_rational(&self) -> Option<(Rational, Rational)> {
        match self {
            ExactPoint::Parametrized { free, root, numerator, denominator } => {
                let x = root.as_rational()?;
                let y = numerator.eval(x) / denominator.eval(x);
                Some(if *free == 0 { (x.clone(), y) } else { (y, x.clone()) })
            }
            ExactPoint::Independent { a1, a2 } => Some((a1.as_rational()?.clone(), a2.as_rational()?.clone())),
        }
    }

    pub fn to_json(&self) -> Value {
        let alg = |r: &AlgebraicReal| {
            let (lo, hi) = r.interval();
            json!({ "poly": r.poly().to_string(), "interval": [rational_to_string(lo), rational_to_string(hi)] })
        };
        match self {
            ExactPoint::Parametrized { free, root, numerator, denominator } => json!({
                "free": format!("a{}", free + 1),
                "root": alg(root),
                "other": { "numerator": numerator.to_string(), "denominator": denominator.to_string() },
            }),
            ExactPoint::Independent { a1, a2 } => json!({ "a1": alg(a1), "a2": alg(a2) }),
        }
    }
}

impl SquareSystem {
    /// Exact check that `P` and `Q` both vanish at the point.
    pub fn vanishes_at(&self, point: &ExactPoint) -> bool {
        let zero_on = |poly: &BPoly, free: usize, root: &AlgebraicReal, num: &UPoly, den: &UPoly| {
            let poly = if free == 0 { poly.clone() } else { poly.swap() };
            root.sign_of(&homogenize(&poly.in_y(), num, den)) == Ordering::Equal && root.sign_of(den) != Ordering::Equal
        };
        match point {
            ExactPoint::Parametrized { free, root, numerator, denominator } => {
                zero_on(&self.p, *free, root, numerator, denominator)
                    && zero_on(&self.q, *free, root, numerator, denominator)
            }
            // P(a₁, ·) ≡ 0 and Q(·, a₂) ≡ 0.
            ExactPoint::Independent { a1, a2 } => {
                self.p.in_y().iter().all(|c| a1.sign_of(c) == Ordering::Equal)
                    && self.q.swap().in_y().iter().all(|c| a2.sign_of(c) == Ordering::Equal)
            }
        }
    }
}

/// A common root of `P` and `Q` in the open square.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareRoot {
    pub a1: f64,
    pub a2: f64,
    /// `None` for roots from the numeric fallback.
    pub exact: Option<ExactPoint>,
}

impl SquareRoot {
    /// `(b₁, b₂) = ((a₁ + a₂)/2, (a₂ − a₁)/2)`.
    pub fn b(&self) -> [f64; 2] {
        [0.5 * (self.a1 + self.a2), 0.5 * (self.a2 - self.a1)]
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "a": [self.a1, self.a2],
            "b": self.b(),
            "certified": if self.exact.is_some() { "exact" } else { "numeric" },
        });
        if let Some(e) = &self.exact {
            v["exact"] = e.to_json();
            if let Some((x, y)) = e.as_rational() {
                v["a_rational"] = json!([rational_to_string(&x), rational_to_string(&y)]);
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareSolution {
    pub roots: Vec<SquareRoot>,
    /// Set when the exact path was degenerate and roots come from sampling.
    pub warning: Option<String>,
}

fn homogenize(c: &[UPoly], num: &UPoly, den: &UPoly) -> UPoly {
    // Σ c_j num^j den^{m−j}
    let m = c.len().saturating_sub(1);
    let mut out = UPoly::zero();
    for (j, cj) in c.iter().enumerate() {
        let mut term = cj.clone();
        for _ in 0..j {
            term = term.mul(num);
        }
        for _ in j..m {
            term = term.mul(den);
        }
        out = out.add(&term);
    }
    out
}

fn in_open_unit(x: &AlgebraicReal) -> bool {
    x.cmp_rational(&Rational::from_int(1)) == Ordering::Less
        && x.cmp_rational(&Rational::from_int(-1)) == Ordering::Greater
}

/// Roots with `C_P(x) ≠ 0`, where `P = C_P(x) y + D_P(x)`: `x` ranges over the
/// roots of `Res_y(P, Q) = Σ_j q_j(x) (−D_P)^j C_P^{m−j}` and `y = −D_P/C_P`.
fn linear_view(p: &BPoly, q: &BPoly) -> Result<Vec<(AlgebraicReal, UPoly, UPoly)>> {
    let pc = p.in_y();
    if pc.len() > 2 {
        return Err(Error::DegenerateResultant);
    }
    let c = pc.get(1).cloned().unwrap_or_else(UPoly::zero);
    if c.is_zero() {
        return Ok(Vec::new());
    }
    let d = pc[0].clone();
    let num = d.scale(&-Rational::from_int(1));
    let resultant = homogenize(&q.in_y(), &num, &c);
    if resultant.is_zero() {
        return Err(Error::DegenerateResultant);
    }
    let upper = c.mul(&c.add(&d));
    let lower = c.mul(&c.sub(&d));
    let mut out = Vec::new();
    for x in resultant.real_roots() {
        if x.sign_of(&c) == Ordering::Equal || !in_open_unit(&x) {
            continue;
        }
        if x.sign_of(&upper) != Ordering::Greater || x.sign_of(&lower) != Ordering::Greater {
            continue;
        }
        // Back-substitution: Q(x, −D/C)·C^m is the resultant itself, which vanishes on x.poly.
        debug_assert!(resultant.rem(x.poly()).is_zero());
        out.push((x, num.clone(), c.clone()));
    }
    Ok(out)
}

/// Roots of `gcd(C, D)` in `(−1, 1)`, i.e. values of `x` where `P(x, ·) ≡ 0`.
fn vanishing_lines(p: &BPoly) -> Result<Vec<AlgebraicReal>> {
    let pc = p.in_y();
    let d = pc.first().cloned().unwrap_or_else(UPoly::zero);
    let c = pc.get(1).cloned().unwrap_or_else(UPoly::zero);
    if c.is_zero() && d.is_zero() {
        return Err(Error::DegenerateResultant);
    }
    let g = if c.is_zero() { d.monic() } else { c.gcd(&d) };
    Ok(g.real_roots().into_iter().filter(in_open_unit).collect())
}

/// All common roots in the open square by exact elimination.
pub fn solve_square_exact(sys: &SquareSystem) -> Result<Vec<SquareRoot>> {
    let (p, q) = (&sys.p, &sys.q);
    let mut roots = Vec::new();
    let point = |exact: ExactPoint| {
        let (x, y) = exact.rational_approximations();
        SquareRoot { a1: Scalar::to_f64(&x), a2: Scalar::to_f64(&y), exact: Some(exact) }
    };
    for (x, numerator, denominator) in linear_view(p, q)? {
        roots.push(point(ExactPoint::Parametrized { free: 0, root: x, numerator, denominator }));
    }
    // Mirror view: Q is linear in a₁. Keep only roots missed above, i.e. with C_P(a₁) = 0.
    let cp = p.in_y().get(1).cloned().unwrap_or_else(UPoly::zero);
    let cp_coeffs: Vec<UPoly> = cp.coeffs().iter().map(|c| UPoly::constant(c.clone())).collect();
    for (y, numerator, denominator) in linear_view(&q.swap(), &p.swap())? {
        let h = homogenize(&cp_coeffs, &numerator, &denominator);
        if y.sign_of(&h) != Ordering::Equal {
            continue;
        }
        roots.push(point(ExactPoint::Parametrized { free: 1, root: y, numerator, denominator }));
    }
    let xs = vanishing_lines(p)?;
    let ys = vanishing_lines(&q.swap())?;
    for x in &xs {
        for y in &ys {
            roots.push(point(ExactPoint::Independent { a1: x.clone(), a2: y.clone() }));
        }
    }
    roots.sort_by(|u, v| u.a1.total_cmp(&v.a1).then(u.a2.total_cmp(&v.a2)));
    Ok(roots)
}

/// Newton on `(P, Q)` from a grid of seeds; used only when elimination is degenerate.
pub fn solve_square_numeric(sys: &SquareSystem) -> Vec<SquareRoot> {
    let (px, py) = (sys.p.partial_x(), sys.p.partial_y());
    let (qx, qy) = (sys.q.partial_x(), sys.q.partial_y());
    let scale = sys.s.to_f64();
    let mut found: Vec<(f64, f64)> = Vec::new();
    let steps = 41;
    for i in 0..steps {
        for j in 0..steps {
            let mut x = -0.99 + 1.98 * i as f64 / (steps - 1) as f64;
            let mut y = -0.99 + 1.98 * j as f64 / (steps - 1) as f64;
            for _ in 0..60 {
                let (f, g) = (sys.p.eval_f64(x, y), sys.q.eval_f64(x, y));
                let (a, b, c, d) = (px.eval_f64(x, y), py.eval_f64(x, y), qx.eval_f64(x, y), qy.eval_f64(x, y));
                let det = a * d - b * c;
                if det.abs() < 1e-300 {
                    break;
                }
                let dx = (d * f - b * g) / det;
                let dy = (a * g - c * f) / det;
                x -= dx;
                y -= dy;
                if !(x.is_finite() && y.is_finite()) || x.abs() > 2.0 || y.abs() > 2.0 {
                    break;
                }
                if dx.abs().max(dy.abs()) < 1e-15 {
                    break;
                }
            }
            let residual = sys.p.eval_f64(x, y).abs().max(sys.q.eval_f64(x, y).abs());
            let inside = x.abs() < 1.0 - 1e-9 && y.abs() < 1.0 - 1e-9;
            if residual <= 1e-11 * scale && inside && !found.iter().any(|&(u, v)| (u - x).hypot(v - y) < 1e-8) {
                found.push((x, y));
            }
        }
    }
    found.sort_by(|u, v| u.0.total_cmp(&v.0).then(u.1.total_cmp(&v.1)));
    found.into_iter().map(|(a1, a2)| SquareRoot { a1, a2, exact: None }).collect()
}

/// Exact elimination, falling back to sampling and Newton polishing with a
/// warning if the resultant vanishes identically.
pub fn solve_square(sys: &SquareSystem) -> SquareSolution {
    match solve_square_exact(sys) {
        Ok(roots) => SquareSolution { roots, warning: None },
        Err(e) => SquareSolution {
            roots: solve_square_numeric(sys),
            warning: Some(format!("{e}; roots located numerically")),
        },
    }
}
