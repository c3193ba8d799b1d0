use crate::error::{Error, Result};
use crate::scalar::factorial;

/// One Grundmann–Möller rule on the `d`-simplex: weights already scaled so
/// that `Σ w f(x)` approximates the mean of `f` over the simplex.
struct Rule {
    weights: Vec<f64>,
    barycentric: Vec<Vec<f64>>,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Rule {
    /// Degree `2s + 1`.
    fn new(d: usize, s: usize) -> Self {
        let deg = 2 * s + 1;
        let mut weights = Vec::new();
        let mut barycentric = Vec::new();
        let dfact: f64 = factorial(d);
        for i in 0..=s {
            let denom = (d + deg - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-(2 * s as i32)) * denom.powi(deg as i32)
                / (factorial::<f64>(i) * factorial::<f64>(d + deg - i))
                * dfact;
            for beta in compositions(s - i, d + 1) {
                weights.push(w);
                barycentric.push(beta.iter().map(|&bj| (2 * bj + 1) as f64 / denom).collect());
            }
        }
        Self { weights, barycentric }
    }

    fn apply(&self, vertices: &[Vec<f64>], f: &dyn Fn(&[f64]) -> f64) -> f64 {
        let n = vertices[0].len();
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        for (w, lam) in self.weights.iter().zip(&self.barycentric) {
            x.iter_mut().for_each(|c| *c = 0.0);
            for (l, v) in lam.iter().zip(vertices) {
                for k in 0..n {
                    x[k] += l * v[k];
                }
            }
            sum += w * f(&x);
        }
        sum
    }
}

struct Piece {
    vertices: Vec<Vec<f64>>,
    measure: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive integration of `f` over a union of simplices (of any
/// dimension `d` embedded in `ℝⁿ`) with the given measures. Error estimates
/// come from comparing the degree 13 and degree 11 rules; the piece with the
/// largest estimate is bisected along its longest edge. The tolerance is
/// relative to `Σ |piece|`, so integrals that cancel to zero still terminate.
pub fn integrate(simplices: &[(Vec<Vec<f64>>, f64)], f: &dyn Fn(&[f64]) -> f64, rel_tol: f64) -> Result<f64> {
    const MAX_PIECES: usize = 20_000;
    if simplices.is_empty() {
        return Ok(0.0);
    }
    let d = simplices[0].0.len() - 1;
    let high = Rule::new(d, 6);
    let low = Rule::new(d, 5);
    let eval = |vertices: Vec<Vec<f64>>, measure: f64| {
        let hi = measure * high.apply(&vertices, f);
        let lo = measure * low.apply(&vertices, f);
        Piece { vertices, measure, value: hi, error: (hi - lo).abs() }
    };
    let mut pieces: Vec<Piece> = simplices.iter().map(|(v, m)| eval(v.clone(), *m)).collect();
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let mass: f64 = pieces.iter().map(|p| p.value.abs()).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if !total.is_finite() || !error.is_finite() {
            return Err(Error::AccuracyNotReached { error: f64::INFINITY });
        }
        if error <= rel_tol * mass.max(f64::MIN_POSITIVE) {
            return Ok(total);
        }
        if pieces.len() >= MAX_PIECES {
            return Err(Error::AccuracyNotReached { error: error / mass.max(f64::MIN_POSITIVE) });
        }
        let worst = (0..pieces.len()).max_by(|&a, &b| pieces[a].error.total_cmp(&pieces[b].error)).expect("nonempty");
        let piece = pieces.swap_remove(worst);
        let (mut ea, mut eb, mut longest) = (0, 1, -1.0);
        for a in 0..piece.vertices.len() {
            for b in a + 1..piece.vertices.len() {
                let len: f64 = piece.vertices[a].iter().zip(&piece.vertices[b]).map(|(x, y)| (x - y).powi(2)).sum();
                if len > longest {
                    (ea, eb, longest) = (a, b, len);
                }
            }
        }
        let mid: Vec<f64> = piece.vertices[ea].iter().zip(&piece.vertices[eb]).map(|(x, y)| 0.5 * (x + y)).collect();
        let mut left = piece.vertices.clone();
        left[eb] = mid.clone();
        let mut right = piece.vertices;
        right[ea] = mid;
        pieces.push(eval(left, piece.measure / 2.0));
        pieces.push(eval(right, piece.measure / 2.0));
    }
}
