//! The functional `F = Z₀^{n+1} / W₀₀ⁿ` on the Reeb chamber, its critical
//! points, their classification up to equivalence, and the exact square system.

mod square;

pub use square::{
    solve_square, solve_square_exact, solve_square_numeric, square_system, ExactPoint, SquareRoot, SquareSolution,
    SquareSystem,
};

use serde::Serialize;
use serde_json::{json, Value};

use crate::cone::{characteristic_polytope, reeb_chamber};
use crate::error::{Error, Result};
use crate::futaki::{extremal_affine, zeta_on_family, FutakiData};
use crate::geometry::{affine_equivalent, AffineFunction, LabeledPolytope};
use crate::linalg;
use crate::moments::{self, Moments};
use crate::scalar::Scalar;

fn outside(e: Error) -> Error {
    match e {
        Error::ReebNotPositive => Error::ReebVectorOutsideChamber,
        other => other,
    }
}

fn power<S: Scalar>(x: &S, k: usize) -> S {
    (0..k).fold(S::one(), |acc, _| acc * x.clone())
}

/// `F(b) = Z₀(b)^{n+1} / W₀₀(b)ⁿ`, invariant under `b ↦ rb`.
pub fn f_value<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<S> {
    let m = moments::moments(p, b).map_err(outside)?;
    Ok(f_from(&m, p.dim()))
}

fn f_from<S: Scalar>(m: &Moments<S>, n: usize) -> S {
    power(&m.z[0], n + 1) / power(&m.w[0][0], n)
}

/// `∂F/∂b_i = n(n+1) Z₀ⁿ / W₀₀^{n+1} · (W_{i0} Z₀ − W₀₀ Z_i)` for `i = 1..n`.
pub fn f_gradient<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<Vec<S>> {
    let m = moments::moments(p, b).map_err(outside)?;
    Ok(gradient_from(&m, p.dim()))
}

fn gradient_from<S: Scalar>(m: &Moments<S>, n: usize) -> Vec<S> {
    let (w00, z0) = (m.w[0][0].clone(), m.z[0].clone());
    let c = S::from_int((n * (n + 1)) as i64) * power(&z0, n) / power(&w00, n + 1);
    (1..=n).map(|i| c.clone() * (m.w[i][0].clone() * z0.clone() - w00.clone() * m.z[i].clone())).collect()
}

/// `g_i = W_{i0}/W₀₀ − Z_i/Z₀`, so that `dF = n(n+1) F g`.
pub fn normalized_map<S: Scalar>(m: &Moments<S>) -> Vec<S> {
    let n = m.z.len() - 1;
    (1..=n).map(|i| m.w[i][0].clone() / m.w[0][0].clone() - m.z[i].clone() / m.z[0].clone()).collect()
}

/// `∂g_i/∂b_j = −(n+2)W_ij/W₀₀ + (n+1)W_{i0}W_{j0}/W₀₀² + (n+1)Z_ij/Z₀ − n Z_iZ_j/Z₀²`.
pub fn normalized_jacobian<S: Scalar>(m: &Moments<S>) -> Vec<Vec<S>> {
    let n = m.z.len() - 1;
    let k = |x: usize| S::from_int(x as i64);
    let (w00, z0) = (m.w[0][0].clone(), m.z[0].clone());
    (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    -k(n + 2) * m.w[i][j].clone() / w00.clone()
                        + k(n + 1) * m.w[i][0].clone() * m.w[j][0].clone() / (w00.clone() * w00.clone())
                        + k(n + 1) * m.zz[i][j].clone() / z0.clone()
                        - k(n) * m.z[i].clone() * m.z[j].clone() / (z0.clone() * z0.clone())
                })
                .collect()
        })
        .collect()
}

/// `F(b) ≥ (2n/λ_max)ⁿ Z₀(b)` at `b(0) = 1`, which is stronger than
/// `(2/(λ_max n))ⁿ Z₀(b)`. Needs the origin inside `Δ`; `b` is normalized first.
pub fn lower_bound_check<S: Scalar>(p: &LabeledPolytope<S>, b: &AffineFunction<S>) -> Result<bool> {
    reeb_chamber(p)?;
    let m = moments::moments(p, b).map_err(outside)?;
    let n = p.dim();
    let b0 = b.constant.to_f64();
    let lambda_max = p.offsets().iter().map(Scalar::to_f64).fold(f64::NEG_INFINITY, f64::max);
    // Normalizing b to b/b(0) multiplies Z₀ by b(0)ⁿ and leaves F unchanged.
    let z0 = m.z[0].to_f64() * b0.powi(n as i32);
    let f = f_from(&m, n).to_f64();
    let bound = (2.0 * n as f64 / lambda_max).powi(n as i32) * z0;
    Ok(f >= bound * (1.0 - 1e-12))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalEntry {
    /// `β` with `b = 1 + ⟨β, μ − c⟩`, `c` the vertex barycenter.
    pub chamber: Vec<f64>,
    /// The Reeb vector in the input coordinates.
    pub reeb: AffineFunction<f64>,
    pub f_value: f64,
    /// `‖dF‖∞` in the chamber coordinates.
    pub gradient_norm: f64,
    pub zeta: FutakiData<f64>,
    pub certified: Certification,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub seeds: usize,
    pub converged: usize,
    pub newton_iterations: usize,
    pub descent_fallback: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalReport {
    pub entries: Vec<CriticalEntry>,
    /// The barycenter the chamber coordinates are centered at.
    pub center: Vec<f64>,
    pub stats: SearchStats,
}

impl CriticalReport {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "chamber": e.chamber,
                    "reeb": e.reeb.coefficients(),
                    "F": e.f_value,
                    "gradient_norm": e.gradient_norm,
                    "zeta": e.zeta.to_json(),
                    "certified": e.certified,
                })
            })
            .collect();
        json!({ "entries": entries, "center": self.center, "stats": self.stats })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOptions {
    /// Seeds per axis.
    pub grid: usize,
    pub newton_tol: f64,
    pub dedup_radius: f64,
    pub max_seeds: usize,
    /// Seeds must satisfy `min_ν b(ν) ≥ margin`.
    pub margin: f64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self { grid: 17, newton_tol: 1e-12, dedup_radius: 1e-6, max_seeds: 200_000, margin: 1e-3 }
    }
}

struct Evaluator<'a> {
    p: &'a LabeledPolytope<f64>,
    vertices: &'a [Vec<f64>],
}

impl Evaluator<'_> {
    fn min_value(&self, beta: &[f64]) -> f64 {
        self.vertices.iter().map(|v| 1.0 + linalg::dot(beta, v)).fold(f64::INFINITY, f64::min)
    }

    fn moments(&self, beta: &[f64]) -> Option<Moments<f64>> {
        moments::moments(self.p, &AffineFunction::new(1.0, beta.to_vec())).ok()
    }

    fn log_f(&self, beta: &[f64]) -> Option<f64> {
        let m = self.moments(beta)?;
        let n = self.p.dim() as f64;
        Some((n + 1.0) * m.z[0].ln() - n * m.w[0][0].ln())
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton on `g` from `beta`, backtracking to stay in the chamber and decrease `‖g‖`.
fn newton(ev: &Evaluator, mut beta: Vec<f64>, tol: f64, iterations: &mut usize) -> Option<Vec<f64>> {
    let mut m = ev.moments(&beta)?;
    let mut g = normalized_map(&m);
    for _ in 0..60 {
        *iterations += 1;
        let j = normalized_jacobian(&m);
        let step = linalg::solve(&j, &g.iter().map(|x| -x).collect::<Vec<_>>())?;
        let gnorm = norm(&g);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            if ev.min_value(&trial) > 1e-9 {
                if let Some(mt) = ev.moments(&trial) {
                    let gt = normalized_map(&mt);
                    if norm(&gt) < gnorm || gnorm < 1e-300 {
                        accepted = Some((trial, mt, gt));
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        let (trial, mt, gt) = accepted?;
        let moved = t * norm(&step);
        beta = trial;
        m = mt;
        g = gt;
        if moved <= tol * (1.0 + norm(&beta)) || norm(&g) <= 1e-15 {
            return Some(beta);
        }
    }
    (norm(&g) <= 1e-10).then_some(beta)
}

/// Gradient descent on `log F` with Armijo backtracking, used when no seed converges.
fn descent(ev: &Evaluator, mut beta: Vec<f64>) -> Option<Vec<f64>> {
    let n = ev.p.dim() as f64;
    let mut value = ev.log_f(&beta)?;
    for _ in 0..2000 {
        let m = ev.moments(&beta)?;
        // ∇ log F = n(n+1) g
        let grad: Vec<f64> = normalized_map(&m).iter().map(|x| n * (n + 1.0) * x).collect();
        let gn = norm(&grad);
        if gn < 1e-8 {
            break;
        }
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = beta.iter().zip(&grad).map(|(b, d)| b - t * d).collect();
            if ev.min_value(&trial) > 1e-9 {
                if let Some(v) = ev.log_f(&trial) {
                    if v <= value - 1e-4 * t * gn * gn {
                        beta = trial;
                        value = v;
                        break;
                    }
                }
            }
            t *= 0.5;
            if t < 1e-20 {
                return Some(beta);
            }
        }
    }
    Some(beta)
}

fn seeds(lo: &[f64], hi: &[f64], grid: usize, max: usize) -> Vec<Vec<f64>> {
    let n = lo.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        out.push((0..n).map(|j| lo[j] + (hi[j] - lo[j]) * (idx[j] as f64 + 0.5) / grid as f64).collect());
        if out.len() >= max {
            break;
        }
        for j in 0..n {
            idx[j] += 1;
            if idx[j] < grid {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    out
}

/// Multi-start Newton for the critical points of `F` on the Reeb chamber.
///
/// The polytope is centered at its vertex barycenter so the chamber is
/// bounded. Seeds fill a `grid`ⁿ lattice in the chamber's bounding box, keeping
/// those at least `margin` from the walls. Converged points are sorted,
/// deduplicated and checked for `‖dF‖ ≤ 1e-9 F` and constant `ζ`.
pub fn find_critical<S: Scalar>(p: &LabeledPolytope<S>, opts: &CriticalOptions) -> Result<CriticalReport> {
    let input = p.to_f64();
    let center = input.vertex_barycenter();
    let centered = input.translate(&center.iter().map(|x| -x).collect::<Vec<_>>());
    let chamber = reeb_chamber(&centered)?;
    let ev = Evaluator { p: &centered, vertices: &chamber.vertices };
    let (lo, hi) = chamber.bounding_box();
    let mut stats = SearchStats::default();
    let starts: Vec<Vec<f64>> = seeds(&lo, &hi, opts.grid.max(1), opts.max_seeds)
        .into_iter()
        .filter(|s| ev.min_value(s) >= opts.margin)
        .collect();
    stats.seeds = starts.len();
    let mut converged: Vec<Vec<f64>> = Vec::new();
    for s in &starts {
        if let Some(beta) = newton(&ev, s.clone(), opts.newton_tol, &mut stats.newton_iterations) {
            converged.push(beta);
        }
    }
    stats.converged = converged.len();
    if converged.is_empty() {
        stats.descent_fallback = true;
        let best = starts
            .iter()
            .filter_map(|s| ev.log_f(s).map(|v| (v, s)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| vec![0.0; centered.dim()]);
        if let Some(beta) = descent(&ev, best) {
            if let Some(polished) = newton(&ev, beta, opts.newton_tol, &mut stats.newton_iterations) {
                converged.push(polished);
            }
        }
    }
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for beta in converged {
        let dup = unique
            .iter()
            .any(|u| norm(&u.iter().zip(&beta).map(|(x, y)| x - y).collect::<Vec<_>>()) < opts.dedup_radius);
        if !dup {
            unique.push(beta);
        }
    }
    // Lexicographic, with coordinates closer than the dedup radius treated as tied.
    unique.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find(|(x, y)| (*x - *y).abs() >= opts.dedup_radius)
            .map_or(std::cmp::Ordering::Equal, |(x, y)| x.total_cmp(y))
    });
    let n = centered.dim();
    let mut entries = Vec::new();
    for beta in unique {
        let Some(m) = ev.moments(&beta) else { continue };
        let f = f_from(&m, n);
        let gradient_norm = gradient_from(&m, n).iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if gradient_norm > 1e-9 * f.abs() {
            continue;
        }
        let reeb = AffineFunction::new(1.0 - linalg::dot(&beta, &center), beta.clone());
        let zeta = zeta_on_family(&input, &reeb)?;
        if !zeta.zeta_is_constant() {
            continue;
        }
        entries.push(CriticalEntry {
            chamber: beta,
            reeb,
            f_value: f,
            gradient_norm,
            zeta,
            certified: Certification::Numeric,
        });
    }
    if entries.is_empty() {
        return Err(Error::SearchExhausted(format!(
            "{} seeds, {} Newton iterations, descent fallback {}",
            stats.seeds, stats.newton_iterations, stats.descent_fallback
        )));
    }
    Ok(CriticalReport { entries, center, stats })
}

/// Groups the critical Reeb vectors of a report: `b` and `a` are in one class
/// when `(λΔ_b, u_b)` is equivalent to `(Δ_a, u_a)` for some `λ > 0`. Since the
/// constant `ζ` of `(λΔ, u)` is `ζ/λ`, the only candidate is `λ = ζ_b / ζ_a`.
pub fn classify_critical<S: Scalar>(p: &LabeledPolytope<S>, report: &CriticalReport) -> Result<Vec<Vec<usize>>> {
    let fp = p.to_f64();
    let mut slices = Vec::with_capacity(report.entries.len());
    for e in &report.entries {
        let slice = characteristic_polytope(&fp, &e.reeb)?;
        let zeta = extremal_affine(&slice)?.zeta.constant;
        slices.push((slice, zeta));
    }
    let count = slices.len();
    let mut parent: Vec<usize> = (0..count).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for a in 0..count {
        for b in a + 1..count {
            if find(&mut parent, a) == find(&mut parent, b) {
                continue;
            }
            let lambda = slices[b].1 / slices[a].1;
            if !(lambda.is_finite() && lambda > 0.0) {
                continue;
            }
            let scaled = slices[b].0.scale(&lambda)?;
            if affine_equivalent(&scaled, &slices[a].0)?.is_some() {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[rb] = ra;
            }
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..count {
        let root = find(&mut parent, i);
        match classes.iter_mut().find(|c| find(&mut parent, c[0]) == root) {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn square(r: [i64; 4]) -> LabeledPolytope<Rational> {
        LabeledPolytope::from_halfspaces(
            vec![
                vec![q(1, r[0]), q(0, 1)],
                vec![q(0, 1), q(-1, r[1])],
                vec![q(-1, r[2]), q(0, 1)],
                vec![q(0, 1), q(1, r[3])],
            ],
            r.iter().map(|&x| q(1, x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn f_of_squares_at_one() {
        let one = AffineFunction::one(2);
        assert_eq!(f_value(&square([1, 1, 1, 1]), &one).unwrap(), q(256, 1));
        // F(𝟏) = 4(r₁ + r₂ + r₃ + r₄)³
        assert_eq!(f_value(&square([2, 3, 4, 5]), &one).unwrap(), q(4 * 14 * 14 * 14, 1));
        assert_eq!(f_gradient(&square([1, 1, 1, 1]), &one).unwrap(), vec![q(0, 1), q(0, 1)]);
        let sys = square_system(&[q(2, 1), q(3, 1), q(4, 1), q(5, 1)]).unwrap();
        let b = AffineFunction::new(q(1, 1), vec![q(1, 5), q(-1, 7)]);
        let exact = Scalar::to_f64(&f_value(&square([2, 3, 4, 5]), &b).unwrap());
        let (b1, b2) = (0.2, -1.0 / 7.0);
        assert!((sys.f_value(b1 - b2, b1 + b2) - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn f_blows_up_at_the_wall() {
        let p = square([1, 1, 1, 1]).to_f64();
        let mut last = 0.0;
        for t in [0.0, 0.5, 0.9, 0.99, 0.999, 0.9999] {
            let f = f_value(&p, &AffineFunction::new(1.0, vec![t, 0.0])).unwrap();
            assert!(f > last, "{t}: {f} after {last}");
            last = f;
        }
        assert!(last > 1e4 * f_value(&p, &AffineFunction::one(2)).unwrap());
        assert_eq!(
            f_value(&square([1, 1, 1, 1]), &AffineFunction::new(q(1, 1), vec![q(1, 1), q(0, 1)])).unwrap_err(),
            Error::ReebVectorOutsideChamber
        );
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = square([2, 3, 4, 5]).to_f64();
        let b = AffineFunction::new(1.0, vec![0.2, -0.3]);
        let g = f_gradient(&p, &b).unwrap();
        let h = 1e-5;
        for i in 0..2 {
            let mut plus = b.clone();
            plus.linear[i] += h;
            let mut minus = b.clone();
            minus.linear[i] -= h;
            let fd = (f_value(&p, &plus).unwrap() - f_value(&p, &minus).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-5 * g[i].abs().max(1.0), "{fd} vs {}", g[i]);
        }
        let m = moments::moments(&p, &b).unwrap();
        let jac = normalized_jacobian(&m);
        for j in 0..2 {
            let mut plus = b.clone();
            plus.linear[j] += h;
            let mut minus = b.clone();
            minus.linear[j] -= h;
            let gp = normalized_map(&moments::moments(&p, &plus).unwrap());
            let gm = normalized_map(&moments::moments(&p, &minus).unwrap());
            for i in 0..2 {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                assert!((fd - jac[i][j]).abs() <= 1e-6 * jac[i][j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn unit_square_has_one_critical_point() {
        let report = find_critical(&square([1, 1, 1, 1]), &CriticalOptions::default()).unwrap();
        assert_eq!(report.entries.len(), 1);
        let e = &report.entries[0];
        assert!(e.chamber.iter().all(|x| x.abs() < 1e-10));
        assert!((e.f_value - 256.0).abs() < 1e-9);
        assert_eq!(classify_critical(&square([1, 1, 1, 1]), &report).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn wang_ziller_square() {
        let p = square([7, 1, 7, 1]);
        let report = find_critical(&p, &CriticalOptions::default()).unwrap();
        assert_eq!(report.entries.len(), 3);
        let a = 1.0 / 3f64.sqrt();
        let expected = [[0.0, -a], [0.0, 0.0], [0.0, a]];
        for (e, x) in report.entries.iter().zip(expected) {
            assert!((e.chamber[0] - x[0]).abs() < 1e-9 && (e.chamber[1] - x[1]).abs() < 1e-9, "{:?}", e.chamber);
            assert!(e.zeta.zeta_is_constant());
        }
        let classes = classify_critical(&p, &report).unwrap();
        assert_eq!(classes, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn lower_bound() {
        let p = square([1, 1, 1, 1]);
        assert!(lower_bound_check(&p, &AffineFunction::one(2)).unwrap());
        let fp = square([2, 3, 4, 5]).to_f64();
        for t in [0.0, 0.5, 0.99, 0.99999] {
            assert!(lower_bound_check(&fp, &AffineFunction::new(1.0, vec![-0.7 * t, 0.3 * t])).unwrap());
        }
    }
}
