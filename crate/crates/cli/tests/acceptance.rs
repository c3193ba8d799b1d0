//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use common::{chamber_point, polygon, polytope3, rational_chamber_point, rel_err, rng, TestRng};
use rand::Rng;
use reebkit::cone::{
    characteristic_polytope, is_good, is_good_quadcone, lattice_from_labels, reeb_chamber, LabeledCone,
};
use reebkit::critical::{f_gradient, f_value, find_critical, solve_square_exact, square_system, CriticalOptions};
use reebkit::geometry::affine_equivalent;
use reebkit::moments::{
    edge_coefficients, facet_moments, moment_integral, moments, quadrature_moment, MomentSpec, QUADRATURE_TOL,
};
use reebkit::quadrilateral::{model_square, normalize_quadrilateral, primitive_square_coefficients};
use reebkit::{AffineFunction, LabeledPolytope, Rational, Scalar};
use reebkit_cli::wang_ziller_report;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn to_err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Wang–Ziller squares: three critical Reeb vectors at (0, ∓a) and 𝟏, exact
/// agreement with the resultant roots, constant ζ, two classes, under 5 s.
fn criterion_1() -> Outcome {
    let mut worst_match = 0.0f64;
    let mut worst_time = Duration::ZERO;
    for (p, q) in [(7u64, 1u64), (11, 2), (13, 1)] {
        let start = Instant::now();
        let report = wang_ziller_report(p, q, &CriticalOptions::default()).map_err(to_err)?;
        let elapsed = start.elapsed();
        worst_time = worst_time.max(elapsed);
        check(elapsed < Duration::from_secs(5), || format!("({p},{q}) took {elapsed:?}"))?;
        let a = (1.0 - 4.0 * q as f64 / (p - q) as f64).sqrt();
        let sys = square_system(&[p, q, p, q].map(|x| Rational::from_integer(x.into()))).map_err(to_err)?;
        let coeff_scale: f64 = [&sys.p, &sys.q]
            .iter()
            .map(|poly| {
                (0..=poly.total_degree())
                    .flat_map(|i| (0..=poly.total_degree()).map(move |j| (i, j)))
                    .map(|(i, j)| poly.coeff(i, j).to_f64().abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        let expected = [[0.0, -a], [0.0, 0.0], [0.0, a]];
        for [b1, b2] in expected {
            let (a1, a2) = (b1 - b2, b1 + b2);
            let residual = sys.p.eval_f64(a1, a2).abs().max(sys.q.eval_f64(a1, a2).abs());
            check(residual <= 1e-10 * coeff_scale, || format!("({p},{q}): P, Q at expected point = {residual:e}"))?;
        }
        let points = report["critical_points"].as_array().ok_or("missing critical points")?;
        check(points.len() == 3, || format!("({p},{q}): {} critical points", points.len()))?;
        for (point, want) in points.iter().zip(expected) {
            let b: Vec<f64> = point["b"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
            let off = (b[0] - want[0]).abs().max((b[1] - want[1]).abs());
            let exact = point["exact_match"]["distance"].as_f64().ok_or("no exact root")?;
            let root = &point["exact_match"]["root"];
            check(root["certified"] == "exact", || "root not certified exactly".into())?;
            worst_match = worst_match.max(off).max(exact);
            check(off <= 1e-10 && exact <= 1e-10, || {
                format!("({p},{q}): {b:?} vs {want:?}, exact distance {exact:e}")
            })?;
            let zeta: Vec<f64> = point["zeta"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
            let linear = zeta[1..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            check(linear < 1e-8, || format!("({p},{q}): ζ linear part {linear:e}"))?;
        }
        let exact_roots = report["exact_roots"].as_array().unwrap().len();
        check(exact_roots == 3, || format!("({p},{q}): {exact_roots} exact roots"))?;
        let classes = report["classes"].as_array().unwrap();
        check(classes.len() == 2, || format!("({p},{q}): {} classes", classes.len()))?;
        check(report["classes"] == serde_json::json!([[0, 2], [1]]), || format!("classes {}", report["classes"]))?;
        check(report["good"] == true && report["two_rays"] == true, || "goodness or two-rays verdict".into())?;
    }
    Ok(format!("max deviation {worst_match:.1e}, slowest case {:.2}s", worst_time.as_secs_f64()))
}

/// At most 7 interior common roots over 100 random rational r with K ≠ 0, all exactly on P = Q = 0.
fn criterion_2() -> Outcome {
    let mut r = rng(2);
    let mut most = 0;
    let mut total = 0;
    let mut done = 0;
    while done < 100 {
        let rs: [Rational; 4] = std::array::from_fn(|_| q(r.gen_range(1..=30), r.gen_range(1..=6)));
        let sys = square_system(&rs).map_err(to_err)?;
        if sys.k == q(0, 1) {
            continue;
        }
        done += 1;
        let roots = solve_square_exact(&sys).map_err(to_err)?;
        most = most.max(roots.len());
        total += roots.len();
        check(roots.len() <= 7, || format!("{} roots for r = {rs:?}", roots.len()))?;
        for root in &roots {
            let exact = root.exact.as_ref().ok_or("root without exact certificate")?;
            check(sys.vanishes_at(exact), || format!("P, Q nonzero at {root:?} for r = {rs:?}"))?;
        }
    }
    Ok(format!("100 systems, {total} roots, at most {most} per system, all exact zeros"))
}

fn ratio_spread(p: &LabeledPolytope<f64>, rng: &mut TestRng) -> Result<f64, String> {
    let mut ratios = Vec::new();
    for _ in 0..25 {
        let beta = chamber_point(p, 0.05, rng);
        let m = moments(p, &AffineFunction::new(1.0, beta)).map_err(to_err)?;
        ratios.push(m.w[0][0] / m.z[0]);
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(*x), b.max(*x)));
    Ok((hi - lo) / hi)
}

fn monotone_case(p: &LabeledPolytope<Rational>, rng: &mut TestRng) -> Result<f64, String> {
    let report = find_critical(p, &CriticalOptions::default()).map_err(to_err)?;
    check(report.entries.len() == 1, || format!("{} critical points", report.entries.len()))?;
    let (center, _) = p.is_monotone().ok_or("not monotone")?;
    let centered = p.translate(&center.iter().map(|x| -x.clone()).collect::<Vec<_>>()).to_f64();
    let spread = ratio_spread(&centered, rng)?;
    check(spread <= 1e-10, || format!("W00/Z0 spread {spread:e}"))?;
    Ok(spread)
}

/// Monotone squares and polygons: one critical point, W00/Z0 constant once centered.
fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (r1, r3) = (q(r.gen_range(1..=20), r.gen_range(1..=4)), q(r.gen_range(1..=20), r.gen_range(1..=4)));
        let s = r1.clone() + r3.clone();
        let r2 = s.clone() * q(r.gen_range(1..=99), 100);
        let r4 = s - r2.clone();
        let p = model_square(&[r1, r2, r3, r4]).map_err(to_err)?;
        worst = worst.max(monotone_case(&p, &mut r)?);
    }
    let mut count = 0;
    while count < 10 {
        let base = polygon(&mut r);
        let ones = vec![q(1, 1); base.num_facets()];
        let Ok(p) = LabeledPolytope::from_halfspaces(base.normals().to_vec(), ones) else { continue };
        let t = vec![q(r.gen_range(-20..=20), 100), q(r.gen_range(-20..=20), 100)];
        worst = worst.max(monotone_case(&p.translate(&t), &mut r)?);
        count += 1;
    }
    Ok(format!("30 monotone polygons, W00/Z0 spread at most {worst:.1e}"))
}

fn derivative_case(p: &LabeledPolytope<f64>, rng: &mut TestRng) -> Result<f64, String> {
    let n = p.dim();
    let beta = chamber_point(p, 0.05, rng);
    let b = AffineFunction::new(1.0, beta);
    let h = 1e-5;
    let m = moments(p, &b).map_err(to_err)?;
    let grad = f_gradient(p, &b).map_err(to_err)?;
    let shifted = |i: usize, s: f64| {
        let mut c = b.coefficients();
        c[i] += s;
        AffineFunction::from_coefficients(&c)
    };
    let mut dw = Vec::new();
    let mut dz = Vec::new();
    let mut df = Vec::new();
    for i in 1..=n {
        let (up, down) = (moments(p, &shifted(i, h)).map_err(to_err)?, moments(p, &shifted(i, -h)).map_err(to_err)?);
        dw.push(((up.w[0][0] - down.w[0][0]) / (2.0 * h), -(n as f64 + 1.0) * m.w[i][0]));
        dz.push(((up.z[0] - down.z[0]) / (2.0 * h), -(n as f64) * m.z[i]));
        let fd =
            (f_value(p, &shifted(i, h)).map_err(to_err)? - f_value(p, &shifted(i, -h)).map_err(to_err)?) / (2.0 * h);
        df.push((fd, grad[i - 1]));
    }
    let mut worst = 0.0f64;
    for (name, pairs) in [("W00", &dw), ("Z0", &dz), ("F", &df)] {
        let scale = pairs.iter().fold(0.0f64, |s, (_, a)| s.max(a.abs()));
        for (i, (fd, an)) in pairs.iter().enumerate() {
            let err = (fd - an).abs() / scale;
            worst = worst.max(err);
            check(err <= 1e-5, || format!("∂{name}/∂b_{}: finite difference {fd} vs {an}", i + 1))?;
        }
    }
    Ok(worst)
}

/// ∂W00/∂b_i = −(n+1)W_i0, ∂Z0/∂b_i = −nZ_i and dF against central differences.
fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let p = polygon(&mut r).to_f64();
        worst = worst.max(derivative_case(&p, &mut r)?);
    }
    for _ in 0..10 {
        let p = polytope3(&mut r).to_f64();
        worst = worst.max(derivative_case(&p, &mut r)?);
    }
    Ok(format!("60 instances, worst relative error {worst:.1e} (against the largest component)"))
}

/// Closed form against adaptive quadrature; edge formula, facet identities, divergence reduction.
fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst_quad = 0.0f64;
    for _ in 0..100 {
        let p = polygon(&mut r);
        let beta = rational_chamber_point(&p, &mut r);
        let b = AffineFunction::new(q(1, 1), beta);
        let bf = b.to_f64();
        let pf = p.to_f64();
        let (i, j) = (r.gen_range(0..3usize), r.gen_range(0..3usize));
        let num: Vec<usize> = [i, j].into_iter().filter(|&k| k > 0).map(|k| k - 1).collect();
        let spec = if r.gen_bool(0.5) {
            MomentSpec::boundary(&num, 2 + num.len() as u32)
        } else {
            MomentSpec::interior(&num, 3 + num.len() as u32)
        };
        let exact = moment_integral(&p, &spec, &b).map_err(to_err)?.to_f64();
        let quad = quadrature_moment(&pf, &spec, &bf, QUADRATURE_TOL).map_err(to_err)?;
        let err = if exact == 0.0 && quad.abs() < 1e-13 { 0.0 } else { rel_err(exact, quad) };
        worst_quad = worst_quad.max(err);
        check(err <= 1e-10, || format!("{spec:?}: exact {exact} vs quadrature {quad}"))?;

        let m = moments(&p, &b).map_err(to_err)?;
        let x = facet_moments(&p, &b).map_err(to_err)?;
        let lam_x = p.offsets().iter().zip(&x).fold(q(0, 1), |s, (l, xl)| s + l * xl);
        let sum_x = x.iter().fold(q(0, 1), |s, xl| s + xl);
        check(m.w[0][0].clone() * q(2, 1) == lam_x, || "W00 facet identity".into())?;
        check(m.z[0] == sum_x * q(2, 1), || "Z0 facet identity".into())?;
        let edges = edge_coefficients(&p).map_err(to_err)?;
        check(edges.w00(&p, &b) == m.w[0][0] && edges.z0(&p, &b) == m.z[0], || "edge formula".into())?;
        // Divergence reduction without normalizing b(0).
        let t = q(r.gen_range(1..=9), 4);
        let bt = AffineFunction::new(b.constant.clone() * &t, b.linear.iter().map(|v| v * &t).collect());
        let (mt, xt) = (moments(&p, &bt).map_err(to_err)?, facet_moments(&p, &bt).map_err(to_err)?);
        let rhs = p.offsets().iter().zip(&xt).fold(q(0, 1), |s, (l, xl)| s + l * xl);
        check(q(2, 1) * bt.constant.clone() * mt.w[0][0].clone() == rhs, || "divergence reduction".into())?;
    }
    Ok(format!("100 instances, quadrature worst relative error {worst_quad:.1e}; identities exact over the rationals"))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Smith-form goodness against the lcm criterion and the gcd-of-relation test, c_i ≤ 12.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let deltas = [[1i64, 1, 0], [1, 0, -1], [1, -1, 0], [1, 0, 1]];
    let mut good_count = 0;
    let mut cases = 0;
    for idx in 0..12u64.pow(4) {
        let c: [u64; 4] = std::array::from_fn(|k| idx / 12u64.pow(k as u32) % 12 + 1);
        let labels: Vec<Vec<Rational>> =
            deltas.iter().zip(c).map(|(d, ck)| d.iter().map(|&x| q(x * ck as i64, 1)).collect()).collect();
        let cone = LabeledCone::new(labels).map_err(to_err)?;
        let lattice = lattice_from_labels(&cone).map_err(to_err)?.ok_or("labels do not span")?;
        let smith = is_good(&cone, &lattice).map_err(to_err)?;
        let primitive = primitive_square_coefficients(&cone, &lattice).map_err(to_err)?;
        let by_lcm = is_good_quadcone(primitive);
        // Relation Σ k_i û_i = 0 among the primitive normals û_i = δ_i c'_i, so
        // k ∝ (1/c'₁, −1/c'₂, 1/c'₃, −1/c'₄); adjacent pairs must be coprime.
        let l = primitive.iter().fold(1, |acc, &x| lcm(acc, x));
        let k: Vec<u64> = primitive.iter().map(|&x| l / x).collect();
        let g = k.iter().fold(0, |acc, &x| gcd(acc, x));
        let by_relation = (0..4).all(|i| gcd(k[i] / g, k[(i + 1) % 4] / g) == 1);
        check(smith == by_lcm && smith == by_relation, || {
            format!("c = {c:?}: Smith {smith}, lcm {by_lcm} on {primitive:?}, relation {by_relation}")
        })?;
        good_count += usize::from(smith);
        cases += 1;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{cases} cones, {good_count} good, all three tests agree, {:.2}s", elapsed.as_secs_f64()))
}

fn existence_case(p: &LabeledPolytope<Rational>, rng: &mut TestRng) -> Result<(), String> {
    let report = find_critical(p, &CriticalOptions::default()).map_err(to_err)?;
    check(!report.entries.is_empty(), || "no critical point".into())?;
    let centered = p.to_f64().translate(&report.center.iter().map(|x| -x).collect::<Vec<_>>());
    let chamber = reeb_chamber(&centered).map_err(to_err)?;
    let interior_max = report.entries.iter().map(|e| e.f_value).fold(0.0f64, f64::max);
    let start = &report.entries[0].chamber;
    let f = |beta: &[f64]| f_value(&centered, &AffineFunction::new(1.0, beta.to_vec())).map_err(to_err);
    for _ in 0..10 {
        let d: Vec<f64> = (0..p.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let t_max = chamber
            .vertices
            .iter()
            .filter_map(|v| {
                let slope: f64 = d.iter().zip(v).map(|(a, b)| a * b).sum();
                let value = 1.0 + start.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                (slope < 0.0).then(|| value / -slope)
            })
            .fold(f64::INFINITY, f64::min);
        let samples: Vec<f64> = (0..=14)
            .map(|k| {
                let t = t_max * (1.0 - 10f64.powf(-(k as f64) / 2.0));
                let beta: Vec<f64> = start.iter().zip(&d).map(|(s, dd)| s + t * dd).collect();
                f(&beta)
            })
            .collect::<Result<_, _>>()?;
        let recorded = samples[..10].iter().fold(interior_max, |m, x| m.max(*x));
        let tail = &samples[9..];
        check(tail.windows(2).all(|w| w[1] > w[0]), || format!("F not increasing near the wall: {tail:?}"))?;
        check(*tail.last().unwrap() > recorded, || "F near the wall below an interior value".into())?;
    }
    Ok(())
}

/// Every random polytope has a verified critical point and F grows toward the chamber walls.
fn criterion_7() -> Outcome {
    let mut r = rng(7);
    for _ in 0..50 {
        let p = polygon(&mut r);
        existence_case(&p, &mut r)?;
    }
    for _ in 0..10 {
        let p = polytope3(&mut r);
        existence_case(&p, &mut r)?;
    }
    Ok("60 polytopes, 600 rays".into())
}

/// Characteristic polytope at 𝟏 equals the input; square normal form is idempotent.
fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let mut checked = 0;
    let mut quads = 0;
    for k in 0..80 {
        let p = if k % 4 == 3 { polytope3(&mut r) } else { polygon(&mut r) };
        let one = AffineFunction::one(p.dim());
        let slice = characteristic_polytope(&p, &one).map_err(to_err)?;
        check(affine_equivalent(&slice, &p).map_err(to_err)?.is_some(), || "slice at 𝟏 differs from input".into())?;
        checked += 1;
        if p.dim() == 2 && p.num_facets() == 4 {
            let nf = normalize_quadrilateral(&p).map_err(to_err)?;
            let again = normalize_quadrilateral(&model_square(&nf.r).map_err(to_err)?).map_err(to_err)?;
            check(again.r == nf.r && again.reeb == AffineFunction::one(2), || {
                format!("normal form moved: {:?}", nf.r)
            })?;
            quads += 1;
        }
    }
    for v in [[7, 1, 7, 1], [2, 3, 4, 5], [5, 4, 3, 2], [1, 2, 3, 4]] {
        let rs = v.map(|x| q(x, 1));
        let nf = normalize_quadrilateral(&model_square(&rs).map_err(to_err)?).map_err(to_err)?;
        let again = normalize_quadrilateral(&model_square(&nf.r).map_err(to_err)?).map_err(to_err)?;
        check(again.r == nf.r, || format!("normal form of {v:?} not idempotent"))?;
        quads += 1;
    }
    Ok(format!("{checked} polytopes round-trip, {quads} quadrilaterals idempotent"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Wang-Ziller reproduction", criterion_1),
        ("root-count bound", criterion_2),
        ("monotone case", criterion_3),
        ("derivative identities", criterion_4),
        ("integration cross-checks", criterion_5),
        ("goodness", criterion_6),
        ("existence", criterion_7),
        ("identity and round-trip", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.2}s] {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.2}s] {reason}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
