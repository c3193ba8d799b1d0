//! Command dispatch for the `reebkit` binary.
//!
//! Every command returns its report as a string (JSON with `"schema": 1`, or
//! CSV for `scan`); [`Failure::exit_code`] gives the process status.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reebkit::cone::{cone_over, is_good, lattice_from_labels, primitive_in, reeb_chamber, LabeledCone, Lattice};
use reebkit::critical::{
    classify_critical, find_critical, solve_square, solve_square_exact, square_system, CriticalOptions, CriticalReport,
};
use reebkit::document::{ConeDocument, DocumentError, PolytopeDocument};
use reebkit::futaki::{extremal_affine, zeta_on_family};
use reebkit::moments::moments;
use reebkit::quadrilateral::{model_square, normalize_quadrilateral, primitive_square_coefficients, wang_ziller};
use reebkit::scalar::{parse_rational, rational_to_string};
use reebkit::{AffineFunction, Error, LabeledPolytope, Rational, Scalar};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PipelineArg {
    Exact,
    Float,
}

#[derive(Debug, Parser)]
#[command(name = "reebkit", version, about = "Reeb families of labeled polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Input document (polytope JSON, or cone JSON for `goodness`).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub pipeline: PipelineArg,

    /// Newton stopping tolerance on the normalized gradient.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,

    /// Points per axis: seeds for `critical`, samples for `scan`.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Combinatorics, volumes, monotonicity, cone and chamber, goodness.
    Analyze,
    /// Extremal affine function and Futaki covector at the identity Reeb vector.
    Futaki,
    /// Critical Reeb vectors of F by multi-start Newton.
    Critical,
    /// Exact critical points of the model square with parameters r.
    Square {
        #[arg(long, num_args = 4, required = true, allow_hyphen_values = true)]
        r: Vec<String>,
    },
    /// The Wang–Ziller square with r = (p, q, p, q).
    WangZiller {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// CSV samples of W00, Z0 and F over the Reeb chamber.
    Scan,
    /// Goodness of a rational cone.
    Goodness,
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(DocumentError),
    #[error("{0}")]
    Validation(Error),
    #[error("{0}")]
    Search(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Search(_) => 3,
            _ => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SearchExhausted(_)
            | Error::AccuracyNotReached { .. }
            | Error::DegenerateResultant
            | Error::IllConditioned { .. } => Failure::Search(e),
            other => Failure::Validation(other),
        }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        Failure::Parse(e)
    }
}

/// Runs a parsed command line and returns the report text.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    if !(cli.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    if cli.grid == Some(0) {
        return Err(Failure::Usage("--grid must be positive".into()));
    }
    let report = match &cli.command {
        Command::Analyze => by_pipeline(cli, analyze::<Rational>, analyze::<f64>)?,
        Command::Futaki => by_pipeline(cli, futaki::<Rational>, futaki::<f64>)?,
        Command::Critical => by_pipeline(cli, critical::<Rational>, critical::<f64>)?,
        Command::Square { r } => square(r)?,
        Command::WangZiller { p, q } => wang_ziller_report(*p, *q, &critical_options(cli))?,
        Command::Scan => return scan(&polytope_document(cli)?.polytope::<f64>()?, cli.grid.unwrap_or(101)),
        Command::Goodness => goodness(&ConeDocument::parse(&read_input(cli)?)?)?,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    Ok(text)
}

fn read_input(cli: &Cli) -> Result<String, Failure> {
    let path = cli.input.as_ref().ok_or_else(|| Failure::Usage("this command needs --input".into()))?;
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn polytope_document(cli: &Cli) -> Result<PolytopeDocument, Failure> {
    Ok(PolytopeDocument::parse(&read_input(cli)?)?)
}

type Handler<S> = fn(&LabeledPolytope<S>, &PolytopeDocument, &Cli) -> Result<Value, Failure>;

fn by_pipeline(cli: &Cli, exact: Handler<Rational>, float: Handler<f64>) -> Result<Value, Failure> {
    let doc = polytope_document(cli)?;
    let mut report = match cli.pipeline {
        PipelineArg::Exact => exact(&doc.polytope()?, &doc, cli)?,
        PipelineArg::Float => float(&doc.polytope()?, &doc, cli)?,
    };
    report["pipeline"] = json!(match cli.pipeline {
        PipelineArg::Exact => "exact",
        PipelineArg::Float => "float",
    });
    Ok(report)
}

fn header(command: &str) -> Value {
    json!({ "schema": SCHEMA, "command": command })
}

fn row<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn rows<S: Scalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| row(r)).collect())
}

fn critical_options(cli: &Cli) -> CriticalOptions {
    let mut opts = CriticalOptions { newton_tol: cli.tol, ..CriticalOptions::default() };
    if let Some(g) = cli.grid {
        opts.grid = g;
    }
    opts
}

fn analyze<S: Scalar>(p: &LabeledPolytope<S>, doc: &PolytopeDocument, _cli: &Cli) -> Result<Value, Failure> {
    let mut out = header("analyze");
    out["dim"] = json!(p.dim());
    out["normals"] = rows(p.normals());
    out["offsets"] = row(p.offsets());
    out["vertices"] = rows(p.vertices());
    out["facets"] = json!(p.facets());
    out["volume"] = p.volume().to_json();
    out["facet_measures"] = row(&(0..p.num_facets()).map(|l| p.facet_measure(l)).collect::<Vec<_>>());
    out["vertex_barycenter"] = row(&p.vertex_barycenter());
    out["monotone"] = match p.is_monotone() {
        Some((center, level)) => json!({ "center": row(&center), "level": level.to_json() }),
        None => Value::Null,
    };
    let cone = cone_over(p);
    out["cone"] = json!({ "labels": rows(cone.labels()) });
    out["chamber"] = match reeb_chamber(p) {
        Ok(ch) => json!({ "corners": rows(&ch.corners) }),
        Err(Error::OriginNotInterior) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let m = moments(p, &AffineFunction::one(p.dim()))?;
    let (w00, z0) = (m.w[0][0].clone(), m.z[0].clone());
    let f = (0..p.dim()).fold(z0.clone(), |acc, _| acc * z0.clone() / w00.clone());
    out["at_identity"] = json!({ "W00": w00.to_json(), "Z0": z0.to_json(), "F": f.to_json() });
    if let Some(lattice) = doc.lattice()? {
        out["goodness"] = goodness_of(&exact_cone(&cone)?, &lattice)?;
    }
    Ok(out)
}

fn exact_cone<S: Scalar>(cone: &LabeledCone<S>) -> Result<LabeledCone<Rational>, Failure> {
    let labels = cone
        .labels()
        .iter()
        .map(|l| l.iter().map(Scalar::as_rational).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::IrrationalLabels)?;
    Ok(LabeledCone::new(labels)?)
}

fn futaki<S: Scalar>(p: &LabeledPolytope<S>, _doc: &PolytopeDocument, _cli: &Cli) -> Result<Value, Failure> {
    let data = extremal_affine(p)?;
    let mut out = header("futaki");
    out["zeta"] = row(&data.zeta.coefficients());
    out["futaki"] = row(&data.futaki);
    out["zeta_constant"] = json!(data.zeta_is_constant());
    out["futaki_vanishes"] = json!(data.futaki_vanishes());
    out["verdict"] = json!(if data.zeta_is_constant() { "constant" } else { "non-constant" });
    out["details"] = data.to_json();
    Ok(out)
}

fn critical<S: Scalar>(p: &LabeledPolytope<S>, _doc: &PolytopeDocument, cli: &Cli) -> Result<Value, Failure> {
    let report = find_critical(p, &critical_options(cli))?;
    let mut out = header("critical");
    out["report"] = report.to_json();
    out["classes"] = json!(classify_critical(p, &report)?);
    if p.dim() == 2 && p.num_facets() == 4 {
        let nf = normalize_quadrilateral(p)?;
        out["square_normal_form"] = nf.to_json();
        if let Some(r) = nf.r.iter().map(Scalar::as_rational).collect::<Option<Vec<_>>>() {
            let r: [Rational; 4] = r.try_into().expect("four entries");
            let sys = square_system(&r)?;
            let solution = solve_square(&sys);
            out["square_roots"] = Value::Array(solution.roots.iter().map(|x| x.to_json()).collect());
            if let Some(w) = solution.warning {
                out["warning"] = json!(w);
            }
        }
    }
    Ok(out)
}

fn square(r: &[String]) -> Result<Value, Failure> {
    let parsed = r
        .iter()
        .map(|t| parse_rational(t).map_err(|e| Failure::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let r: [Rational; 4] = parsed.try_into().map_err(|_| Failure::Usage("--r takes four values".into()))?;
    let sys = square_system(&r)?;
    let solution = solve_square(&sys);
    let rf: [f64; 4] = std::array::from_fn(|i| Scalar::to_f64(&r[i]));
    let model = model_square(&rf)?;
    let mut roots = Vec::new();
    for root in &solution.roots {
        let [b1, b2] = root.b();
        let zeta = zeta_on_family(&model, &AffineFunction::new(1.0, vec![b1, b2]))?;
        let mut v = root.to_json();
        v["F"] = json!(sys.f_value(root.a1, root.a2));
        v["zeta"] = row(&zeta.zeta.coefficients());
        v["zeta_constant"] = json!(zeta.zeta_is_constant());
        roots.push(v);
    }
    let mut out = header("square");
    out["r"] = json!(r.iter().map(rational_to_string).collect::<Vec<_>>());
    out["K"] = json!(rational_to_string(&sys.k));
    out["variables"] = json!(["x = a1", "y = a2"]);
    out["P"] = json!(sys.p.to_string());
    out["Q"] = json!(sys.q.to_string());
    out["roots"] = Value::Array(roots);
    out["warning"] = solution.warning.map_or(Value::Null, Value::from);
    Ok(out)
}

/// Goodness, exact and numeric critical points, their classes, and whether
/// the square carries two non-equivalent critical rays.
pub fn wang_ziller_report(p: u64, q: u64, opts: &CriticalOptions) -> Result<Value, Failure> {
    let wz = wang_ziller(p, q)?;
    let r = [p, q, p, q].map(|x| Rational::from_integer(x.into()));
    let sys = square_system(&r)?;
    let exact = solve_square_exact(&sys)?;
    let report: CriticalReport = find_critical(&wz.polytope, opts)?;
    let classes = classify_critical(&wz.polytope, &report)?;
    let mut points = Vec::new();
    for e in &report.entries {
        let nearest = exact
            .iter()
            .map(|root| {
                let b = root.b();
                ((b[0] - e.chamber[0]).hypot(b[1] - e.chamber[1]), root)
            })
            .min_by(|x, y| x.0.total_cmp(&y.0));
        points.push(json!({
            "b": e.chamber,
            "reeb": e.reeb.coefficients(),
            "F": e.f_value,
            "gradient_norm": e.gradient_norm,
            "zeta": e.zeta.zeta.coefficients(),
            "zeta_constant": e.zeta.zeta_is_constant(),
            "exact_match": nearest.map(|(d, root)| json!({ "distance": d, "root": root.to_json() })),
        }));
    }
    let mut out = header("wang-ziller");
    out["p"] = json!(p);
    out["q"] = json!(q);
    out["r"] = json!([p, q, p, q]);
    out["lattice_basis"] = rows(wz.lattice.basis());
    out["good"] = json!(wz.good);
    out["a"] = json!(wz.a);
    out["expected"] = json!(wz.expected);
    out["exact_roots"] = Value::Array(exact.iter().map(|x| x.to_json()).collect());
    out["critical_points"] = Value::Array(points);
    out["classes"] = json!(classes);
    out["two_rays"] = json!(wz.good && classes.len() >= 2);
    out["stats"] = serde_json::to_value(&report.stats).expect("stats serialize");
    Ok(out)
}

/// CSV rows `b₁..b_n, W00, Z0, F` on a `grid`ⁿ lattice over the chamber's
/// bounding box, keeping only points clear of the walls.
pub fn scan(p: &LabeledPolytope<f64>, grid: usize) -> Result<String, Failure> {
    let chamber = reeb_chamber(p)?;
    let (lo, hi) = chamber.bounding_box();
    let n = p.dim();
    let mut text: String = (1..=n).map(|i| format!("b{i},")).collect();
    text.push_str("W00,Z0,F\n");
    let total = grid.checked_pow(n as u32).ok_or_else(|| Failure::Usage("grid too large".into()))?;
    let step = |j: usize, k: usize| {
        if grid == 1 {
            0.5 * (lo[j] + hi[j])
        } else {
            lo[j] + (hi[j] - lo[j]) * k as f64 / (grid - 1) as f64
        }
    };
    for idx in 0..total {
        let mut rest = idx;
        let beta: Vec<f64> = (0..n)
            .map(|j| {
                let k = rest % grid;
                rest /= grid;
                step(j, k)
            })
            .collect();
        if !chamber.contains(&beta) {
            continue;
        }
        let m = match moments(p, &chamber.reeb(&beta)) {
            Ok(m) => m,
            Err(Error::ChamberBoundaryProximity { .. } | Error::ReebNotPositive) => continue,
            Err(e) => return Err(e.into()),
        };
        let (w00, z0) = (m.w[0][0], m.z[0]);
        let f = z0.powi(n as i32 + 1) / w00.powi(n as i32);
        for b in &beta {
            text.push_str(&format!("{b},"));
        }
        text.push_str(&format!("{w00},{z0},{f}\n"));
    }
    Ok(text)
}

fn goodness(doc: &ConeDocument) -> Result<Value, Failure> {
    let cone = doc.cone()?;
    let lattice = match doc.lattice()? {
        Some(l) => l,
        None => lattice_from_labels(&cone)?.ok_or_else(|| Error::InvalidInput("labels do not span".into()))?,
    };
    let mut out = header("goodness");
    let report = goodness_of(&cone, &lattice)?;
    for (k, v) in report.as_object().expect("object") {
        out[k] = v.clone();
    }
    Ok(out)
}

fn goodness_of(cone: &LabeledCone<Rational>, lattice: &Lattice) -> Result<Value, Failure> {
    let primitive: Vec<Vec<String>> =
        cone.labels().iter().map(|l| primitive_in(lattice, l).iter().map(|x| x.to_string()).collect()).collect();
    let mut out = json!({
        "good": is_good(cone, lattice)?,
        "lattice_basis": rows(lattice.basis()),
        "primitive_normals": primitive,
    });
    if cone.dim() == 3 && cone.labels().len() == 4 {
        if let Ok(c) = primitive_square_coefficients(cone, lattice) {
            out["square_coefficients"] = json!(c);
            out["lcm_criterion"] = json!(reebkit::cone::is_good_quadcone(c));
        }
    }
    Ok(out)
}
