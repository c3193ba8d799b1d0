//! Labeled polytopes: half-space presentation, vertex enumeration, faces,
//! triangulations, facet measures, monotonicity and affine equivalence.

mod equivalence;
mod measure;

use std::collections::{BTreeSet, HashMap};

pub use equivalence::{affine_equivalent, AffineMap};
pub use measure::FacetChart;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{factorial, Scalar};

/// `μ ↦ constant + ⟨linear, μ⟩`. Reeb vectors, defining functions and the
/// extremal affine function all live here.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFunction<S> {
    pub constant: S,
    pub linear: Vec<S>,
}

impl<S: Scalar> AffineFunction<S> {
    pub fn new(constant: S, linear: Vec<S>) -> Self {
        Self { constant, linear }
    }

    /// The constant function `𝟏` on an `n`-dimensional space.
    pub fn one(n: usize) -> Self {
        Self::new(S::one(), vec![S::zero(); n])
    }

    /// `(constant, linear...)`, i.e. coordinates in the basis `(𝟏, μ_1, …, μ_n)`.
    pub fn from_coefficients(c: &[S]) -> Self {
        Self::new(c[0].clone(), c[1..].to_vec())
    }

    pub fn coefficients(&self) -> Vec<S> {
        let mut c = Vec::with_capacity(self.linear.len() + 1);
        c.push(self.constant.clone());
        c.extend(self.linear.iter().cloned());
        c
    }

    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn eval(&self, mu: &[S]) -> S {
        self.constant.clone() + linalg::dot(&self.linear, mu)
    }

    pub fn scaled(&self, r: &S) -> Self {
        Self::new(self.constant.clone() * r.clone(), linalg::scaled(&self.linear, r))
    }

    pub fn to_f64(&self) -> AffineFunction<f64> {
        AffineFunction::new(self.constant.to_f64(), self.linear.iter().map(S::to_f64).collect())
    }
}

/// A simplex given by vertex indices together with its measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Simplex<S> {
    pub vertices: Vec<usize>,
    pub measure: S,
}

/// A simple compact polytope `Δ = {L_i ≥ 0}` with `L_i = ⟨·, u_i⟩ + λ_i`.
///
/// Vertices, facet incidences, a triangulation of `Δ` and of every facet, and
/// the boundary measure `dσ` (fixed by `u_l ∧ dσ = −dϖ`) are computed once at
/// construction.
#[derive(Clone, Debug)]
pub struct LabeledPolytope<S> {
    dim: usize,
    normals: Vec<Vec<S>>,
    offsets: Vec<S>,
    vertices: Vec<Vec<S>>,
    vertex_facets: Vec<Vec<usize>>,
    facets: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    simplices: Vec<Simplex<S>>,
    facet_simplices: Vec<Vec<Simplex<S>>>,
    charts: Vec<FacetChart<S>>,
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Whether the cone `{r : ⟨u_i, r⟩ ≥ 0 ∀i}` has an extreme ray. Its rays are
/// kernels of `n − 1` of the normals, given by generalized cross products.
fn has_recession_direction<S: Scalar>(normals: &[Vec<S>]) -> bool {
    let n = normals[0].len();
    let scale = normals.iter().map(|u| S::max_abs(u)).fold(0.0, f64::max);
    combinations(normals.len(), n - 1).into_iter().any(|subset| {
        let ray: Vec<S> = (0..n)
            .map(|j| {
                let minor: Matrix<S> = subset
                    .iter()
                    .map(|&i| normals[i].iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let det = if minor.is_empty() { S::one() } else { linalg::determinant(&minor) };
                if j % 2 == 0 {
                    det
                } else {
                    -det
                }
            })
            .collect();
        let ray_scale = scale * S::max_abs(&ray).max(1.0);
        if ray.iter().all(|x| x.is_negligible(ray_scale)) {
            return false;
        }
        [S::one(), -S::one()].iter().any(|sign| {
            normals.iter().all(|u| {
                let value = linalg::dot(u, &ray) * sign.clone();
                value.is_positive() || value.is_negligible(ray_scale)
            })
        })
    })
}

fn format_point<S: Scalar>(p: &[S]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl<S: Scalar> LabeledPolytope<S> {
    /// Builds the polytope `{μ : ⟨μ, u_i⟩ + λ_i ≥ 0}` by solving every
    /// `n`-subset of facet equations.
    pub fn from_halfspaces(normals: Vec<Vec<S>>, offsets: Vec<S>) -> Result<Self> {
        let d = normals.len();
        if d == 0 {
            return Err(Error::InvalidInput("no half-spaces given".into()));
        }
        if offsets.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: offsets.len() });
        }
        let n = normals[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if let Some(bad) = normals.iter().find(|u| u.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        if normals.iter().any(|u| u.iter().all(|x| x.is_negligible(S::max_abs(u)))) {
            return Err(Error::InvalidInput("zero normal vector".into()));
        }
        if d <= n || linalg::rank(&normals) < n || has_recession_direction(&normals) {
            return Err(Error::UnboundedRegion);
        }

        let mut points: Vec<Vec<S>> = Vec::new();
        let mut tight_sets: Vec<Vec<usize>> = Vec::new();
        for subset in combinations(d, n) {
            let m: Matrix<S> = subset.iter().map(|&i| normals[i].clone()).collect();
            let rhs: Vec<S> = subset.iter().map(|&i| -offsets[i].clone()).collect();
            let Some(x) = linalg::solve(&m, &rhs) else { continue };
            let mut tight = Vec::new();
            let mut feasible = true;
            for i in 0..d {
                let value = offsets[i].clone() + linalg::dot(&normals[i], &x);
                let scale = offsets[i].to_f64().abs()
                    + normals[i].iter().zip(&x).map(|(a, b)| (a.to_f64() * b.to_f64()).abs()).sum::<f64>();
                if value.is_negligible(scale) {
                    tight.push(i);
                } else if value.is_negative() {
                    feasible = false;
                    break;
                }
            }
            if feasible && !tight_sets.contains(&tight) {
                points.push(x);
                tight_sets.push(tight);
            }
        }
        if points.is_empty() {
            return Err(Error::EmptyInterior);
        }
        let spread: Matrix<S> = points.iter().map(|p| linalg::sub(p, &points[0])).collect();
        if linalg::rank(&spread) < n {
            return Err(Error::EmptyInterior);
        }
        if let Some(i) = tight_sets.iter().position(|t| t.len() > n) {
            return Err(Error::NonSimpleVertex { point: format_point(&points[i]), count: tight_sets[i].len() });
        }
        for l in 0..d {
            if tight_sets.iter().filter(|t| t.contains(&l)).count() < n {
                return Err(Error::RedundantHalfspace { facet: l });
            }
        }
        Ok(Self::assemble(normals, offsets, points, tight_sets))
    }

    /// Computes all derived data from a vertex list with known facet incidences.
    fn assemble(normals: Vec<Vec<S>>, offsets: Vec<S>, vertices: Vec<Vec<S>>, vertex_facets: Vec<Vec<usize>>) -> Self {
        let n = normals[0].len();
        let d = normals.len();
        let facets: Vec<Vec<usize>> =
            (0..d).map(|l| (0..vertices.len()).filter(|&v| vertex_facets[v].contains(&l)).collect()).collect();
        let mut edges = Vec::new();
        for a in 0..vertices.len() {
            for b in a + 1..vertices.len() {
                let shared = vertex_facets[a].iter().filter(|l| vertex_facets[b].contains(l)).count();
                if shared + 1 == n {
                    edges.push((a, b));
                }
            }
        }
        let mut polytope = Self {
            dim: n,
            normals,
            offsets,
            vertices,
            vertex_facets,
            facets,
            edges,
            simplices: Vec::new(),
            facet_simplices: Vec::new(),
            charts: Vec::new(),
        };
        let mut memo = HashMap::new();
        let interior = polytope.triangulate_face(&[], &mut memo);
        let nfact: S = factorial(n);
        polytope.simplices = interior
            .into_iter()
            .map(|verts| {
                let m: Matrix<S> = verts[1..]
                    .iter()
                    .map(|&v| linalg::sub(&polytope.vertices[v], &polytope.vertices[verts[0]]))
                    .collect();
                let measure = linalg::determinant(&m).abs() / nfact.clone();
                Simplex { vertices: verts, measure }
            })
            .collect();
        polytope.facet_simplices = (0..d)
            .map(|l| {
                polytope
                    .triangulate_face(&[l], &mut memo)
                    .into_iter()
                    .map(|verts| {
                        let measure = polytope.facet_simplex_measure(l, &verts);
                        Simplex { vertices: verts, measure }
                    })
                    .collect()
            })
            .collect();
        polytope.charts = (0..d).map(|l| FacetChart::new(&polytope.normals[l], &polytope.offsets[l])).collect();
        polytope
    }

    /// Pulling triangulation of the face `∩_{i∈face} F_i`: cone the smallest
    /// vertex over the triangulations of the faces of codimension one not
    /// containing it.
    fn triangulate_face(&self, face: &[usize], memo: &mut HashMap<Vec<usize>, Vec<Vec<usize>>>) -> Vec<Vec<usize>> {
        if let Some(done) = memo.get(face) {
            return done.clone();
        }
        let verts: Vec<usize> =
            (0..self.vertices.len()).filter(|&v| face.iter().all(|l| self.vertex_facets[v].contains(l))).collect();
        let result = if verts.len() == 1 {
            vec![verts]
        } else {
            let apex = verts[0];
            let mut out = Vec::new();
            for j in 0..self.normals.len() {
                if face.contains(&j) || self.vertex_facets[apex].contains(&j) {
                    continue;
                }
                if !verts.iter().any(|&v| self.vertex_facets[v].contains(&j)) {
                    continue;
                }
                let mut sub: Vec<usize> = face.to_vec();
                sub.push(j);
                sub.sort_unstable();
                for s in self.triangulate_face(&sub, memo) {
                    let mut simplex = Vec::with_capacity(s.len() + 1);
                    simplex.push(apex);
                    simplex.extend(s);
                    out.push(simplex);
                }
            }
            out
        };
        memo.insert(face.to_vec(), result.clone());
        result
    }

    /// σ-measure of an `(n−1)`-simplex on facet `l`: coning it from any point
    /// `p` off the facet gives an `n`-simplex of volume `σ · |L_l(p)| / n`.
    fn facet_simplex_measure(&self, l: usize, verts: &[usize]) -> S {
        let n = self.dim;
        let p = (0..self.vertices.len())
            .find(|&v| !self.vertex_facets[v].contains(&l))
            .expect("a facet never contains every vertex");
        let base = &self.vertices[verts[0]];
        let mut m: Matrix<S> = verts[1..].iter().map(|&v| linalg::sub(&self.vertices[v], base)).collect();
        m.push(linalg::sub(&self.vertices[p], base));
        let height = self.label(l).eval(&self.vertices[p]);
        linalg::determinant(&m).abs() / (factorial::<S>(n - 1) * height.abs())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_facets(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[Vec<S>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[S] {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    /// Vertex indices on each facet.
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// The `n` facets through each vertex, ascending.
    pub fn vertex_facets(&self) -> &[Vec<usize>] {
        &self.vertex_facets
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Triangulation of `Δ` with Lebesgue volumes.
    pub fn simplices(&self) -> &[Simplex<S>] {
        &self.simplices
    }

    /// Triangulation of facet `l` with σ-measures.
    pub fn facet_simplices(&self, l: usize) -> &[Simplex<S>] {
        &self.facet_simplices[l]
    }

    pub fn facet_chart(&self, l: usize) -> &FacetChart<S> {
        &self.charts[l]
    }

    /// The defining function `L_l`.
    pub fn label(&self, l: usize) -> AffineFunction<S> {
        AffineFunction::new(self.offsets[l].clone(), self.normals[l].clone())
    }

    pub fn volume(&self) -> S {
        self.simplices.iter().fold(S::zero(), |acc, s| acc + s.measure.clone())
    }

    /// σ-measure of facet `l`.
    pub fn facet_measure(&self, l: usize) -> S {
        self.facet_simplices[l].iter().fold(S::zero(), |acc, s| acc + s.measure.clone())
    }

    pub fn vertex_barycenter(&self) -> Vec<S> {
        let count = S::from_int(self.vertices.len() as i64);
        let mut c = vec![S::zero(); self.dim];
        for v in &self.vertices {
            c = linalg::add(&c, v);
        }
        c.into_iter().map(|x| x / count.clone()).collect()
    }

    /// Strict interior test: every `L_l(μ) > 0`.
    pub fn contains_in_interior(&self, mu: &[S]) -> bool {
        (0..self.num_facets()).all(|l| {
            let value = self.label(l).eval(mu);
            value.is_clearly_positive(S::max_abs(&self.normals[l]).max(self.offsets[l].to_f64().abs()))
        })
    }

    /// The polytope `Δ + t` with `L_l(· − t)` as labels.
    pub fn translate(&self, t: &[S]) -> Self {
        let offsets = self.offsets.iter().zip(&self.normals).map(|(lam, u)| lam.clone() - linalg::dot(u, t)).collect();
        let vertices = self.vertices.iter().map(|v| linalg::add(v, t)).collect();
        Self::assemble(self.normals.clone(), offsets, vertices, self.vertex_facets.clone())
    }

    /// `λΔ` with the same normals, offsets multiplied by `λ`.
    pub fn scale(&self, lambda: &S) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::NonPositiveScale);
        }
        let offsets = self.offsets.iter().map(|x| x.clone() * lambda.clone()).collect();
        let vertices = self.vertices.iter().map(|v| linalg::scaled(v, lambda)).collect();
        Ok(Self::assemble(self.normals.clone(), offsets, vertices, self.vertex_facets.clone()))
    }

    /// Same combinatorics over `f64`.
    pub fn to_f64(&self) -> LabeledPolytope<f64> {
        let conv = |m: &[Vec<S>]| -> Vec<Vec<f64>> { m.iter().map(|r| r.iter().map(S::to_f64).collect()).collect() };
        LabeledPolytope::assemble(
            conv(&self.normals),
            self.offsets.iter().map(S::to_f64).collect(),
            conv(&self.vertices),
            self.vertex_facets.clone(),
        )
    }

    /// A point `μ` in the interior with `L_l(μ) = c > 0` for every `l`.
    pub fn is_monotone(&self) -> Option<(Vec<S>, S)> {
        let n = self.dim;
        let m: Matrix<S> = self
            .normals
            .iter()
            .map(|u| {
                let mut row = u.clone();
                row.push(-S::one());
                row
            })
            .collect();
        let rhs: Vec<S> = self.offsets.iter().map(|x| -x.clone()).collect();
        let sol = linalg::solve(&m, &rhs)?;
        let c = sol[n].clone();
        let scale = S::max_abs(&self.offsets);
        if !c.is_clearly_positive(scale) {
            return None;
        }
        Some((sol[..n].to_vec(), c))
    }

    /// Non-empty faces other than `Δ` itself, as sorted facet-index sets.
    pub fn proper_faces(&self) -> Vec<Vec<usize>> {
        let mut faces = BTreeSet::new();
        for vf in &self.vertex_facets {
            for k in 1..=vf.len() {
                for subset in combinations(vf.len(), k) {
                    faces.insert(subset.iter().map(|&i| vf[i]).collect::<Vec<_>>());
                }
            }
        }
        faces.into_iter().collect()
    }
}
