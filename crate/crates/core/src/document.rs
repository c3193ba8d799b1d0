//! JSON input documents for polytopes and cones.
//!
//! Numbers are JSON numbers or strings such as `"3/7"`; both are read as exact
//! rationals (a JSON number by its decimal text), then converted to the
//! pipeline's scalar.

use serde::Deserialize;

use crate::cone::{LabeledCone, Lattice};
use crate::error::{Error, Result};
use crate::geometry::LabeledPolytope;
use crate::scalar::{parse_rational, Rational, Scalar};

/// A syntax or shape error with its position in the document.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct DocumentError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        let text = e.to_string();
        let message = match text.rfind(" at line ") {
            Some(i) => text[..i].to_string(),
            None => text,
        };
        Self { line: e.line(), column: e.column(), message }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Text(String),
    Json(serde_json::Number),
}

impl Number {
    pub fn to_rational(&self) -> Result<Rational> {
        let text = match self {
            Number::Text(t) => t.clone(),
            Number::Json(n) => n.to_string(),
        };
        parse_rational(&text).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

fn vector(v: &[Number]) -> Result<Vec<Rational>> {
    v.iter().map(Number::to_rational).collect()
}

fn matrix(m: &[Vec<Number>]) -> Result<Vec<Vec<Rational>>> {
    m.iter().map(|r| vector(r)).collect()
}

fn convert<S: Scalar>(m: &[Vec<Rational>]) -> Vec<Vec<S>> {
    m.iter().map(|r| r.iter().map(S::from_rational).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    pub dim: usize,
    pub normals: Vec<Vec<Number>>,
    pub offsets: Vec<Number>,
    #[serde(default)]
    pub vertices: Option<Vec<Vec<Number>>>,
    #[serde(default)]
    pub facets: Option<Vec<Vec<usize>>>,
    /// Columns span the lattice in the cone space `(𝟏, μ)`.
    #[serde(default)]
    pub lattice_basis: Option<Vec<Vec<Number>>>,
}

impl PolytopeDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builds the polytope; supplied vertices and facet incidences must agree
    /// with the ones computed from the half-spaces.
    pub fn polytope<S: Scalar>(&self) -> Result<LabeledPolytope<S>> {
        let normals = matrix(&self.normals)?;
        let offsets = vector(&self.offsets)?;
        if normals.len() != offsets.len() {
            return Err(Error::InvalidInput(format!("{} normals but {} offsets", normals.len(), offsets.len())));
        }
        if let Some(bad) = normals.iter().find(|u| u.len() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: bad.len() });
        }
        let p =
            LabeledPolytope::from_halfspaces(convert::<S>(&normals), offsets.iter().map(S::from_rational).collect())?;
        if let Some(vertices) = &self.vertices {
            let given: Vec<Vec<S>> = convert(&matrix(vertices)?);
            let scale = p.vertices().iter().map(|v| S::max_abs(v)).fold(1.0, f64::max);
            let same =
                |a: &[S], b: &[S]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| crate::scalar::near(x, y, scale));
            let found =
                given.len() == p.vertices().len() && given.iter().all(|v| p.vertices().iter().any(|w| same(v, w)));
            if !found {
                return Err(Error::InvalidInput("listed vertices disagree with the half-spaces".into()));
            }
            if let Some(facets) = &self.facets {
                if facets.len() != p.num_facets() {
                    return Err(Error::InvalidInput("facet list has the wrong length".into()));
                }
                for (l, f) in facets.iter().enumerate() {
                    let mut listed: Vec<Vec<S>> = Vec::new();
                    for &i in f {
                        let v = given
                            .get(i)
                            .ok_or_else(|| Error::InvalidInput(format!("vertex index {i} out of range")))?;
                        listed.push(v.clone());
                    }
                    let ok = listed.len() == p.facets()[l].len()
                        && listed.iter().all(|v| p.facets()[l].iter().any(|&w| same(v, &p.vertices()[w])));
                    if !ok {
                        return Err(Error::InvalidInput(format!("facet {l} incidences disagree with the half-spaces")));
                    }
                }
            }
        }
        Ok(p)
    }

    pub fn lattice(&self) -> Result<Option<Lattice>> {
        self.lattice_basis.as_ref().map(|b| Lattice::new(matrix(b)?)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDocument {
    pub labels: Vec<Vec<Number>>,
    #[serde(default)]
    pub lattice_basis: Option<Vec<Vec<Number>>>,
}

impl ConeDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn cone(&self) -> Result<LabeledCone<Rational>> {
        LabeledCone::new(matrix(&self.labels)?)
    }

    pub fn lattice(&self) -> Result<Option<Lattice>> {
        self.lattice_basis.as_ref().map(|b| Lattice::new(matrix(b)?)).transpose()
    }
}
