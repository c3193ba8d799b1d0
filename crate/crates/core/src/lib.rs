//! Reeb families of labeled polytopes.
//!
//! Given a labeled polytope (or the labeled cone over it) this crate evaluates
//! the functionals `W` and `Z` along the Reeb chamber, solves for the extremal
//! affine function and the torus-restricted Futaki invariant, locates critical
//! Reeb vectors of `F = Z0^(n+1) / W00^n`, and treats quadrilaterals exactly:
//! square normal form, the critical polynomial system, lattice goodness.
//!
//! Two pipelines share all code through [`Scalar`]: exact arithmetic over
//! [`Rational`] and floating point over `f64`.

pub mod cone;
pub mod critical;
pub mod document;
pub mod error;
pub mod futaki;
pub mod geometry;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod quadrilateral;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{AffineFunction, LabeledPolytope};
pub use scalar::{Pipeline, Rational, Scalar};
