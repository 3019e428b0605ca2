//! Exact analysis of piecewise affine maps `F: R^n → R^n`.
//!
//! A map is given by a polyhedral subdivision of the domain together with an
//! affine selection `x ↦ A x + b` per cell. All arithmetic is over exact
//! rationals: linear programs are solved by a rational simplex, and every
//! sign decision (determinants, containment, boundedness) is exact.
//!
//! The main entry points are [`PlFunction::validate`], the degree routines in
//! [`degree`], and the surjectivity certificate in [`certify`].

pub mod certify;
pub mod degree;
pub mod error;
pub mod function;
pub mod linalg;
mod lp;
pub mod oracle;
pub mod plane;
pub mod polyhedron;
pub mod rational;

pub use error::{Error, Result};
pub use function::{Cell, Finding, PlFunction, Selection, ValidationReport};
pub use linalg::{AffineSolution, RMatrix, RVector};
pub use polyhedron::{Facet, HPolyhedron, Halfspace, LpResult, Sense};
pub use rational::{q, Rational, Sign};
