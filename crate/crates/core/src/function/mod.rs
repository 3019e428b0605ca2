//! Piecewise affine functions given by a polyhedral subdivision of `R^n` and
//! one affine selection per cell.

mod validate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RMatrix, RVector};
use crate::polyhedron::{HPolyhedron, LpResult, Sense};
use crate::rational::{Rational, Sign};

pub use validate::{Finding, ValidationReport};

/// The affine map `x ↦ A x + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    #[serde(rename = "A")]
    pub a: RMatrix,
    pub b: RVector,
}

impl Selection {
    pub fn new(a: RMatrix, b: RVector) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if b.dim() != a.rows() {
            return Err(Error::Dimension {
                expected: a.rows(),
                got: b.dim(),
            });
        }
        Ok(Selection { a, b })
    }

    pub fn linear(a: RMatrix) -> Result<Self> {
        let n = a.rows();
        Selection::new(a, RVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn apply(&self, x: &RVector) -> Result<RVector> {
        Ok(self.a.mul_vec(x)?.add(&self.b))
    }

    pub fn det_sign(&self) -> Sign {
        self.a.det_sign().expect("selection matrices are square")
    }

    /// Output coordinate `j` as a linear functional plus constant.
    fn coordinate(&self, j: usize) -> (RVector, Rational) {
        (RVector::new(self.a.row(j).to_vec()), self.b[j].clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub polyhedron: HPolyhedron,
    pub selection: usize,
}

#[derive(Deserialize)]
struct RawFunction {
    n: usize,
    selections: Vec<Selection>,
    cells: Vec<Cell>,
}

/// A piecewise affine map `R^n → R^n`.
///
/// Analysis operations refuse to run until [`PlFunction::validate`] has
/// accepted the subdivision.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawFunction")]
pub struct PlFunction {
    n: usize,
    selections: Vec<Selection>,
    cells: Vec<Cell>,
    #[serde(skip)]
    validated: bool,
}

impl TryFrom<RawFunction> for PlFunction {
    type Error = Error;
    fn try_from(raw: RawFunction) -> Result<Self> {
        PlFunction::new(raw.n, raw.selections, raw.cells)
    }
}

impl PartialEq for PlFunction {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.selections == other.selections && self.cells == other.cells
    }
}

impl PlFunction {
    /// Structural checks only; call [`validate`](Self::validate) before analysis.
    pub fn new(n: usize, selections: Vec<Selection>, cells: Vec<Cell>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        if cells.is_empty() {
            return Err(Error::Invalid("a subdivision needs at least one cell".into()));
        }
        for (i, s) in selections.iter().enumerate() {
            if s.dim() != n || !s.a.is_square() {
                return Err(Error::Invalid(format!(
                    "selection {i} is not an affine map of R^{n}"
                )));
            }
        }
        for (i, c) in cells.iter().enumerate() {
            if c.polyhedron.dim() != n {
                return Err(Error::Invalid(format!("cell {i} does not live in R^{n}")));
            }
            if c.selection >= selections.len() {
                return Err(Error::Invalid(format!(
                    "cell {i} references missing selection {}",
                    c.selection
                )));
            }
        }
        Ok(PlFunction {
            n,
            selections,
            cells,
            validated: false,
        })
    }

    /// One selection per cell, in cell order.
    pub fn from_pieces(n: usize, pieces: Vec<(HPolyhedron, Selection)>) -> Result<Self> {
        let (polys, selections): (Vec<_>, Vec<_>) = pieces.into_iter().unzip();
        let cells = polys
            .into_iter()
            .enumerate()
            .map(|(i, polyhedron)| Cell {
                polyhedron,
                selection: i,
            })
            .collect();
        PlFunction::new(n, selections, cells)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn selections(&self) -> &[Selection] {
        &self.selections
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell_selection(&self, cell: usize) -> &Selection {
        &self.selections[self.cells[cell].selection]
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    /// Checks the subdivision properties and marks the function validated
    /// when no violation is found.
    pub fn validate(&mut self) -> ValidationReport {
        let report = validate::run(self);
        self.validated = report.ok;
        report
    }

    /// Validates and returns the function, or the failing report.
    pub fn validated(mut self) -> std::result::Result<Self, ValidationReport> {
        let report = self.validate();
        if report.ok {
            Ok(self)
        } else {
            Err(report)
        }
    }

    pub(crate) fn ensure_validated(&self) -> Result<()> {
        if self.validated {
            Ok(())
        } else {
            Err(Error::NotValidated)
        }
    }

    fn check_point(&self, x: &RVector) -> Result<()> {
        if x.dim() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// Indices of every cell containing `x`.
    pub fn locate(&self, x: &RVector) -> Result<Vec<usize>> {
        self.ensure_validated()?;
        self.check_point(x)?;
        Ok(self.locate_unchecked(x))
    }

    pub(crate) fn locate_unchecked(&self, x: &RVector) -> Vec<usize> {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.polyhedron.contains(x).unwrap_or(false))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn evaluate(&self, x: &RVector) -> Result<RVector> {
        self.ensure_validated()?;
        self.check_point(x)?;
        self.evaluate_unchecked(x)
    }

    pub(crate) fn evaluate_unchecked(&self, x: &RVector) -> Result<RVector> {
        let cells = self.locate_unchecked(x);
        let first = *cells
            .first()
            .ok_or_else(|| Error::Inconsistent(format!("no cell contains {x}")))?;
        let y = self.cell_selection(first).apply(x)?;
        #[cfg(debug_assertions)]
        for &c in &cells[1..] {
            debug_assert_eq!(
                self.cell_selection(c).apply(x)?,
                y,
                "selections of cells {first} and {c} disagree at {x}"
            );
        }
        Ok(y)
    }

    /// Bounded cells (polytopes) and unbounded cells, by index.
    pub fn split_cells(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        self.ensure_validated()?;
        let mut bounded = Vec::new();
        let mut unbounded = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.polyhedron.is_bounded()? {
                bounded.push(i);
            } else {
                unbounded.push(i);
            }
        }
        Ok((bounded, unbounded))
    }

    /// `max ‖F(x)‖∞` over the union of bounded cells; zero when there are none.
    pub fn bounded_image_radius(&self) -> Result<Rational> {
        let (bounded, _) = self.split_cells()?;
        let mut r = Rational::zero();
        for i in bounded {
            let poly = &self.cells[i].polyhedron;
            let sel = self.cell_selection(i);
            for j in 0..self.n {
                let (row, offset) = sel.coordinate(j);
                for sense in [Sense::Max, Sense::Min] {
                    match poly.lp_solve(&row, sense)? {
                        LpResult::Optimal { optimum, .. } => {
                            r = r.max((optimum + &offset).abs());
                        }
                        other => {
                            return Err(Error::Inconsistent(format!(
                                "LP over bounded cell {i} returned {other:?}"
                            )))
                        }
                    }
                }
            }
        }
        Ok(r)
    }

    /// Precomposition `x ↦ F(M x)` for an invertible `M`.
    pub fn precompose_linear(&self, m: &RMatrix) -> Result<PlFunction> {
        let inv = m
            .inverse()?
            .ok_or_else(|| Error::Invalid("precomposition matrix is singular".into()))?;
        if inv.rows() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: inv.rows(),
            });
        }
        // {x : a·(Mx) ≤ b} = {x : (Mᵀa)·x ≤ b}
        let mt = m.transpose();
        let cells = self
            .cells
            .iter()
            .map(|c| {
                let hs = c
                    .polyhedron
                    .constraints()
                    .iter()
                    .map(|h| {
                        crate::polyhedron::Halfspace::new(mt.mul_vec(h.normal())?, h.offset().clone())
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Cell {
                    polyhedron: HPolyhedron::new(self.n, hs)?,
                    selection: c.selection,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let selections = self
            .selections
            .iter()
            .map(|s| Selection::new(s.a.mul(m)?, s.b.clone()))
            .collect::<Result<Vec<_>>>()?;
        PlFunction::new(self.n, selections, cells)
    }

    /// Postcomposition `x ↦ L F(x)` for a linear `L`.
    pub fn postcompose_linear(&self, l: &RMatrix) -> Result<PlFunction> {
        let selections = self
            .selections
            .iter()
            .map(|s| Selection::new(l.mul(&s.a)?, l.mul_vec(&s.b)?))
            .collect::<Result<Vec<_>>>()?;
        PlFunction::new(self.n, selections, self.cells.clone())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::polyhedron::Halfspace;
    use crate::rational::q;

    pub(crate) fn ray_left(at: i64) -> HPolyhedron {
        HPolyhedron::new(1, vec![Halfspace::from_ints(&[1], at).unwrap()]).unwrap()
    }

    pub(crate) fn ray_right(at: i64) -> HPolyhedron {
        HPolyhedron::new(1, vec![Halfspace::from_ints(&[-1], -at).unwrap()]).unwrap()
    }

    pub(crate) fn interval(lo: i64, hi: i64) -> HPolyhedron {
        HPolyhedron::new(
            1,
            vec![
                Halfspace::from_ints(&[-1], -lo).unwrap(),
                Halfspace::from_ints(&[1], hi).unwrap(),
            ],
        )
        .unwrap()
    }

    pub(crate) fn affine_1d(slope: i64, intercept: i64) -> Selection {
        Selection::new(
            RMatrix::from_ints(&[&[slope]]).unwrap(),
            RVector::from_ints(&[intercept]),
        )
        .unwrap()
    }

    pub(crate) fn abs_map() -> PlFunction {
        PlFunction::from_pieces(
            1,
            vec![(ray_left(0), affine_1d(-1, 0)), (ray_right(0), affine_1d(1, 0))],
        )
        .unwrap()
        .validated()
        .unwrap()
    }

    pub(crate) fn identity(n: usize) -> PlFunction {
        PlFunction::from_pieces(
            n,
            vec![(
                HPolyhedron::whole_space(n),
                Selection::linear(RMatrix::identity(n)).unwrap(),
            )],
        )
        .unwrap()
        .validated()
        .unwrap()
    }

    fn x1(v: i64) -> RVector {
        RVector::from_ints(&[v])
    }

    #[test]
    fn locate_examples() {
        let f = abs_map();
        assert_eq!(f.locate(&x1(-2)).unwrap(), vec![0]);
        assert_eq!(f.locate(&x1(0)).unwrap(), vec![0, 1]);
        let id = identity(3);
        assert_eq!(id.locate(&RVector::from_ints(&[4, -1, 7])).unwrap(), vec![0]);
        assert!(f.locate(&RVector::from_ints(&[1, 2])).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f = abs_map();
        assert_eq!(f.evaluate(&x1(-2)).unwrap(), x1(2));
        assert_eq!(f.evaluate(&x1(0)).unwrap(), x1(0));
    }

    #[test]
    fn unvalidated_refuses() {
        let f = PlFunction::from_pieces(
            1,
            vec![(ray_left(0), affine_1d(-1, 0)), (ray_right(0), affine_1d(1, 0))],
        )
        .unwrap();
        assert!(matches!(f.evaluate(&x1(1)), Err(Error::NotValidated)));
        assert!(matches!(f.split_cells(), Err(Error::NotValidated)));
    }

    #[test]
    fn split_examples() {
        assert_eq!(abs_map().split_cells().unwrap(), (vec![], vec![0, 1]));
        assert_eq!(identity(2).split_cells().unwrap(), (vec![], vec![0]));
    }

    #[test]
    fn radius_examples() {
        assert_eq!(abs_map().bounded_image_radius().unwrap(), Rational::zero());
        let f = PlFunction::from_pieces(
            1,
            vec![
                (ray_left(0), affine_1d(1, 0)),
                (interval(0, 1), affine_1d(-1, 0)),
                (ray_right(1), affine_1d(1, -2)),
            ],
        )
        .unwrap()
        .validated()
        .unwrap();
        assert_eq!(f.bounded_image_radius().unwrap(), Rational::one());
        assert_eq!(f.split_cells().unwrap(), (vec![1], vec![0, 2]));
        assert_eq!(f.evaluate(&RVector::new(vec![q(1, 2)])).unwrap(), RVector::new(vec![q(-1, 2)]));
    }

    #[test]
    fn structural_errors() {
        let sel = affine_1d(1, 0);
        assert!(PlFunction::new(1, vec![sel.clone()], vec![]).is_err());
        assert!(PlFunction::new(
            1,
            vec![sel],
            vec![Cell {
                polyhedron: ray_left(0),
                selection: 3
            }]
        )
        .is_err());
        let json = r#"{"n": 1, "selections": [{"A": [["1"]], "b": ["0"]}],
                       "cells": [{"polyhedron": {"dim": 2, "constraints": []}, "selection": 0}]}"#;
        assert!(serde_json::from_str::<PlFunction>(json).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = abs_map();
        let s = serde_json::to_string(&f).unwrap();
        let g: PlFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(!g.is_validated());
        assert!(s.contains(r#""A":[["-1"]]"#));
    }
}
