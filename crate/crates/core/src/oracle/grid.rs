use rayon::prelude::*;
use serde::Serialize;

use crate::degree;
use crate::error::{Error, Result};
use crate::function::PlFunction;
use crate::linalg::RVector;
use crate::rational::Rational;

/// Per-coordinate closed ranges `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GridBox {
    pub ranges: Vec<(Rational, Rational)>,
}

impl GridBox {
    pub fn cube(n: usize, lo: Rational, hi: Rational) -> Self {
        GridBox {
            ranges: vec![(lo, hi); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    /// Grid points `lo + k·step ≤ hi` in every coordinate, last coordinate
    /// varying fastest.
    pub fn points(&self, step: &Rational) -> Result<Vec<RVector>> {
        if !step.is_positive() {
            return Err(Error::Invalid("grid resolution must be positive".into()));
        }
        let axes: Vec<Vec<Rational>> = self
            .ranges
            .iter()
            .map(|(lo, hi)| {
                if lo > hi {
                    return Err(Error::Invalid(format!("empty range [{lo}, {hi}]")));
                }
                let mut axis = Vec::new();
                let mut t = lo.clone();
                while t <= *hi {
                    axis.push(t.clone());
                    t += step;
                }
                Ok(axis)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Rational>| {
                    axis.iter().map(move |t| {
                        let mut p = prefix.clone();
                        p.push(t.clone());
                        p
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(RVector::new).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    #[serde(rename = "box")]
    pub bounds: GridBox,
    pub resolution: Rational,
    pub targets: usize,
    /// Targets with no preimage at all.
    pub uncovered_targets: Vec<RVector>,
    pub all_covered: bool,
    /// Fewest and most preimages over regular targets.
    pub min_preimage_count: Option<usize>,
    pub max_preimage_count: Option<usize>,
    pub irregular_targets: usize,
}

/// Solves for the exact preimages of every grid target in `grid`.
pub fn grid_surjectivity_oracle(
    f: &PlFunction,
    grid: &GridBox,
    resolution: &Rational,
) -> Result<OracleReport> {
    if grid.dim() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: grid.dim(),
        });
    }
    let targets = grid.points(resolution)?;
    let results = targets
        .par_iter()
        .map(|y| degree::analyze(f, y))
        .collect::<Result<Vec<_>>>()?;
    let mut uncovered = Vec::new();
    let mut counts = Vec::new();
    let mut irregular = 0;
    for (y, (pre, report)) in targets.iter().zip(&results) {
        if pre.is_empty() {
            uncovered.push(y.clone());
        }
        if report.regular {
            counts.push(pre.points.len());
        } else {
            irregular += 1;
        }
    }
    Ok(OracleReport {
        bounds: grid.clone(),
        resolution: resolution.clone(),
        targets: targets.len(),
        all_covered: uncovered.is_empty(),
        uncovered_targets: uncovered,
        min_preimage_count: counts.iter().copied().min(),
        max_preimage_count: counts.iter().copied().max(),
        irregular_targets: irregular,
    })
}
