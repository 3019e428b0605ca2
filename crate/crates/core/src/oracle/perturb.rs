use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gen::{gen_1d, GenSpec1D};
use crate::error::{Error, Result};
use crate::function::{Cell, PlFunction};
use crate::linalg::RVector;
use crate::plane::{centroid, interpolate, polygon_vertices, triangle};
use crate::rational::Rational;

#[derive(Clone, Debug, Serialize)]
pub struct Perturbation {
    pub function: PlFunction,
    /// The bounded cell that was refined and re-valued, if any.
    pub cell: Option<usize>,
    pub note: String,
}

/// A nonzero offset with entries in `{-1, -3/4, …, 1}`.
fn nonzero_delta(rng: &mut ChaCha8Rng, n: usize) -> RVector {
    loop {
        let d: RVector = (0..n)
            .map(|_| Rational::new(rng.gen_range(-4..=4), 4).unwrap())
            .collect();
        if !d.is_zero() {
            return d;
        }
    }
}

/// Changes the map on bounded cells only, keeping every unbounded cell and its
/// selection. Supported in dimensions one and two.
pub fn perturb_bounded(f: &PlFunction, seed: u64) -> Result<Perturbation> {
    let (bounded, _) = f.split_cells()?;
    if f.dim() > 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    if bounded.is_empty() {
        return Ok(Perturbation {
            function: f.clone(),
            cell: None,
            note: "no bounded cell; map unchanged".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = bounded[rng.gen_range(0..bounded.len())];
    if f.dim() == 1 {
        perturb_line(f, pick, &mut rng)
    } else {
        perturb_plane(f, pick, &mut rng)
    }
}

/// Re-values the breakpoints strictly between the two rays and adds a new
/// breakpoint at the midpoint of the picked interval.
fn perturb_line(f: &PlFunction, pick: usize, rng: &mut ChaCha8Rng) -> Result<Perturbation> {
    let mut ends = Vec::new();
    let mut split = None;
    for (i, c) in f.cells().iter().enumerate() {
        let (lo, hi) = c.polyhedron.value_range(&RVector::from_ints(&[1]))?;
        if i == pick {
            let (Some(lo), Some(hi)) = (&lo, &hi) else {
                return Err(Error::Inconsistent("bounded cell has an open end".into()));
            };
            split = Some((lo + hi) / Rational::from_int(2));
        }
        ends.extend(lo);
        ends.extend(hi);
    }
    ends.sort();
    ends.dedup();
    let (first, last) = (ends[0].clone(), ends[ends.len() - 1].clone());
    let mid = split.expect("picked cell was visited");
    let mut breakpoints = ends.clone();
    breakpoints.push(mid.clone());
    breakpoints.sort();

    let mut values = Vec::with_capacity(breakpoints.len());
    for t in &breakpoints {
        let v = f.evaluate(&RVector::new(vec![t.clone()]))?[0].clone();
        if *t == first || *t == last {
            values.push(v);
        } else {
            values.push(v + &nonzero_delta(rng, 1)[0]);
        }
    }
    let slope_at = |x: Rational| -> Result<Rational> {
        let cells = f.locate(&RVector::new(vec![x]))?;
        Ok(f.cell_selection(cells[0]).a.row(0)[0].clone())
    };
    let left = slope_at(&first - Rational::one())?;
    let right = slope_at(&last + Rational::one())?;
    let spec = GenSpec1D::from_values(breakpoints, &values, left, right)?;
    Ok(Perturbation {
        function: gen_1d(&spec)?,
        cell: Some(pick),
        note: format!("interior breakpoints re-valued, interval split at {mid}"),
    })
}

/// Stars the picked polygon from its centroid and moves the centroid's image.
fn perturb_plane(f: &PlFunction, pick: usize, rng: &mut ChaCha8Rng) -> Result<Perturbation> {
    let poly = &f.cells()[pick].polyhedron;
    let sel = f.cell_selection(pick).clone();
    let verts = polygon_vertices(poly)?;
    let c = centroid(&verts);
    let delta = nonzero_delta(rng, 2);
    let fc = sel.apply(&c)?.add(&delta);
    let images = verts.iter().map(|v| sel.apply(v)).collect::<Result<Vec<_>>>()?;

    let mut selections = f.selections().to_vec();
    let mut cells: Vec<Cell> = f.cells().to_vec();
    let m = verts.len();
    for k in 0..m {
        let (a, b) = (&verts[k], &verts[(k + 1) % m]);
        let piece = interpolate([&c, a, b], [&fc, &images[k], &images[(k + 1) % m]])?;
        let cell = Cell {
            polyhedron: triangle(&c, a, b)?,
            selection: selections.len(),
        };
        selections.push(piece);
        if k == 0 {
            cells[pick] = cell;
        } else {
            cells.push(cell);
        }
    }
    let function = PlFunction::new(2, selections, cells)?
        .validated()
        .map_err(|r| Error::Inconsistent(format!("perturbed map failed validation: {:?}", r.kinds())))?;
    Ok(Perturbation {
        function,
        cell: Some(pick),
        note: format!("cell {pick} starred from {c}, image moved by {delta}"),
    })
}
