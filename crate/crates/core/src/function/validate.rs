//! Subdivision validation.
//!
//! Checks run in stages: (a) every cell is nonempty and full-dimensional;
//! (b) every pair of cells has disjoint interiors and meets, if at all, in a
//! common face of both; (c) touching cells agree on the affine hull of their
//! intersection; (d) every facet is paired with exactly one facet of one other
//! cell. Cells failing (a) are excluded from later stages, and (d) only runs
//! when (b) found nothing, since facet pairing certifies covering only for a
//! face-to-face family.

use rayon::prelude::*;
use serde::Serialize;

use super::PlFunction;
use crate::linalg::RVector;
use crate::polyhedron::{Facet, HPolyhedron};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Finding {
    EmptyCell {
        cell: usize,
    },
    LowerDimensionalCell {
        cell: usize,
        point: RVector,
    },
    /// `point` lies in the interior of both cells.
    Overlap {
        cells: [usize; 2],
        point: RVector,
    },
    /// The cells intersect, but not in a common face: `point` lies on the
    /// smallest face of `cells[0]` containing the intersection, yet outside
    /// `cells[1]`.
    BadFace {
        cells: [usize; 2],
        point: RVector,
    },
    /// The two selections differ at `point`, which lies on the affine hull of
    /// the cells' common face.
    Discontinuity {
        cells: [usize; 2],
        point: RVector,
        values: [RVector; 2],
    },
    /// Facet `constraint` of `cell`, witnessed by `witness`, is shared with
    /// `matches` facets of other cells instead of exactly one.
    UnpairedFacet {
        cell: usize,
        constraint: usize,
        witness: RVector,
        matches: usize,
    },
}

impl Finding {
    pub fn kind(&self) -> &'static str {
        match self {
            Finding::EmptyCell { .. } => "empty-cell",
            Finding::LowerDimensionalCell { .. } => "lower-dimensional-cell",
            Finding::Overlap { .. } => "overlap",
            Finding::BadFace { .. } => "bad-face",
            Finding::Discontinuity { .. } => "discontinuity",
            Finding::UnpairedFacet { .. } => "unpaired-facet",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Finding>,
}

impl ValidationReport {
    pub fn kinds(&self) -> Vec<&'static str> {
        self.violations.iter().map(Finding::kind).collect()
    }
}

pub(super) fn run(f: &PlFunction) -> ValidationReport {
    let mut violations = Vec::new();

    // (a)
    let mut good = Vec::new();
    for (i, cell) in f.cells.iter().enumerate() {
        match cell.polyhedron.max_uniform_slack(&[]) {
            Some(s) if s.slack.is_positive() => good.push(i),
            Some(s) if s.slack.is_zero() => violations.push(Finding::LowerDimensionalCell {
                cell: i,
                point: s.point,
            }),
            _ => violations.push(Finding::EmptyCell { cell: i }),
        }
    }

    // (b), (c)
    let pairs: Vec<(usize, usize)> = good
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| good[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let pair_findings: Vec<Vec<Finding>> = pairs
        .par_iter()
        .map(|&(i, j)| check_pair(f, i, j))
        .collect();
    let mut face_problem = false;
    for finding in pair_findings.into_iter().flatten() {
        face_problem |= matches!(finding, Finding::Overlap { .. } | Finding::BadFace { .. });
        violations.push(finding);
    }

    // (d)
    if !face_problem {
        violations.extend(check_covering(f, &good));
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

fn check_pair(f: &PlFunction, i: usize, j: usize) -> Vec<Finding> {
    let p = &f.cells[i].polyhedron;
    let q = &f.cells[j].polyhedron;
    let both = p.intersect(q).expect("cells share the ambient dimension");
    let Some(s) = both.max_uniform_slack(&[]) else {
        return Vec::new();
    };
    if s.slack.is_positive() {
        return vec![Finding::Overlap {
            cells: [i, j],
            point: s.point,
        }];
    }
    if s.slack.is_negative() {
        return Vec::new();
    }

    // The cells touch. The smallest face of each containing the
    // intersection tightens the constraints implicit on the intersection.
    let equalities = both
        .implicit_equalities()
        .expect("intersection is nonempty");
    let np = p.constraints().len();
    let tight_p: Vec<usize> = equalities.iter().copied().filter(|&k| k < np).collect();
    let tight_q: Vec<usize> = equalities
        .iter()
        .filter(|&&k| k >= np)
        .map(|&k| k - np)
        .collect();
    for (a, b, tight, other) in [(i, j, &tight_p, q), (j, i, &tight_q, p)] {
        let face = f.cells[a].polyhedron.face(tight);
        if let Some(point) = face.point_outside(other).expect("dimensions agree") {
            return vec![Finding::BadFace {
                cells: [a, b],
                point,
            }];
        }
    }

    // Continuity on the affine hull of the common face.
    let (base, dirs) = both.affine_hull().expect("intersection is nonempty");
    let si = f.cell_selection(i);
    let sj = f.cell_selection(j);
    let mut probes = vec![base.clone()];
    probes.extend(dirs.iter().map(|d| base.add(d)));
    for x in probes {
        let yi = si.apply(&x).expect("dimensions agree");
        let yj = sj.apply(&x).expect("dimensions agree");
        if yi != yj {
            return vec![Finding::Discontinuity {
                cells: [i, j],
                point: x,
                values: [yi, yj],
            }];
        }
    }
    Vec::new()
}

fn check_covering(f: &PlFunction, good: &[usize]) -> Vec<Finding> {
    let facets: Vec<Vec<Facet>> = good
        .par_iter()
        .map(|&i| {
            f.cells[i]
                .polyhedron
                .facet_witnesses()
                .expect("stage (a) accepted this cell")
        })
        .collect();
    let per_cell: Vec<Vec<Finding>> = good
        .par_iter()
        .enumerate()
        .map(|(gi, &i)| {
            let p = &f.cells[i].polyhedron;
            let mut out = Vec::new();
            for facet in &facets[gi] {
                let matches = count_partners(f, good, &facets, i, p, facet);
                if matches != 1 {
                    out.push(Finding::UnpairedFacet {
                        cell: i,
                        constraint: facet.constraint,
                        witness: facet.witness.clone(),
                        matches,
                    });
                }
            }
            out
        })
        .collect();
    per_cell.into_iter().flatten().collect()
}

fn count_partners(
    f: &PlFunction,
    good: &[usize],
    facets: &[Vec<Facet>],
    i: usize,
    p: &HPolyhedron,
    facet: &Facet,
) -> usize {
    let mut matches = 0;
    for (gj, &j) in good.iter().enumerate() {
        if j == i {
            continue;
        }
        let q = &f.cells[j].polyhedron;
        if !q.contains(&facet.witness).expect("dimensions agree") {
            continue;
        }
        for other in &facets[gj] {
            let h = &q.constraints()[other.constraint];
            if h.slack(&facet.witness).is_zero()
                && p.same_face(facet.constraint, q, other.constraint)
                    .expect("facet indices are valid")
            {
                matches += 1;
            }
        }
    }
    matches
}
