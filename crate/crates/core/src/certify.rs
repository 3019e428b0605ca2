//! Orientation analysis and surjectivity / homeomorphism certificates.
//!
//! A map whose selections on unbounded cells share one nonzero determinant
//! sign is surjective: a regular value far enough out has all its preimages
//! in unbounded cells, so its signed preimage count cannot vanish, and the
//! degree is the same at every regular value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::degree::{self, DegreeEvidence};
use crate::error::{Error, Result};
use crate::function::PlFunction;
use crate::linalg::RVector;
use crate::rational::{Rational, Sign};

/// Aggregate determinant sign of a family of selections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Positive,
    Negative,
    Mixed,
    Singular,
}

impl Orientation {
    /// `Singular` dominates `Mixed`.
    pub fn of(signs: impl IntoIterator<Item = Sign>) -> Orientation {
        let mut seen_pos = false;
        let mut seen_neg = false;
        for s in signs {
            match s {
                Sign::Zero => return Orientation::Singular,
                Sign::Positive => seen_pos = true,
                Sign::Negative => seen_neg = true,
            }
        }
        match (seen_pos, seen_neg) {
            (true, true) => Orientation::Mixed,
            (false, true) => Orientation::Negative,
            _ => Orientation::Positive,
        }
    }

    pub fn is_coherent(self) -> bool {
        matches!(self, Orientation::Positive | Orientation::Negative)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellOrientation {
    pub cell: usize,
    pub det_sign: Sign,
    pub bounded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationSummary {
    pub per_cell_sign: Vec<CellOrientation>,
    pub at_infinity: Orientation,
    pub global: Orientation,
}

pub fn orientation_summary(f: &PlFunction) -> Result<OrientationSummary> {
    let (bounded, _) = f.split_cells()?;
    let per_cell_sign: Vec<CellOrientation> = (0..f.cells().len())
        .map(|cell| CellOrientation {
            cell,
            det_sign: f.cell_selection(cell).det_sign(),
            bounded: bounded.contains(&cell),
        })
        .collect();
    Ok(OrientationSummary {
        at_infinity: Orientation::of(
            per_cell_sign
                .iter()
                .filter(|c| !c.bounded)
                .map(|c| c.det_sign),
        ),
        global: Orientation::of(per_cell_sign.iter().map(|c| c.det_sign)),
        per_cell_sign,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedSurjective,
    NotCertified,
    CertifiedNotSurjective,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::CertifiedSurjective => "certified_surjective",
            Verdict::NotCertified => "not_certified",
            Verdict::CertifiedNotSurjective => "certified_not_surjective",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurjectivityCertificate {
    pub verdict: Verdict,
    pub orientation: OrientationSummary,
    pub degree_evidence: Option<DegreeEvidence>,
    pub far_value: Option<RVector>,
    /// Bound on the images of bounded cells that the far value exceeds.
    pub bounded_radius: Option<Rational>,
    pub note: String,
}

pub fn certify_surjective(f: &PlFunction, trials: usize, seed: u64) -> Result<SurjectivityCertificate> {
    let orientation = orientation_summary(f)?;
    if orientation.at_infinity.is_coherent() {
        let (evidence, far) = degree::global_degree_with_far(f, trials, seed)?;
        // Every summand at the far value carries the at-infinity sign.
        let expected = match orientation.at_infinity {
            Orientation::Positive => Sign::Positive,
            _ => Sign::Negative,
        };
        if far.preimages.points.is_empty()
            || far
                .preimages
                .points
                .iter()
                .any(|p| p.det_sign != expected || !far.unbounded_cells.contains(&p.cell))
        {
            return Err(Error::Inconsistent(
                "far value preimages do not lie in coherently oriented unbounded cells".into(),
            ));
        }
        if evidence.degree == 0 || far.preimages.signed_sum() != evidence.degree {
            return Err(Error::Inconsistent(format!(
                "coherent orientation at infinity but degree {}",
                evidence.degree
            )));
        }
        return Ok(SurjectivityCertificate {
            verdict: Verdict::CertifiedSurjective,
            note: format!(
                "selections on unbounded cells share determinant sign {}; degree {} is nonzero",
                expected.as_i64(),
                evidence.degree
            ),
            orientation,
            degree_evidence: Some(evidence),
            far_value: Some(far.y),
            bounded_radius: Some(far.bounded_radius),
        });
    }
    if f.dim() == 1 {
        let class = classify_1d(f)?;
        debug_assert_eq!(class, OneDimClass::NotSurjective);
        return Ok(SurjectivityCertificate {
            verdict: Verdict::CertifiedNotSurjective,
            note: "in one dimension the map is onto exactly when both end slopes share a nonzero sign".into(),
            orientation,
            degree_evidence: None,
            far_value: None,
            bounded_radius: None,
        });
    }
    Ok(SurjectivityCertificate {
        verdict: Verdict::NotCertified,
        note: "orientation at infinity is not coherent; no claim is made either way \
               (the converse of the certificate does not hold in dimension two and up)"
            .into(),
        orientation,
        degree_evidence: None,
        far_value: None,
        bounded_radius: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OneDimClass {
    Surjective,
    NotSurjective,
}

/// Surjectivity of a 1D map, read off the slopes on its two rays.
pub fn classify_1d(f: &PlFunction) -> Result<OneDimClass> {
    if f.dim() != 1 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    let (_, unbounded) = f.split_cells()?;
    let slopes: Vec<Sign> = match unbounded.as_slice() {
        [single] => vec![f.cell_selection(*single).det_sign(); 2],
        [left, right] => vec![
            f.cell_selection(*left).det_sign(),
            f.cell_selection(*right).det_sign(),
        ],
        other => {
            return Err(Error::Inconsistent(format!(
                "a subdivision of the line has {} unbounded cells",
                other.len()
            )))
        }
    };
    Ok(if !slopes[0].is_zero() && slopes[0] == slopes[1] {
        OneDimClass::Surjective
    } else {
        OneDimClass::NotSurjective
    })
}

/// Two distinct points with the same image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Collision {
    pub x1: RVector,
    pub x2: RVector,
    pub value: RVector,
}

/// Best-effort search for a witness of non-injectivity.
///
/// Only runs when the map is not coherently oriented. Singular cells yield a
/// collision along a kernel direction. For mixed signs, each facet shared by
/// cells of opposite orientation is probed: the map folds there, so a point
/// stepped slightly into one cell has a second preimage in the other. Each
/// probe, and each random regular value drawn afterwards, consumes one unit of
/// `budget`. `None` is not a claim of injectivity.
pub fn injectivity_falsifier(f: &PlFunction, budget: usize, seed: u64) -> Result<Option<Collision>> {
    let summary = orientation_summary(f)?;
    if summary.global.is_coherent() {
        return Ok(None);
    }
    let mut budget = budget;

    for c in &summary.per_cell_sign {
        if budget == 0 {
            return Ok(None);
        }
        if !c.det_sign.is_zero() {
            continue;
        }
        budget -= 1;
        if let Some(hit) = kernel_collision(f, c.cell)? {
            return Ok(Some(hit));
        }
    }

    for i in 0..f.cells().len() {
        let si = summary.per_cell_sign[i].det_sign;
        if si.is_zero() {
            continue;
        }
        let poly = &f.cells()[i].polyhedron;
        for facet in poly.facet_witnesses()? {
            if budget == 0 {
                return Ok(None);
            }
            let neighbours = f.locate_unchecked(&facet.witness);
            if !neighbours
                .iter()
                .any(|&j| summary.per_cell_sign[j].det_sign == si.flip())
            {
                continue;
            }
            budget -= 1;
            if let Some(hit) = fold_collision(f, i, &facet.witness)? {
                return Ok(Some(hit));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<RVector> = f
        .cells()
        .iter()
        .filter_map(|c| c.polyhedron.interior_point())
        .collect();
    while budget > 0 {
        budget -= 1;
        let x = &centers[rng.gen_range(0..centers.len())];
        let y = f.evaluate(x)?;
        let set = match degree::sample_near(f, &y, &Rational::one(), &mut rng, 4) {
            Ok((set, _)) => set,
            Err(Error::SamplingExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        if set.points.len() >= 2 {
            return Ok(Some(collision(f, &set.points[0].x, &set.points[1].x)?));
        }
    }
    Ok(None)
}

fn collision(f: &PlFunction, x1: &RVector, x2: &RVector) -> Result<Collision> {
    let v1 = f.evaluate(x1)?;
    let v2 = f.evaluate(x2)?;
    if x1 == x2 || v1 != v2 {
        return Err(Error::Inconsistent(format!("{x1} and {x2} do not collide")));
    }
    Ok(Collision {
        x1: x1.clone(),
        x2: x2.clone(),
        value: v1,
    })
}

fn kernel_collision(f: &PlFunction, cell: usize) -> Result<Option<Collision>> {
    let poly = &f.cells()[cell].polyhedron;
    let Some(x) = poly.interior_point() else {
        return Ok(None);
    };
    let Some(k) = f.cell_selection(cell).a.kernel_basis().into_iter().next() else {
        return Ok(None);
    };
    let mut step = Rational::one();
    let half = Rational::new(1, 2)?;
    for _ in 0..128 {
        let x2 = x.add_scaled(&step, &k);
        if poly.contains(&x2)? {
            return collision(f, &x, &x2).map(Some);
        }
        step *= &half;
    }
    Ok(None)
}

/// Steps from a facet witness into cell `i` and looks for a second preimage.
fn fold_collision(f: &PlFunction, i: usize, w: &RVector) -> Result<Option<Collision>> {
    let poly = &f.cells()[i].polyhedron;
    let inner = poly.interior_point().ok_or(Error::LowerDimensional)?;
    let dir = inner.sub(w);
    let mut step = Rational::new(1, 2)?;
    let half = Rational::new(1, 2)?;
    for _ in 0..64 {
        let x = w.add_scaled(&step, &dir);
        let y = f.evaluate(&x)?;
        let set = degree::preimages(f, &y)?;
        if let Some(other) = set.points.iter().find(|p| p.x != x) {
            return collision(f, &x, &other.x).map(Some);
        }
        step *= &half;
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomeomorphismClass {
    Homeomorphism,
    NotInjective,
    NotCoherent,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomeomorphismReport {
    pub class: HomeomorphismClass,
    /// Present when the degree was computed; `-1` marks an
    /// orientation-reversing bijection.
    pub degree: Option<i64>,
}

pub fn classify_homeomorphism(f: &PlFunction, trials: usize, seed: u64) -> Result<HomeomorphismReport> {
    let summary = orientation_summary(f)?;
    if !summary.global.is_coherent() {
        return Ok(HomeomorphismReport {
            class: HomeomorphismClass::NotCoherent,
            degree: None,
        });
    }
    match degree::global_degree(f, trials, seed) {
        Ok(ev) => Ok(HomeomorphismReport {
            class: match ev.degree.unsigned_abs() {
                1 => HomeomorphismClass::Homeomorphism,
                0 => HomeomorphismClass::Undetermined,
                _ => HomeomorphismClass::NotInjective,
            },
            degree: Some(ev.degree),
        }),
        Err(Error::SamplingExhausted { .. }) => Ok(HomeomorphismReport {
            class: HomeomorphismClass::Undetermined,
            degree: None,
        }),
        Err(e) => Err(e),
    }
}

/// Default number of extra regular values sampled by degree computations.
pub const DEFAULT_TRIALS: usize = 50;
