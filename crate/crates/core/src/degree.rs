//! Preimages, regular values and the mapping degree.
//!
//! Preimages are enumerated exactly over all cells, so the degree at a
//! regular value is the plain signed count of its preimages; no bounding
//! domain is needed once the map is nonsingular on every unbounded cell.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::PlFunction;
use crate::linalg::RVector;
use crate::lp::{self, LpOutcome};
use crate::rational::{Rational, Sign};

/// Tries per regular-value search in the composite operations.
pub const DEFAULT_MAX_TRIES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreimagePoint {
    pub x: RVector,
    /// First cell containing `x`.
    pub cell: usize,
    pub on_boundary: bool,
    pub det_sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreimageSet {
    pub target: RVector,
    pub points: Vec<PreimagePoint>,
    /// Cells with a singular selection whose solution set meets the cell.
    pub singular_hits: Vec<usize>,
}

impl PreimageSet {
    /// True when no point maps to the target at all.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.singular_hits.is_empty()
    }

    pub fn signed_sum(&self) -> i64 {
        self.points.iter().map(|p| p.det_sign.as_i64()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Irregularity {
    SingularCellHit { cell: usize },
    BoundaryPreimage { point: RVector, cell: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularValueReport {
    pub y: RVector,
    pub regular: bool,
    pub reasons: Vec<Irregularity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeSample {
    pub y: RVector,
    pub preimages: usize,
    pub signed_sum: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeEvidence {
    pub degree: i64,
    pub samples: Vec<DegreeSample>,
    pub far_value: Option<RVector>,
}

/// A regular value beyond the image of every bounded cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FarRegularValue {
    pub y: RVector,
    pub report: RegularValueReport,
    pub preimages: PreimageSet,
    /// `max ‖F(x)‖∞` over the bounded cells; `‖y‖∞` exceeds it.
    pub bounded_radius: Rational,
    /// Unbounded cells, for checking where the preimages lie.
    pub unbounded_cells: Vec<usize>,
}

pub fn preimages(f: &PlFunction, y: &RVector) -> Result<PreimageSet> {
    f.ensure_validated()?;
    if y.dim() != f.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            got: y.dim(),
        });
    }
    let mut points: Vec<PreimagePoint> = Vec::new();
    let mut singular_hits = Vec::new();
    for (i, cell) in f.cells().iter().enumerate() {
        let sel = f.cell_selection(i);
        let rhs = y.sub(&sel.b);
        let poly = &cell.polyhedron;
        match sel.a.solve_unique(&rhs)? {
            Some(x) => {
                if !poly.contains(&x)? {
                    continue;
                }
                let on_boundary = !poly.contains_strictly(&x)?;
                if let Some(existing) = points.iter_mut().find(|p| p.x == x) {
                    existing.on_boundary = true;
                } else {
                    points.push(PreimagePoint {
                        x,
                        cell: i,
                        on_boundary,
                        det_sign: sel.det_sign(),
                    });
                }
            }
            None => {
                let Some(sol) = sel.a.affine_solution_set(&rhs)? else {
                    continue;
                };
                // Does {p + K z} meet the cell? Feasibility in z.
                let rows: Vec<Vec<Rational>> = poly
                    .constraints()
                    .iter()
                    .map(|h| sol.kernel.iter().map(|k| h.normal().dot(k)).collect())
                    .collect();
                let bounds: Vec<Rational> = poly
                    .constraints()
                    .iter()
                    .map(|h| h.slack(&sol.particular))
                    .collect();
                let zero = vec![Rational::zero(); sol.kernel.len()];
                if !matches!(lp::maximize(&zero, &rows, &bounds), LpOutcome::Infeasible) {
                    singular_hits.push(i);
                }
            }
        }
    }
    Ok(PreimageSet {
        target: y.clone(),
        points,
        singular_hits,
    })
}

fn report_for(set: &PreimageSet) -> RegularValueReport {
    let mut reasons: Vec<Irregularity> = set
        .singular_hits
        .iter()
        .map(|&cell| Irregularity::SingularCellHit { cell })
        .collect();
    reasons.extend(
        set.points
            .iter()
            .filter(|p| p.on_boundary)
            .map(|p| Irregularity::BoundaryPreimage {
                point: p.x.clone(),
                cell: p.cell,
            }),
    );
    RegularValueReport {
        y: set.target.clone(),
        regular: reasons.is_empty(),
        reasons,
    }
}

/// Preimages together with the regularity verdict they imply.
pub fn analyze(f: &PlFunction, y: &RVector) -> Result<(PreimageSet, RegularValueReport)> {
    let set = preimages(f, y)?;
    let report = report_for(&set);
    Ok((set, report))
}

/// Boundary preimages count as irregular even when the adjacent cells'
/// determinants agree.
pub fn classify_regular(f: &PlFunction, y: &RVector) -> Result<RegularValueReport> {
    Ok(analyze(f, y)?.1)
}

/// The first unbounded cell whose selection is singular, if any.
pub fn singular_unbounded_cell(f: &PlFunction) -> Result<Option<usize>> {
    let (_, unbounded) = f.split_cells()?;
    Ok(unbounded
        .into_iter()
        .find(|&c| f.cell_selection(c).det_sign().is_zero()))
}

fn require_nonsingular_at_infinity(f: &PlFunction) -> Result<()> {
    match singular_unbounded_cell(f)? {
        Some(cell) => Err(Error::SingularAtInfinity { cell }),
        None => Ok(()),
    }
}

/// Signed preimage count at a regular value.
pub fn local_degree(f: &PlFunction, y: &RVector) -> Result<i64> {
    require_nonsingular_at_infinity(f)?;
    let (set, report) = analyze(f, y)?;
    if !report.regular {
        return Err(Error::IrregularValue(Box::new(report)));
    }
    Ok(set.signed_sum())
}

fn grid_denominator(radius: &Rational) -> BigInt {
    let mut denom = BigInt::from(64);
    while radius * &Rational::from(denom.clone()) < Rational::from_int(64) {
        denom *= 2;
    }
    denom
}

/// Rejection-samples the ∞-ball of `radius` around `center` on a rational
/// grid, doubling the grid's denominator after every rejected draw.
pub(crate) fn sample_near(
    f: &PlFunction,
    center: &RVector,
    radius: &Rational,
    rng: &mut impl Rng,
    max_tries: usize,
) -> Result<(PreimageSet, RegularValueReport)> {
    if !radius.is_positive() {
        return Err(Error::Invalid("sampling radius must be positive".into()));
    }
    let mut denom = grid_denominator(radius);
    for _ in 0..max_tries {
        let reach = (radius * &Rational::from(denom.clone())).floor();
        let reach = reach.to_i64().unwrap_or(i64::MAX / 2);
        let y: RVector = center
            .iter()
            .map(|c| {
                let k = rng.gen_range(-reach..=reach);
                c + &Rational::from_bigints(BigInt::from(k), denom.clone()).expect("positive")
            })
            .collect();
        let (set, report) = analyze(f, &y)?;
        if report.regular {
            return Ok((set, report));
        }
        denom *= 2;
    }
    Err(Error::SamplingExhausted { tries: max_tries })
}

/// A regular value drawn from the ∞-ball of `radius` about the origin.
/// Deterministic for a fixed seed.
pub fn sample_regular_value(
    f: &PlFunction,
    seed: u64,
    radius: &Rational,
    max_tries: usize,
) -> Result<RVector> {
    f.ensure_validated()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = RVector::zeros(f.dim());
    Ok(sample_near(f, &center, radius, &mut rng, max_tries)?.1.y)
}

/// Constructs a regular value whose whole preimage lies in unbounded cells.
///
/// Walks from an interior point of an unbounded cell along a recession
/// direction until the image leaves the ∞-ball of radius `r` containing the
/// images of all bounded cells, then samples a regular value in a ball small
/// enough to stay outside that radius and inside the image of the cell.
pub fn far_regular_value(f: &PlFunction) -> Result<FarRegularValue> {
    far_regular_value_with(f, &mut ChaCha8Rng::seed_from_u64(0))
}

fn far_regular_value_with(f: &PlFunction, rng: &mut impl Rng) -> Result<FarRegularValue> {
    let (_, unbounded) = f.split_cells()?;
    if let Some(&cell) = unbounded
        .iter()
        .find(|&&c| f.cell_selection(c).det_sign().is_zero())
    {
        return Err(Error::SingularAtInfinity { cell });
    }
    let r = f.bounded_image_radius()?;

    let cell = *unbounded
        .first()
        .ok_or_else(|| Error::Inconsistent("a subdivision of R^n has an unbounded cell".into()))?;
    let poly = &f.cells()[cell].polyhedron;
    let sel = f.cell_selection(cell);
    let x0 = poly.interior_point().ok_or(Error::LowerDimensional)?;
    let d = poly
        .recession_direction()?
        .ok_or_else(|| Error::Inconsistent(format!("cell {cell} has no recession direction")))?;

    let image_dir = sel.a.mul_vec(&d)?;
    let start = sel.apply(&x0)?;
    let j = (0..f.dim())
        .max_by_key(|&j| image_dir[j].abs())
        .expect("positive dimension");
    let rate = image_dir[j].abs();
    if rate.is_zero() {
        return Err(Error::Inconsistent("invertible selection maps d to zero".into()));
    }
    let t = (&r + &Rational::one() + start[j].abs()) / &rate + Rational::one();
    let x_far = x0.add_scaled(&t, &d);
    let y0 = sel.apply(&x_far)?;

    // Keep the sample ball inside F(cell): a step of size ρ in y moves x by at
    // most ‖A⁻¹‖∞ ρ, which costs each constraint at most ‖a_k‖₁ ‖A⁻¹‖∞ ρ.
    let inv = sel
        .a
        .inverse()?
        .ok_or_else(|| Error::Inconsistent("nonsingular selection has no inverse".into()))?;
    let two = Rational::from_int(2);
    let mut rho = (y0.norm_inf() - &r) / &two;
    let max_row = poly
        .constraints()
        .iter()
        .map(|h| h.normal().norm_1())
        .fold(Rational::zero(), Rational::max);
    if !max_row.is_zero() {
        let slack = poly
            .constraints()
            .iter()
            .map(|h| h.slack(&x_far))
            .min()
            .expect("constraints present");
        rho = rho.min(slack / (&max_row * &inv.norm_inf() * &two));
    }
    let rho = rho.min(Rational::one());

    let (preimages, report) = sample_near(f, &y0, &rho, rng, DEFAULT_MAX_TRIES)?;
    let y = report.y.clone();

    if y.norm_inf() <= r {
        return Err(Error::Inconsistent("far value fell inside the bounded image".into()));
    }
    if preimages.points.is_empty() {
        return Err(Error::Inconsistent("far value has an empty preimage".into()));
    }
    if let Some(p) = preimages.points.iter().find(|p| !unbounded.contains(&p.cell)) {
        return Err(Error::Inconsistent(format!(
            "far value has a preimage {} in bounded cell {}",
            p.x, p.cell
        )));
    }
    Ok(FarRegularValue {
        y,
        report,
        preimages,
        bounded_radius: r,
        unbounded_cells: unbounded,
    })
}

/// Degree at the far regular value, confirmed at `trials` further regular
/// values. A disagreement is reported as an internal inconsistency.
pub fn global_degree(f: &PlFunction, trials: usize, seed: u64) -> Result<DegreeEvidence> {
    Ok(global_degree_with_far(f, trials, seed)?.0)
}

pub(crate) fn global_degree_with_far(
    f: &PlFunction,
    trials: usize,
    seed: u64,
) -> Result<(DegreeEvidence, FarRegularValue)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let far = far_regular_value_with(f, &mut rng)?;
    let degree = far.preimages.signed_sum();
    let radius = far.y.norm_inf().max(far.bounded_radius.clone()) + Rational::one();
    let seeds: Vec<u64> = (0..trials).map(|_| rng.next_u64()).collect();
    let center = RVector::zeros(f.dim());

    let mut samples = vec![DegreeSample {
        y: far.y.clone(),
        preimages: far.preimages.points.len(),
        signed_sum: degree,
    }];
    let drawn: Vec<Result<DegreeSample>> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let (set, report) = sample_near(f, &center, &radius, &mut rng, DEFAULT_MAX_TRIES)?;
            Ok(DegreeSample {
                y: report.y,
                preimages: set.points.len(),
                signed_sum: set.signed_sum(),
            })
        })
        .collect();
    for s in drawn {
        let s = s?;
        if s.signed_sum != degree {
            return Err(Error::Inconsistent(format!(
                "degree {} at {} but {} at far value {}",
                s.signed_sum, s.y, degree, far.y
            )));
        }
        samples.push(s);
    }
    let evidence = DegreeEvidence {
        degree,
        samples,
        far_value: Some(far.y.clone()),
    };
    Ok((evidence, far))
}

/// Preimage counts at sampled regular values of a coherently oriented map;
/// every count equals `|degree|`.
pub fn preimage_count_profile(
    f: &PlFunction,
    trials: usize,
    seed: u64,
) -> Result<Vec<(RVector, usize)>> {
    f.ensure_validated()?;
    let signs: Vec<Sign> = (0..f.cells().len())
        .map(|c| f.cell_selection(c).det_sign())
        .collect();
    if signs[0].is_zero() || signs.iter().any(|&s| s != signs[0]) {
        return Err(Error::NotCoherent);
    }
    let evidence = global_degree(f, trials, seed)?;
    let expected = evidence.degree.unsigned_abs() as usize;
    let profile: Vec<(RVector, usize)> = evidence
        .samples
        .into_iter()
        .map(|s| (s.y, s.preimages))
        .collect();
    if let Some((y, c)) = profile.iter().find(|(_, c)| *c != expected) {
        return Err(Error::Inconsistent(format!(
            "{y} has {c} preimages, expected {expected}"
        )));
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::tests::{abs_map, affine_1d, identity, interval, ray_left, ray_right};
    use crate::function::Selection;
    use crate::linalg::RMatrix;
    use crate::polyhedron::{HPolyhedron, Halfspace};

    fn y1(v: i64) -> RVector {
        RVector::from_ints(&[v])
    }

    #[test]
    fn abs_preimages() {
        let f = abs_map();
        let set = preimages(&f, &y1(4)).unwrap();
        let xs: Vec<_> = set.points.iter().map(|p| (p.x.clone(), p.det_sign)).collect();
        assert_eq!(
            xs,
            vec![(y1(-4), Sign::Negative), (y1(4), Sign::Positive)]
        );
        assert!(preimages(&f, &y1(-1)).unwrap().is_empty());
    }

    #[test]
    fn abs_regularity() {
        let f = abs_map();
        assert!(classify_regular(&f, &y1(4)).unwrap().regular);
        let r = classify_regular(&f, &y1(0)).unwrap();
        assert!(!r.regular);
        assert_eq!(
            r.reasons,
            vec![Irregularity::BoundaryPreimage {
                point: y1(0),
                cell: 0
            }]
        );
        // Merged across both cells: one point.
        assert_eq!(preimages(&f, &y1(0)).unwrap().points.len(), 1);
    }

    #[test]
    fn singular_cell_hit() {
        // 2D: (x1, x2) -> (x1, 0) for x2 <= 0, (x1, x2) for x2 >= 0.
        let lower = HPolyhedron::new(2, vec![Halfspace::from_ints(&[0, 1], 0).unwrap()]).unwrap();
        let upper = HPolyhedron::new(2, vec![Halfspace::from_ints(&[0, -1], 0).unwrap()]).unwrap();
        let flat = Selection::linear(RMatrix::from_ints(&[&[1, 0], &[0, 0]]).unwrap()).unwrap();
        let id = Selection::linear(RMatrix::identity(2)).unwrap();
        let f = PlFunction::from_pieces(2, vec![(lower, flat), (upper, id)])
            .unwrap()
            .validated()
            .unwrap();
        let r = classify_regular(&f, &RVector::from_ints(&[3, 0])).unwrap();
        assert!(!r.regular);
        assert!(r.reasons.contains(&Irregularity::SingularCellHit { cell: 0 }));
        let r = classify_regular(&f, &RVector::from_ints(&[3, 1])).unwrap();
        assert!(r.regular);
        assert!(matches!(
            local_degree(&f, &RVector::from_ints(&[3, 1])),
            Err(Error::SingularAtInfinity { cell: 0 })
        ));
    }

    #[test]
    fn local_degree_examples() {
        assert_eq!(local_degree(&abs_map(), &y1(4)).unwrap(), 0);
        assert_eq!(local_degree(&abs_map(), &y1(-3)).unwrap(), 0);
        assert_eq!(local_degree(&identity(2), &RVector::from_ints(&[5, -7])).unwrap(), 1);
        match local_degree(&abs_map(), &y1(0)) {
            Err(Error::IrregularValue(report)) => assert!(!report.regular),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampling() {
        let id = identity(2);
        let y = sample_regular_value(&id, 7, &Rational::from_int(10), 1).unwrap();
        assert!(y.norm_inf() <= Rational::from_int(10));
        assert_eq!(
            y,
            sample_regular_value(&id, 7, &Rational::from_int(10), 1).unwrap()
        );
        for seed in 0..20 {
            let y = sample_regular_value(&abs_map(), seed, &Rational::from_int(10), 8).unwrap();
            assert!(!y[0].is_zero());
            assert!(classify_regular(&abs_map(), &y).unwrap().regular);
        }
        assert!(sample_regular_value(&id, 0, &Rational::zero(), 3).is_err());
    }

    #[test]
    fn sampling_empty_preimage_is_regular() {
        // (x1, x2) -> (|x1|, x2): image is the halfplane y1 >= 0.
        let f = crate::oracle::tests::half_fold();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (set, report) = sample_near(
            &f,
            &RVector::from_ints(&[-5, 0]),
            &Rational::one(),
            &mut rng,
            4,
        )
        .unwrap();
        assert!(report.regular);
        assert!(set.is_empty());
    }

    fn zigzag_plus() -> PlFunction {
        // slopes +1, -1, +1 with breakpoints 0, 1: r = 1.
        PlFunction::from_pieces(
            1,
            vec![
                (ray_left(0), affine_1d(1, 0)),
                (interval(0, 1), affine_1d(-1, 0)),
                (ray_right(1), affine_1d(1, -2)),
            ],
        )
        .unwrap()
        .validated()
        .unwrap()
    }

    #[test]
    fn far_value_zigzag() {
        let f = zigzag_plus();
        let far = far_regular_value(&f).unwrap();
        assert_eq!(far.bounded_radius, Rational::one());
        assert!(far.y.norm_inf() > Rational::one());
        assert!(far.report.regular);
        // Independent check: for |y| > 1 the zigzag has a single preimage on a ray.
        assert_eq!(far.preimages.points.len(), 1);
        assert!(far.preimages.points.iter().all(|p| p.cell != 1));
        let far_id = far_regular_value(&identity(2)).unwrap();
        assert_eq!(far_id.preimages.points.len(), 1);
    }

    #[test]
    fn far_value_requires_nonsingular_rays() {
        let f = PlFunction::from_pieces(
            1,
            vec![(ray_left(0), affine_1d(0, 0)), (ray_right(0), affine_1d(1, 0))],
        )
        .unwrap()
        .validated()
        .unwrap();
        assert!(matches!(
            far_regular_value(&f),
            Err(Error::SingularAtInfinity { cell: 0 })
        ));
    }

    #[test]
    fn global_degree_examples() {
        let ev = global_degree(&identity(2), 10, 1).unwrap();
        assert_eq!(ev.degree, 1);
        assert!(ev.samples.iter().all(|s| s.preimages == 1));
        assert_eq!(ev.samples.len(), 11);
        let ev = global_degree(&abs_map(), 10, 1).unwrap();
        assert_eq!(ev.degree, 0);
        assert!(ev.samples.iter().all(|s| s.signed_sum == 0));
        let ev = global_degree(&zigzag_plus(), 20, 5).unwrap();
        assert_eq!(ev.degree, 1);
    }

    #[test]
    fn count_profile() {
        let counts = preimage_count_profile(&identity(1), 5, 0).unwrap();
        assert!(counts.iter().all(|(_, c)| *c == 1));
        assert!(matches!(
            preimage_count_profile(&abs_map(), 5, 0),
            Err(Error::NotCoherent)
        ));
        // Strictly increasing 1D map.
        let f = PlFunction::from_pieces(
            1,
            vec![
                (ray_left(0), affine_1d(1, 0)),
                (interval(0, 1), affine_1d(3, 0)),
                (ray_right(1), affine_1d(1, 2)),
            ],
        )
        .unwrap()
        .validated()
        .unwrap();
        let counts = preimage_count_profile(&f, 20, 9).unwrap();
        assert!(counts.iter().all(|(_, c)| *c == 1));
    }
}
