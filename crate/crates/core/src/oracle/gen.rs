use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{Cell, PlFunction, Selection};
use crate::linalg::{RMatrix, RVector};
use crate::plane::{cross, left_of};
use crate::polyhedron::{HPolyhedron, Halfspace};
use crate::rational::Rational;

/// A continuous piecewise affine map of the line.
///
/// Piece `k` has slope `slopes[k]`. `intercept` is the value at the first
/// breakpoint (at the origin when there are none); each piece continues from
/// the previous one at their common breakpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec1D {
    pub breakpoints: Vec<Rational>,
    pub slopes: Vec<Rational>,
    pub intercept: Rational,
}

impl GenSpec1D {
    /// The map through `(breakpoints[k], values[k])` with the given slopes on
    /// the two rays.
    pub fn from_values(
        breakpoints: Vec<Rational>,
        values: &[Rational],
        left_slope: Rational,
        right_slope: Rational,
    ) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::Dimension {
                expected: breakpoints.len(),
                got: values.len(),
            });
        }
        if breakpoints.is_empty() {
            if left_slope != right_slope {
                return Err(Error::Invalid(
                    "a map without breakpoints has a single slope".into(),
                ));
            }
            return Ok(GenSpec1D {
                breakpoints,
                slopes: vec![left_slope],
                intercept: Rational::zero(),
            });
        }
        let intercept = values[0].clone();
        let mut slopes = vec![left_slope];
        for k in 1..breakpoints.len() {
            let run = &breakpoints[k] - &breakpoints[k - 1];
            if !run.is_positive() {
                return Err(Error::Invalid("breakpoints must increase strictly".into()));
            }
            slopes.push((&values[k] - &values[k - 1]) / run);
        }
        slopes.push(right_slope);
        Ok(GenSpec1D {
            breakpoints,
            slopes,
            intercept,
        })
    }

    /// Up to `max_breakpoints` breakpoints at half-integers in `[-20, 20]`,
    /// values there in `[-20, 20]`, end slopes in `{-2, …, 2}`.
    pub fn random(seed: u64, max_breakpoints: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(0..=max_breakpoints.min(81));
        let mut ticks: Vec<i64> = Vec::with_capacity(k);
        while ticks.len() < k {
            let t = rng.gen_range(-40..=40);
            if !ticks.contains(&t) {
                ticks.push(t);
            }
        }
        ticks.sort_unstable();
        let breakpoints: Vec<Rational> = ticks.iter().map(|&t| Rational::new(t, 2).unwrap()).collect();
        let values: Vec<Rational> = (0..k)
            .map(|_| Rational::from_int(rng.gen_range(-20..=20)))
            .collect();
        let left = Rational::from_int(rng.gen_range(-2..=2));
        let right = Rational::from_int(rng.gen_range(-2..=2));
        if k == 0 {
            return GenSpec1D {
                breakpoints,
                slopes: vec![left],
                intercept: Rational::from_int(rng.gen_range(-20..=20)),
            };
        }
        GenSpec1D::from_values(breakpoints, &values, left, right).expect("ticks are distinct")
    }
}

/// Builds and validates the map described by `spec`. Cells are the left ray,
/// the bounded intervals from left to right, then the right ray.
pub fn gen_1d(spec: &GenSpec1D) -> Result<PlFunction> {
    let bp = &spec.breakpoints;
    if spec.slopes.len() != bp.len() + 1 {
        return Err(Error::Dimension {
            expected: bp.len() + 1,
            got: spec.slopes.len(),
        });
    }
    if bp.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("breakpoints must increase strictly".into()));
    }
    let upper = |t: &Rational| Halfspace::new(RVector::new(vec![Rational::one()]), t.clone());
    let lower = |t: &Rational| Halfspace::new(RVector::new(vec![-Rational::one()]), -t);

    let anchor = bp.first().map_or_else(Rational::zero, |t| &spec.slopes[0] * t);
    let mut intercepts = vec![&spec.intercept - anchor];
    for (k, t) in bp.iter().enumerate() {
        let prev = &intercepts[k];
        intercepts.push(prev + (&spec.slopes[k] - &spec.slopes[k + 1]) * t);
    }

    let mut pieces = Vec::with_capacity(bp.len() + 1);
    for k in 0..=bp.len() {
        let mut hs = Vec::new();
        if k > 0 {
            hs.push(lower(&bp[k - 1])?);
        }
        if k < bp.len() {
            hs.push(upper(&bp[k])?);
        }
        let sel = Selection::new(
            RMatrix::from_rows(vec![vec![spec.slopes[k].clone()]])?,
            RVector::new(vec![intercepts[k].clone()]),
        )?;
        pieces.push((HPolyhedron::new(1, hs)?, sel));
    }
    validated(PlFunction::from_pieces(1, pieces)?)
}

/// A linear map of the plane on each sector of a complete fan.
///
/// Sector `k` is the cone spanned by `rays[k]` and `rays[k + 1]` (cyclically)
/// and carries `matrices[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanSpec2D {
    pub rays: Vec<RVector>,
    pub matrices: Vec<RMatrix>,
}

/// Primitive integer directions, counter-clockwise. Entries eight apart are
/// opposite, so any two fewer than eight apart span a proper cone.
const DIRECTIONS: [(i64, i64); 16] = [
    (1, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 1),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-1, 0),
    (-2, -1),
    (-1, -1),
    (-1, -2),
    (0, -1),
    (1, -2),
    (1, -1),
    (2, -1),
];

fn direction(index: i64) -> RVector {
    let (x, y) = DIRECTIONS[index.rem_euclid(16) as usize];
    RVector::from_ints(&[x, y])
}

/// `parts` positive steps in `1..=cap` summing to `total`.
fn composition(rng: &mut ChaCha8Rng, parts: usize, total: usize, cap: usize) -> Vec<usize> {
    let mut steps = vec![1; parts];
    let mut left = total - parts;
    while left > 0 {
        let k = rng.gen_range(0..parts);
        if steps[k] < cap {
            steps[k] += 1;
            left -= 1;
        }
    }
    steps
}

fn random_rays(rng: &mut ChaCha8Rng, sectors: usize) -> Vec<RVector> {
    let start = rng.gen_range(0..16i64);
    let mut at = start;
    composition(rng, sectors, 16, 7)
        .into_iter()
        .map(|s| {
            let r = direction(at);
            at += s as i64;
            r
        })
        .collect()
}

fn stretched(rng: &mut ChaCha8Rng, indices: &[i64]) -> Vec<RVector> {
    indices
        .iter()
        .map(|&i| direction(i).scale(&Rational::from_int(rng.gen_range(1..=3))))
        .collect()
}

impl FanSpec2D {
    /// The fan whose sector maps send `rays[k]` to `images[k]`.
    pub fn from_image_rays(rays: Vec<RVector>, images: &[RVector]) -> Result<Self> {
        let m = rays.len();
        if images.len() != m {
            return Err(Error::Dimension {
                expected: m,
                got: images.len(),
            });
        }
        let mut matrices = Vec::with_capacity(m);
        for k in 0..m {
            let next = (k + 1) % m;
            let r = RMatrix::from_columns(&[rays[k].clone(), rays[next].clone()])?;
            let w = RMatrix::from_columns(&[images[k].clone(), images[next].clone()])?;
            let inv = r
                .inverse()?
                .ok_or_else(|| Error::Invalid(format!("rays {k} and {next} are parallel")))?;
            matrices.push(w.mul(&inv)?);
        }
        Ok(FanSpec2D { rays, matrices })
    }

    /// A fan of `sectors` cones whose image rays wind `winding` times around
    /// the origin, turning the same way in every sector.
    pub fn random_coherent(seed: u64, sectors: usize, winding: i64) -> Result<Self> {
        let total = 16 * winding.unsigned_abs() as usize;
        if winding == 0 || !(3..=16).contains(&sectors) || 7 * sectors < total {
            return Err(Error::Invalid(format!(
                "no coherent fan with {sectors} sectors and winding {winding}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rays = random_rays(&mut rng, sectors);
        let mut at = rng.gen_range(0..16i64);
        let mut indices = Vec::with_capacity(sectors);
        for s in composition(&mut rng, sectors, total, 7) {
            indices.push(at);
            at += winding.signum() * s as i64;
        }
        let images = stretched(&mut rng, &indices);
        FanSpec2D::from_image_rays(rays, &images)
    }

    /// A fan whose sector maps include both orientations.
    pub fn random_mixed(seed: u64, sectors: usize) -> Result<Self> {
        if !(3..=16).contains(&sectors) {
            return Err(Error::Invalid(format!("no fan with {sectors} sectors")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rays = random_rays(&mut rng, sectors);
        let steps = loop {
            let mut steps: Vec<i64> = (0..sectors - 1)
                .map(|_| {
                    let s = rng.gen_range(1..=7);
                    if rng.gen_bool(0.5) {
                        s
                    } else {
                        -s
                    }
                })
                .collect();
            let mut last = (-steps.iter().sum::<i64>()).rem_euclid(16);
            if last > 8 {
                last -= 16;
            }
            if last == 0 || last == 8 {
                continue;
            }
            steps.push(last);
            if steps.iter().any(|&s| s > 0) && steps.iter().any(|&s| s < 0) {
                break steps;
            }
        };
        let mut at = rng.gen_range(0..16i64);
        let mut indices = Vec::with_capacity(sectors);
        for s in steps {
            indices.push(at);
            at += s;
        }
        let images = stretched(&mut rng, &indices);
        FanSpec2D::from_image_rays(rays, &images)
    }

    fn sector_cones(&self) -> Result<Vec<[Halfspace; 2]>> {
        let m = self.rays.len();
        if m < 3 || self.matrices.len() != m {
            return Err(Error::Invalid(format!(
                "a fan needs at least 3 rays and one matrix per sector, got {m} rays and {} matrices",
                self.matrices.len()
            )));
        }
        let origin = RVector::zeros(2);
        let mut cones = Vec::with_capacity(m);
        for k in 0..m {
            let a = &self.rays[k];
            let b = &self.rays[(k + 1) % m];
            if a.dim() != 2 || b.dim() != 2 {
                return Err(Error::UnsupportedDimension(a.dim().max(b.dim())));
            }
            if !cross(a, b).is_positive() {
                return Err(Error::Invalid(format!(
                    "rays {k} and {} do not turn counter-clockwise through less than a half-turn",
                    (k + 1) % m
                )));
            }
            let mk = &self.matrices[k];
            let mn = &self.matrices[(k + 1) % m];
            if mk.mul_vec(b)? != mn.mul_vec(b)? {
                return Err(Error::Invalid(format!(
                    "matrices {k} and {} disagree on their common ray",
                    (k + 1) % m
                )));
            }
            cones.push([left_of(&origin, a)?, left_of(b, &origin)?]);
        }
        Ok(cones)
    }
}

fn validated(f: PlFunction) -> Result<PlFunction> {
    f.validated().map_err(|report| {
        Error::Inconsistent(format!(
            "generated map failed validation: {:?}",
            report.kinds()
        ))
    })
}

/// The fan map: one unbounded cone per sector.
pub fn gen_fan_2d(spec: &FanSpec2D) -> Result<PlFunction> {
    let cones = spec.sector_cones()?;
    let pieces = cones
        .into_iter()
        .zip(&spec.matrices)
        .map(|(cone, m)| Ok((HPolyhedron::new(2, cone.to_vec())?, Selection::linear(m.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    validated(PlFunction::from_pieces(2, pieces)?)
}

/// The fan map with every sector cut at `scale · rays` into a bounded
/// triangle and an unbounded remainder, which share the sector's matrix.
/// Bounded cells come first.
pub fn gen_star_fan_2d(spec: &FanSpec2D, scale: &Rational) -> Result<PlFunction> {
    if !scale.is_positive() {
        return Err(Error::Invalid("scale must be positive".into()));
    }
    let cones = spec.sector_cones()?;
    let m = cones.len();
    let selections = spec
        .matrices
        .iter()
        .map(|a| Selection::linear(a.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut inner = Vec::with_capacity(m);
    let mut outer = Vec::with_capacity(m);
    for (k, cone) in cones.into_iter().enumerate() {
        let a = spec.rays[k].scale(scale);
        let b = spec.rays[(k + 1) % m].scale(scale);
        let cut = left_of(&a, &b)?;
        let mut t = cone.to_vec();
        t.push(cut.clone());
        let mut u = cone.to_vec();
        u.push(cut.complement());
        inner.push(Cell {
            polyhedron: HPolyhedron::new(2, t)?,
            selection: k,
        });
        outer.push(Cell {
            polyhedron: HPolyhedron::new(2, u)?,
            selection: k,
        });
    }
    inner.extend(outer);
    validated(PlFunction::new(2, selections, inner)?)
}
