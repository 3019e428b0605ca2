//! H-representation polyhedra and the LP-backed queries on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RMatrix, RVector};
use crate::lp::{self, LpOutcome};
use crate::rational::Rational;

/// The closed halfspace `{x : normal·x ≤ offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawHalfspace")]
pub struct Halfspace {
    normal: RVector,
    offset: Rational,
}

#[derive(Deserialize)]
struct RawHalfspace {
    normal: RVector,
    offset: Rational,
}

impl TryFrom<RawHalfspace> for Halfspace {
    type Error = Error;
    fn try_from(raw: RawHalfspace) -> Result<Self> {
        Halfspace::new(raw.normal, raw.offset)
    }
}

impl Halfspace {
    pub fn new(normal: RVector, offset: Rational) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::Invalid("halfspace normal is the zero vector".into()));
        }
        Ok(Halfspace { normal, offset })
    }

    /// Integer-coefficient shorthand.
    pub fn from_ints(normal: &[i64], offset: i64) -> Result<Self> {
        Halfspace::new(RVector::from_ints(normal), Rational::from_int(offset))
    }

    pub fn normal(&self) -> &RVector {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn slack(&self, x: &RVector) -> Rational {
        &self.offset - self.normal.dot(x)
    }

    pub fn holds(&self, x: &RVector) -> bool {
        !self.slack(x).is_negative()
    }

    /// The opposite closed halfspace `{x : normal·x ≥ offset}`.
    pub fn complement(&self) -> Halfspace {
        Halfspace {
            normal: self.normal.neg(),
            offset: -&self.offset,
        }
    }

    /// True when both describe the same set (positive multiples).
    pub fn same_set(&self, other: &Halfspace) -> bool {
        let Some(k) = self
            .normal
            .iter()
            .position(|v| !v.is_zero())
        else {
            return false;
        };
        if other.normal[k].is_zero() {
            return false;
        }
        let ratio = &other.normal[k] / &self.normal[k];
        ratio.is_positive()
            && self.normal.scale(&ratio) == other.normal
            && &self.offset * &ratio == other.offset
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

/// Outcome of an LP over a polyhedron.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpResult {
    Optimal { optimum: Rational, witness: RVector },
    Unbounded { witness: RVector, ray: RVector },
    Infeasible,
}

/// A facet together with a point in its relative interior.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    pub constraint: usize,
    pub witness: RVector,
}

/// Result of the uniform-slack LP: the largest `t ≤ 1` such that some `x`
/// satisfies every constraint with slack at least `t`.
#[derive(Clone, Debug)]
pub(crate) struct SlackPoint {
    pub slack: Rational,
    pub point: RVector,
}

/// Finite intersection of closed halfspaces in `R^dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPolyhedron")]
pub struct HPolyhedron {
    dim: usize,
    constraints: Vec<Halfspace>,
}

#[derive(Deserialize)]
struct RawPolyhedron {
    dim: usize,
    constraints: Vec<Halfspace>,
}

impl TryFrom<RawPolyhedron> for HPolyhedron {
    type Error = Error;
    fn try_from(raw: RawPolyhedron) -> Result<Self> {
        HPolyhedron::new(raw.dim, raw.constraints)
    }
}

impl HPolyhedron {
    pub fn new(dim: usize, constraints: Vec<Halfspace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("polyhedron dimension must be positive".into()));
        }
        if let Some(h) = constraints.iter().find(|h| h.normal.dim() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: h.normal.dim(),
            });
        }
        Ok(HPolyhedron { dim, constraints })
    }

    /// All of `R^dim`.
    pub fn whole_space(dim: usize) -> Self {
        HPolyhedron {
            dim,
            constraints: Vec::new(),
        }
    }

    /// The box `lo ≤ x_j ≤ hi` in every coordinate.
    pub fn cube(dim: usize, lo: &Rational, hi: &Rational) -> Self {
        let mut constraints = Vec::with_capacity(2 * dim);
        for j in 0..dim {
            let e = RVector::unit(dim, j);
            constraints.push(Halfspace { normal: e.neg(), offset: -lo });
            constraints.push(Halfspace { normal: e, offset: hi.clone() });
        }
        HPolyhedron { dim, constraints }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Halfspace] {
        &self.constraints
    }

    pub fn with_constraint(mut self, h: Halfspace) -> Result<Self> {
        self.check_dim(h.normal.dim())?;
        self.constraints.push(h);
        Ok(self)
    }

    pub fn intersect(&self, other: &HPolyhedron) -> Result<HPolyhedron> {
        self.check_dim(other.dim)?;
        let mut constraints = self.constraints.clone();
        constraints.extend(other.constraints.iter().cloned());
        Ok(HPolyhedron {
            dim: self.dim,
            constraints,
        })
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got,
            });
        }
        Ok(())
    }

    fn rows(&self) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        self.constraints
            .iter()
            .map(|h| (h.normal.entries().to_vec(), h.offset.clone()))
            .unzip()
    }

    pub fn lp_solve(&self, objective: &RVector, sense: Sense) -> Result<LpResult> {
        self.check_dim(objective.dim())?;
        let (rows, rhs) = self.rows();
        let c: Vec<Rational> = match sense {
            Sense::Max => objective.entries().to_vec(),
            Sense::Min => objective.neg().into_entries(),
        };
        Ok(match lp::maximize(&c, &rows, &rhs) {
            LpOutcome::Optimal { point, .. } => {
                let witness = RVector::new(point);
                LpResult::Optimal {
                    optimum: objective.dot(&witness),
                    witness,
                }
            }
            LpOutcome::Unbounded { point, ray } => LpResult::Unbounded {
                witness: RVector::new(point),
                ray: RVector::new(ray),
            },
            LpOutcome::Infeasible => LpResult::Infeasible,
        })
    }

    /// Some point of the polyhedron, if any.
    pub fn feasible_point(&self) -> Option<RVector> {
        let (rows, rhs) = self.rows();
        match lp::maximize(&vec![Rational::zero(); self.dim], &rows, &rhs) {
            LpOutcome::Optimal { point, .. } => Some(RVector::new(point)),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.feasible_point().is_none()
    }

    pub fn contains(&self, x: &RVector) -> Result<bool> {
        self.check_dim(x.dim())?;
        Ok(self.constraints.iter().all(|h| h.holds(x)))
    }

    /// True when every constraint holds with strictly positive slack.
    pub fn contains_strictly(&self, x: &RVector) -> Result<bool> {
        self.check_dim(x.dim())?;
        Ok(self.constraints.iter().all(|h| h.slack(x).is_positive()))
    }

    /// Indices of constraints tight at `x`.
    pub fn tight_constraints(&self, x: &RVector) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, h)| h.slack(x).is_zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Maximize `t ≤ 1` subject to `a·x + t ≤ b` for every constraint not in
    /// `equalities`, and `a·x = b` for those in `equalities`.
    /// `None` when the equalities themselves are infeasible.
    pub(crate) fn max_uniform_slack(&self, equalities: &[usize]) -> Option<SlackPoint> {
        let n = self.dim;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (i, h) in self.constraints.iter().enumerate() {
            let mut row = h.normal.entries().to_vec();
            if equalities.contains(&i) {
                row.push(Rational::zero());
                rows.push(row.iter().map(|v| -v).collect());
                rhs.push(-&h.offset);
            } else {
                row.push(Rational::one());
            }
            rows.push(row);
            rhs.push(h.offset.clone());
        }
        let mut cap = vec![Rational::zero(); n + 1];
        cap[n] = Rational::one();
        rows.push(cap.clone());
        rhs.push(Rational::one());
        match lp::maximize(&cap, &rows, &rhs) {
            LpOutcome::Optimal { value, mut point } => {
                point.truncate(n);
                Some(SlackPoint {
                    slack: value,
                    point: RVector::new(point),
                })
            }
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded { .. } => unreachable!("slack is capped at one"),
        }
    }

    /// A point with every constraint strictly slack, or `None` when the
    /// polyhedron is lower-dimensional or empty.
    pub fn interior_point(&self) -> Option<RVector> {
        self.max_uniform_slack(&[])
            .filter(|s| s.slack.is_positive())
            .map(|s| s.point)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.interior_point().is_some()
    }

    /// `{d : normal_k·d ≤ 0 for every constraint k}`.
    pub fn recession_cone(&self) -> HPolyhedron {
        HPolyhedron {
            dim: self.dim,
            constraints: self
                .constraints
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal.clone(),
                    offset: Rational::zero(),
                })
                .collect(),
        }
    }

    /// A nonzero recession direction, or `None` for a polytope.
    ///
    /// Maximizes `±d_j` over the recession cone cut by the box `[-1, 1]^n`.
    pub fn recession_direction(&self) -> Result<Option<RVector>> {
        if self.is_empty() {
            return Err(Error::Infeasible);
        }
        let one = Rational::one();
        let boxed = self
            .recession_cone()
            .intersect(&HPolyhedron::cube(self.dim, &-&one, &one))?;
        for j in 0..self.dim {
            for sense in [Sense::Max, Sense::Min] {
                match boxed.lp_solve(&RVector::unit(self.dim, j), sense)? {
                    LpResult::Optimal { optimum, witness } if !optimum.is_zero() => {
                        return Ok(Some(witness))
                    }
                    LpResult::Optimal { .. } => {}
                    other => {
                        return Err(Error::Inconsistent(format!(
                            "recession LP over a nonempty box returned {other:?}"
                        )))
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_bounded(&self) -> Result<bool> {
        Ok(self.recession_direction()?.is_none())
    }

    /// One entry per facet: the lowest-indexed constraint defining it and a
    /// point in its relative interior.
    pub fn facet_witnesses(&self) -> Result<Vec<Facet>> {
        if !self.is_full_dimensional() {
            return Err(Error::LowerDimensional);
        }
        let mut facets = Vec::new();
        for (k, h) in self.constraints.iter().enumerate() {
            if self.constraints[..k].iter().any(|g| g.same_set(h)) {
                continue;
            }
            // Duplicates of constraint k are tight on its hyperplane as well.
            let tight: Vec<usize> = self
                .constraints
                .iter()
                .enumerate()
                .filter(|(_, g)| g.same_set(h))
                .map(|(i, _)| i)
                .collect();
            if let Some(s) = self.max_uniform_slack(&tight) {
                if s.slack.is_positive() {
                    facets.push(Facet {
                        constraint: k,
                        witness: s.point,
                    });
                }
            }
        }
        Ok(facets)
    }

    /// The face obtained by turning the listed constraints into equalities.
    pub fn face(&self, tight: &[usize]) -> HPolyhedron {
        let mut constraints = self.constraints.clone();
        for &k in tight {
            constraints.push(self.constraints[k].complement());
        }
        HPolyhedron {
            dim: self.dim,
            constraints,
        }
    }

    /// A point of `self` outside `other`, or `None` when `self ⊆ other`.
    pub fn point_outside(&self, other: &HPolyhedron) -> Result<Option<RVector>> {
        self.check_dim(other.dim)?;
        for h in &other.constraints {
            match self.lp_solve(&h.normal, Sense::Max)? {
                LpResult::Optimal { optimum, witness } => {
                    if optimum > h.offset {
                        return Ok(Some(witness));
                    }
                }
                LpResult::Unbounded { witness, ray } => {
                    // Step far enough along the ray to cross h.
                    let rate = h.normal.dot(&ray);
                    let step = (&h.offset - h.normal.dot(&witness)).max(Rational::zero()) / &rate
                        + Rational::one();
                    return Ok(Some(witness.add_scaled(&step, &ray)));
                }
                LpResult::Infeasible => return Ok(None),
            }
        }
        Ok(None)
    }

    pub fn is_subset_of(&self, other: &HPolyhedron) -> Result<bool> {
        Ok(self.point_outside(other)?.is_none())
    }

    /// Whether facet `i` of `self` equals facet `j` of `other` as a point set.
    pub fn same_face(&self, i: usize, other: &HPolyhedron, j: usize) -> Result<bool> {
        self.check_dim(other.dim)?;
        for (p, k) in [(self, i), (other, j)] {
            if k >= p.constraints.len() {
                return Err(Error::Invalid(format!("constraint index {k} out of range")));
            }
        }
        let fi = self.face(&[i]);
        let fj = other.face(&[j]);
        Ok(fi.is_subset_of(&fj)? && fj.is_subset_of(&fi)?)
    }

    /// Constraints that hold with equality on the whole (nonempty) polyhedron.
    pub fn implicit_equalities(&self) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (k, h) in self.constraints.iter().enumerate() {
            match self.lp_solve(&h.normal, Sense::Min)? {
                LpResult::Optimal { optimum, .. } if optimum == h.offset => out.push(k),
                LpResult::Infeasible => return Err(Error::Infeasible),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Dimension of the affine hull, with a point and direction basis of it.
    pub fn affine_hull(&self) -> Result<(RVector, Vec<RVector>)> {
        let eq = self.implicit_equalities()?;
        let point = self.feasible_point().ok_or(Error::Infeasible)?;
        if eq.is_empty() {
            return Ok((point, (0..self.dim).map(|j| RVector::unit(self.dim, j)).collect()));
        }
        let normals = RMatrix::from_rows(
            eq.iter()
                .map(|&k| self.constraints[k].normal.entries().to_vec())
                .collect(),
        )?;
        Ok((point, normals.kernel_basis()))
    }

    /// Exact objective range check used by tests and callers.
    pub fn value_range(&self, objective: &RVector) -> Result<(Option<Rational>, Option<Rational>)> {
        let lo = match self.lp_solve(objective, Sense::Min)? {
            LpResult::Optimal { optimum, .. } => Some(optimum),
            LpResult::Unbounded { .. } => None,
            LpResult::Infeasible => return Err(Error::Infeasible),
        };
        let hi = match self.lp_solve(objective, Sense::Max)? {
            LpResult::Optimal { optimum, .. } => Some(optimum),
            _ => None,
        };
        Ok((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn h(normal: &[i64], offset: i64) -> Halfspace {
        Halfspace::from_ints(normal, offset).unwrap()
    }

    fn poly(dim: usize, hs: Vec<Halfspace>) -> HPolyhedron {
        HPolyhedron::new(dim, hs).unwrap()
    }

    fn square() -> HPolyhedron {
        HPolyhedron::cube(2, &Rational::from_int(-1), &Rational::one())
    }

    fn quadrant() -> HPolyhedron {
        poly(2, vec![h(&[-1, 0], 0), h(&[0, -1], 0)])
    }

    fn slab() -> HPolyhedron {
        poly(2, vec![h(&[0, 1], 1), h(&[0, -1], 1)])
    }

    #[test]
    fn lp_examples() {
        let p = poly(1, vec![h(&[1], 5), h(&[-1], 0)]);
        assert_eq!(
            p.lp_solve(&RVector::from_ints(&[1]), Sense::Max).unwrap(),
            LpResult::Optimal {
                optimum: Rational::from_int(5),
                witness: RVector::from_ints(&[5])
            }
        );
        let half = poly(2, vec![h(&[-1, 0], 0)]);
        match half.lp_solve(&RVector::from_ints(&[1, 0]), Sense::Max).unwrap() {
            LpResult::Unbounded { ray, .. } => assert_eq!(ray, RVector::from_ints(&[1, 0])),
            other => panic!("{other:?}"),
        }
        let empty = poly(1, vec![h(&[1], -1), h(&[-1], 0)]);
        assert_eq!(
            empty.lp_solve(&RVector::from_ints(&[1]), Sense::Max).unwrap(),
            LpResult::Infeasible
        );
        assert!(matches!(
            p.lp_solve(&RVector::from_ints(&[1, 1]), Sense::Max),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn contains_examples() {
        let p = poly(1, vec![h(&[1], 1), h(&[-1], 1)]);
        assert!(p.contains(&RVector::from_ints(&[0])).unwrap());
        let p = poly(1, vec![h(&[1], 1)]);
        assert!(!p.contains(&RVector::from_ints(&[2])).unwrap());
        assert!(p.contains(&RVector::from_ints(&[1])).unwrap());
        assert!(p.contains(&RVector::from_ints(&[1, 1])).is_err());
    }

    #[test]
    fn interior_point_examples() {
        let x = square().interior_point().unwrap();
        assert!(square().contains_strictly(&x).unwrap());
        assert_eq!(x, RVector::zeros(2));
        let line = poly(2, vec![h(&[1, 0], 0), h(&[-1, 0], 0)]);
        assert_eq!(line.interior_point(), None);
        let x = quadrant().interior_point().unwrap();
        assert!(x[0].is_positive() && x[1].is_positive());
        let empty = poly(1, vec![h(&[1], -1), h(&[-1], 0)]);
        assert_eq!(empty.interior_point(), None);
    }

    #[test]
    fn recession_and_boundedness() {
        let sq = square();
        assert!(sq.is_bounded().unwrap());
        assert_eq!(sq.recession_direction().unwrap(), None);
        assert_eq!(quadrant().recession_cone(), quadrant());
        assert!(!quadrant().is_bounded().unwrap());
        let cone = slab().recession_cone();
        assert!(cone.contains(&RVector::from_ints(&[5, 0])).unwrap());
        assert!(!cone.contains(&RVector::from_ints(&[0, 1])).unwrap());
        assert!(!slab().is_bounded().unwrap());
        let empty = poly(1, vec![h(&[1], -1), h(&[-1], 0)]);
        assert!(matches!(empty.is_bounded(), Err(Error::Infeasible)));
    }

    #[test]
    fn facets_examples() {
        let facets = square().facet_witnesses().unwrap();
        assert_eq!(facets.len(), 4);
        for f in &facets {
            let p = square();
            let hs = &p.constraints()[f.constraint];
            assert!(hs.slack(&f.witness).is_zero());
            let others = p.tight_constraints(&f.witness);
            assert_eq!(others, vec![f.constraint]);
        }

        // Triangle x >= 0, y >= 0, x + y <= 1, plus redundant x <= 2 and a
        // duplicate of x + y <= 1.
        let tri = poly(
            2,
            vec![
                h(&[-1, 0], 0),
                h(&[0, -1], 0),
                h(&[1, 1], 1),
                h(&[1, 0], 2),
                h(&[2, 2], 2),
            ],
        );
        let facets: Vec<usize> = tri.facet_witnesses().unwrap().iter().map(|f| f.constraint).collect();
        assert_eq!(facets, vec![0, 1, 2]);

        let halfplane = poly(2, vec![h(&[1, 0], 0)]);
        assert_eq!(halfplane.facet_witnesses().unwrap().len(), 1);

        let line = poly(2, vec![h(&[1, 0], 0), h(&[-1, 0], 0)]);
        assert!(matches!(line.facet_witnesses(), Err(Error::LowerDimensional)));
    }

    /// Independent redundancy oracle: a constraint is facet-defining iff
    /// dropping it (and its duplicates) enlarges the polyhedron.
    #[test]
    fn facets_agree_with_removal_oracle() {
        let tri = poly(
            2,
            vec![
                h(&[-1, 0], 0),
                h(&[0, -1], 0),
                h(&[1, 1], 1),
                h(&[1, 0], 2),
                h(&[1, 1], 3),
            ],
        );
        let mut oracle = Vec::new();
        for k in 0..tri.constraints().len() {
            let rest: Vec<Halfspace> = tri
                .constraints()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != k)
                .map(|(_, c)| c.clone())
                .collect();
            let relaxed = poly(2, rest);
            if !relaxed.is_subset_of(&tri).unwrap() {
                oracle.push(k);
            }
        }
        let facets: Vec<usize> = tri.facet_witnesses().unwrap().iter().map(|f| f.constraint).collect();
        assert_eq!(facets, oracle);
        assert_eq!(oracle.len(), 3);
    }

    #[test]
    fn same_face_examples() {
        // [0,1]^2 and [1,2]x[0,1]
        let a = poly(2, vec![h(&[-1, 0], 0), h(&[1, 0], 1), h(&[0, -1], 0), h(&[0, 1], 1)]);
        let b = poly(2, vec![h(&[-1, 0], -1), h(&[1, 0], 2), h(&[0, -1], 0), h(&[0, 1], 1)]);
        assert!(a.same_face(1, &b, 0).unwrap());
        assert!(b.same_face(0, &a, 1).unwrap());
        assert!(a.same_face(1, &a, 1).unwrap());
        assert!(!a.same_face(3, &b, 2).unwrap());
        // [1,2]x[0,2]: its left edge strictly contains a's right edge.
        let c = poly(2, vec![h(&[-1, 0], -1), h(&[1, 0], 2), h(&[0, -1], 0), h(&[0, 1], 2)]);
        assert!(!a.same_face(1, &c, 0).unwrap());
        assert!(a.same_face(7, &c, 0).is_err());
    }

    #[test]
    fn implicit_equalities_and_hull() {
        let a = poly(2, vec![h(&[-1, 0], 0), h(&[1, 0], 1), h(&[0, -1], 0), h(&[0, 1], 1)]);
        let b = poly(2, vec![h(&[-1, 0], -1), h(&[1, 0], 2), h(&[0, -1], 0), h(&[0, 1], 1)]);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.implicit_equalities().unwrap(), vec![1, 4]);
        let (p, dirs) = i.affine_hull().unwrap();
        assert_eq!(p[0], Rational::one());
        assert_eq!(dirs.len(), 1);
        assert!(dirs[0][0].is_zero());
    }

    #[test]
    fn point_outside_unbounded() {
        let outside = quadrant().point_outside(&square()).unwrap().unwrap();
        assert!(quadrant().contains(&outside).unwrap());
        assert!(!square().contains(&outside).unwrap());
        assert!(square().is_subset_of(&HPolyhedron::cube(2, &q(-3, 2), &q(3, 2))).unwrap());
    }

    #[test]
    fn halfspace_json() {
        let hs: Halfspace = serde_json::from_str(r#"{"normal": ["1","-1/2"], "offset": "3"}"#).unwrap();
        assert_eq!(hs.normal()[1], q(-1, 2));
        assert!(serde_json::from_str::<Halfspace>(r#"{"normal": ["0","0"], "offset": "3"}"#).is_err());
        let p: HPolyhedron =
            serde_json::from_str(r#"{"dim": 2, "constraints": [{"normal": ["1","0"], "offset": "0"}]}"#)
                .unwrap();
        assert_eq!(p.constraints().len(), 1);
        assert!(serde_json::from_str::<HPolyhedron>(
            r#"{"dim": 3, "constraints": [{"normal": ["1","0"], "offset": "0"}]}"#
        )
        .is_err());
    }
}
