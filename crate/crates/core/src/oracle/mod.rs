//! Instance generators, bounded-cell perturbation and a brute-force grid
//! oracle for surjectivity. These exist to test the certificates against
//! independent evidence.

mod gen;
mod grid;
mod perturb;

pub use gen::{gen_1d, gen_fan_2d, gen_star_fan_2d, FanSpec2D, GenSpec1D};
pub use grid::{grid_surjectivity_oracle, GridBox, OracleReport};
pub use perturb::{perturb_bounded, Perturbation};

/// The map winding the plane twice around the origin: each ray at angle `θ`
/// goes to the ray at angle `2θ`.
pub fn folding_map() -> crate::Result<crate::PlFunction> {
    use crate::linalg::RVector;
    let rays: Vec<RVector> = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
        .iter()
        .map(|&(x, y)| RVector::from_ints(&[x, y]))
        .collect();
    let axes = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let images: Vec<RVector> = (0..8)
        .map(|k| {
            let (x, y) = axes[k % 4];
            RVector::from_ints(&[x, y])
        })
        .collect();
    gen_fan_2d(&FanSpec2D::from_image_rays(rays, &images)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::certify::{classify_1d, OneDimClass};
    use crate::degree;
    use crate::linalg::{RMatrix, RVector};
    use crate::rational::{q, Rational};
    use crate::PlFunction;

    pub(crate) fn folding_map() -> PlFunction {
        super::folding_map().unwrap()
    }

    /// `(x1, x2) ↦ (|x1|, x2)`.
    pub(crate) fn half_fold() -> PlFunction {
        let rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
            .iter()
            .map(|&(x, y)| RVector::from_ints(&[x, y]))
            .collect();
        let id = RMatrix::identity(2);
        let flip = RMatrix::from_ints(&[&[-1, 0], &[0, 1]]).unwrap();
        gen_fan_2d(&FanSpec2D {
            rays,
            matrices: vec![id.clone(), flip.clone(), flip, id],
        })
        .unwrap()
    }

    #[test]
    fn gen_1d_is_continuous_through_values() {
        let bp = vec![q(-1, 1), q(1, 2), q(3, 1)];
        let vals = vec![q(2, 1), q(-1, 1), q(5, 1)];
        let spec = GenSpec1D::from_values(bp.clone(), &vals, q(1, 1), q(-2, 1)).unwrap();
        let f = gen_1d(&spec).unwrap();
        assert_eq!(f.cells().len(), 4);
        for (t, v) in bp.iter().zip(&vals) {
            assert_eq!(f.evaluate(&RVector::new(vec![t.clone()])).unwrap()[0], *v);
        }
        assert_eq!(f.evaluate(&RVector::from_ints(&[-3])).unwrap(), RVector::from_ints(&[0]));
        assert_eq!(classify_1d(&f).unwrap(), OneDimClass::NotSurjective);
    }

    #[test]
    fn gen_1d_without_breakpoints() {
        let f = gen_1d(&GenSpec1D {
            breakpoints: vec![],
            slopes: vec![q(2, 1)],
            intercept: q(1, 1),
        })
        .unwrap();
        assert_eq!(f.evaluate(&RVector::from_ints(&[3])).unwrap(), RVector::from_ints(&[7]));
    }

    #[test]
    fn gen_1d_anchor_is_value_at_first_breakpoint() {
        let abs = gen_1d(&GenSpec1D {
            breakpoints: vec![q(0, 1)],
            slopes: vec![q(-1, 1), q(1, 1)],
            intercept: q(0, 1),
        })
        .unwrap();
        assert_eq!(abs, crate::function::tests::abs_map());
        let zigzag = gen_1d(&GenSpec1D {
            breakpoints: vec![q(0, 1), q(1, 1)],
            slopes: vec![q(1, 1), q(-1, 1), q(1, 1)],
            intercept: q(2, 1),
        })
        .unwrap();
        assert_eq!(zigzag.evaluate(&RVector::from_ints(&[0])).unwrap(), RVector::from_ints(&[2]));
        assert_eq!(zigzag.evaluate(&RVector::from_ints(&[1])).unwrap(), RVector::from_ints(&[1]));
        assert_eq!(classify_1d(&zigzag).unwrap(), OneDimClass::Surjective);
        assert!(gen_1d(&GenSpec1D {
            breakpoints: vec![q(1, 1), q(1, 1)],
            slopes: vec![q(1, 1); 3],
            intercept: q(0, 1),
        })
        .is_err());
    }

    #[test]
    fn random_specs_build() {
        for seed in 0..30 {
            gen_1d(&GenSpec1D::random(seed, 20)).unwrap();
            for w in [-2, -1, 1, 2] {
                gen_fan_2d(&FanSpec2D::random_coherent(seed, 6, w).unwrap()).unwrap();
            }
            let mixed = gen_fan_2d(&FanSpec2D::random_mixed(seed, 5).unwrap()).unwrap();
            let signs: Vec<_> = mixed.selections().iter().map(|s| s.det_sign()).collect();
            assert!(signs.iter().any(|s| s.as_i64() > 0) && signs.iter().any(|s| s.as_i64() < 0));
        }
    }

    #[test]
    fn coherent_fan_degree_is_winding() {
        for w in [-2i64, -1, 1, 2, 3] {
            let f = gen_fan_2d(&FanSpec2D::random_coherent(7, 8, w).unwrap()).unwrap();
            assert_eq!(degree::global_degree(&f, 5, 1).unwrap().degree, w);
        }
    }

    #[test]
    fn folding_map_matrices() {
        let f = folding_map();
        assert_eq!(f.selections()[0].a, RMatrix::from_ints(&[&[1, -1], &[0, 1]]).unwrap());
        assert_eq!(f.selections()[1].a, RMatrix::from_ints(&[&[1, -1], &[1, 0]]).unwrap());
    }

    #[test]
    fn star_fan_identity_box() {
        let rays = [(1, 1), (-1, 1), (-1, -1), (1, -1)]
            .iter()
            .map(|&(x, y)| RVector::from_ints(&[x, y]))
            .collect();
        let spec = FanSpec2D {
            rays,
            matrices: vec![RMatrix::identity(2); 4],
        };
        let f = gen_star_fan_2d(&spec, &Rational::from_int(3)).unwrap();
        let (bounded, unbounded) = f.split_cells().unwrap();
        assert_eq!((bounded.len(), unbounded.len()), (4, 4));
        assert_eq!(f.bounded_image_radius().unwrap(), Rational::from_int(3));
    }

    #[test]
    fn perturbation_keeps_unbounded_cells() {
        let spec = FanSpec2D::random_coherent(3, 5, 1).unwrap();
        let f = gen_star_fan_2d(&spec, &Rational::from_int(2)).unwrap();
        for seed in 0..5 {
            let p = perturb_bounded(&f, seed).unwrap();
            let g = &p.function;
            assert!(g.cells().len() > f.cells().len());
            let (_, unb_f) = f.split_cells().unwrap();
            for i in unb_f {
                assert!(g.cells().contains(&f.cells()[i]));
            }
            assert_eq!(
                degree::global_degree(g, 5, seed).unwrap().degree,
                degree::global_degree(&f, 5, seed).unwrap().degree
            );
        }
    }

    #[test]
    fn perturbation_1d() {
        let spec = GenSpec1D::from_values(
            vec![q(0, 1), q(1, 1), q(2, 1)],
            &[q(0, 1), q(1, 1), q(2, 1)],
            q(1, 1),
            q(1, 1),
        )
        .unwrap();
        let f = gen_1d(&spec).unwrap();
        let p = perturb_bounded(&f, 4).unwrap();
        assert_eq!(p.function.cells().len(), 5);
        for x in [-5, 0, 2, 7] {
            let x = RVector::from_ints(&[x]);
            assert_eq!(p.function.evaluate(&x).unwrap(), f.evaluate(&x).unwrap());
        }
        let line = gen_1d(&GenSpec1D {
            breakpoints: vec![],
            slopes: vec![q(1, 1)],
            intercept: q(0, 1),
        })
        .unwrap();
        assert!(perturb_bounded(&line, 0).unwrap().cell.is_none());
    }

    #[test]
    fn grid_oracle_on_abs() {
        let f = crate::function::tests::abs_map();
        let grid = GridBox::cube(1, q(-2, 1), q(2, 1));
        let r = grid_surjectivity_oracle(&f, &grid, &q(1, 2)).unwrap();
        assert_eq!(r.targets, 9);
        assert_eq!(r.uncovered_targets.len(), 4);
        assert_eq!(r.irregular_targets, 1);
        assert_eq!((r.min_preimage_count, r.max_preimage_count), (Some(0), Some(2)));
        let r = grid_surjectivity_oracle(&f, &GridBox::cube(1, q(-2, 1), q(2, 1)), &q(1, 1)).unwrap();
        assert_eq!(r.uncovered_targets, vec![RVector::from_ints(&[-2]), RVector::from_ints(&[-1])]);
        assert!(grid_surjectivity_oracle(&f, &grid, &q(0, 1)).is_err());
    }
}
