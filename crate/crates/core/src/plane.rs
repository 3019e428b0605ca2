//! Exact planar helpers: polygon vertices, triangles, affine interpolation.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::function::Selection;
use crate::linalg::{RMatrix, RVector};
use crate::polyhedron::{HPolyhedron, Halfspace};
use crate::rational::Rational;

/// `a.x * b.y - a.y * b.x`
pub fn cross(a: &RVector, b: &RVector) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Vertices of a bounded full-dimensional polygon, counter-clockwise.
pub fn polygon_vertices(p: &HPolyhedron) -> Result<Vec<RVector>> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    let hs = p.constraints();
    let mut verts: Vec<RVector> = Vec::new();
    for i in 0..hs.len() {
        for j in i + 1..hs.len() {
            let m = RMatrix::from_rows(vec![
                hs[i].normal().entries().to_vec(),
                hs[j].normal().entries().to_vec(),
            ])?;
            let rhs = RVector::new(vec![hs[i].offset().clone(), hs[j].offset().clone()]);
            if let Some(v) = m.solve_unique(&rhs)? {
                if p.contains(&v)? && !verts.contains(&v) {
                    verts.push(v);
                }
            }
        }
    }
    sort_ccw(&mut verts);
    Ok(verts)
}

/// Sorts points of a convex polygon counter-clockwise around their centroid,
/// starting from the lowest angle in `(-π, π]`.
pub fn sort_ccw(pts: &mut [RVector]) {
    if pts.is_empty() {
        return;
    }
    let c = centroid(pts);
    let half = |v: &RVector| -> u8 {
        // upper half-plane (angle in [0, π)) first
        if v[1].is_positive() || (v[1].is_zero() && !v[0].is_negative()) {
            0
        } else {
            1
        }
    };
    pts.sort_by(|a, b| {
        let da = a.sub(&c);
        let db = b.sub(&c);
        half(&da).cmp(&half(&db)).then_with(|| {
            match cross(&da, &db).sign() {
                crate::rational::Sign::Positive => Ordering::Less,
                crate::rational::Sign::Negative => Ordering::Greater,
                crate::rational::Sign::Zero => Ordering::Equal,
            }
        })
    });
}

pub fn centroid(pts: &[RVector]) -> RVector {
    let n = Rational::from_int(pts.len() as i64);
    let mut sum = RVector::zeros(pts[0].dim());
    for p in pts {
        sum = sum.add(p);
    }
    sum.scale(&n.recip().expect("nonempty"))
}

/// Halfspace whose boundary passes through `a` and `b` and which contains the
/// points to the left of the directed line `a → b`.
pub fn left_of(a: &RVector, b: &RVector) -> Result<Halfspace> {
    let e = b.sub(a);
    // left of a→b: cross(e, x − a) ≥ 0  ⇔  (e_y, −e_x)·x ≤ (e_y, −e_x)·a
    let normal = RVector::new(vec![e[1].clone(), -&e[0]]);
    let offset = normal.dot(a);
    Halfspace::new(normal, offset)
}

/// The closed triangle with counter-clockwise vertices `a, b, c`.
pub fn triangle(a: &RVector, b: &RVector, c: &RVector) -> Result<HPolyhedron> {
    if !cross(&b.sub(a), &c.sub(a)).is_positive() {
        return Err(Error::Invalid("triangle is degenerate or clockwise".into()));
    }
    HPolyhedron::new(2, vec![left_of(a, b)?, left_of(b, c)?, left_of(c, a)?])
}

/// The unique affine map of the plane sending `points[k]` to `values[k]`
/// for three affinely independent points.
pub fn interpolate(points: [&RVector; 3], values: [&RVector; 3]) -> Result<Selection> {
    // Unknowns per output coordinate i: (A_i0, A_i1, b_i).
    let m = RMatrix::from_rows(
        points
            .iter()
            .map(|p| vec![p[0].clone(), p[1].clone(), Rational::one()])
            .collect(),
    )?;
    let mut rows = Vec::with_capacity(2);
    let mut b = Vec::with_capacity(2);
    for i in 0..2 {
        let rhs = RVector::new(values.iter().map(|v| v[i].clone()).collect());
        let sol = m
            .solve_unique(&rhs)?
            .ok_or_else(|| Error::Invalid("interpolation points are collinear".into()))?;
        rows.push(vec![sol[0].clone(), sol[1].clone()]);
        b.push(sol[2].clone());
    }
    Selection::new(RMatrix::from_rows(rows)?, RVector::new(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> RVector {
        RVector::from_ints(&[x, y])
    }

    #[test]
    fn square_vertices_ccw() {
        let sq = HPolyhedron::cube(2, &Rational::from_int(-1), &Rational::one());
        let verts = polygon_vertices(&sq).unwrap();
        assert_eq!(verts, vec![v(1, 1), v(-1, 1), v(-1, -1), v(1, -1)]);
        for k in 0..4 {
            let a = &verts[k];
            let b = &verts[(k + 1) % 4];
            let c = &verts[(k + 2) % 4];
            assert!(cross(&b.sub(a), &c.sub(b)).is_positive());
        }
    }

    #[test]
    fn triangle_contains_its_vertices() {
        let t = triangle(&v(0, 0), &v(2, 0), &v(0, 2)).unwrap();
        for p in [v(0, 0), v(2, 0), v(0, 2), v(1, 1)] {
            assert!(t.contains(&p).unwrap());
        }
        assert!(!t.contains(&v(2, 2)).unwrap());
        assert!(triangle(&v(0, 0), &v(0, 2), &v(2, 0)).is_err());
    }

    #[test]
    fn interpolation_is_exact() {
        let sel = interpolate(
            [&v(0, 0), &v(1, 0), &v(0, 1)],
            [&v(1, 2), &v(3, 2), &v(1, 5)],
        )
        .unwrap();
        assert_eq!(sel.apply(&v(0, 0)).unwrap(), v(1, 2));
        assert_eq!(sel.apply(&v(1, 0)).unwrap(), v(3, 2));
        assert_eq!(sel.apply(&v(0, 1)).unwrap(), v(1, 5));
        assert_eq!(sel.a, RMatrix::from_ints(&[&[2, 0], &[0, 3]]).unwrap());
    }
}
