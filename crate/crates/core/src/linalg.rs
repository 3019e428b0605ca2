//! Dense vectors and matrices over [`Rational`], with exact elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{Rational, Sign};

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RVector(Vec<Rational>);

impl RVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        RVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RVector(vec![Rational::zero(); dim])
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[axis] = Rational::one();
        v
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        RVector(entries.iter().map(|&v| Rational::from_int(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn dot(&self, other: &RVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        dot(&self.0, &other.0)
    }

    pub fn add(&self, other: &RVector) -> RVector {
        debug_assert_eq!(self.dim(), other.dim());
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RVector) -> RVector {
        debug_assert_eq!(self.dim(), other.dim());
        RVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> RVector {
        RVector(self.0.iter().map(|a| a * s).collect())
    }

    /// `self + s * dir`
    pub fn add_scaled(&self, s: &Rational, dir: &RVector) -> RVector {
        debug_assert_eq!(self.dim(), dir.dim());
        RVector(self.0.iter().zip(&dir.0).map(|(a, d)| a + s * d).collect())
    }

    pub fn neg(&self) -> RVector {
        RVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn norm_inf(&self) -> Rational {
        self.0
            .iter()
            .map(Rational::abs)
            .fold(Rational::zero(), Rational::max)
    }

    pub fn norm_1(&self) -> Rational {
        self.0.iter().map(Rational::abs).sum()
    }
}

impl Index<usize> for RVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl From<Vec<Rational>> for RVector {
    fn from(v: Vec<Rational>) -> Self {
        RVector(v)
    }
}

impl FromIterator<Rational> for RVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RVector(iter.into_iter().collect())
    }
}

impl fmt::Debug for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for RVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(RMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Dimension {
                expected: c,
                got: bad.len(),
            });
        }
        Ok(RMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[RVector]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, RVector::dim);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.dim() != r {
                return Err(Error::Dimension {
                    expected: r,
                    got: col.dim(),
                });
            }
            for i in 0..r {
                m[(i, j)] = col[i].clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> RVector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, x: &RVector) -> Result<RVector> {
        if x.dim() != self.cols {
            return Err(Error::Dimension {
                expected: self.cols,
                got: x.dim(),
            });
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), x.entries()))
            .collect())
    }

    pub fn mul(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                out[(i, j)] = (0..self.cols)
                    .map(|k| &self[(i, k)] * &other[(k, j)])
                    .sum();
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &RMatrix) -> Result<RMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        Ok(RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn transpose(&self) -> RMatrix {
        let mut t = RMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Max absolute row sum, the operator norm induced by `‖·‖∞`.
    pub fn norm_inf(&self) -> Rational {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(Rational::abs).sum::<Rational>())
            .fold(Rational::zero(), Rational::max)
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Exact sign of the determinant, by Gaussian elimination.
    pub fn det_sign(&self) -> Result<Sign> {
        self.require_square()?;
        let n = self.rows;
        let mut m = self.row_vectors();
        let mut sign = Sign::Positive;
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Ok(Sign::Zero);
            };
            if p != col {
                m.swap(p, col);
                sign = sign.flip();
            }
            if m[col][col].is_negative() {
                sign = sign.flip();
            }
            let (top, bottom) = m.split_at_mut(col + 1);
            let pivot = &top[col];
            for row in bottom.iter_mut() {
                if row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pivot[col];
                for k in col..n {
                    let delta = &factor * &pivot[k];
                    row[k] -= &delta;
                }
            }
        }
        Ok(sign)
    }

    /// The unique solution of `self · x = c`, or `None` when singular.
    pub fn solve_unique(&self, c: &RVector) -> Result<Option<RVector>> {
        self.require_square()?;
        if c.dim() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: c.dim(),
            });
        }
        let (reduced, pivots) = rref_augmented(self, c);
        if pivots.len() != self.cols || pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        Ok(Some(
            (0..self.cols)
                .map(|i| reduced[i][self.cols].clone())
                .collect(),
        ))
    }

    /// Full solution set of `self · x = c` as particular point plus kernel basis.
    ///
    /// Accepts any shape; free variables of the particular solution are zero.
    pub fn affine_solution_set(&self, c: &RVector) -> Result<Option<AffineSolution>> {
        if c.dim() != self.rows {
            return Err(Error::Dimension {
                expected: self.rows,
                got: c.dim(),
            });
        }
        let (reduced, pivots) = rref_augmented(self, c);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut particular = RVector::zeros(self.cols);
        for (i, &p) in pivots.iter().enumerate() {
            particular[p] = reduced[i][self.cols].clone();
        }
        Ok(Some(AffineSolution {
            particular,
            kernel: kernel_from_rref(&reduced, &pivots, self.cols),
        }))
    }

    pub fn kernel_basis(&self) -> Vec<RVector> {
        let (reduced, pivots) = rref_augmented(self, &RVector::zeros(self.rows));
        kernel_from_rref(&reduced, &pivots, self.cols)
    }

    pub fn rank(&self) -> usize {
        rref_augmented(self, &RVector::zeros(self.rows)).1.len()
    }

    pub fn inverse(&self) -> Result<Option<RMatrix>> {
        self.require_square()?;
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            match self.solve_unique(&RVector::unit(n, j))? {
                Some(col) => cols.push(col),
                None => return Ok(None),
            }
        }
        RMatrix::from_columns(&cols).map(Some)
    }
}

/// Solution set `particular + span(kernel)` of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: RVector,
    pub kernel: Vec<RVector>,
}

/// Reduced row echelon form of `[a | c]`. Returns the nonzero rows and their
/// pivot columns; a pivot equal to `a.cols()` marks an inconsistent system.
fn rref_augmented(a: &RMatrix, c: &RVector) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let width = a.cols + 1;
    let mut m: Vec<Vec<Rational>> = (0..a.rows)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(c[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        let inv = m[r][col].recip().expect("nonzero pivot");
        for v in &mut m[r][col..width] {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for k in col..width {
                let delta = &factor * &pivot_row[k];
                row[k] -= &delta;
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

fn kernel_from_rref(reduced: &[Vec<Rational>], pivots: &[usize], cols: usize) -> Vec<RVector> {
    let free: Vec<usize> = (0..cols).filter(|j| !pivots.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = RVector::zeros(cols);
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                if p < cols {
                    v[p] = -&reduced[i][f];
                }
            }
            v
        })
        .collect()
}

impl Index<(usize, usize)> for RMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl Serialize for RMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.row_vectors().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Rational>>::deserialize(d)?;
        RMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(rows: &[&[i64]]) -> RMatrix {
        RMatrix::from_ints(rows).unwrap()
    }

    #[test]
    fn det_sign_examples() {
        assert_eq!(RMatrix::identity(3).det_sign().unwrap(), Sign::Positive);
        assert_eq!(m(&[&[1, -1], &[1, 0]]).det_sign().unwrap(), Sign::Positive);
        assert_eq!(m(&[&[1, 1], &[1, 1]]).det_sign().unwrap(), Sign::Zero);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det_sign().unwrap(), Sign::Negative);
        assert_eq!(m(&[&[-2, 0], &[0, 3]]).det_sign().unwrap(), Sign::Negative);
        assert!(matches!(
            m(&[&[1, 2, 3]]).det_sign(),
            Err(Error::NotSquare { rows: 1, cols: 3 })
        ));
    }

    #[test]
    fn solve_unique_examples() {
        let id = RMatrix::identity(2);
        let c = RVector::from_ints(&[3, -2]);
        assert_eq!(id.solve_unique(&c).unwrap(), Some(c.clone()));

        let two = m(&[&[2, 0], &[0, 2]]);
        let half = RVector::new(vec![q(1, 2), q(1, 2)]);
        assert_eq!(two.solve_unique(&RVector::from_ints(&[1, 1])).unwrap(), Some(half));

        let sing = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(sing.solve_unique(&RVector::from_ints(&[1, 1])).unwrap(), None);
        assert_eq!(sing.solve_unique(&RVector::from_ints(&[1, 0])).unwrap(), None);

        assert!(matches!(
            id.solve_unique(&RVector::from_ints(&[1])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn affine_solution_set_examples() {
        let sol = RMatrix::identity(2)
            .affine_solution_set(&RVector::zeros(2))
            .unwrap()
            .unwrap();
        assert_eq!(sol.particular, RVector::zeros(2));
        assert!(sol.kernel.is_empty());

        let sing = m(&[&[1, 1], &[1, 1]]);
        let sol = sing
            .affine_solution_set(&RVector::from_ints(&[1, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(sol.particular, RVector::from_ints(&[1, 0]));
        assert_eq!(sol.kernel.len(), 1);
        assert_eq!(sing.mul_vec(&sol.kernel[0]).unwrap(), RVector::zeros(2));
        assert!(!sol.kernel[0].is_zero());

        assert_eq!(
            sing.affine_solution_set(&RVector::from_ints(&[1, 0])).unwrap(),
            None
        );
    }

    #[test]
    fn inverse_and_rank() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let inv = a.inverse().unwrap().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RMatrix::identity(2));
        assert_eq!(a.rank(), 2);
        assert_eq!(m(&[&[1, 1], &[2, 2]]).rank(), 1);
        assert_eq!(m(&[&[1, 1], &[2, 2]]).inverse().unwrap(), None);
        assert_eq!(a.norm_inf(), Rational::from_int(7));
    }

    #[test]
    fn matrix_json_shape() {
        let a = m(&[&[1, 0], &[0, 1]]);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"[["1","0"],["0","1"]]"#);
        assert!(serde_json::from_str::<RMatrix>(r#"[["1","0"],["0"]]"#).is_err());
    }
}
