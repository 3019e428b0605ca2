//! Exact two-phase primal simplex over rationals.
//!
//! Solves `maximize c·x subject to rows·x ≤ rhs` with `x` free. Free variables
//! are split as `x = u − v` with `u, v ≥ 0`, every row gets a slack, and rows
//! with a negative right-hand side get an artificial variable for phase one.
//! Pivoting follows Bland's rule (smallest eligible index for both the
//! entering and the leaving variable), which rules out cycling.

use crate::linalg::dot;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
    /// `point` is feasible and `point + t·ray` stays feasible for all `t ≥ 0`
    /// while the objective grows without bound.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
    Infeasible,
}

struct Tableau {
    /// Constraint rows, each `width + 1` long; the last entry is the rhs.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.t[row][col].recip().expect("pivot on zero entry");
        for v in self.t[row].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for (k, p) in pivot_row.iter().enumerate() {
                if !p.is_zero() {
                    let delta = &factor * p;
                    r[k] -= &delta;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost·y` over columns accepted by `allowed`.
    /// Returns `Err(col)` when column `col` is an unbounded improving direction.
    fn optimize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> Result<(), usize> {
        loop {
            let mut entering = None;
            for j in (0..self.width).filter(|&j| allowed(j)) {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        reduced -= &(&cost[b] * &self.t[i][j]);
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, col),
                None => return Err(col),
            }
        }
    }

    fn values(&self) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.width];
        for (i, &b) in self.basis.iter().enumerate() {
            y[b] = self.rhs(i).clone();
        }
        y
    }

    /// Direction in `y`-space obtained by raising non-basic column `col`.
    fn ray(&self, col: usize) -> Vec<Rational> {
        let mut d = vec![Rational::zero(); self.width];
        d[col] = Rational::one();
        for (i, &b) in self.basis.iter().enumerate() {
            d[b] = -&self.t[i][col];
        }
        d
    }
}

fn to_x(y: &[Rational], n: usize) -> Vec<Rational> {
    (0..n).map(|j| &y[j] - &y[n + j]).collect()
}

/// `maximize c·x` subject to `rows·x ≤ rhs`, `x` free.
///
/// Rows may be zero; the dimension is `c.len()`.
pub(crate) fn maximize(c: &[Rational], rows: &[Vec<Rational>], rhs: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = rows.len();
    debug_assert_eq!(m, rhs.len());
    debug_assert!(rows.iter().all(|r| r.len() == n));

    let negative: Vec<usize> = (0..m).filter(|&i| rhs[i].is_negative()).collect();
    let art_start = 2 * n + m;
    let width = art_start + negative.len();

    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let flip = rhs[i].is_negative();
        let mut row = vec![Rational::zero(); width + 1];
        for j in 0..n {
            let a = if flip { -&rows[i][j] } else { rows[i][j].clone() };
            row[n + j] = -&a;
            row[j] = a;
        }
        row[2 * n + i] = if flip { -Rational::one() } else { Rational::one() };
        row[width] = if flip { -&rhs[i] } else { rhs[i].clone() };
        if flip {
            let k = art_start + negative.iter().position(|&r| r == i).unwrap();
            row[k] = Rational::one();
            basis.push(k);
        } else {
            basis.push(2 * n + i);
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, width };

    if !negative.is_empty() {
        let mut cost = vec![Rational::zero(); width];
        for c in cost.iter_mut().skip(art_start) {
            *c = -Rational::one();
        }
        tab.optimize(&cost, |_| true)
            .expect("phase one objective is bounded above by zero");
        let infeasibility: Rational = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .map(|(i, _)| tab.rhs(i).clone())
            .sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Rational::zero(); width];
    for j in 0..n {
        cost[n + j] = -&c[j];
        cost[j] = c[j].clone();
    }
    let outcome = match tab.optimize(&cost, |j| j < art_start) {
        Ok(()) => {
            let point = to_x(&tab.values(), n);
            LpOutcome::Optimal {
                value: dot(c, &point),
                point,
            }
        }
        Err(col) => LpOutcome::Unbounded {
            point: to_x(&tab.values(), n),
            ray: to_x(&tab.ray(col), n),
        },
    };
    #[cfg(debug_assertions)]
    check_outcome(c, rows, rhs, &outcome);
    outcome
}

/// Substitution check of every witness; active in debug and test builds.
#[cfg(debug_assertions)]
fn check_outcome(c: &[Rational], rows: &[Vec<Rational>], rhs: &[Rational], outcome: &LpOutcome) {
    let feasible = |x: &[Rational]| rows.iter().zip(rhs).all(|(r, b)| dot(r, x) <= *b);
    match outcome {
        LpOutcome::Optimal { value, point } => {
            assert!(feasible(point), "optimal witness violates a constraint");
            assert_eq!(dot(c, point), *value, "optimal witness misses the optimum");
        }
        LpOutcome::Unbounded { point, ray } => {
            assert!(feasible(point), "unbounded witness point infeasible");
            assert!(
                rows.iter().all(|r| !dot(r, ray).is_positive()),
                "unbounded ray leaves the feasible set"
            );
            assert!(dot(c, ray).is_positive(), "unbounded ray does not improve");
        }
        LpOutcome::Infeasible => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn r(v: i64) -> Rational {
        Rational::from_int(v)
    }

    fn rows(data: &[&[i64]]) -> Vec<Vec<Rational>> {
        data.iter().map(|row| row.iter().map(|&v| r(v)).collect()).collect()
    }

    #[test]
    fn bounded_interval() {
        let out = maximize(&[r(1)], &rows(&[&[1], &[-1]]), &[r(5), r(0)]);
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: r(5),
                point: vec![r(5)]
            }
        );
    }

    #[test]
    fn unbounded_ray() {
        let out = maximize(&[r(1), r(0)], &rows(&[&[-1, 0]]), &[r(0)]);
        match out {
            LpOutcome::Unbounded { ray, .. } => assert_eq!(ray, vec![r(1), r(0)]),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_interval() {
        let out = maximize(&[r(1)], &rows(&[&[1], &[-1]]), &[r(-1), r(0)]);
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn needs_phase_one() {
        // x + y >= 2, x <= 3, y <= 3, maximize -x - y  -> optimum -2
        let out = maximize(
            &[r(-1), r(-1)],
            &rows(&[&[-1, -1], &[1, 0], &[0, 1]]),
            &[r(-2), r(3), r(3)],
        );
        match out {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, r(-2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_optimum() {
        // 2x + 3y <= 1, x >= 0, y >= 0, maximize x + y -> 1/2 at (1/2, 0)
        let out = maximize(
            &[r(1), r(1)],
            &rows(&[&[2, 3], &[-1, 0], &[0, -1]]),
            &[r(1), r(0), r(0)],
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, q(1, 2));
                assert_eq!(point, vec![q(1, 2), r(0)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_pair_and_redundant_rows() {
        // x = 1 written twice as two inequalities each, maximize y with y <= x.
        let out = maximize(
            &[r(0), r(1)],
            &rows(&[&[1, 0], &[-1, 0], &[1, 0], &[-1, 0], &[-1, 1]]),
            &[r(1), r(-1), r(1), r(-1), r(0)],
        );
        match out {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, r(1));
                assert_eq!(point, vec![r(1), r(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_rows_and_no_rows() {
        assert_eq!(maximize(&[r(1)], &rows(&[&[0]]), &[r(-1)]), LpOutcome::Infeasible);
        assert!(matches!(
            maximize(&[r(1)], &[], &[]),
            LpOutcome::Unbounded { .. }
        ));
        assert_eq!(
            maximize(&[r(0)], &[], &[]),
            LpOutcome::Optimal {
                value: r(0),
                point: vec![r(0)]
            }
        );
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Many constraints through the origin; Bland's rule must not cycle.
        let out = maximize(
            &[r(1), r(1)],
            &rows(&[&[1, 1], &[2, 1], &[1, 2], &[3, 1], &[1, 3], &[-1, 0], &[0, -1]]),
            &[r(0), r(0), r(0), r(0), r(0), r(0), r(0)],
        );
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: r(0),
                point: vec![r(0), r(0)]
            }
        );
    }
}
