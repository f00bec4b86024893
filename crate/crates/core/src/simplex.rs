//! Dense dual simplex for `min c.x  s.t.  A x >= b, x >= 0` with `c >= 0`.
//!
//! The all-slack basis is dual feasible whenever `c >= 0`, so no phase one is
//! needed. Rows can be appended after a solve; the tableau stays dual
//! feasible and the next [`DualSimplex::solve`] warm-starts from the current
//! basis. Pivoting follows Bland's rule, which rules out cycling on the
//! heavily degenerate completion-time polyhedra this crate produces.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct DualSimplex {
    n: usize,
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    reduced: Vec<f64>,
    feas_tol: f64,
    pivots: usize,
}

impl DualSimplex {
    pub fn new(cost: Vec<f64>) -> Self {
        assert!(cost.iter().all(|&c| c >= 0.0), "dual simplex needs a nonnegative cost vector");
        DualSimplex {
            n: cost.len(),
            reduced: cost.clone(),
            cost,
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            feas_tol: 1e-10,
            pivots: 0,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    fn num_cols(&self) -> usize {
        self.n + self.rows.len()
    }

    /// Appends the row `coeffs . x >= bound`, expressed in the current basis.
    pub fn add_row(&mut self, coeffs: &[f64], bound: f64) {
        assert_eq!(coeffs.len(), self.n);
        for row in &mut self.rows {
            row.push(0.0);
        }
        self.reduced.push(0.0);
        let cols = self.num_cols() + 1;
        let mut row = vec![0.0; cols];
        for (j, &a) in coeffs.iter().enumerate() {
            row[j] = -a;
        }
        row[cols - 1] = 1.0;
        let mut value = -bound;
        for (i, &b) in self.basis.iter().enumerate() {
            let factor = row[b];
            if factor != 0.0 {
                for (x, y) in row.iter_mut().zip(&self.rows[i]) {
                    *x -= factor * y;
                }
                row[b] = 0.0;
                value -= factor * self.rhs[i];
            }
        }
        self.rows.push(row);
        self.rhs.push(value);
        self.basis.push(cols - 1);
        self.feas_tol = self.feas_tol.max(1e-10 * bound.abs());
    }

    /// Runs dual simplex pivots until the basis is primal feasible.
    pub fn solve(&mut self) -> Result<()> {
        let cap = 200 * (self.num_cols() + 10);
        let mut steps = 0;
        loop {
            // Bland: leaving variable of smallest index among infeasible rows.
            let leave = (0..self.rows.len())
                .filter(|&i| self.rhs[i] < -self.feas_tol)
                .min_by_key(|&i| self.basis[i]);
            let Some(r) = leave else { return Ok(()) };
            let row = &self.rows[r];
            let mut enter: Option<(usize, f64)> = None;
            for (j, &a) in row.iter().enumerate() {
                if a < -PIVOT_TOL {
                    let ratio = self.reduced[j].max(0.0) / -a;
                    match enter {
                        Some((_, best)) if ratio >= best - 1e-12 * best.abs().max(1.0) => {}
                        _ => enter = Some((j, ratio)),
                    }
                }
            }
            let Some((c, _)) = enter else { return Err(Error::LpInfeasible) };
            self.pivot(r, c);
            steps += 1;
            if steps > cap {
                return Err(Error::LpInfeasible);
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let inv = 1.0 / self.rows[r][c];
        for x in &mut self.rows[r] {
            *x *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][c] = 1.0;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r];
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= factor * y;
                }
                row[c] = 0.0;
                self.rhs[i] -= factor * pivot_rhs;
            }
        }
        let factor = self.reduced[c];
        if factor != 0.0 {
            for (x, y) in self.reduced.iter_mut().zip(&pivot_row) {
                *x -= factor * y;
            }
            self.reduced[c] = 0.0;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Current values of the structural variables.
    pub fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[i].max(0.0);
            }
        }
        x
    }

    pub fn objective(&self) -> f64 {
        self.primal().iter().zip(&self.cost).map(|(x, c)| x * c).sum()
    }
}
