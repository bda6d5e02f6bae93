//! Dense two-phase revised simplex for standard-form programs
//!
//! ```text
//! minimize c.x  subject to  A x = b,  x >= 0
//! ```
//!
//! Pricing and the ratio test both follow Bland's rule, so the method
//! terminates on degenerate instances without perturbation. The basis
//! inverse is kept explicitly and refactored periodically.

use crate::error::{Error, Result};

/// Entries, reduced costs and ratio-test denominators below this are zero.
pub const PIVOT_TOLERANCE: f64 = 1e-9;

/// Largest phase-one objective still accepted as feasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

const REFACTOR_INTERVAL: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    c: Vec<f64>,
    /// Row-major, `m x n`.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl LinearProgram {
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let n = c.len();
        let m = b.len();
        if n == 0 || m == 0 {
            return Err(Error::InvalidProgram(format!(
                "need at least one variable and one constraint, got n = {n}, m = {m}"
            )));
        }
        if a.len() != m {
            return Err(Error::InvalidProgram(format!(
                "constraint matrix has {} rows but b has {m} entries",
                a.len()
            )));
        }
        if let Some((i, row)) = a.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::InvalidProgram(format!(
                "row {i} has {} columns, expected {n}",
                row.len()
            )));
        }
        let finite = c.iter().chain(&b).chain(a.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidProgram("non-finite coefficient".into()));
        }
        Ok(LinearProgram { c, a, b })
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum()
    }

    /// `max_i |(A x - b)_i|`
    pub fn residual_inf(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }

    /// Same program with variables reordered: new column `k` is old column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_vars();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
            return Err(Error::InvalidProgram("not a permutation of the columns".into()));
        }
        Ok(LinearProgram {
            c: perm.iter().map(|&j| self.c[j]).collect(),
            a: self
                .a
                .iter()
                .map(|row| perm.iter().map(|&j| row[j]).collect())
                .collect(),
            b: self.b.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub x: Option<Vec<f64>>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective: f64,
    /// Basic original variables at termination, one per basis row that is
    /// not held by a redundant-row artificial.
    pub basis: Vec<usize>,
    pub iterations: usize,
    /// Sum of artificials when phase one stopped.
    pub phase_one_objective: f64,
    /// `c_j - y.A_j` for every original column at the final basis. Empty
    /// unless optimal.
    pub reduced_costs: Vec<f64>,
}

enum Outcome {
    Optimal,
    Unbounded,
}

/// Working state of one solve. Columns `n..n + m` are the phase-one artificials.
struct RevisedSimplex<'a> {
    lp: &'a LinearProgram,
    /// Column-major copy of `A` with rows sign-flipped so that `b >= 0`.
    cols: Vec<Vec<f64>>,
    b: Vec<f64>,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<f64>>,
    x_b: Vec<f64>,
    iterations: usize,
    limit: usize,
    since_refactor: usize,
}

impl<'a> RevisedSimplex<'a> {
    fn new(lp: &'a LinearProgram) -> Self {
        let m = lp.num_constraints();
        let n = lp.num_vars();
        let flip: Vec<f64> = lp.b.iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
        let cols = (0..n)
            .map(|j| (0..m).map(|i| flip[i] * lp.a[i][j]).collect())
            .collect();
        let b: Vec<f64> = lp.b.iter().zip(&flip).map(|(b, s)| b * s).collect();
        let mut is_basic = vec![false; n + m];
        is_basic[n..].iter_mut().for_each(|v| *v = true);
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { 1.0 } else { 0.0 }).collect())
            .collect();
        RevisedSimplex {
            lp,
            cols,
            x_b: b.clone(),
            b,
            m,
            n,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
            iterations: 0,
            limit: 50 * (m + n),
            since_refactor: 0,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            let mut e = vec![0.0; self.m];
            e[j - self.n] = 1.0;
            e
        }
    }

    fn dot_column(&self, y: &[f64], j: usize) -> f64 {
        if j < self.n {
            y.iter().zip(&self.cols[j]).map(|(y, a)| y * a).sum()
        } else {
            y[j - self.n]
        }
    }

    /// `B^-1 A_j`
    fn ftran(&self, j: usize) -> Vec<f64> {
        if j < self.n {
            let col = &self.cols[j];
            self.binv
                .iter()
                .map(|row| row.iter().zip(col).map(|(r, a)| r * a).sum())
                .collect()
        } else {
            let k = j - self.n;
            self.binv.iter().map(|row| row[k]).collect()
        }
    }

    /// `c_B^T B^-1`
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                for (yk, bk) in y.iter_mut().zip(&self.binv[r]) {
                    *yk += cb * bk;
                }
            }
        }
        y
    }

    fn pivot(&mut self, entering: usize, row: usize, u: &[f64]) -> Result<()> {
        let leaving = self.basis[row];
        let piv = u[row];
        let theta = self.x_b[row] / piv;
        let pivot_row: Vec<f64> = self.binv[row].iter().map(|v| v / piv).collect();
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let ui = u[i];
            if ui != 0.0 {
                for (v, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                    *v -= ui * p;
                }
                self.x_b[i] -= theta * ui;
            }
        }
        self.binv[row] = pivot_row;
        self.x_b[row] = theta;
        self.basis[row] = entering;
        self.is_basic[leaving] = false;
        self.is_basic[entering] = true;

        self.iterations += 1;
        if self.iterations > self.limit {
            return Err(Error::CyclingSuspected(self.limit));
        }
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_INTERVAL {
            self.refactor()?;
        }
        Ok(())
    }

    /// Recomputes `B^-1` by Gauss-Jordan elimination and `x_B = B^-1 b`.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut aug: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                let mut row: Vec<f64> = self.basis.iter().map(|&j| self.column(j)[i]).collect();
                row.extend((0..m).map(|k| if i == k { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for col in 0..m {
            let (best, best_abs) = (col..m)
                .map(|r| (r, aug[r][col].abs()))
                .fold((col, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best_abs < 1e-14 {
                return Err(Error::SolverInconsistency("basis matrix became singular".into()));
            }
            aug.swap(col, best);
            let piv = aug[col][col];
            aug[col].iter_mut().for_each(|v| *v /= piv);
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r != col {
                    let f = row[col];
                    if f != 0.0 {
                        row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
                    }
                }
            }
        }
        self.binv = aug.into_iter().map(|row| row[m..].to_vec()).collect();
        self.x_b = self
            .binv
            .iter()
            .map(|row| row.iter().zip(&self.b).map(|(r, b)| r * b).sum())
            .collect();
        self.since_refactor = 0;
        Ok(())
    }

    /// Runs simplex iterations for `cost`, letting only columns with
    /// `enterable[j]` enter the basis.
    fn iterate(&mut self, cost: &[f64], enterable: &[bool]) -> Result<Outcome> {
        loop {
            let y = self.duals(cost);
            // Bland: lowest-index improving column
            let entering = (0..self.n + self.m).find(|&j| {
                enterable[j] && !self.is_basic[j] && cost[j] - self.dot_column(&y, j) < -PIVOT_TOLERANCE
            });
            let Some(entering) = entering else {
                return Ok(Outcome::Optimal);
            };
            let u = self.ftran(entering);

            let mut best: Option<(usize, f64)> = None;
            for (r, &ur) in u.iter().enumerate() {
                if ur <= PIVOT_TOLERANCE {
                    continue;
                }
                let ratio = self.x_b[r].max(0.0) / ur;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bratio)) => {
                        let tie = (ratio - bratio).abs() <= 1e-12 * (1.0 + bratio.abs());
                        if ratio < bratio && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bratio))
                        }
                    }
                };
            }
            let Some((row, _)) = best else {
                return Ok(Outcome::Unbounded);
            };
            self.pivot(entering, row, &u)?;
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.x_b[r];
            }
        }
        x
    }

    fn artificial_sum(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.x_b)
            .filter(|(&j, _)| j >= self.n)
            .map(|(_, &v)| v)
            .sum()
    }

    /// Pivots basic artificials out wherever some original column has a
    /// nonzero entry in their row. Rows where none does are redundant and
    /// keep their artificial at level zero.
    fn expel_artificials(&mut self) -> Result<()> {
        for row in 0..self.m {
            if self.basis[row] < self.n {
                continue;
            }
            let candidate = (0..self.n).find(|&j| {
                !self.is_basic[j]
                    && self.binv[row]
                        .iter()
                        .zip(&self.cols[j])
                        .map(|(r, a)| r * a)
                        .sum::<f64>()
                        .abs()
                        > PIVOT_TOLERANCE
            });
            if let Some(j) = candidate {
                let u = self.ftran(j);
                self.pivot(j, row, &u)?;
            }
        }
        Ok(())
    }

    fn solve(mut self) -> Result<LpSolution> {
        let total = self.n + self.m;
        let mut phase_one_cost = vec![0.0; total];
        phase_one_cost[self.n..].iter_mut().for_each(|c| *c = 1.0);
        let all = vec![true; total];
        // Phase one is bounded below by zero.
        self.iterate(&phase_one_cost, &all)?;
        self.refactor()?;
        let phase_one_objective = self.artificial_sum();
        if phase_one_objective > FEASIBILITY_TOLERANCE {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: None,
                objective: f64::INFINITY,
                basis: self.original_basis(),
                iterations: self.iterations,
                phase_one_objective,
                reduced_costs: Vec::new(),
            });
        }

        self.expel_artificials()?;
        let mut cost = self.lp.c.clone();
        cost.resize(total, 0.0);
        let mut enterable = vec![true; total];
        enterable[self.n..].iter_mut().for_each(|e| *e = false);
        let outcome = self.iterate(&cost, &enterable)?;
        self.refactor()?;

        Ok(match outcome {
            Outcome::Unbounded => LpSolution {
                status: LpStatus::Unbounded,
                x: None,
                objective: f64::NEG_INFINITY,
                basis: self.original_basis(),
                iterations: self.iterations,
                phase_one_objective,
                reduced_costs: Vec::new(),
            },
            Outcome::Optimal => {
                let x = self.primal();
                let y = self.duals(&cost);
                let reduced_costs = (0..self.n).map(|j| cost[j] - self.dot_column(&y, j)).collect();
                LpSolution {
                    status: LpStatus::Optimal,
                    objective: self.lp.objective_at(&x),
                    x: Some(x),
                    basis: self.original_basis(),
                    iterations: self.iterations,
                    phase_one_objective,
                    reduced_costs,
                }
            }
        })
    }

    fn original_basis(&self) -> Vec<usize> {
        self.basis.iter().copied().filter(|&j| j < self.n).collect()
    }
}

/// Solves `lp`, classifying it as optimal, infeasible or unbounded.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    RevisedSimplex::new(lp).solve()
}
