//! Minimum-variance symmetrizers on a finite grid, as a linear program over
//! the grid masses `mu_j`.
//!
//! Constraints: `sum_j mu_j = 1` and, for every `s > 0` with `s` or `-s` in
//! the support of `X + Y`, `P(X + Y = s) - P(X + Y = -s) = 0`. The objective
//! is `E[Y^2]`. Any feasible `mu` makes `X + Y` symmetric, hence centered, so
//! `E[Y] = -E[X]` and minimizing `E[Y^2]` minimizes the variance.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::certificate::certificate_bound;
use crate::dist::{Atom, DiscreteDist};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::rational::Rational;

/// Decoded masses below this are treated as simplex noise and dropped.
pub const MASS_DROP_THRESHOLD: f64 = 1e-12;

/// Tolerance for the post-solve symmetry check of `X + Y`.
pub const SYMMETRY_CHECK_TOL: f64 = 1e-7;

/// Tolerance used by the brute-force oracle when testing lattice candidates.
pub const ORACLE_SYMMETRY_TOL: f64 = 1e-9;

pub const ORACLE_MAX_GRID: usize = 4;
pub const ORACLE_MAX_RESOLUTION: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizerProblem {
    x_dist: DiscreteDist,
    y_grid: Vec<Rational>,
}

impl SymmetrizerProblem {
    /// `y_grid` must be nonempty and strictly increasing.
    pub fn new(x_dist: DiscreteDist, y_grid: Vec<Rational>) -> Result<Self> {
        if y_grid.is_empty() {
            return Err(Error::InvalidProblem("empty grid".into()));
        }
        if y_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidProblem("grid must be strictly increasing".into()));
        }
        Ok(SymmetrizerProblem { x_dist, y_grid })
    }

    pub fn x_dist(&self) -> &DiscreteDist {
        &self.x_dist
    }

    pub fn y_grid(&self) -> &[Rational] {
        &self.y_grid
    }

    /// `p` when `X` is Bernoulli(p) on {0, 1}.
    pub fn bernoulli_parameter(&self) -> Option<f64> {
        match self.x_dist.atoms() {
            [a, b] if a.value == Rational::ZERO && b.value == Rational::ONE => Some(b.prob),
            _ => None,
        }
    }
}

/// Builds the standard-form LP. Variable `j` is the mass at `y_grid[j]`.
pub fn build_problem(prob: &SymmetrizerProblem) -> Result<LinearProgram> {
    let grid = &prob.y_grid;
    if grid.is_empty() {
        return Err(Error::InvalidProblem("empty grid".into()));
    }
    let n = grid.len();

    // |s| -> row coefficients. The sign records which side of the pair the
    // sum lands on; s = 0 is its own mirror and needs no row.
    let mut rows: BTreeMap<Rational, Vec<f64>> = BTreeMap::new();
    for atom in prob.x_dist.atoms() {
        for (j, &y) in grid.iter().enumerate() {
            let s = atom.value + y;
            if s.is_zero() {
                continue;
            }
            let row = rows.entry(s.abs()).or_insert_with(|| vec![0.0; n]);
            if s.is_positive() {
                row[j] += atom.prob;
            } else {
                row[j] -= atom.prob;
            }
        }
    }

    let mut a = Vec::with_capacity(rows.len() + 1);
    let mut b = Vec::with_capacity(rows.len() + 1);
    a.push(vec![1.0; n]);
    b.push(1.0);
    for row in rows.into_values() {
        a.push(row);
        b.push(0.0);
    }
    let c = grid
        .iter()
        .map(|y| {
            let v = y.to_f64();
            v * v
        })
        .collect();
    LinearProgram::new(c, a, b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizerSolution {
    pub status: LpStatus,
    pub y_dist: DiscreteDist,
    /// LP objective, `E[Y^2]`.
    pub second_moment: f64,
    pub mean_y: f64,
    pub variance: f64,
    /// `variance - pq` when `X` is Bernoulli(p).
    pub certificate_gap: Option<f64>,
    pub iterations: usize,
}

impl Serialize for SymmetrizerSolution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            status: LpStatus,
            variance: f64,
            second_moment: f64,
            mean_y: f64,
            y_atoms: &'a [Atom],
            certificate_gap: Option<f64>,
        }
        Out {
            status: self.status,
            variance: self.variance,
            second_moment: self.second_moment,
            mean_y: self.mean_y,
            y_atoms: self.y_dist.atoms(),
            certificate_gap: self.certificate_gap,
        }
        .serialize(serializer)
    }
}

/// Solves for the minimum-variance symmetrizer supported on the grid.
///
/// Returns [`Error::Infeasible`] when no grid-supported symmetrizer exists.
pub fn solve_symmetrizer(prob: &SymmetrizerProblem) -> Result<SymmetrizerSolution> {
    let lp = build_problem(prob)?;
    let sol = solve_lp(&lp)?;
    let mu = match sol.status {
        LpStatus::Optimal => sol.x.expect("optimal solutions carry x"),
        LpStatus::Infeasible => return Err(Error::Infeasible),
        LpStatus::Unbounded => {
            return Err(Error::SolverInconsistency(
                "symmetrizer LP reported unbounded over the probability simplex".into(),
            ))
        }
    };

    let kept: Vec<(Rational, f64)> = prob
        .y_grid
        .iter()
        .zip(&mu)
        .filter(|(_, &m)| m >= MASS_DROP_THRESHOLD)
        .map(|(&y, &m)| (y, m))
        .collect();
    let kept_mass: f64 = kept.iter().map(|(_, m)| m).sum();
    if (kept_mass - 1.0).abs() > 1e-8 {
        return Err(Error::SolverInconsistency(format!(
            "decoded masses sum to {kept_mass}"
        )));
    }
    let y_dist = DiscreteDist::new(kept.into_iter().map(|(y, m)| (y, m / kept_mass)))?;

    let sum = prob.x_dist.convolve(&y_dist);
    if !sum.is_symmetric_about_zero(SYMMETRY_CHECK_TOL) {
        return Err(Error::SolverInconsistency(format!(
            "X + Y is not symmetric (defect {})",
            sum.symmetry_defect()
        )));
    }

    let second_moment = sol.objective;
    let mean_y = y_dist.mean();
    let variance = second_moment - mean_y * mean_y;
    let certificate_gap = prob
        .bernoulli_parameter()
        .map(|p| certificate_bound(p).map(|bound| variance - bound))
        .transpose()?;

    Ok(SymmetrizerSolution {
        status: LpStatus::Optimal,
        y_dist,
        second_moment,
        mean_y,
        variance,
        certificate_gap,
        iterations: sol.iterations,
    })
}

/// Exhaustive search over masses that are multiples of `1/resolution`.
///
/// Returns the least `E[Y^2]` among candidates whose sum with `X` is
/// symmetric to within [`ORACLE_SYMMETRY_TOL`], or `+inf` if none is.
/// The symmetry test works on the law of `X + Y` directly and does not go
/// through [`build_problem`].
pub fn brute_force_oracle(prob: &SymmetrizerProblem, resolution: u32) -> Result<f64> {
    let k = prob.y_grid.len();
    if k > ORACLE_MAX_GRID {
        return Err(Error::OracleTooLarge(format!(
            "grid has {k} points, at most {ORACLE_MAX_GRID} allowed"
        )));
    }
    if resolution == 0 || resolution > ORACLE_MAX_RESOLUTION {
        return Err(Error::OracleTooLarge(format!(
            "resolution {resolution} outside 1..={ORACLE_MAX_RESOLUTION}"
        )));
    }

    // Support of X + Y over all grid points, with each sum's mirror index.
    let mut support: Vec<Rational> = prob
        .x_dist
        .values()
        .flat_map(|x| prob.y_grid.iter().map(move |&y| x + y))
        .collect();
    support.sort();
    support.dedup();
    let index_of = |v: Rational| support.binary_search(&v).ok();
    let mirror: Vec<Option<usize>> = support.iter().map(|&s| index_of(-s)).collect();
    // contributions[j] = (sum index, P(X = x)) for each x
    let contributions: Vec<Vec<(usize, f64)>> = prob
        .y_grid
        .iter()
        .map(|&y| {
            prob.x_dist
                .atoms()
                .iter()
                .map(|a| (index_of(a.value + y).expect("sum in support"), a.prob))
                .collect()
        })
        .collect();
    let squares: Vec<f64> = prob
        .y_grid
        .iter()
        .map(|y| {
            let v = y.to_f64();
            v * v
        })
        .collect();

    let res = resolution as usize;
    let mut counts = vec![0usize; k];
    let mut law = vec![0.0; support.len()];
    let mut best = f64::INFINITY;
    for_each_composition(res, &mut counts, 0, &mut |counts| {
        law.iter_mut().for_each(|v| *v = 0.0);
        let mut objective = 0.0;
        for (j, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mu = c as f64 / resolution as f64;
            objective += squares[j] * mu;
            for &(s, px) in &contributions[j] {
                law[s] += px * mu;
            }
        }
        if objective >= best {
            return;
        }
        let symmetric = law.iter().zip(&mirror).all(|(&p, m)| {
            let mirrored = m.map_or(0.0, |i| law[i]);
            (p - mirrored).abs() <= ORACLE_SYMMETRY_TOL
        });
        if symmetric {
            best = objective;
        }
    });
    Ok(best)
}

/// Visits every vector of `counts.len()` non-negative integers summing to `total`.
fn for_each_composition(
    total: usize,
    counts: &mut Vec<usize>,
    pos: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos + 1 == counts.len() {
        counts[pos] = total;
        visit(counts);
        return;
    }
    for c in 0..=total {
        counts[pos] = c;
        for_each_composition(total - c, counts, pos + 1, visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn bern(n: i64, d: i64) -> DiscreteDist {
        DiscreteDist::bernoulli(r(n, d)).unwrap()
    }

    fn problem(x: DiscreteDist, grid: &[Rational]) -> SymmetrizerProblem {
        SymmetrizerProblem::new(x, grid.to_vec()).unwrap()
    }

    #[test]
    fn build_small_grid() {
        let prob = problem(bern(3, 10), &[Rational::integer(-1), r(-1, 2), Rational::ZERO]);
        let lp = build_problem(&prob).unwrap();
        assert_eq!(lp.num_vars(), 3);
        // mass row plus rows for |s| = 1/2 and |s| = 1
        assert_eq!(lp.num_constraints(), 3);
        assert_eq!(lp.matrix()[0], vec![1.0, 1.0, 1.0]);
        // |s| = 1/2: y = -1/2 gives -1/2 (x = 0, q) and +1/2 (x = 1, p)
        let half = &lp.matrix()[1];
        assert!((half[1] - (0.3 - 0.7)).abs() < 1e-15);
        assert_eq!((half[0], half[2]), (0.0, 0.0));
        // |s| = 1: y = -1, x = 0 lands on -1; y = 0, x = 1 lands on +1
        assert_eq!(lp.matrix()[2], vec![-0.7, 0.0, 0.3]);
        assert_eq!(lp.cost(), &[1.0, 0.25, 0.0]);
    }

    #[test]
    fn point_mass_trivial() {
        let prob = problem(DiscreteDist::point_mass(Rational::ZERO), &[Rational::ZERO]);
        let lp = build_problem(&prob).unwrap();
        assert_eq!(lp.num_constraints(), 1);
        let sol = solve_symmetrizer(&prob).unwrap();
        assert_eq!(sol.second_moment, 0.0);
        assert_eq!(sol.y_dist, DiscreteDist::point_mass(Rational::ZERO));
    }

    #[test]
    fn fair_coin_half_shift() {
        let prob = problem(bern(1, 2), &[r(-1, 2)]);
        let sol = solve_symmetrizer(&prob).unwrap();
        assert!((sol.second_moment - 0.25).abs() < 1e-15);
        assert!(sol.variance.abs() < 1e-15);
        assert!((brute_force_oracle(&prob, 7).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        let x = bern(3, 10);
        assert!(SymmetrizerProblem::new(x.clone(), vec![]).is_err());
        assert!(SymmetrizerProblem::new(x, vec![Rational::ONE, Rational::ZERO]).is_err());
    }

    #[test]
    fn positive_grid_is_infeasible() {
        let prob = problem(bern(3, 10), &[Rational::ONE, Rational::integer(2)]);
        assert_eq!(solve_symmetrizer(&prob), Err(Error::Infeasible));
        assert_eq!(brute_force_oracle(&prob, 50).unwrap(), f64::INFINITY);
    }

    #[test]
    fn oracle_exact_split() {
        let prob = problem(bern(3, 10), &[Rational::integer(-1), Rational::ZERO]);
        assert!((brute_force_oracle(&prob, 100).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn oracle_limits() {
        let grid: Vec<Rational> = (0..5).map(Rational::integer).collect();
        let prob = problem(bern(1, 2), &grid);
        assert!(matches!(brute_force_oracle(&prob, 10), Err(Error::OracleTooLarge(_))));
        let prob = problem(bern(1, 2), &grid[..2]);
        assert!(matches!(brute_force_oracle(&prob, 201), Err(Error::OracleTooLarge(_))));
    }

    #[test]
    fn bernoulli_gap_reported() {
        let grid = crate::rational::grid(r(-3, 2), r(1, 2), r(1, 10)).unwrap();
        let sol = solve_symmetrizer(&problem(bern(3, 10), &grid)).unwrap();
        assert!(sol.certificate_gap.unwrap().abs() < 1e-7);
        let sol = solve_symmetrizer(&problem(DiscreteDist::point_mass(Rational::ONE), &grid)).unwrap();
        assert_eq!(sol.certificate_gap, None);
        assert_eq!(sol.y_dist, DiscreteDist::point_mass(Rational::integer(-1)));
    }

    #[test]
    fn json_fields() {
        let sol = solve_symmetrizer(&problem(bern(1, 2), &[r(-1, 2)])).unwrap();
        let v: serde_json::Value = serde_json::to_value(&sol).unwrap();
        assert_eq!(v["status"], "Optimal");
        assert_eq!(v["y_atoms"][0]["num"], -1);
        assert_eq!(v["y_atoms"][0]["den"], 2);
        assert!(v.get("variance").is_some());
        assert!(v.get("second_moment").is_some());
        assert!(v.get("certificate_gap").is_some());
    }
}
