//! Independent oracles shared by the integration suites.

#![allow(dead_code)]

use rand::Rng;
use symlab_core::{DiscreteDist, LinearProgram, Rational};

/// Solves a square system by Gaussian elimination; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

pub fn rank(rows: &[Vec<f64>]) -> usize {
    let mut a = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        let Some(piv) = (r..m).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else {
            break;
        };
        if a[piv][col].abs() < 1e-9 {
            continue;
        }
        a.swap(r, piv);
        for i in r + 1..m {
            let f = a[i][col] / a[r][col];
            for c in col..n {
                a[i][c] -= f * a[r][c];
            }
        }
        r += 1;
    }
    r
}

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        out(cur);
        return;
    }
    for j in start..n {
        if n - j < k - cur.len() {
            break;
        }
        cur.push(j);
        combinations(n, k, j + 1, cur, out);
        cur.pop();
    }
}

/// Minimum of `c.x` over all basic feasible solutions of a full-row-rank
/// standard-form program. `None` when no basis is feasible.
pub fn vertex_enumeration_min(lp: &LinearProgram) -> Option<f64> {
    let m = lp.num_constraints();
    let n = lp.num_vars();
    let a = lp.matrix();
    let b = lp.rhs();
    let c = lp.cost();
    let mut best: Option<f64> = None;
    combinations(n, m, 0, &mut Vec::new(), &mut |cols| {
        let sub: Vec<Vec<f64>> = (0..m).map(|i| cols.iter().map(|&j| a[i][j]).collect()).collect();
        if let Some(xb) = solve_square(sub, b.to_vec()) {
            if xb.iter().all(|&v| v >= -1e-9) {
                let obj: f64 = cols.iter().zip(&xb).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
    });
    best
}

/// Random feasible, bounded instance with integer data in [-5, 5]. The last
/// row is all ones so the feasible region is a polytope.
pub fn random_bounded_lp(rng: &mut impl Rng, m: usize, n: usize) -> LinearProgram {
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0..=2) as f64).collect();
    let mut a: Vec<Vec<f64>> = (0..m - 1)
        .map(|_| (0..n).map(|_| rng.random_range(-5..=5) as f64).collect())
        .collect();
    a.push(vec![1.0; n]);
    let b = a.iter().map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect();
    let c = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    LinearProgram::new(c, a, b).unwrap()
}

/// Feasible instance with a recession direction `e_{n-2} + e_{n-1}` of
/// negative cost.
pub fn random_unbounded_lp(rng: &mut impl Rng, m: usize, n: usize) -> LinearProgram {
    let base = n - 2;
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0..=2) as f64).collect();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let mut row: Vec<f64> = (0..base).map(|_| rng.random_range(-5..=5) as f64).collect();
            let v = rng.random_range(-5..=5) as f64;
            row.push(v);
            row.push(-v);
            row
        })
        .collect();
    let b = a.iter().map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum()).collect();
    let mut c: Vec<f64> = (0..base).map(|_| rng.random_range(-5..=5) as f64).collect();
    let ck = rng.random_range(-5..=5) as f64;
    c.push(ck);
    c.push(-ck - 1.0);
    LinearProgram::new(c, a, b).unwrap()
}

/// Instance whose first row has non-negative coefficients and negative right-hand side.
pub fn random_infeasible_lp(rng: &mut impl Rng, m: usize, n: usize) -> LinearProgram {
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-5..=5) as f64).collect())
        .collect();
    a[0] = (0..n).map(|_| rng.random_range(0..=5) as f64).collect();
    let mut b: Vec<f64> = (0..m).map(|_| rng.random_range(-5..=5) as f64).collect();
    b[0] = -(rng.random_range(1..=5) as f64);
    let c = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
    LinearProgram::new(c, a, b).unwrap()
}

/// Centered law with atoms drawn from multiples of 1/4 in [-2, 2], at most
/// `max_atoms` atoms, optionally with an atom at zero.
pub fn random_centered_law(rng: &mut impl Rng, max_atoms: usize) -> DiscreteDist {
    let quarter = |k: i64| Rational::new(k, 4).unwrap();
    let budget = rng.random_range(2..=max_atoms.max(2));
    let with_zero = budget >= 3 && rng.random_bool(0.4);
    let sides = budget - usize::from(with_zero);
    let n_neg = rng.random_range(1..sides);
    let n_pos = sides - n_neg;

    let mut pick = |range: std::ops::RangeInclusive<i64>, count: usize| {
        let mut vals: Vec<i64> = Vec::new();
        while vals.len() < count {
            let v = rng.random_range(range.clone());
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
        vals
    };
    let negs = pick(-8..=-1, n_neg);
    let poss = pick(1..=8, n_pos);

    let u: Vec<f64> = negs.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let v: Vec<f64> = poss.iter().map(|_| rng.random_range(0.1..1.0)).collect();
    let neg_moment: f64 = negs.iter().zip(&u).map(|(&k, w)| -(k as f64) / 4.0 * w).sum();
    let pos_moment: f64 = poss.iter().zip(&v).map(|(&k, w)| k as f64 / 4.0 * w).sum();
    // scale positive weights so the first moments balance
    let t = neg_moment / pos_moment;
    let zero_w = if with_zero { rng.random_range(0.05..0.5) } else { 0.0 };
    let raw_total: f64 = u.iter().sum::<f64>() + t * v.iter().sum::<f64>();
    let scale = (1.0 - zero_w) / raw_total;

    let mut atoms: Vec<(Rational, f64)> = negs
        .iter()
        .zip(&u)
        .map(|(&k, w)| (quarter(k), w * scale))
        .chain(poss.iter().zip(&v).map(|(&k, w)| (quarter(k), w * t * scale)))
        .collect();
    if with_zero {
        atoms.push((Rational::ZERO, zero_w));
    }
    DiscreteDist::new(atoms).unwrap()
}

/// Exit-point law obtained by mixing the two-point exit laws of every
/// interval `(a, b)` with weight `(b - a) mu(a) mu(b) / m`, computed from
/// scratch. Returns `(mixture as (value, prob) list, pair weight total,
/// sum of weight * (-ab))`.
pub fn pair_mixture(mu: &DiscreteDist) -> (Vec<(Rational, f64)>, f64, f64) {
    let atoms = mu.atoms();
    let m: f64 = atoms
        .iter()
        .filter(|a| a.value.is_positive())
        .map(|a| a.value.to_f64() * a.prob)
        .sum();
    let mut law: Vec<(Rational, f64)> = atoms.iter().map(|a| (a.value, 0.0)).collect();
    let mut weight_total = 0.0;
    let mut tau = 0.0;
    for (i, lo) in atoms.iter().enumerate() {
        for (j, hi) in atoms.iter().enumerate() {
            if !(lo.value.is_negative() && hi.value.is_positive()) {
                continue;
            }
            let (a, b) = (lo.value.to_f64(), hi.value.to_f64());
            let w = (b - a) * lo.prob * hi.prob / m;
            law[j].1 += w * (-a / (b - a));
            law[i].1 += w * (b / (b - a));
            weight_total += w;
            tau += w * (-a * b);
        }
    }
    if let Some(z) = law.iter_mut().find(|(v, _)| v.is_zero()) {
        z.1 += mu.prob_of(Rational::ZERO);
    }
    (law, weight_total, tau)
}
