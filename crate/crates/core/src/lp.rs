//! The maximum margin `ρ` as the value of the zero-sum game `M`, solved
//! exactly by a dense simplex method.
//!
//! With `A = M + 2` every entry is positive and the game value is
//! `V = ρ + 2 > 0`. The row player's problem becomes the standard-form LP
//! `max 1ᵀx s.t. Aᵀx ≤ 1, x ≥ 0` with optimum `1/V`; the optimal `x`
//! scaled by `V` is `d*` and the dual prices scaled by `V` are `λ*`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::GameMatrix;

/// Gap above which a solution is retried on a permuted tableau.
pub const GAP_TOLERANCE: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-11;

/// Consecutive degenerate pivots before falling back to Bland's rule.
const DEGENERATE_SWITCH: usize = 20;

/// Optimal strategies of both players and the certified duality gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LPSolution {
    pub rho: f64,
    pub lambda_star: Vec<f64>,
    pub d_star: Vec<f64>,
    /// `max_j (d*ᵀM)_j - min_i (Mλ*)_i`.
    pub gap: f64,
}

impl LPSolution {
    pub fn is_separable(&self) -> bool {
        self.rho > 0.0
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    /// `max Σ x_i` subject to `Σ_i a_{ik} x_i ≤ 1` for every column `k`.
    fn new(matrix: &GameMatrix, order: &[usize]) -> Self {
        let (m, n) = (matrix.rows(), matrix.cols());
        let width = m + n + 1;
        let rows = (0..n)
            .map(|k| {
                let mut row = vec![0.0; width];
                for (pos, &i) in order.iter().enumerate() {
                    row[pos] = f64::from(matrix.get(i, k)) + 2.0;
                }
                row[m + k] = 1.0;
                row[width - 1] = 1.0;
                row
            })
            .collect();
        let mut obj = vec![0.0; width];
        obj[..m].fill(1.0);
        Tableau { rows, obj, basis: (m..m + n).collect() }
    }

    /// Dantzig's rule (largest reduced cost) while pivots make progress,
    /// switching to Bland's rule after a run of degenerate pivots so that
    /// ties cannot cycle. Ratio-test ties go to the lowest basic index.
    fn solve(&mut self) {
        let last = self.obj.len() - 1;
        let max_pivots = 50 * (self.rows.len() + last) + 1000;
        let mut degenerate_run = 0;
        for _ in 0..max_pivots {
            let enter = if degenerate_run < DEGENERATE_SWITCH {
                (0..last)
                    .filter(|&j| self.obj[j] > PIVOT_EPS)
                    .max_by(|&a, &b| self.obj[a].total_cmp(&self.obj[b]).then(b.cmp(&a)))
            } else {
                (0..last).find(|&j| self.obj[j] > PIVOT_EPS)
            };
            let Some(enter) = enter else { return };
            let mut leave: Option<(usize, f64)> = None;
            for (k, row) in self.rows.iter().enumerate() {
                if row[enter] <= PIVOT_EPS {
                    continue;
                }
                let ratio = row[last] / row[enter];
                leave = match leave {
                    Some((bk, br))
                        if !(ratio < br - PIVOT_EPS
                            || (ratio <= br + PIVOT_EPS && self.basis[k] < self.basis[bk])) =>
                    {
                        Some((bk, br))
                    }
                    _ => Some((k, ratio)),
                };
            }
            // the feasible region is bounded, so a leaving row always exists
            let (k, ratio) = leave.expect("bounded LP has a leaving row");
            degenerate_run = if ratio <= PIVOT_EPS { degenerate_run + 1 } else { 0 };
            self.pivot(k, enter);
        }
    }

    fn pivot(&mut self, k: usize, enter: usize) {
        let p = self.rows[k][enter];
        for v in self.rows[k].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[k].clone();
        for (r, row) in self.rows.iter_mut().enumerate() {
            if r == k || row[enter] == 0.0 {
                continue;
            }
            let f = row[enter];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
        let f = self.obj[enter];
        for (v, &pv) in self.obj.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
        self.basis[k] = enter;
    }
}

fn to_simplex(mut v: Vec<f64>) -> Vec<f64> {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

fn solve_once(matrix: &GameMatrix, order: &[usize]) -> LPSolution {
    let (m, n) = (matrix.rows(), matrix.cols());
    let mut tab = Tableau::new(matrix, order);
    tab.solve();
    let last = m + n;
    let objective = -tab.obj[last];
    let value = 1.0 / objective;

    let mut x = vec![0.0; m];
    for (k, &b) in tab.basis.iter().enumerate() {
        if b < m {
            x[order[b]] = tab.rows[k][last];
        }
    }
    let y: Vec<f64> = (0..n).map(|k| -tab.obj[m + k]).collect();
    let d_star = to_simplex(x.iter().map(|v| v * value).collect());
    let lambda_star = to_simplex(y.iter().map(|v| v * value).collect());

    let best_response = matrix.edges(&d_star).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let worst_margin = matrix.mul_vec(&lambda_star).into_iter().fold(f64::INFINITY, f64::min);
    LPSolution {
        rho: value - 2.0,
        lambda_star,
        d_star,
        gap: (best_response - worst_margin).max(0.0),
    }
}

/// Solves for `ρ = min_d max_j (dᵀM)_j = max_λ min_i (Mλ)_i`.
///
/// The gap between the two players' guarantees is certified from the
/// returned strategies. If it exceeds [`GAP_TOLERANCE`] the tableau is
/// rebuilt with the examples in rotated order; the best attempt is returned,
/// so callers should inspect `gap` rather than assume certification.
pub fn max_margin(matrix: &GameMatrix) -> LPSolution {
    let m = matrix.rows();
    let mut order: Vec<usize> = (0..m).collect();
    let mut best = solve_once(matrix, &order);
    for shift in 1..m.min(8) {
        if best.gap <= GAP_TOLERANCE {
            break;
        }
        order.rotate_left(1);
        if shift % 2 == 0 {
            order.reverse();
        }
        let next = solve_once(matrix, &order);
        if next.gap < best.gap {
            best = next;
        }
    }
    best
}

/// Best minimum margin over the barycentric grid `{λ = k/grid}` of the
/// simplex. A lower bound on `ρ`, off by at most `2⌊n/2⌋/grid`.
pub fn brute_force_value(matrix: &GameMatrix, grid: usize) -> Result<f64> {
    let n = matrix.cols();
    if n > 4 {
        return Err(Error::Domain(format!("brute force supports n <= 4, got {n}")));
    }
    if grid < 10 {
        return Err(Error::Domain(format!("grid must be at least 10, got {grid}")));
    }
    let m = matrix.rows();
    // integer margins k·M summed per row, scaled by 1/grid at the end
    let cols: Vec<Vec<i64>> = (0..n)
        .map(|j| matrix.column(j).iter().map(|&v| i64::from(v)).collect())
        .collect();
    let mut best = i64::MIN;
    let mut acc = vec![0i64; m];
    fn recurse(
        j: usize,
        left: usize,
        cols: &[Vec<i64>],
        acc: &mut [i64],
        best: &mut i64,
    ) {
        let n = cols.len();
        if j == n - 1 {
            let k = left as i64;
            let worst = acc.iter().zip(&cols[j]).map(|(a, c)| a + k * c).min().unwrap();
            *best = (*best).max(worst);
            return;
        }
        for k in 0..=left {
            if k > 0 {
                acc.iter_mut().zip(&cols[j]).for_each(|(a, c)| *a += c);
            }
            recurse(j + 1, left - k, cols, acc, best);
        }
        let k = left as i64;
        acc.iter_mut().zip(&cols[j]).for_each(|(a, c)| *a -= k * c);
    }
    recurse(0, grid, &cols, &mut acc, &mut best);
    Ok(best as f64 / grid as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cyclic_3x3;

    #[test]
    fn cyclic_value_is_one_third() {
        let sol = max_margin(&cyclic_3x3());
        assert!((sol.rho - 1.0 / 3.0).abs() < 1e-12);
        for v in sol.lambda_star.iter().chain(&sol.d_star) {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(sol.gap <= GAP_TOLERANCE);
    }

    #[test]
    fn single_column_value_is_its_minimum() {
        let m = GameMatrix::from_rows(&[vec![1], vec![-1]]).unwrap();
        let sol = max_margin(&m);
        assert!((sol.rho + 1.0).abs() < 1e-12);
        assert_eq!(sol.lambda_star, vec![1.0]);
        assert!(!sol.is_separable());
        assert_eq!(brute_force_value(&m, 10).unwrap(), -1.0);
    }

    #[test]
    fn degenerate_pure_strategy() {
        // an extra example every column gets right leaves the value unchanged
        let m = GameMatrix::from_rows(&[vec![1, 1, -1], vec![1, -1, 1], vec![-1, 1, 1], vec![1, 1, 1]])
            .unwrap();
        let sol = max_margin(&m);
        assert!((sol.rho - 1.0 / 3.0).abs() < 1e-12);
        assert!(sol.gap <= GAP_TOLERANCE);
    }

    #[test]
    fn brute_force_brackets_the_cycle() {
        let v = brute_force_value(&cyclic_3x3(), 300).unwrap();
        assert!((1.0 / 3.0 - 0.01..=1.0 / 3.0 + 1e-15).contains(&v));
        // 300 is divisible by 3 so the optimum is on the grid
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        let big = GameMatrix::from_rows(&[vec![1, 1, -1, 1, -1], vec![-1, -1, 1, -1, 1]]).unwrap();
        assert!(brute_force_value(&big, 20).is_err());
        assert!(brute_force_value(&cyclic_3x3(), 5).is_err());
    }
}
