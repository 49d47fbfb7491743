//! Dense two-phase simplex for the small equality-form programs behind the
//! region queries: maximize `c . x` subject to `A x = b`, `x >= 0`.
//!
//! The programs solved here have a handful of rows and at most a few
//! thousand columns, so a dense tableau with Bland's anti-cycling pivot rule
//! is simple and entirely adequate. Phase one drives a full set of
//! artificial variables to zero (dropping rows that turn out redundant),
//! phase two optimises the real objective with the artificial columns
//! barred from re-entering.

use alloc::{vec, vec::Vec};

/// Reduced-cost threshold: a column only enters if it improves the
/// objective by more than this per unit.
const EPS: f64 = 1e-9;
/// Smallest pivot magnitude accepted during elimination.
const PIVOT_EPS: f64 = 1e-11;
/// Safety valve; Bland's rule terminates long before this on sane inputs.
const MAX_PIVOTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraints admit no feasible point")]
    Infeasible,
    #[error("objective is unbounded above")]
    Unbounded,
    #[error("pivot limit exceeded")]
    PivotLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

struct Tableau {
    /// `rows` constraint rows plus one objective row, each `width` wide with
    /// the right-hand side in the last column.
    cells: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.cells[row][self.width - 1]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = 1.0 / self.cells[row][col];
        for v in self.cells[row].iter_mut() {
            *v *= inv;
        }
        self.cells[row][col] = 1.0;
        let pivot_row = self.cells[row].clone();
        for (i, r) in self.cells.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, p) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering column is the lowest index with negative
    /// reduced cost, leaving row breaks ratio ties by lowest basis index.
    fn optimize(&mut self, enter_limit: usize) -> Result<(), LpError> {
        let m = self.basis.len();
        let obj = self.cells.len() - 1;
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..enter_limit).find(|&j| self.cells[obj][j] < -EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.cells[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((best_i, best)) => {
                            ratio < best - 1e-12
                                || ((ratio - best).abs() <= 1e-12
                                    && self.basis[i] < self.basis[best_i])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::PivotLimit)
    }
}

/// Solves `maximize c . x  subject to  A x = b, x >= 0`.
///
/// `rows` holds the rows of `A`; `b` may have either sign. Returns the
/// optimum and one optimal vertex.
pub fn maximize(c: &[f64], rows: &[Vec<f64>], b: &[f64]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = rows.len();
    debug_assert!(rows.iter().all(|r| r.len() == n));
    debug_assert_eq!(b.len(), m);

    let width = n + m + 1;
    let mut cells = vec![vec![0.0; width]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            cells[i][j] = sign * rows[i][j];
        }
        cells[i][n + i] = 1.0;
        cells[i][width - 1] = sign * b[i];
    }
    // Phase-one objective row (z_j - c_j with c = -1 on artificials): the
    // artificial columns start at zero reduced cost, structural columns at
    // minus their column sums, and the stored value is -(sum of residuals).
    for j in 0..width {
        if (n..n + m).contains(&j) {
            continue;
        }
        cells[m][j] = -(0..m).map(|i| cells[i][j]).sum::<f64>();
    }
    let mut tab = Tableau { cells, basis: (n..n + m).collect(), width };
    tab.optimize(n + m)?;
    if tab.rhs(m) < -1e-7 {
        return Err(LpError::Infeasible);
    }

    // Kick leftover artificials out of the basis; a row with no structural
    // coefficient left is redundant and gets dropped.
    let mut row = 0;
    while row < tab.basis.len() {
        if tab.basis[row] >= n {
            match (0..n).find(|&j| tab.cells[row][j].abs() > PIVOT_EPS) {
                Some(col) => tab.pivot(row, col),
                None => {
                    tab.cells.remove(row);
                    tab.basis.remove(row);
                    continue;
                }
            }
        }
        row += 1;
    }

    // Phase-two objective row over the real costs.
    let m_eff = tab.basis.len();
    let obj = tab.cells.len() - 1;
    for j in 0..width {
        let z: f64 = (0..m_eff).map(|i| c[tab.basis[i]] * tab.cells[i][j]).sum();
        let cost = if j < n { c[j] } else { 0.0 };
        tab.cells[obj][j] = z - cost;
    }
    // The loop above also fills the objective cell in the rhs column, where
    // the "cost" of the rhs is zero, so no fix-up is needed.
    tab.optimize(n)?;

    let mut x = vec![0.0; n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        if bj < n {
            x[bj] = tab.rhs(i).max(0.0);
        }
    }
    Ok(LpSolution { objective: tab.rhs(obj), x })
}
