//! Bundled dense two-phase simplex.
//!
//! Solves `min c·x` subject to `A·x = b`, `x ≥ 0` on a dense tableau.
//! Phase 1 minimizes the sum of artificial variables to find a basic
//! feasible point (declaring infeasibility when that sum stays positive);
//! phase 2 then minimizes the real objective. Pivoting follows Bland's
//! rule — smallest eligible entering index, smallest basic index on ratio
//! ties — which excludes cycling, with a generous pivot cap as a backstop.
//! The problems in this crate are tiny (at most a few hundred variables),
//! so a dependency-free dense implementation is the simplest thing that is
//! bit-for-bit deterministic.

use crate::{Error, Result};

/// Reduced costs above `-COST_EPS` count as optimal.
const COST_EPS: f64 = 1e-9;
/// Entries below this are treated as zero in the ratio test and when
/// searching pivot elements.
const PIVOT_EPS: f64 = 1e-11;
/// Ratio-test ties within this tolerance fall back to the Bland index.
const RATIO_EPS: f64 = 1e-12;
/// Hard cap on total pivots across both phases.
const MAX_PIVOTS: usize = 100_000;

/// `min objective·x` with `constraints·x = rhs`, `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
}

struct Tableau {
    /// `rows.len() - 1` constraint rows plus the reduced-cost row at the
    /// end; each row has the right-hand side in its last slot.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn constraint_count(&self) -> usize {
        self.rows.len() - 1
    }

    fn rhs(&self, i: usize) -> f64 {
        let w = self.rows[i].len() - 1;
        self.rows[i][w]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::NumericalInstability(format!(
                "simplex exceeded {MAX_PIVOTS} pivots"
            )));
        }
        let inv = 1.0 / self.rows[row][col];
        for v in &mut self.rows[row] {
            *v *= inv;
        }
        self.rows[row][col] = 1.0;
        for r in 0..self.rows.len() {
            if r == row {
                continue;
            }
            let factor = self.rows[r][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..self.rows[r].len() {
                self.rows[r][j] -= factor * self.rows[row][j];
            }
            self.rows[r][col] = 0.0;
        }
        self.basis[row] = col;
        Ok(())
    }

    /// Bland iterations until no reduced cost is below `-COST_EPS` among
    /// the first `eligible` columns. Errors on an unbounded ray.
    fn run(&mut self, eligible: usize) -> Result<()> {
        let m = self.constraint_count();
        loop {
            let cost_row = self.rows.len() - 1;
            let Some(entering) =
                (0..eligible).find(|&j| self.rows[cost_row][j] < -COST_EPS)
            else {
                return Ok(());
            };
            let mut leaving: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..m {
                let a = self.rows[i][entering];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                match leaving {
                    None => {
                        best_ratio = ratio;
                        leaving = Some(i);
                    }
                    Some(current) => {
                        let tie =
                            (ratio - best_ratio).abs() <= RATIO_EPS * (1.0 + best_ratio.abs());
                        if tie {
                            best_ratio = best_ratio.min(ratio);
                            if self.basis[i] < self.basis[current] {
                                leaving = Some(i);
                            }
                        } else if ratio < best_ratio {
                            best_ratio = ratio;
                            leaving = Some(i);
                        }
                    }
                }
            }
            let Some(row) = leaving else {
                return Err(Error::NumericalInstability(
                    "objective unbounded below".into(),
                ));
            };
            self.pivot(row, entering)?;
        }
    }
}

/// Two-phase simplex on a standard-form program.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let m = lp.constraints.len();
    let n = lp.objective.len();
    assert!(m > 0 && n > 0, "empty linear program");
    assert_eq!(lp.rhs.len(), m, "rhs length must match constraint count");
    for row in &lp.constraints {
        assert_eq!(row.len(), n, "constraint width must match objective");
    }

    // Phase 1 tableau: n structural + m artificial columns, rhs ≥ 0.
    let total = n + m;
    let mut rows = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = if lp.rhs[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; total + 1];
        for (j, coeff) in lp.constraints[i].iter().enumerate() {
            row[j] = flip * coeff;
        }
        row[n + i] = 1.0;
        row[total] = flip * lp.rhs[i];
        rows.push(row);
    }
    // Reduced costs for min Σ artificials with the artificial basis:
    // r_j = -Σ_i a_ij on structural columns, objective value Σ_i b_i.
    let mut cost = vec![0.0; total + 1];
    for j in 0..=total {
        let column_sum: f64 = (0..m).map(|i| rows[i][j]).sum();
        cost[j] = if j < n || j == total { -column_sum } else { 0.0 };
    }
    rows.push(cost);

    let mut tableau = Tableau {
        rows,
        basis: (n..n + m).collect(),
        pivots: 0,
    };
    tableau.run(total)?;

    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
    let phase1_value = -tableau.rows[m][total];
    if phase1_value > 1e-9 * scale {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive leftover artificials out of the basis; rows where no structural
    // pivot exists are redundant and dropped.
    let mut redundant = Vec::new();
    for i in 0..tableau.constraint_count() {
        if tableau.basis[i] < n {
            continue;
        }
        match (0..n).find(|&j| tableau.rows[i][j].abs() > PIVOT_EPS) {
            Some(j) => tableau.pivot(i, j)?,
            None => redundant.push(i),
        }
    }
    for &i in redundant.iter().rev() {
        tableau.rows.remove(i);
        tableau.basis.remove(i);
    }

    // Phase 2: real objective restricted to structural columns.
    let m2 = tableau.constraint_count();
    let cost_row = tableau.rows.len() - 1;
    for j in 0..=total {
        let direct = if j < n { lp.objective[j] } else { 0.0 };
        let priced: f64 = (0..m2)
            .map(|i| {
                let b = tableau.basis[i];
                let cb = if b < n { lp.objective[b] } else { 0.0 };
                cb * tableau.rows[i][j]
            })
            .sum();
        tableau.rows[cost_row][j] = direct - priced;
    }
    tableau.run(n)?;

    let mut x = vec![0.0; n];
    for i in 0..tableau.constraint_count() {
        if tableau.basis[i] < n {
            x[tableau.basis[i]] = tableau.rhs(i).max(0.0);
        }
    }
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    Ok(LpOutcome::Optimal { x, objective })
}
