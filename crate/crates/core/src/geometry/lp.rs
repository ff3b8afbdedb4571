//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Sized for the dispersion programs: a handful of constraint rows and up to
//! a few thousand nonnegative variables.

use crate::error::{validation, Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const REDUCED_COST_TOL: f64 = 1e-12;
/// Phase-one objective above this means the program is infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// `optimize c·x` subject to `A_eq x = b_eq`, `A_ub x ≤ b_ub`, `x ≥ 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
    pivots: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.allowed.len()
    }

    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols()]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Minimizes `cost·x` from the current basic feasible solution.
    fn optimize(&mut self, cost: &[f64]) -> Result<()> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Internal("simplex pivot limit reached".into()));
            }
            let ncols = self.ncols();
            let mut entering = None;
            for j in 0..ncols {
                if !self.allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, row) in self.rows.iter().enumerate() {
                    r -= cost[self.basis[i]] * row[j];
                }
                if r < -REDUCED_COST_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[col];
                if a > PIVOT_TOL {
                    let ratio = row[ncols] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-15
                                || ((ratio - br).abs() <= 1e-15 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::Internal("linear program is unbounded".into()));
            };
            self.pivot(r, col);
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        (0..self.rows.len())
            .map(|i| cost[self.basis[i]] * self.rhs(i))
            .sum()
    }
}

impl LinearProgram {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.a_eq.len() != self.b_eq.len() || self.a_ub.len() != self.b_ub.len() {
            return Err(validation(
                "constraint rows and right-hand sides differ in count",
            ));
        }
        if self.a_eq.iter().chain(&self.a_ub).any(|r| r.len() != n) {
            return Err(validation(
                "constraint row length differs from the number of variables",
            ));
        }
        Ok(())
    }

    pub fn solve(&self, sense: Sense) -> Result<LpSolution> {
        self.validate()?;
        let n = self.num_vars();
        let m_eq = self.a_eq.len();
        let m_ub = self.a_ub.len();
        let m = m_eq + m_ub;
        let n_slack = m_ub;
        let art0 = n + n_slack;
        let ncols = art0 + m;

        let mut rows = Vec::with_capacity(m);
        for (k, (a, b)) in self
            .a_eq
            .iter()
            .zip(&self.b_eq)
            .chain(self.a_ub.iter().zip(&self.b_ub))
            .enumerate()
        {
            let mut row = vec![0.0; ncols + 1];
            row[..n].copy_from_slice(a);
            if k >= m_eq {
                row[n + (k - m_eq)] = 1.0;
            }
            row[ncols] = *b;
            if *b < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[art0 + k] = 1.0;
            rows.push(row);
        }
        let mut t = Tableau {
            rows,
            basis: (art0..art0 + m).collect(),
            allowed: vec![true; ncols],
            pivots: 0,
        };

        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(art0) {
            *c = 1.0;
        }
        t.optimize(&phase1)?;
        let infeas = t.objective(&phase1);
        if infeas > FEASIBILITY_TOL {
            return Err(Error::Infeasible(format!(
                "phase one ended with residual {infeas:.3e}"
            )));
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                let col = (0..art0).find(|&j| t.rows[i][j].abs() > 1e-9 && !t.basis.contains(&j));
                match col {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for j in art0..ncols {
            t.allowed[j] = false;
        }

        let mut cost = vec![0.0; ncols];
        for (j, c) in self.c.iter().enumerate() {
            cost[j] = match sense {
                Sense::Minimize => *c,
                Sense::Maximize => -*c,
            };
        }
        t.optimize(&cost)?;
        let mut x = vec![0.0; n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs(i).max(0.0);
            }
        }
        let objective = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots: t.pivots,
        })
    }
}
