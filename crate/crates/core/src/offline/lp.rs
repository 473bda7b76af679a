//! Dense two-phase primal simplex with Bland's rule. Sized for small programs.

use crate::error::{CflError, Result};

const PIVOT_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min objective·v` subject to the rows and `v ≥ 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    pub status: LpStatus,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::build(self).run(self.objective.len())
    }
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_cols: usize,
    first_artificial: usize,
    cost: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.objective.len();
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let n_art = lp
            .rows
            .iter()
            .filter(|r| {
                let flip = r.rhs < 0.0;
                match r.relation {
                    Relation::Le => flip,
                    Relation::Ge => !flip,
                    Relation::Eq => true,
                }
            })
            .count();
        let first_artificial = n + n_slack;
        let n_cols = first_artificial + n_art;
        let mut a = vec![vec![0.0; n_cols + 1]; m + 1];
        let mut basis = vec![0; m];
        let (mut slack, mut art) = (n, first_artificial);
        for (r, row) in lp.rows.iter().enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            for &(j, v) in &row.coeffs {
                a[r][j] += sign * v;
            }
            a[r][n_cols] = sign * row.rhs;
            let rel = match (row.relation, sign < 0.0) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (rel, _) => rel,
            };
            match rel {
                Relation::Le => {
                    a[r][slack] = 1.0;
                    basis[r] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    a[r][slack] = -1.0;
                    slack += 1;
                    a[r][art] = 1.0;
                    basis[r] = art;
                    art += 1;
                }
                Relation::Eq => {
                    a[r][art] = 1.0;
                    basis[r] = art;
                    art += 1;
                }
            }
        }
        let mut cost = vec![0.0; n_cols];
        cost[..n].copy_from_slice(&lp.objective);
        Tableau {
            a,
            basis,
            n_cols,
            first_artificial,
            cost,
            pivots: 0,
        }
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    /// Rewrites the objective row as reduced costs for column costs `c`.
    fn price(&mut self, c: &[f64]) {
        let (m, nc) = (self.m(), self.n_cols);
        let mut obj = vec![0.0; nc + 1];
        obj[..nc].copy_from_slice(c);
        for r in 0..m {
            let cb = c[self.basis[r]];
            if cb != 0.0 {
                for (o, v) in obj.iter_mut().zip(&self.a[r]) {
                    *o -= cb * v;
                }
            }
        }
        self.a[m] = obj;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.a[row][col];
        for v in self.a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[row].clone();
        for (r, line) in self.a.iter_mut().enumerate() {
            if r == row {
                continue;
            }
            let f = line[col];
            if f != 0.0 {
                for (v, pv) in line.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Bland's rule iterations over columns `< allowed`. Returns false when unbounded.
    fn iterate(&mut self, allowed: usize) -> Result<bool> {
        let m = self.m();
        let rhs = self.n_cols;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(CflError::numeric("simplex pivot limit reached"));
            }
            let Some(col) = (0..allowed).find(|&j| self.a[m][j] < -PIVOT_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let v = self.a[r][col];
                if v > PIVOT_TOL {
                    let ratio = self.a[r][rhs] / v;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return Ok(false),
            }
        }
    }

    fn run(mut self, n_vars: usize) -> Result<LpSolution> {
        let m = self.m();
        let rhs = self.n_cols;
        if self.first_artificial < self.n_cols {
            let mut phase1 = vec![0.0; self.n_cols];
            for v in phase1[self.first_artificial..].iter_mut() {
                *v = 1.0;
            }
            self.price(&phase1);
            self.iterate(self.n_cols)?;
            let infeas = -self.a[m][rhs];
            if infeas > 1e-7 {
                return Ok(LpSolution {
                    values: vec![],
                    objective: f64::NAN,
                    pivots: self.pivots,
                    status: LpStatus::Infeasible,
                });
            }
            // Drive remaining artificials out of the basis where possible.
            for r in 0..m {
                if self.basis[r] >= self.first_artificial {
                    if let Some(col) =
                        (0..self.first_artificial).find(|&j| self.a[r][j].abs() > PIVOT_TOL)
                    {
                        self.pivot(r, col);
                    }
                }
            }
        }
        let cost = self.cost.clone();
        self.price(&cost);
        let bounded = self.iterate(self.first_artificial)?;
        let mut values = vec![0.0; n_vars];
        for r in 0..m {
            if self.basis[r] < n_vars {
                values[self.basis[r]] = self.a[r][rhs];
            }
        }
        let objective = values.iter().zip(&cost).map(|(v, c)| v * c).sum();
        Ok(LpSolution {
            values,
            objective,
            pivots: self.pivots,
            status: if bounded {
                LpStatus::Optimal
            } else {
                LpStatus::Unbounded
            },
        })
    }
}
