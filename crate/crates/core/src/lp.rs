//! Dense two-phase simplex: Dantzig pricing with a fall-back to Bland's rule.
//!
//! Every row gets an artificial column that stays in the tableau through
//! phase II (barred from entering), so the final reduced costs of those
//! columns read off the dual values directly. Rows whose slack can start
//! basic keep their artificial non-basic from the outset.

use crate::error::{GameError, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub coefficients: Vec<S>,
    pub relation: Relation,
    pub rhs: S,
}

/// `opt c·x` subject to linear rows; variables are non-negative unless marked free.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<S> {
    pub sense: Sense,
    pub objective: Vec<S>,
    pub constraints: Vec<Constraint<S>>,
    pub free: Vec<bool>,
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(sense: Sense, objective: Vec<S>) -> Self {
        let free = vec![false; objective.len()];
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            free,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn add_constraint(&mut self, coefficients: Vec<S>, relation: Relation, rhs: S) {
        assert_eq!(coefficients.len(), self.num_vars(), "row width mismatch");
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<S> {
    pub objective: S,
    pub x: Vec<S>,
    /// Shadow price of each row: change of the optimum per unit increase of its right-hand side.
    pub duals: Vec<S>,
    pub pivots: usize,
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

struct Tableau<S> {
    /// `rows` constraint rows followed by the objective row; last column is the rhs.
    cells: Vec<Vec<S>>,
    basis: Vec<usize>,
    rows: usize,
    cols: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn rhs(&self, r: usize) -> &S {
        &self.cells[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.cells[r][c].clone();
        for v in self.cells[r].iter_mut() {
            if !v.is_zero() {
                v.div_by(&p);
            }
        }
        let pivot_row = self.cells[r].clone();
        for (i, row) in self.cells.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    v.mul_sub(&f, pv);
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Most negative reduced cost until a run of degenerate pivots, then
    /// Bland's rule, which cannot cycle. Columns `>= limit` never enter.
    fn optimize(&mut self, limit: usize) -> Result<()> {
        let obj = self.rows;
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                (0..limit).find(|&j| self.cells[obj][j] < S::zero())
            } else {
                let mut best: Option<usize> = None;
                for j in 0..limit {
                    let v = &self.cells[obj][j];
                    if *v < S::zero() && best.is_none_or(|b| *v < self.cells[obj][b]) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, S)> = None;
            for r in 0..self.rows {
                let a = &self.cells[r][c];
                if *a > S::zero() {
                    let ratio = self.rhs(r).clone() / a.clone();
                    let take = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if take {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((r, step)) = best else {
                return Err(GameError::Unbounded);
            };
            if step.is_zero() {
                degenerate += 1;
            } else if !bland {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
    }

    fn set_objective(&mut self, costs: &[S]) {
        let obj = self.rows;
        for j in 0..=self.cols {
            self.cells[obj][j] = if j < costs.len() { costs[j].clone() } else { S::zero() };
        }
        for r in 0..self.rows {
            let b = self.basis[r];
            let cb = self.cells[obj][b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.cols {
                let (head, tail) = self.cells.split_at_mut(obj);
                let v = &head[r][j];
                if !v.is_zero() {
                    tail[0][j].mul_sub(&cb, v);
                }
            }
        }
    }
}

/// Solves `lp` exactly (for exact scalars). Infeasible and unbounded programs
/// are reported as distinct errors.
pub fn simplex_solve<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>> {
    let n = lp.num_vars();
    let m = lp.constraints.len();
    // Column layout: split variables, one slack per inequality, one artificial per row.
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut next = 0;
    for j in 0..n {
        if lp.free[j] {
            var_cols.push((next, Some(next + 1)));
            next += 2;
        } else {
            var_cols.push((next, None));
            next += 1;
        }
    }
    let structural = next;
    let mut slack_of = vec![None; m];
    for (i, row) in lp.constraints.iter().enumerate() {
        if row.relation != Relation::Eq {
            slack_of[i] = Some(next);
            next += 1;
        }
    }
    let real = next;
    let cols = real + m;

    let mut cells = vec![vec![S::zero(); cols + 1]; m + 1];
    let mut flipped = vec![false; m];
    for (i, row) in lp.constraints.iter().enumerate() {
        let line = &mut cells[i];
        for (j, a) in row.coefficients.iter().enumerate() {
            let (pos, neg) = var_cols[j];
            line[pos] = a.clone();
            if let Some(neg) = neg {
                line[neg] = -a.clone();
            }
        }
        if let Some(s) = slack_of[i] {
            line[s] = match row.relation {
                Relation::Le => S::one(),
                _ => -S::one(),
            };
        }
        line[cols] = row.rhs.clone();
        // A zero right-hand side lets a `>=` row be negated so its slack can start basic.
        let negate_for_slack = row.rhs.is_zero() && row.relation == Relation::Ge;
        if row.rhs < S::zero() || negate_for_slack {
            flipped[i] = true;
            for v in line.iter_mut() {
                *v = -v.clone();
            }
        }
        line[real + i] = S::one();
    }
    // Start from the slack where it has coefficient +1, else the artificial.
    let basis = (0..m)
        .map(|i| match slack_of[i] {
            Some(s) if cells[i][s] == S::one() => s,
            _ => real + i,
        })
        .collect();
    let mut tab = Tableau {
        cells,
        basis,
        rows: m,
        cols,
        pivots: 0,
    };

    // Phase I: minimize the sum of artificials.
    let mut phase_one = vec![S::zero(); cols];
    for c in phase_one.iter_mut().skip(real) {
        *c = S::one();
    }
    tab.set_objective(&phase_one);
    tab.optimize(real)?;
    if *tab.rhs(m) != S::zero() {
        return Err(GameError::Infeasible);
    }
    // Drive remaining artificials out of the basis where a real column allows it.
    for r in 0..m {
        if tab.basis[r] >= real {
            if let Some(c) = (0..real).find(|&j| !tab.cells[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // Phase II on the original objective, expressed as a minimization.
    let sign = match lp.sense {
        Sense::Minimize => S::one(),
        Sense::Maximize => -S::one(),
    };
    let mut costs = vec![S::zero(); cols];
    for (j, c) in lp.objective.iter().enumerate() {
        let (pos, neg) = var_cols[j];
        costs[pos] = sign.clone() * c.clone();
        if let Some(neg) = neg {
            costs[neg] = -(sign.clone() * c.clone());
        }
    }
    tab.set_objective(&costs);
    tab.optimize(real)?;

    let mut values = vec![S::zero(); structural];
    for r in 0..m {
        if tab.basis[r] < structural {
            values[tab.basis[r]] = tab.rhs(r).clone();
        }
    }
    let x: Vec<S> = var_cols
        .iter()
        .map(|&(pos, neg)| match neg {
            Some(neg) => values[pos].clone() - values[neg].clone(),
            None => values[pos].clone(),
        })
        .collect();
    let objective = lp
        .objective
        .iter()
        .zip(&x)
        .fold(S::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    // Reduced cost of artificial i is -(c_B B^-1)_i for the minimization form.
    let duals = (0..m)
        .map(|i| {
            let y = -tab.cells[m][real + i].clone();
            let y = if flipped[i] { -y } else { y };
            sign.clone() * y
        })
        .collect();
    Ok(LpSolution {
        objective,
        x,
        duals,
        pivots: tab.pivots,
    })
}
