//! Dense two-phase simplex over exact rationals.
//!
//! Solves problems in standard form `A x = b, x ≥ 0`. Bland's rule is used
//! for both entering and leaving variables, so the method terminates without
//! any tolerance.

use num::{Signed, Zero};

use crate::credal::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal(Vec<Rational>),
}

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    n_vars: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        Self { n_vars, rows: Vec::new(), rhs: Vec::new() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Adds `Σ_j coeffs[j] · x_j = rhs`.
    pub fn add_equality(&mut self, coeffs: Vec<Rational>, rhs: Rational) {
        assert_eq!(coeffs.len(), self.n_vars, "row width");
        self.rows.push(coeffs);
        self.rhs.push(rhs);
    }

    /// Some basic feasible solution, or `None` when the system is infeasible.
    pub fn find_feasible(&self) -> Option<Vec<Rational>> {
        let tableau = Tableau::phase_one(self)?;
        Some(tableau.solution())
    }

    pub fn is_feasible(&self) -> bool {
        Tableau::phase_one(self).is_some()
    }

    /// Minimizes `cost · x`; an optimal solution is always a vertex.
    pub fn minimize(&self, cost: &[Rational]) -> LpOutcome {
        assert_eq!(cost.len(), self.n_vars, "cost width");
        let Some(mut tableau) = Tableau::phase_one(self) else {
            return LpOutcome::Infeasible;
        };
        tableau.set_objective(cost);
        if tableau.run() {
            LpOutcome::Optimal(tableau.solution())
        } else {
            LpOutcome::Unbounded
        }
    }
}

struct Tableau {
    /// `m` rows of `n_cols + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the objective value.
    reduced: Vec<Rational>,
    basis: Vec<usize>,
    n_vars: usize,
    /// Columns allowed to enter the basis.
    allowed: usize,
}

impl Tableau {
    /// Runs phase one with one artificial per row. On success the artificials
    /// are driven out of the basis (or their rows dropped as redundant).
    fn phase_one(lp: &LinearProgram) -> Option<Tableau> {
        let m = lp.rows.len();
        let n = lp.n_vars;
        let width = n + m + 1;
        let mut rows = Vec::with_capacity(m);
        for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let flip = b.is_negative();
            let mut r = Vec::with_capacity(width);
            r.extend(row.iter().map(|a| if flip { -a } else { a.clone() }));
            r.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
            r.push(if flip { -b } else { b.clone() });
            rows.push(r);
        }
        let mut reduced = vec![Rational::zero(); width];
        for r in &rows {
            for (z, a) in reduced.iter_mut().zip(r) {
                if !a.is_zero() {
                    *z -= a;
                }
            }
        }
        for z in &mut reduced[n..n + m] {
            *z = Rational::zero();
        }
        let mut t = Tableau { rows, reduced, basis: (n..n + m).collect(), n_vars: n, allowed: n };
        let finished = t.run();
        debug_assert!(finished, "phase one is bounded below by zero");
        if !t.reduced[width - 1].is_zero() {
            return None;
        }
        t.evict_artificials();
        Some(t)
    }

    fn width(&self) -> usize {
        self.reduced.len()
    }

    fn evict_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n_vars {
                match (0..self.n_vars).find(|&k| !self.rows[i][k].is_zero()) {
                    Some(k) => {
                        self.pivot(i, k);
                        i += 1;
                    }
                    None => {
                        self.rows.swap_remove(i);
                        self.basis.swap_remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let rhs = self.width() - 1;
        let mut reduced = vec![Rational::zero(); self.width()];
        reduced[..self.n_vars].clone_from_slice(cost);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() && (j < self.n_vars || j == rhs) {
                    reduced[j] -= cb * a;
                }
            }
        }
        self.reduced = reduced;
        self.allowed = self.n_vars;
    }

    /// Iterates until optimal (`true`) or unbounded (`false`).
    fn run(&mut self) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(enter) = (0..self.allowed).find(|&j| self.reduced[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, enter);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_zero() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &j in &nonzero {
                row[j] -= &f * &pivot_row[j];
            }
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &nonzero {
                self.reduced[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    fn solution(&self) -> Vec<Rational> {
        let rhs = self.width() - 1;
        let mut x = vec![Rational::zero(); self.n_vars];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_vars {
                x[b] = row[rhs].clone();
            }
        }
        x
    }
}
