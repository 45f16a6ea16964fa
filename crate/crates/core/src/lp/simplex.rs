//! Dense two-phase primal simplex on a full tableau.
//!
//! Pricing uses the largest reduced cost until a run of degenerate pivots is
//! seen, after which the phase switches permanently to Bland's smallest-index
//! rule, which cannot cycle.

use super::scalar::Scalar;
use super::{LpOptions, Relation};

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

/// A maximization problem `max c·x, A x (rel) b, x ≥ 0` with `b ≥ 0`.
pub(crate) struct StandardForm<T> {
    pub rows: Vec<Vec<(usize, T)>>,
    pub relations: Vec<Relation>,
    pub rhs: Vec<T>,
    pub objective: Vec<T>,
}

#[derive(Debug)]
pub(crate) enum Outcome<T> {
    Optimal {
        objective: T,
        primal: Vec<T>,
        duals: Vec<T>,
    },
    Infeasible,
    Unbounded,
    /// The pivot cap was hit.
    Stalled,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    width: usize,
    /// `rows × width`, the right-hand side in the last column.
    cells: Vec<T>,
    /// Reduced costs `c_j - z_j`; the last entry holds minus the objective value.
    cost: Vec<T>,
    basis: Vec<usize>,
    kinds: Vec<Kind>,
}

impl<T: Scalar> Tableau<T> {
    fn row_count(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, r: usize, c: usize) -> &T {
        &self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> &T {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize) {
        let width = self.width;
        let pivot = self.at(pivot_row, pivot_col).clone();
        let start = pivot_row * width;
        for cell in &mut self.cells[start..start + width] {
            *cell = cell.clone() / pivot.clone();
        }
        self.cells[start + pivot_col] = T::one();

        let nonzero: Vec<usize> = (0..width)
            .filter(|&c| !self.cells[start + c].is_zero())
            .collect();
        let pivot_values: Vec<T> = nonzero.iter().map(|&c| self.cells[start + c].clone()).collect();

        for r in 0..self.row_count() {
            if r == pivot_row {
                continue;
            }
            let offset = r * width;
            let factor = self.cells[offset + pivot_col].clone();
            if factor.is_zero() {
                continue;
            }
            for (&c, value) in nonzero.iter().zip(&pivot_values) {
                let cell = &mut self.cells[offset + c];
                cell.sub_scaled(&factor, value);
                cell.snap();
            }
            self.cells[offset + pivot_col] = T::zero();
        }

        let factor = self.cost[pivot_col].clone();
        if !factor.is_zero() {
            for (&c, value) in nonzero.iter().zip(&pivot_values) {
                self.cost[c].sub_scaled(&factor, value);
                self.cost[c].snap();
            }
            self.cost[pivot_col] = T::zero();
        }
        self.basis[pivot_row] = pivot_col;
    }

    /// Recomputes the reduced-cost row for the column costs `costs`.
    fn price(&mut self, costs: &[T]) {
        let width = self.width;
        let mut row: Vec<T> = costs.to_vec();
        row.push(T::zero());
        for r in 0..self.row_count() {
            let cb = &costs[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            let offset = r * width;
            for (c, cell) in row.iter_mut().enumerate() {
                let entry = &self.cells[offset + c];
                if !entry.is_zero() {
                    cell.sub_scaled(cb, entry);
                }
            }
        }
        for cell in &mut row {
            cell.snap();
        }
        self.cost = row;
    }

    fn objective(&self) -> T {
        -self.cost[self.width - 1].clone()
    }

    /// Runs simplex iterations. Returns `Some(false)` on unboundedness,
    /// `Some(true)` at optimality and `None` when `budget` pivots are exhausted.
    fn optimize(&mut self, allow_artificial: bool, opts: &LpOptions, budget: &mut u64) -> Option<bool> {
        let columns = self.width - 1;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        loop {
            let eligible = |c: usize| allow_artificial || self.kinds[c] != Kind::Artificial;
            let entering = if bland {
                (0..columns).find(|&c| eligible(c) && self.cost[c].exceeds(opts.optimality_tol))
            } else {
                let mut best: Option<usize> = None;
                for c in 0..columns {
                    if eligible(c)
                        && self.cost[c].exceeds(opts.optimality_tol)
                        && best.is_none_or(|b| self.cost[c] > self.cost[b])
                    {
                        best = Some(c);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Some(true);
            };

            let mut leaving: Option<(usize, T)> = None;
            for r in 0..self.row_count() {
                let entry = self.at(r, col);
                if !entry.exceeds(opts.pivot_tol) {
                    continue;
                }
                let ratio = self.rhs(r).clone() / entry.clone();
                let better = match &leaving {
                    None => true,
                    Some((best_row, best)) => {
                        let diff = ratio.clone() - best.clone();
                        if diff.is_negligible(1e-12 * (1.0 + best.abs().to_f64())) {
                            self.basis[r] < self.basis[*best_row]
                        } else {
                            diff.is_negative()
                        }
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((row, ratio)) = leaving else {
                return Some(false);
            };

            if *budget == 0 {
                return None;
            }
            *budget -= 1;

            if ratio.is_negligible(opts.pivot_tol) {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_STREAK {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col);
        }
    }
}

pub(crate) fn solve<T: Scalar>(form: &StandardForm<T>, opts: &LpOptions) -> Outcome<T> {
    let m = form.rows.len();
    let n = form.objective.len();

    let mut kinds = vec![Kind::Structural; n];
    let mut unit_columns = Vec::with_capacity(m);
    let mut extra: Vec<(usize, T)> = Vec::new();
    for (r, relation) in form.relations.iter().enumerate() {
        match relation {
            Relation::Le => {
                unit_columns.push(kinds.len());
                extra.push((r, T::one()));
                kinds.push(Kind::Slack);
            }
            Relation::Ge => {
                extra.push((r, -T::one()));
                kinds.push(Kind::Slack);
                unit_columns.push(kinds.len());
                extra.push((r, T::one()));
                kinds.push(Kind::Artificial);
            }
            Relation::Eq => {
                unit_columns.push(kinds.len());
                extra.push((r, T::one()));
                kinds.push(Kind::Artificial);
            }
        }
    }
    let columns = kinds.len();
    let width = columns + 1;
    let mut cells = vec![T::zero(); m * width];
    for (r, row) in form.rows.iter().enumerate() {
        for (c, value) in row {
            let cell = &mut cells[r * width + c];
            *cell = cell.clone() + value.clone();
        }
        cells[r * width + columns] = form.rhs[r].clone();
    }
    for (offset, (r, value)) in extra.into_iter().enumerate() {
        cells[r * width + n + offset] = value;
    }

    let mut tableau = Tableau {
        width,
        cells,
        cost: Vec::new(),
        basis: unit_columns.clone(),
        kinds,
    };
    let mut budget = opts.max_pivots;

    let has_artificial = tableau.kinds.contains(&Kind::Artificial);
    if has_artificial {
        let phase_one: Vec<T> = tableau
            .kinds
            .iter()
            .map(|k| if *k == Kind::Artificial { -T::one() } else { T::zero() })
            .collect();
        tableau.price(&phase_one);
        if tableau.optimize(true, opts, &mut budget).is_none() {
            return Outcome::Stalled;
        }
        if tableau.objective().is_negative() && !tableau.objective().is_negligible(opts.feasibility_tol) {
            return Outcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if tableau.kinds[tableau.basis[r]] != Kind::Artificial {
                continue;
            }
            let replacement = (0..columns)
                .find(|&c| tableau.kinds[c] != Kind::Artificial && !tableau.at(r, c).is_negligible(opts.pivot_tol));
            if let Some(c) = replacement {
                tableau.pivot(r, c);
            }
        }
    }

    let mut phase_two = form.objective.clone();
    phase_two.resize(columns, T::zero());
    tableau.price(&phase_two);
    match tableau.optimize(false, opts, &mut budget) {
        None => return Outcome::Stalled,
        Some(false) => return Outcome::Unbounded,
        Some(true) => {}
    }

    let mut primal = vec![T::zero(); n];
    for r in 0..m {
        let c = tableau.basis[r];
        if c < n {
            let mut value = tableau.rhs(r).clone();
            value.snap();
            primal[c] = value;
        }
    }
    let duals = unit_columns
        .iter()
        .map(|&u| {
            let mut y = T::zero();
            for r in 0..m {
                let cb = &phase_two[tableau.basis[r]];
                if !cb.is_zero() {
                    y = y + cb.clone() * tableau.at(r, u).clone();
                }
            }
            y
        })
        .collect();
    Outcome::Optimal {
        objective: tableau.objective(),
        primal,
        duals,
    }
}
