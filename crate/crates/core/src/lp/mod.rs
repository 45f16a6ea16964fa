//! A small self-contained linear-programming engine.
//!
//! [`solve_lp`] runs a dense two-phase simplex, either in `f64` with explicit
//! tolerances or in exact rational arithmetic, and reports primal values,
//! dual values and a strong-duality self-check. [`solve_ilp`] adds
//! depth-first branch-and-bound on top.

mod branch;
mod scalar;
mod simplex;

use num_rational::BigRational;

use crate::error::{Error, Result};
use scalar::Scalar;
use simplex::{Outcome, StandardForm};

pub use branch::solve_ilp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    /// A problem over `objective.len()` variables with bounds `[0, +inf)`.
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn variable_count(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { terms, relation, rhs });
        self
    }

    pub fn set_bounds(&mut self, variable: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[variable] = lower;
        self.upper[variable] = upper;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.variable_count();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::input("bound vectors must have one entry per variable"));
        }
        if let Some(c) = self.objective.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("objective coefficient {c} is not finite")));
        }
        for (j, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::input(format!("variable {j} has invalid bounds [{lo}, {hi}]")));
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::input(format!("constraint {i} has a non-finite right-hand side")));
            }
            for &(j, a) in &con.terms {
                if j >= n {
                    return Err(Error::input(format!("constraint {i} references variable {j} of {n}")));
                }
                if !a.is_finite() {
                    return Err(Error::input(format!("constraint {i} has a non-finite coefficient")));
                }
            }
        }
        Ok(())
    }

    /// Value of the objective at `x`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest constraint or bound violation at `x`, each scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for con in &self.constraints {
            let lhs: f64 = con.terms.iter().map(|&(j, a)| a * x[j]).sum();
            let excess = match con.relation {
                Relation::Le => lhs - con.rhs,
                Relation::Ge => con.rhs - lhs,
                Relation::Eq => (lhs - con.rhs).abs(),
            };
            worst = worst.max(excess / (1.0 + con.rhs.abs()));
        }
        for (j, &v) in x.iter().enumerate() {
            if self.lower[j].is_finite() {
                worst = worst.max((self.lower[j] - v) / (1.0 + self.lower[j].abs()));
            }
            if self.upper[j].is_finite() {
                worst = worst.max((v - self.upper[j]) / (1.0 + self.upper[j].abs()));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One value per constraint: the rate of change of the optimum per unit of
    /// right-hand side.
    pub duals: Vec<f64>,
    /// Exact optimum, present when solved in rational arithmetic.
    pub exact_objective: Option<BigRational>,
    pub exact_primal: Option<Vec<BigRational>>,
}

impl LpSolution {
    fn without_optimum(status: Status, n: usize, m: usize) -> Self {
        LpSolution {
            status,
            objective: f64::NAN,
            primal: vec![0.0; n],
            duals: vec![0.0; m],
            exact_objective: None,
            exact_primal: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arithmetic {
    Float,
    /// Rational arithmetic; only permitted up to [`EXACT_VARIABLE_LIMIT`] variables.
    Exact,
}

pub const EXACT_VARIABLE_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct LpOptions {
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Relative tolerance of the strong-duality self-check.
    pub duality_tol: f64,
    pub max_pivots: u64,
    pub node_limit: u64,
    pub arithmetic: Arithmetic,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            pivot_tol: 1e-10,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-10,
            duality_tol: 1e-7,
            max_pivots: 5_000_000,
            node_limit: 1_000_000,
            arithmetic: Arithmetic::Float,
        }
    }
}

impl LpOptions {
    pub fn exact() -> Self {
        LpOptions {
            arithmetic: Arithmetic::Exact,
            ..Self::default()
        }
    }

    /// Scales all simplex tolerances from a single feasibility tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.feasibility_tol = tol;
        self.pivot_tol = tol / 10.0;
        self.optimality_tol = tol / 10.0;
        self
    }
}

/// How an original variable is recovered from standard-form columns.
enum Column<T> {
    /// `x = offset + col`
    Shifted { col: usize, offset: T },
    /// `x = offset - col`
    Mirrored { col: usize, offset: T },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

struct Standardized<T> {
    form: StandardForm<T>,
    columns: Vec<Column<T>>,
    row_signs: Vec<bool>,
    objective_constant: T,
}

fn convert<T: Scalar>(value: f64) -> Result<T> {
    T::from_f64(value).ok_or_else(|| Error::input(format!("coefficient {value} cannot be represented")))
}

fn standardize<T: Scalar>(problem: &LpProblem) -> Result<Standardized<T>> {
    let n = problem.variable_count();
    let sign = if problem.sense == Sense::Maximize { 1.0 } else { -1.0 };

    let mut columns = Vec::with_capacity(n);
    let mut objective = Vec::with_capacity(n);
    let mut objective_constant = T::zero();
    let mut bound_rows = Vec::new();
    for j in 0..n {
        let (lo, hi) = (problem.lower[j], problem.upper[j]);
        let c: T = convert(sign * problem.objective[j])?;
        let col = objective.len();
        if lo.is_finite() {
            let offset: T = convert(lo)?;
            objective_constant = objective_constant + c.clone() * offset.clone();
            objective.push(c);
            if hi.is_finite() {
                bound_rows.push((col, convert::<T>(hi)? - offset.clone()));
            }
            columns.push(Column::Shifted { col, offset });
        } else if hi.is_finite() {
            let offset: T = convert(hi)?;
            objective_constant = objective_constant + c.clone() * offset.clone();
            objective.push(-c);
            columns.push(Column::Mirrored { col, offset });
        } else {
            objective.push(c.clone());
            objective.push(-c);
            columns.push(Column::Split { pos: col, neg: col + 1 });
        }
    }

    let mut rows = Vec::new();
    let mut relations = Vec::new();
    let mut rhs = Vec::new();
    let mut row_signs = Vec::new();
    let mut push_row = |mut row: Vec<(usize, T)>, mut relation: Relation, mut b: T| {
        let flipped = b.is_negative();
        if flipped {
            for (_, a) in &mut row {
                *a = -a.clone();
            }
            b = -b;
            relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push(row);
        relations.push(relation);
        rhs.push(b);
        row_signs.push(flipped);
    };

    for con in &problem.constraints {
        let mut row = Vec::with_capacity(con.terms.len());
        let mut b: T = convert(con.rhs)?;
        for &(j, a) in &con.terms {
            let a: T = convert(a)?;
            match &columns[j] {
                Column::Shifted { col, offset } => {
                    b = b - a.clone() * offset.clone();
                    row.push((*col, a));
                }
                Column::Mirrored { col, offset } => {
                    b = b - a.clone() * offset.clone();
                    row.push((*col, -a));
                }
                Column::Split { pos, neg } => {
                    row.push((*pos, a.clone()));
                    row.push((*neg, -a));
                }
            }
        }
        push_row(row, con.relation, b);
    }
    for (col, width) in bound_rows {
        push_row(vec![(col, T::one())], Relation::Le, width);
    }

    Ok(Standardized {
        form: StandardForm {
            rows,
            relations,
            rhs,
            objective,
        },
        columns,
        row_signs,
        objective_constant,
    })
}

struct Solved<T> {
    objective: T,
    primal: Vec<T>,
    duals: Vec<T>,
}

fn solve_generic<T: Scalar>(problem: &LpProblem, opts: &LpOptions) -> Result<std::result::Result<Solved<T>, Status>> {
    let std_form = standardize::<T>(problem)?;
    let outcome = simplex::solve(&std_form.form, opts);
    let (objective, columns_value, duals) = match outcome {
        Outcome::Optimal {
            objective,
            primal,
            duals,
        } => (objective, primal, duals),
        Outcome::Infeasible => return Ok(Err(Status::Infeasible)),
        Outcome::Unbounded => return Ok(Err(Status::Unbounded)),
        Outcome::Stalled => {
            return Err(Error::Numerical(format!(
                "simplex did not terminate within {} pivots",
                opts.max_pivots
            )))
        }
    };

    // Strong duality in standard form: c·x = b·y.
    let dual_objective = std_form
        .form
        .rhs
        .iter()
        .zip(&duals)
        .fold(T::zero(), |acc, (b, y)| acc + b.clone() * y.clone());
    let gap = (objective.clone() - dual_objective).abs().to_f64();
    if gap > opts.duality_tol * (1.0 + objective.abs().to_f64()) {
        return Err(Error::Numerical(format!("strong duality violated by {gap:e}")));
    }

    let primal: Vec<T> = std_form
        .columns
        .iter()
        .map(|column| match column {
            Column::Shifted { col, offset } => offset.clone() + columns_value[*col].clone(),
            Column::Mirrored { col, offset } => offset.clone() - columns_value[*col].clone(),
            Column::Split { pos, neg } => columns_value[*pos].clone() - columns_value[*neg].clone(),
        })
        .collect();
    let minimize = problem.sense == Sense::Minimize;
    let duals = duals
        .into_iter()
        .take(problem.constraints.len())
        .zip(&std_form.row_signs)
        .map(|(y, &flipped)| if flipped != minimize { -y } else { y })
        .collect();
    let objective = objective + std_form.objective_constant;
    Ok(Ok(Solved {
        objective: if minimize { -objective } else { objective },
        primal,
        duals,
    }))
}

/// Solves a linear program.
///
/// Every optimal answer is checked for strong duality and for primal
/// feasibility of the original constraints; a failed check is reported as
/// [`Error::Numerical`] rather than returned.
pub fn solve_lp(problem: &LpProblem, opts: &LpOptions) -> Result<LpSolution> {
    problem.validate()?;
    let n = problem.variable_count();
    let m = problem.constraints.len();

    if n == 0 {
        let feasible = problem.constraints.iter().all(|c| match c.relation {
            Relation::Le => 0.0 <= c.rhs,
            Relation::Ge => 0.0 >= c.rhs,
            Relation::Eq => c.rhs == 0.0,
        });
        if !feasible {
            return Ok(LpSolution::without_optimum(Status::Infeasible, 0, m));
        }
        return Ok(LpSolution {
            status: Status::Optimal,
            objective: 0.0,
            primal: Vec::new(),
            duals: vec![0.0; m],
            exact_objective: None,
            exact_primal: None,
        });
    }

    let solution = match opts.arithmetic {
        Arithmetic::Float => match solve_generic::<f64>(problem, opts)? {
            Ok(s) => LpSolution {
                status: Status::Optimal,
                objective: 0.0,
                primal: s.primal,
                duals: s.duals,
                exact_objective: None,
                exact_primal: None,
            },
            Err(status) => return Ok(LpSolution::without_optimum(status, n, m)),
        },
        Arithmetic::Exact => {
            if n > EXACT_VARIABLE_LIMIT {
                return Err(Error::input(format!(
                    "exact arithmetic is limited to {EXACT_VARIABLE_LIMIT} variables, got {n}"
                )));
            }
            match solve_generic::<BigRational>(problem, opts)? {
                Ok(s) => LpSolution {
                    status: Status::Optimal,
                    objective: 0.0,
                    primal: s.primal.iter().map(Scalar::to_f64).collect(),
                    duals: s.duals.iter().map(Scalar::to_f64).collect(),
                    exact_objective: Some(s.objective),
                    exact_primal: Some(s.primal),
                },
                Err(status) => return Ok(LpSolution::without_optimum(status, n, m)),
            }
        }
    };
    let mut solution = solution;
    solution.objective = problem.evaluate(&solution.primal);

    let violation = problem.max_violation(&solution.primal);
    if violation > opts.feasibility_tol {
        return Err(Error::Numerical(format!(
            "optimal point violates a constraint by {violation:e}"
        )));
    }
    Ok(solution)
}
