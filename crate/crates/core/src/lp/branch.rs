//! Depth-first branch-and-bound over [`solve_lp`].

use super::{solve_lp, LpOptions, LpProblem, LpSolution, Sense, Status};
use crate::error::{Error, Result};

const INTEGRALITY_TOL: f64 = 1e-6;

struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

/// Solves `problem` with the variables in `integer_variables` restricted to
/// integers. Branches on the most fractional variable, exploring the rounded-up
/// child first, and prunes on the LP bound.
///
/// Returns [`Error::NodeLimit`] after `opts.node_limit` LP relaxations.
pub fn solve_ilp(problem: &LpProblem, integer_variables: &[usize], opts: &LpOptions) -> Result<LpSolution> {
    problem.validate()?;
    for &j in integer_variables {
        if j >= problem.variable_count() {
            return Err(Error::input(format!("integer variable {j} does not exist")));
        }
        if !problem.lower[j].is_finite() || !problem.upper[j].is_finite() {
            return Err(Error::input(format!("integer variable {j} needs finite bounds")));
        }
    }

    // Work in maximization terms: larger `score` is better.
    let sign = if problem.sense == Sense::Maximize { 1.0 } else { -1.0 };
    // With integral objective coefficients supported on integer variables, every
    // integral point has an integral objective and bounds can be rounded down.
    let integral_objective = problem.objective.iter().enumerate().all(|(j, &c)| {
        c == 0.0 || (c.fract() == 0.0 && integer_variables.contains(&j))
    });

    let mut incumbent: Option<LpSolution> = None;
    let mut best_score = f64::NEG_INFINITY;
    let mut stack = vec![Node {
        lower: problem.lower.clone(),
        upper: problem.upper.clone(),
    }];
    let mut nodes = 0u64;
    let mut relaxation = problem.clone();
    let (n, m) = (problem.variable_count(), problem.constraints.len());

    while let Some(node) = stack.pop() {
        if nodes >= opts.node_limit {
            return Err(Error::NodeLimit { limit: opts.node_limit });
        }
        nodes += 1;
        relaxation.lower = node.lower;
        relaxation.upper = node.upper;
        let solution = solve_lp(&relaxation, opts)?;
        match solution.status {
            Status::Infeasible => continue,
            Status::Unbounded => return Ok(LpSolution::without_optimum(Status::Unbounded, n, m)),
            Status::Optimal => {}
        }
        let mut bound = sign * solution.objective;
        if integral_objective {
            bound = (bound + INTEGRALITY_TOL).floor();
        }
        if incumbent.is_some() && bound <= best_score + 1e-9 {
            continue;
        }

        let branch_on = integer_variables
            .iter()
            .copied()
            .map(|j| {
                let v = solution.primal[j];
                (j, v, (v - v.floor() - 0.5).abs())
            })
            .filter(|&(_, v, _)| (v - v.round()).abs() > INTEGRALITY_TOL)
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)));

        match branch_on {
            None => {
                let mut solution = solution;
                for &j in integer_variables {
                    solution.primal[j] = solution.primal[j].round();
                }
                solution.objective = problem.evaluate(&solution.primal);
                best_score = sign * solution.objective;
                incumbent = Some(solution);
            }
            Some((j, v, _)) => {
                let mut down = Node {
                    lower: relaxation.lower.clone(),
                    upper: relaxation.upper.clone(),
                };
                down.upper[j] = v.floor();
                let mut up = Node {
                    lower: relaxation.lower.clone(),
                    upper: relaxation.upper.clone(),
                };
                up.lower[j] = v.ceil();
                stack.push(down);
                stack.push(up);
            }
        }
    }

    Ok(incumbent.unwrap_or_else(|| LpSolution::without_optimum(Status::Infeasible, n, m)))
}
