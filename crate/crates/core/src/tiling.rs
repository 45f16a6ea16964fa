//! Fractional tiling, fractional cover, integer tiling and robust tiling
//! numbers of finite graphs.
//!
//! Vertex loads are counted with multiplicity: a homomorphic copy that maps two
//! pattern vertices onto `v` contributes twice its weight to the load of `v`,
//! and a cover counts `c(v)` twice for such a copy.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::graph::{enumerate_homs, enumerate_injective_copies, Graph, Pattern, PatternCopy};
use crate::lp::{solve_ilp, solve_lp, LpOptions, LpProblem, LpSolution, Relation, Sense, Status};

/// Upper limit on the number of deletion sets [`til_eps_graph`] will examine.
pub const DELETION_SET_LIMIT: u128 = 10_000_000;

/// Nonnegative weights on homomorphic copies.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalTiling {
    pub value: f64,
    pub copies: Vec<PatternCopy>,
    pub weights: Vec<f64>,
    /// Exact optimum when the LP was solved in rational arithmetic.
    pub exact_value: Option<BigRational>,
}

impl FractionalTiling {
    /// Load `Σ mult_v(copy) · weight(copy)` at every vertex.
    pub fn loads(&self, vertex_count: usize) -> Vec<f64> {
        let mut loads = vec![0.0; vertex_count];
        for (copy, &w) in self.copies.iter().zip(&self.weights) {
            for &v in &copy.images {
                loads[v] += w;
            }
        }
        loads
    }

    /// Copies carrying positive weight.
    pub fn support(&self) -> impl Iterator<Item = (&PatternCopy, f64)> {
        self.copies
            .iter()
            .zip(self.weights.iter().copied())
            .filter(|(_, w)| *w > 0.0)
    }
}

/// Weights in `[0, 1]` on host vertices (or blocks, for step graphons).
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalCover {
    pub value: f64,
    pub weights: Vec<f64>,
    pub exact_value: Option<BigRational>,
}

impl FractionalCover {
    /// Smallest multiplicity-weighted sum `Σ_positions c(image)` over `copies`.
    pub fn min_copy_weight(&self, copies: &[PatternCopy]) -> f64 {
        copies
            .iter()
            .map(|c| c.images.iter().map(|&v| self.weights[v]).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerTiling {
    pub value: usize,
    pub copies: Vec<PatternCopy>,
}

fn require_optimal(solution: &LpSolution, what: &str) -> Result<()> {
    match solution.status {
        Status::Optimal => Ok(()),
        status => Err(Error::Numerical(format!("{what} LP finished with status {status:?}"))),
    }
}

/// `max Σ t` subject to `Σ_copies mult_v · t ≤ capacity[v]` for every vertex.
pub(crate) fn tiling_lp(copies: &[PatternCopy], capacities: &[f64], opts: &LpOptions) -> Result<LpSolution> {
    let mut lp = LpProblem::new(Sense::Maximize, vec![1.0; copies.len()]);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); capacities.len()];
    for (j, copy) in copies.iter().enumerate() {
        for (v, m) in copy.multiplicities() {
            rows[v].push((j, m as f64));
        }
    }
    for (row, &cap) in rows.into_iter().zip(capacities) {
        lp.add_constraint(row, Relation::Le, cap);
    }
    let solution = solve_lp(&lp, opts)?;
    require_optimal(&solution, "tiling")?;
    Ok(solution)
}

/// `min Σ cost[v]·c[v]` subject to `Σ_positions c(image) ≥ 1` per copy and `0 ≤ c ≤ 1`.
///
/// Copies with identical multiplicity vectors give identical rows and are merged.
pub(crate) fn cover_lp(copies: &[PatternCopy], costs: &[f64], opts: &LpOptions) -> Result<LpSolution> {
    let mut lp = LpProblem::new(Sense::Minimize, costs.to_vec());
    for v in 0..costs.len() {
        lp.set_bounds(v, 0.0, 1.0);
    }
    let mut rows: BTreeMap<Vec<(usize, usize)>, ()> = BTreeMap::new();
    for copy in copies {
        rows.insert(copy.multiplicities().into_iter().collect(), ());
    }
    for row in rows.into_keys() {
        let terms = row.into_iter().map(|(v, m)| (v, m as f64)).collect();
        lp.add_constraint(terms, Relation::Ge, 1.0);
    }
    let solution = solve_lp(&lp, opts)?;
    require_optimal(&solution, "cover")?;
    Ok(solution)
}

fn require_simple(host: &Graph) -> Result<()> {
    if host.has_loops() {
        return Err(Error::input("host graph must not contain loops"));
    }
    Ok(())
}

/// The fractional tiling number `ftil(pattern, host)` and an optimal tiling.
pub fn ftil(pattern: &Pattern, host: &Graph, opts: &LpOptions) -> Result<FractionalTiling> {
    require_simple(host)?;
    let copies = enumerate_homs(pattern, host);
    let solution = tiling_lp(&copies, &vec![1.0; host.vertex_count()], opts)?;
    Ok(FractionalTiling {
        value: solution.objective,
        copies,
        weights: solution.primal,
        exact_value: solution.exact_objective,
    })
}

/// The fractional cover number `fcov(pattern, host)` and an optimal cover.
pub fn fcov(pattern: &Pattern, host: &Graph, opts: &LpOptions) -> Result<FractionalCover> {
    require_simple(host)?;
    let copies = enumerate_homs(pattern, host);
    let solution = cover_lp(&copies, &vec![1.0; host.vertex_count()], opts)?;
    Ok(FractionalCover {
        value: solution.objective,
        weights: solution.primal,
        exact_value: solution.exact_objective,
    })
}

/// Maximum number of pairwise vertex-disjoint copies among `copies`.
fn max_packing(copies: &[PatternCopy], vertex_count: usize, opts: &LpOptions) -> Result<IntegerTiling> {
    if copies.is_empty() {
        return Ok(IntegerTiling {
            value: 0,
            copies: Vec::new(),
        });
    }
    let mut lp = LpProblem::new(Sense::Maximize, vec![1.0; copies.len()]);
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertex_count];
    for (j, copy) in copies.iter().enumerate() {
        lp.set_bounds(j, 0.0, 1.0);
        for &v in &copy.images {
            rows[v].push((j, 1.0));
        }
    }
    for row in rows.into_iter().filter(|r| r.len() > 1) {
        lp.add_constraint(row, Relation::Le, 1.0);
    }
    let integers: Vec<usize> = (0..copies.len()).collect();
    let solution = solve_ilp(&lp, &integers, opts)?;
    require_optimal(&solution, "packing")?;
    let chosen: Vec<PatternCopy> = copies
        .iter()
        .zip(&solution.primal)
        .filter(|(_, &x)| x > 0.5)
        .map(|(c, _)| c.clone())
        .collect();
    Ok(IntegerTiling {
        value: chosen.len(),
        copies: chosen,
    })
}

/// The tiling number `til(pattern, host)`: the largest set of pairwise
/// vertex-disjoint (injective) copies, found by branch-and-bound.
pub fn til_int(pattern: &Pattern, host: &Graph, opts: &LpOptions) -> Result<IntegerTiling> {
    require_simple(host)?;
    let copies = enumerate_injective_copies(pattern, host)?;
    max_packing(&copies, host.vertex_count(), opts)
}

/// `⌊eps · n²⌋` for an `n`-vertex host.
pub fn deletion_budget(eps: f64, vertex_count: usize) -> usize {
    let n = vertex_count as f64;
    (eps * n * n + 1e-9).floor() as usize
}

/// Binomial coefficient, saturating at `cap + 1`.
pub(crate) fn binomial_capped(n: usize, k: usize, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return cap + 1;
        }
    }
    acc
}

/// Advances `combo` (strictly increasing indices below `n`) to its
/// lexicographic successor.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
        return false;
    };
    combo[i] += 1;
    for j in i + 1..k {
        combo[j] = combo[j - 1] + 1;
    }
    true
}

/// The robust tiling number `til_eps(pattern, host)`: the minimum of
/// [`til_int`] over all ways of deleting at most `⌊eps · n²⌋` edges.
///
/// Deleting edges never increases the tiling number, so only deletion sets of
/// exactly `min(budget, e(host))` edges are examined.
pub fn til_eps_graph(pattern: &Pattern, host: &Graph, eps: f64, opts: &LpOptions) -> Result<usize> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::input(format!("eps must lie in [0, 1], got {eps}")));
    }
    require_simple(host)?;
    let edge_count = host.edge_count();
    let budget = deletion_budget(eps, host.vertex_count()).min(edge_count);
    let sets = binomial_capped(edge_count, budget, DELETION_SET_LIMIT);
    if sets > DELETION_SET_LIMIT {
        return Err(Error::Budget {
            what: "edge deletion sets",
            count: sets,
            limit: DELETION_SET_LIMIT,
        });
    }

    let copies = enumerate_injective_copies(pattern, host)?;
    let edge_index: BTreeMap<(usize, usize), usize> =
        host.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let used_edges: Vec<Vec<usize>> = copies
        .iter()
        .map(|copy| {
            pattern
                .edges()
                .iter()
                .map(|&(i, j)| {
                    let (u, v) = (copy.images[i], copy.images[j]);
                    edge_index[&(u.min(v), u.max(v))]
                })
                .collect()
        })
        .collect();

    let mut combo: Vec<usize> = (0..budget).collect();
    let mut deleted = vec![false; edge_count];
    let mut best = usize::MAX;
    loop {
        deleted.iter_mut().for_each(|d| *d = false);
        for &e in &combo {
            deleted[e] = true;
        }
        let alive: Vec<PatternCopy> = copies
            .iter()
            .zip(&used_edges)
            .filter(|(_, edges)| edges.iter().all(|&e| !deleted[e]))
            .map(|(c, _)| c.clone())
            .collect();
        best = best.min(max_packing(&alive, host.vertex_count(), opts)?.value);
        if best == 0 || !next_combination(&mut combo, edge_count) {
            break;
        }
    }
    Ok(best)
}
