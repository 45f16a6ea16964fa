//! Step graphons and their tiling and cover numbers.
//!
//! A step graphon is constant on the cells `Ω_i × Ω_j` of a finite partition
//! of `[0, 1]`. Tilings of a step graphon can be averaged over product cells
//! without changing their size, so the tiling number is the optimum of a
//! finite LP over homomorphisms into the support graph, with block `b` having
//! capacity `ν(Ω_b)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_homs, Graph, Pattern};
use crate::lp::LpOptions;
use crate::tiling::{cover_lp, tiling_lp, FractionalCover, FractionalTiling};

/// Largest block count accepted by [`cut_norm`].
pub const CUT_NORM_MAX_BLOCKS: usize = 20;

/// Largest number of cell-removal subsets [`til_eps_graphon_ub`] will visit.
pub const REMOVAL_SUBSET_LIMIT: u128 = 1_000_000;

const MEASURE_SUM_TOL: f64 = 1e-12;

/// A graphon constant on the cells of a finite block partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepGraphonFile", into = "StepGraphonFile")]
pub struct StepGraphon {
    measures: Vec<f64>,
    values: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepGraphonFile {
    measures: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<StepGraphonFile> for StepGraphon {
    type Error = Error;

    fn try_from(file: StepGraphonFile) -> Result<Self> {
        StepGraphon::new(file.measures, file.values)
    }
}

impl From<StepGraphon> for StepGraphonFile {
    fn from(w: StepGraphon) -> Self {
        StepGraphonFile {
            measures: w.measures,
            values: w.values,
        }
    }
}

impl StepGraphon {
    pub fn new(measures: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = measures.len();
        if m == 0 {
            return Err(Error::input("a step graphon needs at least one block"));
        }
        if let Some(mu) = measures.iter().find(|&&mu| !(mu > 0.0) || !mu.is_finite()) {
            return Err(Error::input(format!("block measure {mu} is not positive")));
        }
        let total: f64 = measures.iter().sum();
        if (total - 1.0).abs() > MEASURE_SUM_TOL {
            return Err(Error::input(format!("block measures sum to {total}, not 1")));
        }
        if values.len() != m || values.iter().any(|row| row.len() != m) {
            return Err(Error::input(format!("values must be a {m}×{m} matrix")));
        }
        for i in 0..m {
            for j in 0..m {
                let v = values[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::input(format!("value {v} at ({i}, {j}) is outside [0, 1]")));
                }
                if v != values[j][i] {
                    return Err(Error::input(format!("values are not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(StepGraphon { measures, values })
    }

    /// Blocks of equal measure `1/m`.
    pub fn uniform(values: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.len();
        Self::new(vec![1.0 / m as f64; m], values)
    }

    pub fn constant(p: f64) -> Result<Self> {
        Self::new(vec![1.0], vec![vec![p]])
    }

    /// The representation `W_G`: one block of measure `1/n` per vertex and
    /// value one on the cells of adjacent pairs.
    pub fn from_graph(graph: &Graph) -> Self {
        let n = graph.vertex_count();
        let values = (0..n)
            .map(|i| (0..n).map(|j| if graph.is_adjacent(i, j) { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::uniform(values).expect("graph representation is a valid step graphon")
    }

    pub fn block_count(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// `‖W‖₁ = Σ_ij values[i][j] · ν_i · ν_j`.
    pub fn l1_norm(&self) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                total += v * self.measures[i] * self.measures[j];
            }
        }
        total
    }

    /// Applies `f` to every value, keeping the partition.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|&v| f(v)).collect())
            .collect();
        Self::new(self.measures.clone(), values)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("step graphon serializes")
    }
}

/// Analytic graphons that can be sampled and discretized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphonSpec {
    /// `W ≡ p`
    Constant { p: f64 },
    /// `W(x, y) = 1` if `x + y ≤ 1/2`, else `0`.
    Half,
    /// `W(x, y) = p` if exactly one of `x, y` lies below `split`, else `0`.
    Bipartite { split: f64, p: f64 },
}

impl GraphonSpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            GraphonSpec::Constant { p } => p,
            GraphonSpec::Half => {
                if x + y <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            GraphonSpec::Bipartite { split, p } => {
                if (x < split) != (y < split) {
                    p
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether [`GraphonSpec::cell_average`] is computed in closed form.
    pub fn has_closed_form(&self) -> bool {
        !matches!(self, GraphonSpec::Bipartite { .. })
    }

    /// Average of the graphon over `[x0, x1] × [y0, y1]`. Closed form for
    /// constant and half graphons; otherwise the midpoint rule on a
    /// `subsamples × subsamples` grid.
    pub fn cell_average(&self, x0: f64, x1: f64, y0: f64, y1: f64, subsamples: usize) -> f64 {
        match *self {
            GraphonSpec::Constant { p } => p,
            GraphonSpec::Half => {
                // Area of {x + y ≤ s} inside the rectangle, by inclusion–exclusion
                // on the corner triangles.
                let s = 0.5;
                // Offsets within rounding distance of the boundary count as on it.
                let corner = |u: f64| if u > 1e-12 { u * u / 2.0 } else { 0.0 };
                let area = corner(s - x0 - y0) - corner(s - x1 - y0) - corner(s - x0 - y1)
                    + corner(s - x1 - y1);
                area / ((x1 - x0) * (y1 - y0))
            }
            GraphonSpec::Bipartite { .. } => {
                let k = subsamples.max(1);
                let (hx, hy) = ((x1 - x0) / k as f64, (y1 - y0) / k as f64);
                let mut total = 0.0;
                for a in 0..k {
                    let x = x0 + (a as f64 + 0.5) * hx;
                    for b in 0..k {
                        total += self.eval(x, y0 + (b as f64 + 0.5) * hy);
                    }
                }
                total / (k * k) as f64
            }
        }
    }
}

impl fmt::Display for GraphonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphonSpec::Constant { p } => write!(f, "constant:p={p}"),
            GraphonSpec::Half => write!(f, "half"),
            GraphonSpec::Bipartite { split, p } => write!(f, "bipartite:s={split},p={p}"),
        }
    }
}

impl FromStr for GraphonSpec {
    type Err = Error;

    /// Parses `constant:p=0.5`, `half` and `bipartite:s=0.5,p=1.0`.
    fn from_str(text: &str) -> Result<Self> {
        let (kind, params) = text.split_once(':').unwrap_or((text, ""));
        let mut pairs = Vec::new();
        for item in params.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::input(format!("expected key=value in graphon spec, got {item:?}")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("{value:?} is not a number")))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::input(format!("graphon parameter {key}={value} is outside [0, 1]")));
            }
            pairs.push((key.trim(), value));
        }
        let take = |name: &str, default: Option<f64>| -> Result<f64> {
            pairs
                .iter()
                .find(|(k, _)| *k == name)
                .map(|&(_, v)| v)
                .or(default)
                .ok_or_else(|| Error::input(format!("graphon spec {kind:?} needs parameter {name}")))
        };
        let allowed: &[&str] = match kind {
            "constant" => &["p"],
            "half" => &[],
            "bipartite" => &["s", "p"],
            _ => return Err(Error::input(format!("unknown graphon spec {kind:?}"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::input(format!("graphon spec {kind:?} has no parameter {k:?}")));
        }
        Ok(match kind {
            "constant" => GraphonSpec::Constant { p: take("p", None)? },
            "half" => GraphonSpec::Half,
            _ => GraphonSpec::Bipartite {
                split: take("s", Some(0.5))?,
                p: take("p", Some(1.0))?,
            },
        })
    }
}

/// The graph on blocks whose edges (and loops) are the cells with value at
/// least `max(delta, smallest positive value)`.
pub fn support_graph(w: &StepGraphon, delta: f64) -> Graph {
    let smallest_positive = w
        .values
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let threshold = delta.max(smallest_positive);
    let m = w.block_count();
    let edges: Vec<_> = (0..m)
        .flat_map(|i| (i..m).map(move |j| (i, j)))
        .filter(|&(i, j)| w.values[i][j] > 0.0 && w.values[i][j] >= threshold)
        .collect();
    Graph::new(m, &edges, true).expect("support graph is well-formed")
}

/// The tiling number `til(pattern, W)` with an optimal block-level tiling:
/// `max Σ t_φ` over homomorphisms `φ` into the support graph subject to
/// `Σ_φ mult_b(φ) t_φ ≤ ν(Ω_b)` for every block `b`.
pub fn til_graphon(pattern: &Pattern, w: &StepGraphon, opts: &LpOptions) -> Result<FractionalTiling> {
    let copies = enumerate_homs(pattern, &support_graph(w, 0.0));
    let solution = tiling_lp(&copies, w.measures(), opts)?;
    Ok(FractionalTiling {
        value: solution.objective,
        copies,
        weights: solution.primal,
        exact_value: solution.exact_objective,
    })
}

/// The fractional cover number `fcov(pattern, W)` with an optimal step cover:
/// `min Σ_b ν(Ω_b) c_b` subject to `Σ_b mult_b(φ) c_b ≥ 1` for every support
/// homomorphism and `0 ≤ c ≤ 1`.
pub fn fcov_graphon(pattern: &Pattern, w: &StepGraphon, opts: &LpOptions) -> Result<FractionalCover> {
    let copies = enumerate_homs(pattern, &support_graph(w, 0.0));
    let solution = cover_lp(&copies, w.measures(), opts)?;
    Ok(FractionalCover {
        value: solution.objective,
        weights: solution.primal,
        exact_value: solution.exact_objective,
    })
}

/// Homomorphism density `∫ W^{⊗F}`, summed exactly over all block maps.
pub fn hom_density(pattern: &Pattern, w: &StepGraphon) -> f64 {
    let k = pattern.k();
    let mut back = vec![Vec::new(); k];
    for &(i, j) in pattern.edges() {
        back[j].push(i);
    }
    fn walk(w: &StepGraphon, back: &[Vec<usize>], blocks: &mut Vec<usize>, weight: f64) -> f64 {
        let position = blocks.len();
        if position == back.len() {
            return weight;
        }
        let mut total = 0.0;
        for b in 0..w.block_count() {
            let mut factor = w.measures[b];
            for &j in &back[position] {
                factor *= w.values[blocks[j]][b];
            }
            if factor == 0.0 {
                continue;
            }
            blocks.push(b);
            total += walk(w, back, blocks, weight * factor);
            blocks.pop();
        }
        total
    }
    walk(w, &back, &mut Vec::with_capacity(k), 1.0)
}

/// Averages `spec` over a uniform `m × m` grid of cells and zeroes every cell
/// whose average falls below `delta`.
pub fn discretize(spec: &GraphonSpec, m: usize, delta: f64, subsamples: usize) -> Result<StepGraphon> {
    if m == 0 {
        return Err(Error::input("grid size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::input(format!("threshold {delta} is outside [0, 1]")));
    }
    if subsamples == 0 {
        return Err(Error::input("subsamples must be at least 1"));
    }
    let h = 1.0 / m as f64;
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let (x0, y0) = (i as f64 * h, j as f64 * h);
            let mut v = spec.cell_average(x0, x0 + h, y0, y0 + h, subsamples).clamp(0.0, 1.0);
            if v < delta {
                v = 0.0;
            }
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepGraphon::uniform(values)
}

/// Splits every block into `factor` equal sub-blocks; the graphon is unchanged.
pub fn refine(w: &StepGraphon, factor: usize) -> Result<StepGraphon> {
    if factor == 0 {
        return Err(Error::input("refinement factor must be at least 1"));
    }
    let m = w.block_count() * factor;
    let measures = (0..m).map(|i| w.measures[i / factor] / factor as f64).collect();
    let values = (0..m)
        .map(|i| (0..m).map(|j| w.values[i / factor][j / factor]).collect())
        .collect();
    StepGraphon::new(measures, values)
}

/// Cut norm `‖W1 − W2‖_□` of two step graphons on the same partition.
///
/// The supremum of the bilinear form over measurable sets is attained at unions
/// of whole blocks. For each row set `S` (visited in Gray-code order) the best
/// column set takes all blocks of one sign, so the cost is `O(2^m · m)`.
pub fn cut_norm(w1: &StepGraphon, w2: &StepGraphon) -> Result<f64> {
    if w1.measures != w2.measures {
        return Err(Error::input("cut norm needs both step graphons on the same partition"));
    }
    let m = w1.block_count();
    if m > CUT_NORM_MAX_BLOCKS {
        return Err(Error::Budget {
            what: "cut-norm subset pairs",
            count: 1u128 << (2 * m),
            limit: 1u128 << (2 * CUT_NORM_MAX_BLOCKS),
        });
    }
    let mu = &w1.measures;
    let diff: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| (w1.values[i][j] - w2.values[i][j]) * mu[i] * mu[j]).collect())
        .collect();

    let mut column = vec![0.0; m];
    let mut in_set = vec![false; m];
    let mut best: f64 = 0.0;
    for step in 1u64..(1u64 << m) {
        let flip = step.trailing_zeros() as usize;
        let sign = if in_set[flip] { -1.0 } else { 1.0 };
        in_set[flip] = !in_set[flip];
        for (c, d) in column.iter_mut().zip(&diff[flip]) {
            *c += sign * d;
        }
        let positive: f64 = column.iter().filter(|&&c| c > 0.0).sum();
        let negative: f64 = column.iter().filter(|&&c| c < 0.0).sum();
        best = best.max(positive).max(-negative);
    }
    Ok(best)
}

/// Upper bound on the robust tiling number `til_ε(pattern, W)`: the smallest
/// [`til_graphon`] value after zeroing whole support cells (symmetric pairs)
/// of total `L¹` mass at most `eps`.
pub fn til_eps_graphon_ub(pattern: &Pattern, w: &StepGraphon, eps: f64, opts: &LpOptions) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::input(format!("eps must be nonnegative, got {eps}")));
    }
    let m = w.block_count();
    let mu = &w.measures;
    let cells: Vec<((usize, usize), f64)> = (0..m)
        .flat_map(|i| (i..m).map(move |j| (i, j)))
        .filter(|&(i, j)| w.values[i][j] > 0.0)
        .map(|(i, j)| {
            let multiplicity = if i == j { 1.0 } else { 2.0 };
            ((i, j), multiplicity * w.values[i][j] * mu[i] * mu[j])
        })
        .collect();

    struct Search<'a> {
        cells: &'a [((usize, usize), f64)],
        eps: f64,
        visited: u128,
        chosen: Vec<bool>,
        maximal: Vec<Vec<bool>>,
    }
    impl Search<'_> {
        fn walk(&mut self, index: usize, mass: f64) -> Result<()> {
            if index == self.cells.len() {
                self.visited += 1;
                if self.visited > REMOVAL_SUBSET_LIMIT {
                    return Err(Error::Budget {
                        what: "cell removal subsets",
                        count: self.visited,
                        limit: REMOVAL_SUBSET_LIMIT,
                    });
                }
                let extendable = self
                    .cells
                    .iter()
                    .zip(&self.chosen)
                    .any(|((_, c), &taken)| !taken && mass + c <= self.eps + 1e-12);
                if !extendable {
                    self.maximal.push(self.chosen.clone());
                }
                return Ok(());
            }
            let cost = self.cells[index].1;
            if mass + cost <= self.eps + 1e-12 {
                self.chosen[index] = true;
                self.walk(index + 1, mass + cost)?;
                self.chosen[index] = false;
            }
            self.walk(index + 1, mass)
        }
    }
    let mut search = Search {
        cells: &cells,
        eps,
        visited: 0,
        chosen: vec![false; cells.len()],
        maximal: Vec::new(),
    };
    search.walk(0, 0.0)?;

    // Removing more never increases the tiling number, so maximal removal sets suffice.
    let mut best = f64::INFINITY;
    for removal in &search.maximal {
        let mut values = w.values.clone();
        for (((i, j), _), &removed) in cells.iter().zip(removal) {
            if removed {
                values[*i][*j] = 0.0;
                values[*j][*i] = 0.0;
            }
        }
        let reduced = StepGraphon::new(w.measures.clone(), values)?;
        best = best.min(til_graphon(pattern, &reduced, opts)?.value);
        if best <= 0.0 {
            break;
        }
    }
    Ok(best)
}
