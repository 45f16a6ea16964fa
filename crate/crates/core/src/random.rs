//! Seeded sampling of inhomogeneous random graphs `G(n, W)` and the
//! experiments built on it.
//!
//! # Random stream
//!
//! All randomness comes from SplitMix64: the state advances by
//! `0x9E3779B97F4A7C15` per draw and each output is the state passed through
//! the mixer `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
//! z *= 0x94D049BB133111EB; z ^= z >> 31`. A generator seeded with `s` starts
//! with state `s`.
//!
//! * uniform real: `(next >> 11) · 2⁻⁵³`
//! * uniform integer below `k`: `(next · k) >> 64` in 128-bit arithmetic
//! * trial seed for size `n` and trial `t`: the first output of a generator
//!   seeded with `base ^ ((n << 32) + t)`
//!
//! Sampling `G(n, W)` draws the `n` latent positions first (a uniform real
//! each; for step graphons the block is the first whose cumulative measure
//! exceeds it), then one uniform real per pair `i < j` in lexicographic order,
//! joining the pair when the draw is below `W(x_i, x_j)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{count_homs, Graph, Pattern};
use crate::graphon::{discretize, til_graphon, GraphonSpec, StepGraphon};
use crate::lp::LpOptions;
use crate::numfmt::format_sig;
use crate::tiling::{ftil, til_eps_graph};

/// Base seed of the shipped experiment configuration.
pub const DEFAULT_SEED: u64 = 1;

/// Largest number of homomorphic copies per sampled graph in an experiment.
pub const COPY_LIMIT: u64 = 200_000;

/// Default grid size used to compute targets for analytic graphons.
pub const DEFAULT_TARGET_M: usize = 64;

/// Midpoint subsamples per cell axis when discretizing analytic graphons.
pub const DEFAULT_SUBSAMPLES: usize = 32;

/// Deterministic SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// First SplitMix64 output for state `x`.
pub fn splitmix64(x: u64) -> u64 {
    SeededRng::new(x).next_u64()
}

/// Seed of trial `trial` at size `n`.
pub fn derive_seed(base_seed: u64, n: u64, trial: u64) -> u64 {
    splitmix64(base_seed ^ (n << 32).wrapping_add(trial))
}

/// Where latent edge probabilities come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Spec(GraphonSpec),
    Step(StepGraphon),
}

impl Source {
    /// The tiling number the experiment compares against, with the grid size
    /// used when the source had to be discretized.
    pub fn target(&self, pattern: &Pattern, target_m: usize, opts: &LpOptions) -> Result<(f64, Option<usize>)> {
        match self {
            Source::Step(w) => Ok((til_graphon(pattern, w, opts)?.value, None)),
            Source::Spec(spec) => {
                let w = discretize(spec, target_m, 0.0, DEFAULT_SUBSAMPLES)?;
                Ok((til_graphon(pattern, &w, opts)?.value, Some(target_m)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleConfig {
    pub source: Source,
    pub n: usize,
    pub seed: u64,
}

/// Samples `G(n, W)`; identical configurations give identical graphs.
pub fn sample_gnw(config: &SampleConfig) -> Result<Graph> {
    if config.n == 0 {
        return Err(Error::input("sample size n must be at least 1"));
    }
    let n = config.n;
    let mut rng = SeededRng::new(config.seed);
    let mut edges = Vec::new();
    match &config.source {
        Source::Spec(spec) => {
            let xs: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.next_f64() < spec.eval(xs[i], xs[j]) {
                        edges.push((i, j));
                    }
                }
            }
        }
        Source::Step(w) => {
            let mut cumulative = Vec::with_capacity(w.block_count());
            let mut acc = 0.0;
            for &mu in w.measures() {
                acc += mu;
                cumulative.push(acc);
            }
            let blocks: Vec<usize> = (0..n)
                .map(|_| {
                    let u = rng.next_f64();
                    cumulative.iter().position(|&c| u < c).unwrap_or(w.block_count() - 1)
                })
                .collect();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.next_f64() < w.value(blocks[i], blocks[j]) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    Graph::simple(n, &edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub ftil_over_n: f64,
    pub target: f64,
    pub abs_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Sorted by `(n, trial)`.
    pub rows: Vec<ExperimentRow>,
    pub target: f64,
    /// Grid size of the discretized target, for analytic sources.
    pub target_m: Option<usize>,
}

impl ExperimentResult {
    /// Mean absolute gap per sample size, in increasing `n`.
    pub fn mean_gap_by_n(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64, usize)> = Vec::new();
        for row in &self.rows {
            match out.last_mut() {
                Some((n, total, count)) if *n == row.n => {
                    *total += row.abs_gap;
                    *count += 1;
                }
                _ => out.push((row.n, row.abs_gap, 1)),
            }
        }
        out.into_iter().map(|(n, total, count)| (n, total / count as f64)).collect()
    }

    /// CSV with header `n,trial,seed,ftil_over_n,target,abs_gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,trial,seed,ftil_over_n,target,abs_gap\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.n,
                row.trial,
                row.seed,
                format_sig(row.ftil_over_n),
                format_sig(row.target),
                format_sig(row.abs_gap)
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOptions {
    pub target_m: usize,
    pub lp: LpOptions,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            target_m: DEFAULT_TARGET_M,
            lp: LpOptions::default(),
        }
    }
}

/// For every `n` in `sizes` and every trial, samples `G(n, W)` and records
/// `ftil(pattern, G)/n` next to the graphon tiling number.
///
/// Trials run on the current rayon pool; rows come back in `(n, trial)` order
/// whatever the thread count.
pub fn convergence_experiment(
    pattern: &Pattern,
    source: &Source,
    sizes: &[usize],
    trials: usize,
    base_seed: u64,
    options: &ExperimentOptions,
) -> Result<ExperimentResult> {
    let (target, target_m) = source.target(pattern, options.target_m, &options.lp)?;
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let jobs: Vec<(usize, usize)> = sorted
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let seed = derive_seed(base_seed, n as u64, trial as u64);
            let graph = sample_gnw(&SampleConfig {
                source: source.clone(),
                n,
                seed,
            })?;
            let copies = count_homs(pattern, &graph, COPY_LIMIT);
            if copies > COPY_LIMIT {
                return Err(Error::Budget {
                    what: "homomorphic copies per sample",
                    count: copies as u128,
                    limit: COPY_LIMIT as u128,
                });
            }
            let value = ftil(pattern, &graph, &options.lp)?.value / n as f64;
            Ok(ExperimentRow {
                n,
                trial,
                seed,
                ftil_over_n: value,
                target,
                abs_gap: (value - target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult { rows, target, target_m })
}

/// Property-testing estimates of the robust tiling number: each trial samples
/// `r` distinct vertices and returns `til_eps(pattern, host[sample]) / r`.
pub fn estimate_til_eps(
    pattern: &Pattern,
    host: &Graph,
    eps: f64,
    r: usize,
    trials: usize,
    base_seed: u64,
    opts: &LpOptions,
) -> Result<Vec<f64>> {
    let n = host.vertex_count();
    if r == 0 || r > n {
        return Err(Error::input(format!("sample size r must lie in 1..={n}, got {r}")));
    }
    (0..trials)
        .map(|trial| {
            let mut rng = SeededRng::new(derive_seed(base_seed, r as u64, trial as u64));
            let mut order: Vec<usize> = (0..n).collect();
            for i in 0..r {
                let j = i + rng.below((n - i) as u64) as usize;
                order.swap(i, j);
            }
            let mut chosen = order[..r].to_vec();
            chosen.sort_unstable();
            let sub = host.induced_subgraph(&chosen)?;
            Ok(til_eps_graph(pattern, &sub, eps, opts)? as f64 / r as f64)
        })
        .collect()
}
