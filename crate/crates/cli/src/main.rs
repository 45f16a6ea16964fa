use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphon_tiler::graph::{count_homs, enumerate_homs, enumerate_injective_copies};
use graphon_tiler::graphon::{cut_norm, discretize, fcov_graphon, hom_density, til_graphon, GraphonSpec, StepGraphon};
use graphon_tiler::lp::LpOptions;
use graphon_tiler::numfmt::round_sig;
use graphon_tiler::random::{
    convergence_experiment, estimate_til_eps, sample_gnw, ExperimentOptions, SampleConfig, Source, DEFAULT_SEED,
    DEFAULT_SUBSAMPLES, DEFAULT_TARGET_M,
};
use graphon_tiler::tiling::{fcov, ftil, til_eps_graph, til_int};
use graphon_tiler::{Error, Graph, Pattern};
use serde_json::{json, Value};

const SEED_VAR: &str = "GRAPHON_TILER_SEED";

/// Tiling and cover numbers of graphs and step graphons.
#[derive(Parser)]
#[command(name = "graphon-tiler", version)]
struct Cli {
    /// Feasibility tolerance of the simplex solver.
    #[arg(long, global = true, value_name = "TOL")]
    lp_tol: Option<f64>,

    /// Branch-and-bound node limit.
    #[arg(long, global = true, value_name = "N")]
    node_limit: Option<u64>,

    /// Solve linear programs in exact rational arithmetic (small instances only).
    #[arg(long, global = true)]
    exact: bool,

    /// Write the result to this file instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count homomorphic (or injective) copies of a pattern.
    Homs {
        #[command(flatten)]
        host: HostArgs,
        /// Count copies up to pattern automorphism, with distinct images.
        #[arg(long)]
        injective: bool,
    },
    /// Fractional tiling number with an optimal weighting.
    Ftil(HostArgs),
    /// Fractional cover number with an optimal cover.
    Fcov(HostArgs),
    /// Largest number of vertex-disjoint copies.
    Til(HostArgs),
    /// Tiling number after the worst deletion of floor(eps n^2) edges.
    TilEps {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long)]
        eps: f64,
    },
    /// Fractional tiling number of a step graphon.
    GraphonTil(GraphonArgs),
    /// Fractional cover number of a step graphon.
    GraphonFcov(GraphonArgs),
    /// Solve both LPs and report the duality gap.
    DualityCheck {
        #[arg(long)]
        pattern: String,
        #[arg(long, value_name = "FILE", conflicts_with_all = ["graphon", "spec"])]
        graph: Option<PathBuf>,
        #[command(flatten)]
        source: OptionalSource,
    },
    /// Homomorphism density of a pattern in a graphon.
    HomDensity(GraphonArgs),
    /// Cell averages of an analytic graphon on an m x m grid.
    Discretize {
        #[arg(long)]
        spec: GraphonSpec,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_SUBSAMPLES)]
        subsamples: usize,
    },
    /// Cut norm of the difference of two step graphons on one partition.
    CutNorm {
        #[arg(long, value_name = "FILE")]
        left: PathBuf,
        #[arg(long, value_name = "FILE")]
        right: PathBuf,
    },
    /// Sample the random graph G(n, W).
    Sample {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare ftil(F, G(n, W))/n with the graphon tiling number.
    Experiment {
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        source: SourceArgs,
        /// Comma-separated sample sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Grid size used to compute the target of an analytic graphon.
        #[arg(long, default_value_t = DEFAULT_TARGET_M)]
        target_m: usize,
        /// Worker threads (defaults to all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Write the per-trial table here; otherwise it goes to standard output.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Estimate til_eps from random induced subgraphs on r vertices.
    EstimateRobust {
        #[command(flatten)]
        host: HostArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct HostArgs {
    /// Catalog name (K2, K3, K4, P3, C4, C5) or a graph file.
    #[arg(long)]
    pattern: String,
    #[arg(long, value_name = "FILE")]
    graph: PathBuf,
}

#[derive(Args)]
struct GraphonArgs {
    #[arg(long)]
    pattern: String,
    #[command(flatten)]
    source: SourceArgs,
}

#[derive(Args)]
struct SourceArgs {
    /// Step graphon file.
    #[arg(long, value_name = "FILE", required_unless_present = "spec", conflicts_with = "spec")]
    graphon: Option<PathBuf>,
    /// Analytic graphon, e.g. "half" or "constant:p=0.5".
    #[arg(long)]
    spec: Option<GraphonSpec>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct OptionalSource {
    #[arg(long, value_name = "FILE", conflicts_with = "spec")]
    graphon: Option<PathBuf>,
    #[arg(long)]
    spec: Option<GraphonSpec>,
    #[command(flatten)]
    grid: GridArgs,
}

/// How analytic graphons are turned into step graphons.
#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_TARGET_M)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_SUBSAMPLES)]
    subsamples: usize,
}

/// Failures of the front end itself are input errors.
fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_input_error() { 1 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut lp = if cli.exact { LpOptions::exact() } else { LpOptions::default() };
    if let Some(tol) = cli.lp_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(usage(format!("--lp-tol must lie in (0, 1), got {tol}")));
        }
        lp = lp.with_tolerance(tol);
    }
    if let Some(limit) = cli.node_limit {
        lp.node_limit = limit;
    }

    let output = match &cli.command {
        Command::Homs { host, injective } => {
            let (pattern, graph) = load_host(host)?;
            if *injective {
                let copies = enumerate_injective_copies(&pattern, &graph)?;
                json!({"value": copies.len(), "witness": copies.first().map(|c| &c.images)})
            } else {
                let witness = enumerate_homs(&pattern, &graph).into_iter().next().map(|c| c.images);
                json!({"value": count_homs(&pattern, &graph, u64::MAX), "witness": witness})
            }
        }
        Command::Ftil(host) => {
            let (pattern, graph) = load_host(host)?;
            let tiling = ftil(&pattern, &graph, &lp)?;
            let witness: Vec<Value> = tiling
                .support()
                .map(|(copy, w)| json!({"copy": copy.images, "weight": num(w)}))
                .collect();
            json!({"value": num(tiling.value), "witness": witness})
        }
        Command::Fcov(host) => {
            let (pattern, graph) = load_host(host)?;
            let cover = fcov(&pattern, &graph, &lp)?;
            json!({"value": num(cover.value), "witness": nums(&cover.weights)})
        }
        Command::Til(host) => {
            let (pattern, graph) = load_host(host)?;
            let tiling = til_int(&pattern, &graph, &lp)?;
            let witness: Vec<_> = tiling.copies.iter().map(|c| &c.images).collect();
            json!({"value": tiling.value, "witness": witness})
        }
        Command::TilEps { host, eps } => {
            let (pattern, graph) = load_host(host)?;
            json!({"value": til_eps_graph(&pattern, &graph, *eps, &lp)?, "witness": null})
        }
        Command::GraphonTil(args) => {
            let pattern = load_pattern(&args.pattern)?;
            let w = load_source(&args.source)?;
            let tiling = til_graphon(&pattern, &w, &lp)?;
            let witness: Vec<Value> = tiling
                .support()
                .map(|(copy, t)| json!({"blocks": copy.images, "weight": num(t)}))
                .collect();
            json!({"value": num(tiling.value), "witness": witness})
        }
        Command::GraphonFcov(args) => {
            let pattern = load_pattern(&args.pattern)?;
            let w = load_source(&args.source)?;
            let cover = fcov_graphon(&pattern, &w, &lp)?;
            json!({"value": num(cover.value), "witness": nums(&cover.weights)})
        }
        Command::DualityCheck { pattern, graph, source } => {
            let pattern = load_pattern(pattern)?;
            let (t, c) = match (graph, &source.graphon, &source.spec) {
                (Some(path), _, _) => {
                    let g = Graph::from_json_str(&read(path)?)?;
                    (ftil(&pattern, &g, &lp)?.value, fcov(&pattern, &g, &lp)?.value)
                }
                (None, None, None) => return Err(usage("duality-check needs --graph, --graphon or --spec")),
                (None, graphon, spec) => {
                    let w = step_from(graphon.as_deref(), *spec, &source.grid)?;
                    (til_graphon(&pattern, &w, &lp)?.value, fcov_graphon(&pattern, &w, &lp)?.value)
                }
            };
            json!({"til": num(t), "fcov": num(c), "gap": num((t - c).abs())})
        }
        Command::HomDensity(args) => {
            let pattern = load_pattern(&args.pattern)?;
            let w = load_source(&args.source)?;
            json!({"value": num(hom_density(&pattern, &w)), "witness": null})
        }
        Command::Discretize { spec, m, delta, subsamples } => step_json(&discretize(spec, *m, *delta, *subsamples)?),
        Command::CutNorm { left, right } => {
            let a = StepGraphon::from_json_str(&read(left)?)?;
            let b = StepGraphon::from_json_str(&read(right)?)?;
            json!({"value": num(cut_norm(&a, &b)?), "witness": null})
        }
        Command::Sample { source, n, seed } => {
            let config = SampleConfig {
                source: sample_source(source)?,
                n: *n,
                seed: resolve_seed(*seed)?,
            };
            return emit(cli.out.as_deref(), sample_gnw(&config)?.to_json_string());
        }
        Command::Experiment {
            pattern,
            source,
            ns,
            trials,
            seed,
            target_m,
            threads,
            csv,
        } => {
            let pattern = load_pattern(pattern)?;
            let source = sample_source(source)?;
            if *trials == 0 || ns.contains(&0) {
                return Err(usage("experiment needs at least one trial and positive sample sizes"));
            }
            let options = ExperimentOptions {
                target_m: *target_m,
                lp: lp.clone(),
            };
            let base = resolve_seed(*seed)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.unwrap_or(0))
                .build()
                .map_err(|e| usage(format!("cannot start worker threads: {e}")))?;
            let result = pool.install(|| convergence_experiment(&pattern, &source, ns, *trials, base, &options))?;
            let table = result.to_csv();
            match csv {
                Some(path) => std::fs::write(path, table)?,
                None => print!("{table}"),
            }
            let means: Vec<Value> = result
                .mean_gap_by_n()
                .into_iter()
                .map(|(n, gap)| json!({"n": n, "mean_abs_gap": num(gap)}))
                .collect();
            if csv.is_none() && cli.out.is_none() {
                return Ok(());
            }
            json!({"target": num(result.target), "target_m": result.target_m, "seed": base, "mean_abs_gap": means})
        }
        Command::EstimateRobust {
            host,
            eps,
            r,
            trials,
            seed,
        } => {
            let (pattern, graph) = load_host(host)?;
            if *trials == 0 {
                return Err(usage("estimate-robust needs at least one trial"));
            }
            let estimates = estimate_til_eps(&pattern, &graph, *eps, *r, *trials, resolve_seed(*seed)?, &lp)?;
            let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
            json!({"value": num(mean), "witness": nums(&estimates)})
        }
    };
    emit(cli.out.as_deref(), output.to_string())
}

fn emit(out: Option<&Path>, text: String) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// A JSON number rounded to 12 significant digits; integral values print
/// without a fractional part.
fn num(x: f64) -> Value {
    let r = round_sig(x, graphon_tiler::numfmt::SIGNIFICANT_DIGITS);
    if r == 0.0 {
        return json!(0);
    }
    if r.fract() == 0.0 && r.abs() < 1e15 {
        return json!(r as i64);
    }
    json!(r)
}

fn nums(xs: &[f64]) -> Vec<Value> {
    xs.iter().copied().map(num).collect()
}

fn step_json(w: &StepGraphon) -> Value {
    let values: Vec<Vec<Value>> = w.values().iter().map(|row| nums(row)).collect();
    json!({"measures": nums(w.measures()), "values": values})
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

/// Catalog names win over files; write `./K3` for a file called `K3`.
fn load_pattern(selector: &str) -> Result<Pattern, Error> {
    if let Some(pattern) = Pattern::named(selector) {
        return Ok(pattern);
    }
    let path = Path::new(selector);
    if !path.exists() {
        return Err(usage(format!(
            "{selector:?} is neither a catalog pattern ({}) nor a file",
            Pattern::catalog_names().join(", ")
        )));
    }
    Pattern::from_graph(&Graph::from_json_str(&read(path)?)?)
}

fn load_host(args: &HostArgs) -> Result<(Pattern, Graph), Error> {
    let pattern = load_pattern(&args.pattern)?;
    let graph = Graph::from_json_str(&read(&args.graph)?)?;
    Ok((pattern, graph))
}

fn step_from(graphon: Option<&Path>, spec: Option<GraphonSpec>, grid: &GridArgs) -> Result<StepGraphon, Error> {
    match (graphon, spec) {
        (Some(path), _) => StepGraphon::from_json_str(&read(path)?),
        (None, Some(spec)) => discretize(&spec, grid.m, grid.delta, grid.subsamples),
        (None, None) => Err(usage("a graphon source is required")),
    }
}

fn load_source(args: &SourceArgs) -> Result<StepGraphon, Error> {
    step_from(args.graphon.as_deref(), args.spec, &args.grid)
}

fn sample_source(args: &SourceArgs) -> Result<Source, Error> {
    Ok(match (&args.graphon, args.spec) {
        (Some(path), _) => Source::Step(StepGraphon::from_json_str(&read(path)?)?),
        (None, Some(spec)) => Source::Spec(spec),
        (None, None) => return Err(usage("a graphon source is required")),
    })
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_VAR}={text:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}
