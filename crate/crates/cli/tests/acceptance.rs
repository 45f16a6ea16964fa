//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use graphon_tiler::graphon::{cut_norm, discretize, fcov_graphon, hom_density, til_graphon, GraphonSpec, StepGraphon};
use graphon_tiler::lp::LpOptions;
use graphon_tiler::random::{
    convergence_experiment, sample_gnw, ExperimentOptions, SampleConfig, SeededRng, Source, DEFAULT_SEED,
};
use graphon_tiler::tiling::{fcov, ftil, til_eps_graph, til_int};
use graphon_tiler::{Graph, Pattern};
use num_rational::BigRational;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> LpOptions {
    LpOptions::default()
}

fn pattern(name: &str) -> Pattern {
    Pattern::named(name).unwrap()
}

fn c5_in_triangle() -> Check {
    let k3 = Graph::complete(3);
    let float = ftil(&pattern("C5"), &k3, &opts()).map_err(|e| e.to_string())?;
    ensure((float.value - 0.6).abs() <= 1e-9, || format!("float value {}", float.value))?;
    let exact = ftil(&pattern("C5"), &k3, &LpOptions::exact()).map_err(|e| e.to_string())?;
    let three_fifths = BigRational::new(3.into(), 5.into());
    ensure(exact.exact_value.as_ref() == Some(&three_fifths), || {
        format!("exact value {:?}", exact.exact_value)
    })?;
    Ok(format!("ftil = {} (exact 3/5)", float.value))
}

/// One representative per isomorphism class of simple graphs on `n` vertices,
/// found by brute-force canonical edge masks.
fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let index = |u: usize, v: usize| pairs.iter().position(|&p| p == (u.min(v), u.max(v))).unwrap();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut perms);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let canonical = perms
            .iter()
            .map(|perm| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(0u32, |acc, (_, &(u, v))| acc | 1 << index(perm[u], perm[v]))
            })
            .min()
            .unwrap();
        if seen.insert(canonical) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            out.push(Graph::simple(n, &edges).unwrap());
        }
    }
    out
}

fn permute(p: &mut Vec<usize>, at: usize, out: &mut Vec<Vec<usize>>) {
    if at == p.len() {
        out.push(p.clone());
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permute(p, at + 1, out);
        p.swap(at, i);
    }
}

fn small_graph_duality() -> Check {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for n in 1..=5 {
        let graphs = nonisomorphic_graphs(n);
        ensure(graphs.len() == [1, 2, 4, 11, 34][n - 1], || format!("{} classes on {n} vertices", graphs.len()))?;
        for g in &graphs {
            for name in ["K2", "P3", "K3"] {
                let t = ftil(&pattern(name), g, &opts()).map_err(|e| e.to_string())?.value;
                let c = fcov(&pattern(name), g, &opts()).map_err(|e| e.to_string())?.value;
                worst = worst.max((t - c).abs());
                ensure((t - c).abs() <= 1e-6, || format!("{name} in {:?}: ftil {t}, fcov {c}", g.edges()))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} instances, max gap {worst:.1e}"))
}

fn random_graph(rng: &mut SeededRng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.next_f64() < 0.5 {
                edges.push((u, v));
            }
        }
    }
    Graph::simple(n, &edges).unwrap()
}

fn random_step(rng: &mut SeededRng, m: usize) -> StepGraphon {
    let raw: Vec<f64> = (0..m).map(|_| 0.1 + rng.next_f64()).collect();
    let total: f64 = raw.iter().sum();
    let mut values = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v = if rng.below(3) == 0 { 0.0 } else { rng.next_f64() };
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    StepGraphon::new(raw.iter().map(|r| r / total).collect(), values).unwrap()
}

fn graph_to_graphon_transfer() -> Check {
    let mut rng = SeededRng::new(0x7a11);
    for i in 0..50 {
        let n = 1 + rng.below(6) as usize;
        let g = random_graph(&mut rng, n);
        let w = StepGraphon::from_graph(&g);
        for name in ["K2", "K3"] {
            let f = pattern(name);
            let t = ftil(&f, &g, &opts()).map_err(|e| e.to_string())?.value;
            let c = fcov(&f, &g, &opts()).map_err(|e| e.to_string())?.value;
            let tw = til_graphon(&f, &w, &opts()).map_err(|e| e.to_string())?.value;
            let cw = fcov_graphon(&f, &w, &opts()).map_err(|e| e.to_string())?.value;
            ensure((n as f64 * tw - t).abs() <= 1e-6 && (n as f64 * cw - c).abs() <= 1e-6, || {
                format!("graph {i} ({name}): ftil {t}, n*til {}, fcov {c}, n*fcov {}", n as f64 * tw, n as f64 * cw)
            })?;
        }
    }
    Ok("50 graphs x {K2, K3}".into())
}

fn graphon_duality() -> Check {
    let mut rng = SeededRng::new(0xd0a1);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let m = 1 + rng.below(6) as usize;
        let w = random_step(&mut rng, m);
        for name in ["K2", "K3", "C5"] {
            let f = pattern(name);
            let t = til_graphon(&f, &w, &opts()).map_err(|e| e.to_string())?.value;
            let c = fcov_graphon(&f, &w, &opts()).map_err(|e| e.to_string())?.value;
            worst = worst.max((t - c).abs());
            ensure((t - c).abs() <= 1e-6, || format!("graphon {i} ({name}): til {t}, fcov {c}"))?;
        }
    }
    Ok(format!("100 graphons x {{K2, K3, C5}}, max gap {worst:.1e}"))
}

fn half_graphon() -> Check {
    let mut values = Vec::new();
    for m in [8usize, 16, 32, 64] {
        let w = discretize(&GraphonSpec::Half, m, 0.0, 32).map_err(|e| e.to_string())?;
        let t = til_graphon(&pattern("K2"), &w, &opts()).map_err(|e| e.to_string())?.value;
        ensure((t - 0.25).abs() <= 2.0 / m as f64, || format!("m = {m}: {t}"))?;
        values.push(format!("m={m}: {t}"));
    }
    Ok(values.join(", "))
}

fn complete_random_graphs() -> Check {
    let one = Source::Spec(GraphonSpec::Constant { p: 1.0 });
    for seed in [0, 1, 7, 12345, u64::MAX] {
        for (name, n, expected) in [("K2", 10, 0.5), ("K3", 12, 1.0 / 3.0)] {
            let g = sample_gnw(&SampleConfig { source: one.clone(), n, seed }).map_err(|e| e.to_string())?;
            let value = ftil(&pattern(name), &g, &opts()).map_err(|e| e.to_string())?.value / n as f64;
            ensure((value - expected).abs() <= 1e-9, || format!("{name}, n = {n}, seed {seed}: {value}"))?;
        }
    }
    Ok("ftil/n = 1/2 for K2 in G(10, 1) and 1/3 for K3 in G(12, 1), 5 seeds".into())
}

fn convergence() -> Check {
    let result = convergence_experiment(
        &pattern("K2"),
        &Source::Spec(GraphonSpec::Half),
        &[40, 80, 120],
        10,
        DEFAULT_SEED,
        &ExperimentOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let gaps = result.mean_gap_by_n();
    let gap = |n| gaps.iter().find(|g| g.0 == n).unwrap().1;
    ensure((result.target - 0.25).abs() <= 1e-9, || format!("target {}", result.target))?;
    ensure(gap(40) <= 0.08 && gap(120) <= 0.05, || format!("mean gaps {gaps:?}"))?;
    Ok(format!("mean gaps {:.4} / {:.4} / {:.4} at n = 40 / 80 / 120", gap(40), gap(80), gap(120)))
}

/// Maximum number of vertex-disjoint triangles, by exhaustive search.
fn triangle_packing_oracle(g: &Graph, used: &mut Vec<bool>) -> usize {
    let Some(v) = used.iter().position(|u| !u) else {
        return 0;
    };
    used[v] = true;
    // Either v stays uncovered...
    let mut best = triangle_packing_oracle(g, used);
    // ...or it is in a triangle with two larger free vertices.
    let n = g.vertex_count();
    for a in v + 1..n {
        for b in a + 1..n {
            if !used[a] && !used[b] && g.is_adjacent(v, a) && g.is_adjacent(v, b) && g.is_adjacent(a, b) {
                used[a] = true;
                used[b] = true;
                best = best.max(1 + triangle_packing_oracle(g, used));
                used[a] = false;
                used[b] = false;
            }
        }
    }
    used[v] = false;
    best
}

fn max_matching_oracle(n: usize, edges: &[(usize, usize)]) -> usize {
    (0u32..(1 << edges.len()))
        .filter(|mask| {
            let mut covered = vec![false; n];
            edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).all(|(_, &(u, v))| {
                !std::mem::replace(&mut covered[u], true) && !std::mem::replace(&mut covered[v], true)
            })
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn integer_tilings() -> Check {
    let k12 = Graph::complete(12);
    let til = til_int(&pattern("K3"), &k12, &opts()).map_err(|e| e.to_string())?.value;
    let oracle = triangle_packing_oracle(&k12, &mut vec![false; 12]);
    ensure(til == 4 && oracle == 4, || format!("til(K3, K12) = {til}, oracle {oracle}"))?;

    // Budget floor(eps * 16) = 2 on C4; the adversary deletes up to 2 edges.
    let c4 = Graph::cycle(4);
    let robust = til_eps_graph(&pattern("K2"), &c4, 0.125, &opts()).map_err(|e| e.to_string())?;
    let edges = c4.edges().to_vec();
    let oracle = (0u32..16)
        .filter(|mask| mask.count_ones() <= 2)
        .map(|mask| {
            let kept: Vec<_> = edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &e)| e).collect();
            max_matching_oracle(4, &kept)
        })
        .min()
        .unwrap();
    ensure(robust == 1 && oracle == 1, || format!("til_eps(K2, C4) = {robust}, oracle {oracle}"))?;
    Ok("til(K3, K12) = 4, til_eps(K2, C4, budget 2) = 1".into())
}

fn counting_lemma() -> Check {
    let mut rng = SeededRng::new(0xc0de);
    let mut tightest = f64::INFINITY;
    for i in 0..100 {
        let m = 1 + rng.below(5) as usize;
        let u = random_step(&mut rng, m);
        let w = StepGraphon::new(u.measures().to_vec(), random_step(&mut rng, m).values().to_vec())
            .map_err(|e| e.to_string())?;
        let cut = cut_norm(&u, &w).map_err(|e| e.to_string())?;
        for name in ["K2", "K3"] {
            let f = pattern(name);
            let lhs = (hom_density(&f, &u) - hom_density(&f, &w)).abs();
            let rhs = f.edge_count() as f64 * cut;
            tightest = tightest.min(rhs - lhs);
            ensure(lhs <= rhs + 1e-9, || format!("pair {i} ({name}): {lhs} > {rhs}"))?;
        }
    }
    Ok(format!("100 pairs x {{K2, K3}}, smallest slack {tightest:.2e}"))
}

fn binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_graphon-tiler"))
        .args(args)
        .env_remove("GRAPHON_TILER_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    Ok(out.stdout)
}

fn determinism() -> Check {
    let sample = ["sample", "--spec", "half", "--n", "200", "--seed", "7"];
    let first = binary(&sample)?;
    ensure(first == binary(&sample)?, || "sample output differs between runs".into())?;
    ensure(Graph::from_json_str(std::str::from_utf8(&first).unwrap()).is_ok(), || "sample is not a graph".into())?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut tables = Vec::new();
    for (run, threads) in ["1", "4", "4", "1"].iter().enumerate() {
        let path = dir.path().join(format!("run{run}.csv"));
        let csv = path.to_str().unwrap();
        binary(&[
            "experiment", "--pattern", "K2", "--spec", "half", "--ns", "40,80,120", "--trials", "10", "--threads",
            threads, "--csv", csv,
        ])?;
        tables.push(std::fs::read(Path::new(csv)).map_err(|e| e.to_string())?);
    }
    ensure(tables.windows(2).all(|w| w[0] == w[1]), || "experiment CSV differs".into())?;
    Ok(format!("sample {} bytes, experiment CSV {} bytes, identical across 1 and 4 threads", first.len(), tables[0].len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Check); 10] = [
        ("C5 into K3 fractional tiling", Duration::from_secs(1), c5_in_triangle),
        ("duality on all graphs up to 5 vertices", Duration::from_secs(60), small_graph_duality),
        ("graph to graphon transfer", Duration::from_secs(60), graph_to_graphon_transfer),
        ("graphon LP duality", Duration::from_secs(120), graphon_duality),
        ("half graphon discretizations", Duration::from_secs(30), half_graphon),
        ("complete random graphs", Duration::from_secs(10), complete_random_graphs),
        ("convergence experiment", Duration::from_secs(600), convergence),
        ("integer and robust tilings", Duration::from_secs(30), integer_tilings),
        ("counting lemma", Duration::from_secs(60), counting_lemma),
        ("determinism", Duration::from_secs(600), determinism),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= *budget {
                Ok(detail)
            } else {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {:>2}: {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
