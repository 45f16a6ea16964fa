//! Host graphs, patterns and enumeration of (homomorphic) copies of a pattern.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest pattern order for which automorphisms are enumerated by brute force.
pub const MAX_AUTOMORPHISM_ORDER: usize = 8;

/// A finite undirected graph on vertices `0..vertex_count`.
///
/// Loops are only permitted when `loops_allowed` is set; they arise as the
/// support graphs of step graphons whose diagonal blocks are positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    loops_allowed: bool,
    neighbors: Vec<Vec<usize>>,
    matrix: Vec<bool>,
}

impl Graph {
    /// Builds a graph, normalizing every edge to `(min, max)` and sorting.
    ///
    /// Rejects out-of-range endpoints, duplicate edges, and loops when
    /// `loops_allowed` is false.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)], loops_allowed: bool) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{vertex_count}"
                )));
            }
            if u == v && !loops_allowed {
                return Err(Error::input(format!("loop at vertex {u} is not allowed")));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("duplicate edge {:?}", w[0])));
        }

        let mut neighbors = vec![Vec::new(); vertex_count];
        let mut matrix = vec![false; vertex_count * vertex_count];
        for &(u, v) in &normalized {
            matrix[u * vertex_count + v] = true;
            matrix[v * vertex_count + u] = true;
            neighbors[u].push(v);
            if u != v {
                neighbors[v].push(u);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph {
            vertex_count,
            edges: normalized,
            loops_allowed,
            neighbors,
            matrix,
        })
    }

    /// A loopless graph.
    pub fn simple(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(vertex_count, edges, false)
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::new(vertex_count, &[], false).expect("edgeless graph is well-formed")
    }

    pub fn complete(vertex_count: usize) -> Self {
        let edges: Vec<_> = (0..vertex_count)
            .flat_map(|u| (u + 1..vertex_count).map(move |v| (u, v)))
            .collect();
        Self::new(vertex_count, &edges, false).expect("complete graph is well-formed")
    }

    pub fn cycle(vertex_count: usize) -> Self {
        assert!(vertex_count >= 3, "a cycle needs at least three vertices");
        let edges: Vec<_> = (0..vertex_count).map(|u| (u, (u + 1) % vertex_count)).collect();
        Self::new(vertex_count, &edges, false).expect("cycle is well-formed")
    }

    pub fn path(vertex_count: usize) -> Self {
        let edges: Vec<_> = (1..vertex_count).map(|u| (u - 1, u)).collect();
        Self::new(vertex_count, &edges, false).expect("path is well-formed")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges as sorted `(min, max)` pairs, loops included.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    pub fn loops_allowed(&self) -> bool {
        self.loops_allowed
    }

    pub fn has_loops(&self) -> bool {
        self.loop_count() > 0
    }

    #[inline]
    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.matrix[u * self.vertex_count + v]
    }

    /// Sorted neighbors of `u`; contains `u` itself when `u` carries a loop.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[u]
    }

    /// Returns a copy with the edge `{u, v}` added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Self::new(self.vertex_count, &edges, self.loops_allowed)
    }

    /// Returns a copy without the edges at the given indices of [`Graph::edges`].
    pub fn without_edge_indices(&self, removed: &[usize]) -> Self {
        let mut keep = vec![true; self.edges.len()];
        for &i in removed {
            keep[i] = false;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .zip(&keep)
            .filter_map(|(&e, &k)| k.then_some(e))
            .collect();
        Self::new(self.vertex_count, &edges, self.loops_allowed).expect("subgraph stays well-formed")
    }

    /// The subgraph induced on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, &u) in vertices.iter().enumerate() {
            if u >= self.vertex_count {
                return Err(Error::input(format!("vertex {u} is not in the graph")));
            }
            for (b, &v) in vertices.iter().enumerate().skip(a) {
                if u == v && a != b {
                    return Err(Error::input(format!("vertex {u} selected twice")));
                }
                if self.is_adjacent(u, v) {
                    edges.push((a, b));
                }
            }
        }
        Self::new(vertices.len(), &edges, self.loops_allowed)
    }

    /// Parses the `{"n": .., "edges": [[u, v], ..]}` file format. Loops are rejected.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::simple(file.n, &edges)
    }

    pub fn to_json_string(&self) -> String {
        let file = GraphFile {
            n: self.vertex_count,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&file).expect("graph serializes")
    }
}

/// On-disk representation of a graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

/// The fixed graph `F` on vertex set `0..k` whose copies are counted. Always simple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl Pattern {
    pub fn new(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("a pattern needs at least one vertex"));
        }
        let graph = Graph::simple(k, edges)?;
        Ok(Pattern {
            k,
            edges: graph.edges,
        })
    }

    /// Looks up one of the named patterns `K2, K3, K4, P3, C4, C5`.
    pub fn named(name: &str) -> Option<Self> {
        let graph = match name {
            "K2" => Graph::complete(2),
            "K3" => Graph::complete(3),
            "K4" => Graph::complete(4),
            "P3" => Graph::path(3),
            "C4" => Graph::cycle(4),
            "C5" => Graph::cycle(5),
            _ => return None,
        };
        Some(Pattern {
            k: graph.vertex_count,
            edges: graph.edges,
        })
    }

    pub fn catalog_names() -> &'static [&'static str] {
        &["K2", "K3", "K4", "P3", "C4", "C5"]
    }

    pub fn from_graph(graph: &Graph) -> Result<Self> {
        if graph.has_loops() {
            return Err(Error::input("patterns cannot contain loops"));
        }
        Self::new(graph.vertex_count, &graph.edges)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn as_graph(&self) -> Graph {
        Graph::simple(self.k, &self.edges).expect("pattern is a simple graph")
    }

    /// The pattern with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.k];
        if perm.len() != self.k || perm.iter().any(|&p| p >= self.k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::input("relabelling must be a permutation of the pattern vertices"));
        }
        let edges: Vec<_> = self.edges.iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        Self::new(self.k, &edges)
    }

    /// All automorphisms as permutations `sigma` with `ij ∈ E ⇔ sigma(i)sigma(j) ∈ E`,
    /// identity first, in lexicographic order.
    pub fn automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        if self.k > MAX_AUTOMORPHISM_ORDER {
            return Err(Error::input(format!(
                "automorphisms are only computed for patterns with at most {MAX_AUTOMORPHISM_ORDER} vertices"
            )));
        }
        let graph = self.as_graph();
        let mut result = Vec::new();
        let mut perm: Vec<usize> = (0..self.k).collect();
        loop {
            if self
                .edges
                .iter()
                .all(|&(i, j)| graph.is_adjacent(perm[i], perm[j]))
            {
                result.push(perm.clone());
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Ok(result)
    }
}

/// Lexicographic successor; returns false once `perm` is the last permutation.
pub(crate) fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

/// An ordered tuple of host vertices realizing a homomorphism of a pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternCopy {
    pub images: Vec<usize>,
}

impl PatternCopy {
    pub fn new(images: Vec<usize>) -> Self {
        PatternCopy { images }
    }

    /// Number of coordinate positions mapped to each host vertex.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &v in &self.images {
            *counts.entry(v).or_insert(0) += 1;
        }
        counts
    }

    /// Dense multiplicity vector over `0..host_vertex_count`.
    pub fn multiplicity_vector(&self, host_vertex_count: usize) -> Vec<usize> {
        let mut counts = vec![0; host_vertex_count];
        for &v in &self.images {
            counts[v] += 1;
        }
        counts
    }

    pub fn is_injective(&self) -> bool {
        self.multiplicities().values().all(|&m| m == 1)
    }

    /// Checks that every pattern edge lands on an edge (or loop) of the host.
    pub fn is_homomorphism(&self, pattern: &Pattern, host: &Graph) -> bool {
        self.images.len() == pattern.k()
            && self.images.iter().all(|&v| v < host.vertex_count())
            && pattern
                .edges()
                .iter()
                .all(|&(i, j)| host.is_adjacent(self.images[i], self.images[j]))
    }
}

/// Earlier-coordinate neighbors of each pattern vertex, used for pruning.
fn back_neighbors(pattern: &Pattern) -> Vec<Vec<usize>> {
    let mut back = vec![Vec::new(); pattern.k()];
    for &(i, j) in pattern.edges() {
        back[j].push(i);
    }
    back
}

/// Visits the homomorphisms of `pattern` into `host` in lexicographic order of
/// their image tuples. With `injective`, only tuples of distinct vertices are visited.
pub fn visit_homs<B>(
    pattern: &Pattern,
    host: &Graph,
    injective: bool,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let back = back_neighbors(pattern);
    let mut images = Vec::with_capacity(pattern.k());
    let mut used = vec![false; host.vertex_count()];
    extend(host, &back, injective, &mut images, &mut used, &mut visit)
}

fn extend<B>(
    host: &Graph,
    back: &[Vec<usize>],
    injective: bool,
    images: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let position = images.len();
    if position == back.len() {
        return visit(images);
    }
    let constraints = &back[position];
    let all: Vec<usize>;
    let candidates: &[usize] = match constraints.first() {
        Some(&anchor) => host.neighbors(images[anchor]),
        None => {
            all = (0..host.vertex_count()).collect();
            &all
        }
    };
    for &v in candidates {
        if injective && used[v] {
            continue;
        }
        if !constraints.iter().skip(1).all(|&j| host.is_adjacent(images[j], v)) {
            continue;
        }
        images.push(v);
        used[v] = true;
        let flow = extend(host, back, injective, images, used, visit);
        used[v] = false;
        images.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// All homomorphic copies of `pattern` in `host`, in lexicographic order.
pub fn enumerate_homs(pattern: &Pattern, host: &Graph) -> Vec<PatternCopy> {
    let mut out = Vec::new();
    let _ = visit_homs::<()>(pattern, host, false, |images| {
        out.push(PatternCopy::new(images.to_vec()));
        ControlFlow::Continue(())
    });
    out
}

/// Counts homomorphic copies, stopping early once the count exceeds `limit`.
pub fn count_homs(pattern: &Pattern, host: &Graph, limit: u64) -> u64 {
    let mut count = 0u64;
    let _ = visit_homs(pattern, host, false, |_| {
        count += 1;
        if count > limit {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    count
}

/// Copies with distinct image vertices, one per orbit of the pattern's
/// automorphism group. The representative is the lexicographically smallest tuple.
pub fn enumerate_injective_copies(pattern: &Pattern, host: &Graph) -> Result<Vec<PatternCopy>> {
    let automorphisms = pattern.automorphisms()?;
    let mut out = Vec::new();
    let mut permuted = vec![0; pattern.k()];
    let _ = visit_homs::<()>(pattern, host, true, |images| {
        let canonical = automorphisms.iter().skip(1).all(|sigma| {
            for (slot, &s) in permuted.iter_mut().zip(sigma) {
                *slot = images[s];
            }
            images <= permuted.as_slice()
        });
        if canonical {
            out.push(PatternCopy::new(images.to_vec()));
        }
        ControlFlow::Continue(())
    });
    Ok(out)
}
