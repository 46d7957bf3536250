//! Network topologies, adjacency and placement matrices, graph distances.

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernels::DenseMatrix;
use crate::seeding::{self, Purpose};

/// Simple graph on nodes `1..=n`.
///
/// Edge `(i, j)` of a directed graph means node `i` drives node `j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize)>,
    /// Generator that produced the graph, e.g. `chain:6`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl Graph {
    /// Validates ids and self-edges, and canonicalizes the edge list (sorted,
    /// deduplicated, `i < j` when undirected).
    pub fn new(n: usize, edges: Vec<(usize, usize)>, directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one node".into()));
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i}, {j}) outside node range 1..={n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self-edge at node {i}")));
            }
            set.insert(if directed { (i, j) } else { (i.min(j), i.max(j)) });
        }
        Ok(Graph {
            n,
            directed,
            edges: set.into_iter().collect(),
            provenance: None,
        })
    }

    fn with_provenance(mut self, tag: String) -> Self {
        self.provenance = Some(tag);
        self
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of incident edges, ignoring direction.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(i, j) in &self.edges {
            deg[i - 1] += 1;
            deg[j - 1] += 1;
        }
        deg
    }

    pub fn degree(&self, node: usize) -> usize {
        self.degrees()[node - 1]
    }

    /// 0-based out-neighbour lists (both directions for undirected graphs).
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i - 1].push(j - 1);
            if !self.directed {
                adj[j - 1].push(i - 1);
            }
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let mut undirected = self.clone();
        undirected.directed = false;
        let dist = bfs(&undirected.neighbors(), &[0]);
        dist.iter().all(Option::is_some)
    }

    /// Re-checks the invariants on a deserialized value.
    pub fn validated(self) -> Result<Self> {
        let provenance = self.provenance.clone();
        let mut g = Graph::new(self.n, self.edges, self.directed)?;
        g.provenance = provenance;
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let g: Graph = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        g.validated()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::json(path, e))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Path graph 1–2–…–n.
pub fn chain(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("chain needs n >= 2, got {n}")));
    }
    let edges = (1..n).map(|i| (i, i + 1)).collect();
    Ok(Graph::new(n, edges, false)?.with_provenance(format!("chain:{n}")))
}

/// Cycle 1–2–…–n–1.
pub fn ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("ring needs n >= 3, got {n}")));
    }
    let edges = (1..=n).map(|i| (i, i % n + 1)).collect();
    Ok(Graph::new(n, edges, false)?.with_provenance(format!("ring:{n}")))
}

/// Hub (node 1) with `branches` paths of length `layers`. Layer `l` holds
/// nodes `2 + (l-1)*branches ..= 1 + l*branches`, branch `b` in the same
/// position on every layer.
pub fn layered_star(branches: usize, layers: usize) -> Result<Graph> {
    if branches == 0 || layers == 0 {
        return Err(Error::InvalidSize(format!(
            "layered star needs branches, layers >= 1, got {branches}, {layers}"
        )));
    }
    let node = |layer: usize, branch: usize| 2 + (layer - 1) * branches + branch;
    let mut edges = Vec::with_capacity(branches * layers);
    for b in 0..branches {
        edges.push((1, node(1, b)));
        for l in 2..=layers {
            edges.push((node(l - 1, b), node(l, b)));
        }
    }
    Ok(Graph::new(1 + branches * layers, edges, false)?
        .with_provenance(format!("star:{branches},{layers}")))
}

/// Node ids on star layer `layer` (1-based).
pub fn star_layer(branches: usize, layer: usize) -> Vec<usize> {
    (0..branches).map(|b| 2 + (layer - 1) * branches + b).collect()
}

/// Preferential attachment grown from the single edge (1, 2). Each new node
/// links to `min(m, existing nodes)` distinct targets drawn with probability
/// proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n <= m || n < 2 {
        return Err(Error::InvalidSize(format!(
            "Barabási–Albert needs n > m >= 1, got n = {n}, m = {m}"
        )));
    }
    let mut rng = seeding::stream(seed, Purpose::Graph, 0, 0);
    let mut edges = vec![(1, 2)];
    // one entry per edge endpoint; uniform picks are degree-proportional
    let mut endpoints = vec![1usize, 2];
    for v in 3..=n {
        let k = m.min(v - 1);
        let mut chosen = BTreeSet::new();
        while chosen.len() < k {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            chosen.insert(t);
        }
        for t in chosen {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Ok(Graph::new(n, edges, false)?.with_provenance(format!("ba:{n},{m},{seed}")))
}

/// Builds a graph from `chain:n`, `ring:n`, `star:branches,layers` or
/// `ba:n,m,seed`.
pub fn from_spec(spec: &str) -> Result<Graph> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("topology spec `{spec}` lacks `kind:`")))?;
    let nums: Vec<u64> = args
        .split(',')
        .map(|a| a.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Config(format!("topology spec `{spec}` has a non-integer argument")))?;
    let arity = |k: usize| -> Result<()> {
        if nums.len() == k {
            Ok(())
        } else {
            Err(Error::Config(format!("topology `{kind}` takes {k} argument(s), got `{args}`")))
        }
    };
    match kind.trim() {
        "chain" => {
            arity(1)?;
            chain(nums[0] as usize)
        }
        "ring" => {
            arity(1)?;
            ring(nums[0] as usize)
        }
        "star" => {
            arity(2)?;
            layered_star(nums[0] as usize, nums[1] as usize)
        }
        "ba" => {
            arity(3)?;
            barabasi_albert(nums[0] as usize, nums[1] as usize, nums[2])
        }
        other => Err(Error::Config(format!("unknown topology `{other}`"))),
    }
}

/// Where a run gets its graph from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Generator { generator: String },
    File { file: PathBuf },
    Inline(Graph),
}

impl GraphSource {
    /// Relative file paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Result<Graph> {
        match self {
            GraphSource::Generator { generator } => from_spec(generator),
            GraphSource::File { file } => {
                let path = match base {
                    Some(dir) if file.is_relative() => dir.join(file),
                    _ => file.clone(),
                };
                Graph::load(&path)
            }
            GraphSource::Inline(g) => g.clone().validated(),
        }
    }
}

/// Diagonal self-loop rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum SelfLoop {
    /// `-(degree + 1)`
    DegreePlusOne,
    /// `-c` on every node.
    Constant(f64),
}

impl Default for SelfLoop {
    fn default() -> Self {
        SelfLoop::DegreePlusOne
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyConfig {
    #[serde(default)]
    pub self_loop: SelfLoop,
    /// Diagonal noise is uniform on `[0, eps]`.
    pub eps: f64,
    pub seed: u64,
}

impl AdjacencyConfig {
    pub fn noiseless() -> Self {
        AdjacencyConfig {
            self_loop: SelfLoop::DegreePlusOne,
            eps: 0.0,
            seed: 0,
        }
    }
}

/// Adjacency matrix with the noise of realization 0 of `cfg.seed`.
pub fn adjacency_matrix(g: &Graph, cfg: &AdjacencyConfig) -> Result<DenseMatrix<f64>> {
    adjacency_realization(g, cfg, 0, 0)
}

/// Adjacency matrix for an explicit noise realization and retry attempt.
pub fn adjacency_realization(
    g: &Graph,
    cfg: &AdjacencyConfig,
    realization: u32,
    attempt: u16,
) -> Result<DenseMatrix<f64>> {
    let mut rng = seeding::stream(cfg.seed, Purpose::Noise, realization, attempt);
    let noise: Vec<f64> = (0..g.n)
        .map(|_| if cfg.eps > 0.0 { rng.gen_range(0.0..=cfg.eps) } else { 0.0 })
        .collect();
    adjacency_with_noise(g, cfg.self_loop, &noise)
}

/// Adjacency matrix with an explicit diagonal perturbation `noise[i]`.
pub fn adjacency_with_noise(g: &Graph, rule: SelfLoop, noise: &[f64]) -> Result<DenseMatrix<f64>> {
    if noise.len() != g.n {
        return Err(Error::Shape(format!("{} noise values for {} nodes", noise.len(), g.n)));
    }
    if noise.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
        return Err(Error::Config("diagonal noise must be finite and >= 0".into()));
    }
    let n = g.n;
    let mut a = DenseMatrix::<f64>::zeros(n, n);
    for &(i, j) in &g.edges {
        // column drives row
        a[(j - 1, i - 1)] = 1.0;
        if !g.directed {
            a[(i - 1, j - 1)] = 1.0;
        }
    }
    let deg = g.degrees();
    for i in 0..n {
        let base = match rule {
            SelfLoop::DegreePlusOne => -(deg[i] as f64 + 1.0),
            SelfLoop::Constant(c) => -c,
        };
        a[(i, i)] = base + noise[i];
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        if !(a[(i, i)] < 0.0 && -a[(i, i)] > off) {
            return Err(Error::Config(format!(
                "row {} of the adjacency matrix is not strictly diagonally dominant with a negative diagonal",
                i + 1
            )));
        }
    }
    Ok(a)
}

/// Attacker and defender node lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub defenders: Vec<usize>,
    pub attackers: Vec<usize>,
}

impl Placement {
    pub fn new(n: usize, defenders: Vec<usize>, attackers: Vec<usize>) -> Result<Self> {
        check_nodes(n, &defenders, "defender")?;
        check_nodes(n, &attackers, "attacker")?;
        if let Some(both) = attackers.iter().find(|a| defenders.contains(a)) {
            return Err(Error::Placement(format!(
                "node {both} cannot be both an attacker and a defender"
            )));
        }
        Ok(Placement {
            defenders,
            attackers,
        })
    }
}

fn check_nodes(n: usize, nodes: &[usize], role: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &v in nodes {
        if v == 0 || v > n {
            return Err(Error::Placement(format!("{role} node {v} outside 1..={n}")));
        }
        if !seen.insert(v) {
            return Err(Error::Placement(format!("{role} node {v} listed twice")));
        }
    }
    Ok(())
}

/// `n × k` matrix whose column `j` is the unit vector of `nodes[j]`.
pub fn placement_matrix(n: usize, nodes: &[usize]) -> Result<DenseMatrix<f64>> {
    check_nodes(n, nodes, "placement")?;
    let mut m = DenseMatrix::zeros(n, nodes.len());
    for (col, &v) in nodes.iter().enumerate() {
        m[(v - 1, col)] = 1.0;
    }
    Ok(m)
}

/// Multi-source BFS on 0-based adjacency lists.
fn bfs(adj: &[Vec<usize>], sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Distance from the nearest defender to every node (1-based positions map
/// to index `id - 1`). Directed graphs follow edge direction from the
/// defenders.
pub fn defender_distances(g: &Graph, defenders: &[usize]) -> Result<Vec<Option<usize>>> {
    check_nodes(g.n, defenders, "defender")?;
    let sources: Vec<usize> = defenders.iter().map(|d| d - 1).collect();
    Ok(bfs(&g.neighbors(), &sources))
}

/// Shortest-path distance between `attacker` and the nearest defender.
pub fn min_defender_distance(g: &Graph, attacker: usize, defenders: &[usize]) -> Result<usize> {
    if attacker == 0 || attacker > g.n {
        return Err(Error::Placement(format!("attacker node {attacker} outside 1..={}", g.n)));
    }
    if defenders.is_empty() {
        return Err(Error::DistanceUndefined {
            from: attacker,
            targets: vec![],
        });
    }
    defender_distances(g, defenders)?[attacker - 1].ok_or_else(|| Error::DistanceUndefined {
        from: attacker,
        targets: defenders.to_vec(),
    })
}
