//! Model parameters, labels, sparse graphs and the recovery metric.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Parameters of the symmetric two-community SBM: an intra-community pair is
/// an edge with probability `a/n`, an inter-community pair with `b/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    a: f64,
    b: f64,
    n: usize,
}

impl SbmParams {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Param(format!(
                "a and b must be finite, got a = {a}, b = {b}"
            )));
        }
        if b <= 0.0 {
            return Err(Error::Param(format!("b > 0 required, got b = {b}")));
        }
        if a <= b {
            return Err(Error::Param(format!(
                "a > b required, got a = {a}, b = {b}"
            )));
        }
        if n < 2 {
            return Err(Error::Param(format!("n >= 2 required, got n = {n}")));
        }
        if a > n as f64 {
            return Err(Error::Param(format!(
                "a <= n required so that a/n is a probability, got a = {a}, n = {n}"
            )));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_intra(&self) -> f64 {
        self.a / self.n as f64
    }

    pub fn p_inter(&self) -> f64 {
        self.b / self.n as f64
    }

    fn edge_probability(&self, same: bool) -> f64 {
        if same {
            self.p_intra()
        } else {
            self.p_inter()
        }
    }
}

/// Community assignment of every node, one byte per node, values in `{1, 2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CommunityLabels(Vec<u8>);

impl CommunityLabels {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some((i, &v)) = labels.iter().enumerate().find(|(_, &v)| v != 1 && v != 2) {
            return Err(Error::Parse(format!(
                "label of node {i} is {v}, expected 1 or 2"
            )));
        }
        Ok(Self(labels))
    }

    /// Labels from a side indicator: `true` is community 1.
    pub fn from_sides(in_first: &[bool]) -> Self {
        Self(in_first.iter().map(|&s| if s { 1 } else { 2 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    /// Global relabeling `1 <-> 2`.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&v| 3 - v).collect())
    }

    /// `(n1, n2)`.
    pub fn counts(&self) -> (usize, usize) {
        let n1 = self.0.iter().filter(|&&v| v == 1).count();
        (n1, self.0.len() - n1)
    }

    /// One line of comma-separated labels.
    pub fn to_line(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(Self(Vec::new()));
        }
        let labels = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u8>()
                    .map_err(|e| Error::Parse(format!("bad label {tok:?}: {e}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(labels)
    }
}

/// Undirected simple graph stored as a sorted edge list plus sorted
/// neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SparseGraph {
    /// Builds a graph from unordered pairs. Rejects self-loops, out-of-range
    /// endpoints and duplicates (in either orientation).
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (i, j) in pairs {
            if i == j {
                return Err(Error::Parse(format!("self-loop at node {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::Parse(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            let e = (i.min(j), i.max(j));
            if !seen.insert(e) {
                return Err(Error::Parse(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            edges.push(e);
        }
        edges.sort_unstable();
        Ok(Self::from_sorted_unique(n, edges))
    }

    fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n,
            edges,
            adjacency,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Number of edges whose endpoints carry different labels.
    pub fn cut_size(&self, labels: &CommunityLabels) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| labels.get(i) != labels.get(j))
            .count()
    }

    /// Subgraph induced by `nodes` (in the given order); node `k` of the
    /// result is `nodes[k]` of `self`.
    pub fn induced(&self, nodes: &[usize]) -> SparseGraph {
        let mut index = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            index[v] = k;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| {
                let (ki, kj) = (index[i], index[j]);
                (ki != usize::MAX && kj != usize::MAX).then(|| (ki.min(kj), ki.max(kj)))
            })
            .collect();
        edges.sort_unstable();
        Self::from_sorted_unique(nodes.len(), edges)
    }

    /// Plain-text edge list: `n <count>` then one `i j` line per edge.
    pub fn write_edge_list(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "n {}", self.n)?;
        for &(i, j) in &self.edges {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn read_edge_list(r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))??;
        let n = header
            .trim()
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| {
                Error::Parse(format!("bad header {header:?}, expected \"n <count>\""))
            })?;
        let mut pairs = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace().map(str::parse::<usize>);
            match (parts.next(), parts.next(), parts.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) if i < j => pairs.push((i, j)),
                _ => return Err(Error::Parse(format!("bad edge line {line:?}"))),
            }
        }
        Self::from_edges(n, pairs)
    }
}

impl fmt::Display for SparseGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SparseGraph(n = {}, edges = {})",
            self.n,
            self.edges.len()
        )
    }
}

/// Labels drawn i.i.d. uniform on `{1, 2}` from the label stream of `seed`.
pub fn generate_labels(n: usize, seed: u64) -> CommunityLabels {
    let mut rng = rng::stream(seed, rng::LABEL_STREAM);
    CommunityLabels(
        (0..n)
            .map(|_| if rng::coin(&mut rng) { 2 } else { 1 })
            .collect(),
    )
}

/// Draws labels and a graph from the model.
///
/// Labels use ChaCha8 stream [`rng::LABEL_STREAM`] of `seed`; edges use
/// stream [`rng::EDGE_STREAM`], consuming exactly one uniform per pair
/// `i < j` in lexicographic order. The output is a pure function of
/// `(params, seed)`.
pub fn generate(params: &SbmParams, seed: u64) -> (CommunityLabels, SparseGraph) {
    let n = params.n();
    let labels = generate_labels(n, seed);
    let mut rng = rng::stream(seed, rng::EDGE_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = params.edge_probability(labels.get(i) == labels.get(j));
            if rng::uniform(&mut rng) < p {
                edges.push((i, j));
            }
        }
    }
    (labels, SparseGraph::from_sorted_unique(n, edges))
}

/// Draws labels and only the edges incident to `node`.
///
/// Same label stream as [`generate`]; edge draws visit the other nodes in
/// increasing order. Sufficient for any rule that reads a single node's
/// neighborhood, at `O(n)` instead of `O(n^2)` cost.
pub fn generate_star(params: &SbmParams, seed: u64, node: usize) -> (CommunityLabels, SparseGraph) {
    let n = params.n();
    let labels = generate_labels(n, seed);
    let mut rng = rng::stream(seed, rng::EDGE_STREAM);
    let mut edges = Vec::new();
    for i in (0..n).filter(|&i| i != node) {
        let p = params.edge_probability(labels.get(i) == labels.get(node));
        if rng::uniform(&mut rng) < p {
            edges.push((i.min(node), i.max(node)));
        }
    }
    edges.sort_unstable();
    (labels, SparseGraph::from_sorted_unique(n, edges))
}

/// Fraction of mismatched labels, minimized over the two relabelings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub r: f64,
    /// `true` when the swap `1 <-> 2` attains the minimum (identity wins ties).
    pub swapped: bool,
    pub mismatches: usize,
}

pub fn recovery_error(
    truth: &CommunityLabels,
    estimate: &CommunityLabels,
) -> Result<RecoveryResult> {
    if truth.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: estimate.len(),
        });
    }
    let n = truth.len();
    if n == 0 {
        return Ok(RecoveryResult {
            r: 0.0,
            swapped: false,
            mismatches: 0,
        });
    }
    let direct = truth
        .0
        .iter()
        .zip(&estimate.0)
        .filter(|(x, y)| x != y)
        .count();
    let swapped = n - direct;
    let (mismatches, swapped) = if direct <= swapped {
        (direct, false)
    } else {
        (swapped, true)
    };
    Ok(RecoveryResult {
        r: mismatches as f64 / n as f64,
        swapped,
        mismatches,
    })
}

/// Community-size imbalance and the Hoeffding check `|delta| <= 2 sqrt(ln n / (n-1))`.
///
/// `n` is the length of the vector given; callers in the genie setting pass
/// the `n - 1` revealed labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceStats {
    pub n1: usize,
    pub n2: usize,
    pub delta: f64,
    pub hoeffding_ok: bool,
}

pub fn hoeffding_radius(n: usize) -> f64 {
    2.0 * ((n as f64).ln() / (n as f64 - 1.0)).sqrt()
}

pub fn imbalance_check(labels: &CommunityLabels) -> Result<ImbalanceStats> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "imbalance needs n >= 2, got {n}"
        )));
    }
    let (n1, n2) = labels.counts();
    let delta = (n1 as f64 - n2 as f64) / n as f64;
    Ok(ImbalanceStats {
        n1,
        n2,
        delta,
        hoeffding_ok: delta.abs() <= hoeffding_radius(n),
    })
}
