//! Dense weight-matrix graphs, partitions, degree sequences and the
//! entrywise edit distance.
//!
//! Every graph is a labelled directed multigraph with self-loops stored as a
//! row-major `n × n` matrix. Undirected graphs are stored symmetrically.

mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_graph, load_real_graph, read_graph, read_real_graph, save_graph, save_real_graph, write_graph, write_real_graph};

/// Read access to a square weight matrix.
pub trait WeightMatrix {
    fn order(&self) -> usize;
    fn weight(&self, i: usize, j: usize) -> f64;
    fn total_weight(&self) -> f64;
}

/// Directed multigraph with integer edge multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Multigraph {
    n: usize,
    weights: Vec<u64>,
    total: u64,
}

impl Multigraph {
    /// Graph on `n` nodes without edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a graph needs at least one node".into()));
        }
        Ok(Self {
            n,
            weights: vec![0; n * n],
            total: 0,
        })
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        let mut g = Self::empty(n)?;
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, w) in row.into_iter().enumerate() {
                g.add_edges(i, j, w);
            }
        }
        Ok(g)
    }

    /// Builds a graph from a row-major weight vector of length `n²`.
    pub fn from_weights(n: usize, weights: Vec<u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a graph needs at least one node".into()));
        }
        if weights.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: weights.len(),
            });
        }
        let total = weights.iter().sum();
        Ok(Self { n, weights, total })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of edges `m`, counted with multiplicity.
    pub fn m(&self) -> u64 {
        self.total
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.weights[i * self.n + j]
    }

    /// Adds `count` parallel edges `i → j`.
    ///
    /// Panics if `i` or `j` is out of range.
    pub fn add_edges(&mut self, i: usize, j: usize, count: u64) {
        assert!(i < self.n && j < self.n, "node index out of range");
        self.weights[i * self.n + j] += count;
        self.total += count;
    }

    /// Row-major weights.
    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn degrees(&self) -> DegreeSequence {
        let n = self.n;
        let mut k_out = vec![0u64; n];
        let mut k_in = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                let w = self.get(i, j);
                k_out[i] += w;
                k_in[j] += w;
            }
        }
        DegreeSequence { k_out, k_in }
    }

    /// Iterator over nonzero entries `(i, j, w)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        let n = self.n;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0)
            .map(move |(idx, &w)| (idx / n, idx % n, w))
    }
}

impl WeightMatrix for Multigraph {
    fn order(&self) -> usize {
        self.n
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) as f64
    }

    fn total_weight(&self) -> f64 {
        self.total as f64
    }
}

/// Graph with non-negative real weights. Barycenters live here.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGraph {
    n: usize,
    weights: Vec<f64>,
    total: f64,
}

impl RealGraph {
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a graph needs at least one node".into()));
        }
        if weights.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Domain(format!("invalid edge weight {w}")));
        }
        let total = weights.iter().sum();
        Ok(Self { n, weights, total })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> f64 {
        self.total
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl From<&Multigraph> for RealGraph {
    fn from(g: &Multigraph) -> Self {
        Self {
            n: g.n,
            weights: g.weights.iter().map(|&w| w as f64).collect(),
            total: g.total as f64,
        }
    }
}

impl WeightMatrix for RealGraph {
    fn order(&self) -> usize {
        self.n
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }

    fn total_weight(&self) -> f64 {
        self.total
    }
}

/// Out- and in-degree sequences of a directed multigraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDegrees")]
pub struct DegreeSequence {
    k_out: Vec<u64>,
    k_in: Vec<u64>,
}

#[derive(Deserialize)]
struct RawDegrees {
    k_out: Vec<u64>,
    k_in: Vec<u64>,
}

impl TryFrom<RawDegrees> for DegreeSequence {
    type Error = Error;

    fn try_from(raw: RawDegrees) -> Result<Self> {
        Self::new(raw.k_out, raw.k_in)
    }
}

impl DegreeSequence {
    pub fn new(k_out: Vec<u64>, k_in: Vec<u64>) -> Result<Self> {
        if k_out.is_empty() {
            return Err(Error::Spec("degree sequence is empty".into()));
        }
        if k_out.len() != k_in.len() {
            return Err(Error::Dimension {
                expected: k_out.len(),
                found: k_in.len(),
            });
        }
        let (s_out, s_in): (u64, u64) = (k_out.iter().sum(), k_in.iter().sum());
        if s_out != s_in {
            return Err(Error::Spec(format!(
                "out-degrees sum to {s_out} but in-degrees sum to {s_in}"
            )));
        }
        Ok(Self { k_out, k_in })
    }

    /// Same sequence for in- and out-degrees.
    pub fn symmetric(k: Vec<u64>) -> Result<Self> {
        Self::new(k.clone(), k)
    }

    pub fn n(&self) -> usize {
        self.k_out.len()
    }

    pub fn m(&self) -> u64 {
        self.k_out.iter().sum()
    }

    pub fn k_out(&self) -> &[u64] {
        &self.k_out
    }

    pub fn k_in(&self) -> &[u64] {
        &self.k_in
    }
}

/// Assignment of nodes to `p` non-empty blocks labelled `0..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    block_of: Vec<usize>,
    p: usize,
}

impl Partition {
    pub fn new(block_of: Vec<usize>) -> Result<Self> {
        if block_of.is_empty() {
            return Err(Error::Spec("partition covers no nodes".into()));
        }
        let p = block_of.iter().max().map_or(0, |&b| b + 1);
        let mut used = vec![false; p];
        for &b in &block_of {
            used[b] = true;
        }
        if let Some(b) = used.iter().position(|u| !u) {
            return Err(Error::Spec(format!("block {b} has no nodes")));
        }
        Ok(Self { block_of, p })
    }

    /// Every node in block 0.
    pub fn single_block(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    /// Node `i` in block `i`.
    pub fn singletons(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    /// `p` consecutive blocks of `size` nodes each.
    pub fn equal_blocks(p: usize, size: usize) -> Result<Self> {
        Self::new((0..p * size).map(|i| i / size).collect())
    }

    pub fn n(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.p
    }

    pub fn block_of(&self, node: usize) -> usize {
        self.block_of[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.block_of
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.p];
        for &b in &self.block_of {
            sizes[b] += 1;
        }
        sizes
    }

    /// Relabels blocks in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut relabel = vec![usize::MAX; self.p];
        let mut next = 0;
        let block_of = self
            .block_of
            .iter()
            .map(|&b| {
                if relabel[b] == usize::MAX {
                    relabel[b] = next;
                    next += 1;
                }
                relabel[b]
            })
            .collect();
        Self {
            block_of,
            p: self.p,
        }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(block_of: Vec<usize>) -> Result<Self> {
        Self::new(block_of)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.block_of
    }
}

/// Entrywise L1 distance `Σ |W_G[i][j] − W_H[i][j]|`.
pub fn edit_distance<G, H>(g: &G, h: &H) -> Result<f64>
where
    G: WeightMatrix + ?Sized,
    H: WeightMatrix + ?Sized,
{
    let n = g.order();
    if h.order() != n {
        return Err(Error::Dimension {
            expected: n,
            found: h.order(),
        });
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += (g.weight(i, j) - h.weight(i, j)).abs();
        }
    }
    Ok(sum)
}

/// Edit distance divided by `2 · m_ref`.
pub fn normalized_edit_distance<G, H>(g: &G, h: &H, m_ref: f64) -> Result<f64>
where
    G: WeightMatrix + ?Sized,
    H: WeightMatrix + ?Sized,
{
    if !(m_ref > 0.0 && m_ref.is_finite()) {
        return Err(Error::Domain(format!(
            "normalizing edge count must be positive, got {m_ref}"
        )));
    }
    Ok(edit_distance(g, h)? / (2.0 * m_ref))
}

/// Fast path for two integer graphs; exact integer accumulation.
pub(crate) fn edit_distance_int(g: &Multigraph, h: &Multigraph) -> u64 {
    debug_assert_eq!(g.n, h.n);
    g.weights
        .iter()
        .zip(&h.weights)
        .map(|(&a, &b)| a.abs_diff(b))
        .sum()
}
