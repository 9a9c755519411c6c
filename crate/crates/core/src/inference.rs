//! Model fitting and the bootstrapped permutation test for model relevance.
//!
//! # Test statistic
//!
//! For an observed graph `G` and a candidate model `M`, draw `q` graphs
//! `G_1..G_q` from `M` and compute `x_i = EDEV(G_i, M)` and `y = EDEV(G, M)`.
//! With `θ = mean(x) − y`, arrangement `j` swaps `G` with `G_j`:
//!
//! ```text
//! θ*_j = (Σ_{i≠j} x_i + y) / q − x_j,     θ*_0 = θ
//! ```
//!
//! The p-value is two-sided, `#{j ∈ 0..=q : |θ*_j| ≥ |θ|} / (q + 1)`, so an
//! observed graph that is either much closer or much farther than typical
//! ensemble members is flagged. The original arrangement always counts,
//! hence `p ≥ 1/(q+1)`.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample, sbm_entropy, ModelSpec, SbmSpec};
use crate::error::{Error, Result};
use crate::geometry::{edev_exact, edev_mc};
use crate::graph::{DegreeSequence, Multigraph, Partition};
use crate::rng::RngStream;

/// Default Monte-Carlo sample count for EDEV values without a closed form.
pub const DEFAULT_INNER_SAMPLES: usize = 100;

/// Slack, relative to the largest EDEV value, when comparing `|θ*_j|` with
/// `|θ|`; absorbs rounding between algebraically equal arrangements.
const TIE_TOLERANCE: f64 = 1e-12;

/// Block matrix learned from `g` under `partition`:
/// `M[r][s] = Σ_{u ∈ b_r, v ∈ b_s} W[u][v]`.
pub fn fit_sbm(g: &Multigraph, partition: &Partition) -> Result<SbmSpec> {
    if partition.n() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: partition.n(),
        });
    }
    let p = partition.num_blocks();
    let b = partition.assignment();
    let mut m = vec![vec![0u64; p]; p];
    for (u, v, w) in g.entries() {
        m[b[u]][b[v]] += w;
    }
    SbmSpec::new(partition.clone(), m)
}

/// Configuration model with the degree sequence of `g`.
pub fn fit_cfmd(g: &Multigraph) -> Result<DegreeSequence> {
    if g.m() == 0 {
        return Err(Error::Degenerate("cannot fit a configuration model to a graph without edges".into()));
    }
    Ok(g.degrees())
}

/// SBM description cost of `g` under `partition`, the entropy of the fitted
/// block model.
pub fn partition_entropy(g: &Multigraph, partition: &Partition) -> Result<f64> {
    let fitted = fit_sbm(g, partition)?;
    Ok(sbm_entropy(&partition.block_sizes(), fitted.block_matrix()))
}

/// Local-search state: assignment, block sizes and block matrix.
struct SearchState<'a> {
    g: &'a Multigraph,
    block_of: Vec<usize>,
    sizes: Vec<usize>,
    counts: Vec<Vec<u64>>,
}

impl<'a> SearchState<'a> {
    fn new(g: &'a Multigraph, block_of: Vec<usize>, p: usize) -> Self {
        let mut sizes = vec![0; p];
        for &b in &block_of {
            sizes[b] += 1;
        }
        let mut counts = vec![vec![0u64; p]; p];
        for (u, v, w) in g.entries() {
            counts[block_of[u]][block_of[v]] += w;
        }
        Self {
            g,
            block_of,
            sizes,
            counts,
        }
    }

    fn entropy(&self) -> f64 {
        sbm_entropy(&self.sizes, &self.counts)
    }

    /// Weight from `u` into each block, into `u` from each block, and on
    /// the self-loop.
    fn node_flows(&self, u: usize) -> (Vec<u64>, Vec<u64>, u64) {
        let p = self.sizes.len();
        let (mut out, mut inc) = (vec![0u64; p], vec![0u64; p]);
        for v in 0..self.g.n() {
            if v != u {
                out[self.block_of[v]] += self.g.get(u, v);
                inc[self.block_of[v]] += self.g.get(v, u);
            }
        }
        (out, inc, self.g.get(u, u))
    }

    fn apply_move(counts: &mut [Vec<u64>], sizes: &mut [usize], flows: &(Vec<u64>, Vec<u64>, u64), from: usize, to: usize) {
        let (out, inc, loops) = flows;
        for t in 0..sizes.len() {
            counts[from][t] -= out[t];
            counts[to][t] += out[t];
            counts[t][from] -= inc[t];
            counts[t][to] += inc[t];
        }
        counts[from][from] -= loops;
        counts[to][to] += loops;
        sizes[from] -= 1;
        sizes[to] += 1;
    }

    /// One pass over the nodes in the given order, applying the best
    /// strictly improving single-node move for each. Returns whether any
    /// move was made.
    fn sweep(&mut self, order: &[usize], current: &mut f64) -> bool {
        let mut improved = false;
        for &u in order {
            let from = self.block_of[u];
            if self.sizes[from] == 1 {
                continue;
            }
            let flows = self.node_flows(u);
            let mut best: Option<(usize, f64)> = None;
            for to in 0..self.sizes.len() {
                if to == from {
                    continue;
                }
                let mut counts = self.counts.clone();
                let mut sizes = self.sizes.clone();
                Self::apply_move(&mut counts, &mut sizes, &flows, from, to);
                let e = sbm_entropy(&sizes, &counts);
                if e < best.map_or(*current, |b| b.1) - 1e-9 {
                    best = Some((to, e));
                }
            }
            if let Some((to, e)) = best {
                Self::apply_move(&mut self.counts, &mut self.sizes, &flows, from, to);
                self.block_of[u] = to;
                *current = e;
                improved = true;
            }
        }
        improved
    }

    /// Tries exchanging the blocks of two nodes, taking the first swap that
    /// lowers the entropy. Swaps keep block sizes fixed, so they leave
    /// minima where every single move unbalances the blocks.
    fn swap_pass(&mut self, current: &mut f64) -> bool {
        let n = self.g.n();
        let flows: Vec<_> = (0..n).map(|u| self.node_flows(u)).collect();
        for u in 0..n {
            for v in u + 1..n {
                let (a, b) = (self.block_of[u], self.block_of[v]);
                if a == b {
                    continue;
                }
                let mut counts = self.counts.clone();
                let mut sizes = self.sizes.clone();
                Self::apply_move(&mut counts, &mut sizes, &flows[u], a, b);
                // v's flows once u sits in block b
                let (mut out, mut inc, loops) = flows[v].clone();
                let (uv, vu) = (self.g.get(u, v), self.g.get(v, u));
                out[a] -= vu;
                out[b] += vu;
                inc[a] -= uv;
                inc[b] += uv;
                Self::apply_move(&mut counts, &mut sizes, &(out, inc, loops), b, a);
                let e = sbm_entropy(&sizes, &counts);
                if e < *current - 1e-9 {
                    self.counts = counts;
                    self.sizes = sizes;
                    self.block_of.swap(u, v);
                    *current = e;
                    return true;
                }
            }
        }
        false
    }
}

fn local_search(g: &Multigraph, p: usize, stream: RngStream) -> (Vec<usize>, f64) {
    let n = g.n();
    let mut rng = stream.rng();
    // Grow blocks from p random seeds: the rest join, in random order, the
    // block they share the most weight with (ties broken at random).
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut rng);
    let mut block_of = vec![usize::MAX; n];
    for (b, &u) in nodes[..p].iter().enumerate() {
        block_of[u] = b;
    }
    for &u in &nodes[p..] {
        let mut pull = vec![0u64; p];
        for v in 0..n {
            if v != u && block_of[v] != usize::MAX {
                pull[block_of[v]] += g.get(u, v) + g.get(v, u);
            }
        }
        let top = *pull.iter().max().expect("p >= 1");
        let ties: Vec<usize> = (0..p).filter(|&b| pull[b] == top).collect();
        block_of[u] = ties[rng.random_range(0..ties.len())];
    }
    let mut state = SearchState::new(g, block_of, p);
    let mut current = state.entropy();
    loop {
        loop {
            nodes.shuffle(&mut rng);
            if !state.sweep(&nodes, &mut current) {
                break;
            }
        }
        if !state.swap_pass(&mut current) {
            break;
        }
    }
    (state.block_of, current)
}

/// Greedy minimum-entropy partition into exactly `p_blocks` blocks.
///
/// Each restart grows blocks around random seed nodes, then applies
/// single-node moves that lower the fitted SBM entropy until none does,
/// then tries swapping pairs of nodes between blocks, repeating while that
/// helps. The lowest entropy over all restarts wins, ties going to the
/// earlier restart.
pub fn greedy_min_entropy_partition(
    g: &Multigraph,
    p_blocks: usize,
    restarts: usize,
    stream: RngStream,
) -> Result<Partition> {
    if p_blocks == 0 || p_blocks > g.n() {
        return Err(Error::Domain(format!(
            "cannot split {} nodes into {p_blocks} non-empty blocks",
            g.n()
        )));
    }
    if restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let runs: Vec<(Vec<usize>, f64)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| local_search(g, p_blocks, stream.child(r)))
        .collect();
    let (best, _) = runs
        .into_iter()
        .reduce(|a, b| if b.1 < a.1 { b } else { a })
        .expect("at least one restart");
    Ok(Partition::new(best)?.canonical())
}

/// Outcome of [`permutation_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// EDEV of the observed graph.
    pub y: f64,
    /// EDEV of each of the `q` sampled graphs.
    pub x: Vec<f64>,
    pub theta: f64,
    /// `θ*_0 = θ` followed by the `q` swapped arrangements.
    pub theta_stars: Vec<f64>,
    pub p_value: f64,
    pub delta: f64,
    pub reject: bool,
    /// `"exact"` or `"monte-carlo"`.
    pub edev_method: String,
    /// Monte-Carlo sample count behind each EDEV, when not exact.
    pub inner_samples: Option<usize>,
}

impl TestReport {
    /// Builds the report from precomputed EDEV values.
    pub fn from_values(x: Vec<f64>, y: f64, delta: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Domain("q must be at least 1".into()));
        }
        check_delta(delta)?;
        let q = x.len() as f64;
        let pooled = x.iter().sum::<f64>() + y;
        let star = |single: f64| (pooled - single) / q - single;
        let theta = star(y);
        let theta_stars: Vec<f64> = std::iter::once(theta).chain(x.iter().map(|&xj| star(xj))).collect();
        let scale = x.iter().fold(y.abs(), |acc, v| acc.max(v.abs()));
        let bar = theta.abs() - TIE_TOLERANCE * scale;
        let extreme = theta_stars.iter().filter(|t| t.abs() >= bar).count();
        let p_value = extreme as f64 / (q + 1.0);
        Ok(Self {
            y,
            x,
            theta,
            theta_stars,
            p_value,
            delta,
            reject: p_value <= delta,
            edev_method: String::new(),
            inner_samples: None,
        })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("significance level {delta} outside (0, 1)")));
    }
    Ok(())
}

/// EDEV of `g` against `spec`: exact for ER and SBM, Monte-Carlo with
/// `inner_samples` draws otherwise.
pub fn edev(g: &Multigraph, spec: &ModelSpec, inner_samples: usize, stream: RngStream) -> Result<f64> {
    match spec {
        ModelSpec::Er(_) | ModelSpec::Sbm(_) => edev_exact(g, spec),
        _ => Ok(edev_mc(g, spec, inner_samples, stream)?.mean),
    }
}

/// Bootstrapped permutation test of "`g` was generated by `spec`".
///
/// Sampled graph `i` is drawn from `stream.child(i)`; Monte-Carlo EDEVs use
/// the children of `stream.child(q)` (observed graph) and
/// `stream.child(q + 1 + i)` (sampled graphs).
pub fn permutation_test(
    g: &Multigraph,
    spec: &ModelSpec,
    q: usize,
    delta: f64,
    inner_samples: usize,
    stream: RngStream,
) -> Result<TestReport> {
    if q == 0 {
        return Err(Error::Domain("q must be at least 1".into()));
    }
    check_delta(delta)?;
    let exact = matches!(spec, ModelSpec::Er(_) | ModelSpec::Sbm(_));
    if !exact && inner_samples == 0 {
        return Err(Error::Domain("need at least one inner sample".into()));
    }
    let y = edev(g, spec, inner_samples, stream.child(q as u64))?;
    let x = (0..q as u64)
        .into_par_iter()
        .map(|i| {
            let h = sample(spec, stream.child(i))?;
            edev(&h, spec, inner_samples, stream.child(q as u64 + 1 + i))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut report = TestReport::from_values(x, y, delta)?;
    if exact {
        report.edev_method = "exact".into();
    } else {
        report.edev_method = "monte-carlo".into();
        report.inner_samples = Some(inner_samples);
    }
    Ok(report)
}
