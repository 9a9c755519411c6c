//! Model specifications, samplers, barycenters and ensemble entropies.
//!
//! # Sampling distribution
//!
//! The microcanonical families (ER, CFMD, SBM) are sampled by *edge
//! placement*: ER drops its `m` edges independently and uniformly on the `n²`
//! ordered pairs, SBM does the same inside every block pair, and CFMD matches
//! out-stubs to in-stubs with a uniformly random bijection. Every entry of a
//! sample is therefore binomial (ER, SBM) or a sum of stub indicators (CFMD),
//! which is the law all the barycenter and EDEV formulas rely on. On
//! multigraphs this is *not* the uniform distribution over the ensemble:
//! graphs with many parallel edges are drawn less often than under uniform
//! counting.

mod spec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Multigraph, RealGraph};
use crate::numerics::{ln_factorial, ln_multisets};
use crate::rng::RngStream;

pub(crate) use spec::distance;
pub use spec::{Deterrence, ErSpec, GravitySpec, ModelSpec, RadiationSpec, SbmSpec, WaxmanSpec};

/// Draws one graph from the ensemble.
pub fn sample(spec: &ModelSpec, stream: RngStream) -> Result<Multigraph> {
    let mut rng = stream.rng();
    match spec {
        ModelSpec::Er(s) => Ok(sample_er(s.n(), s.m(), &mut rng)),
        ModelSpec::Cfmd(d) => Ok(sample_cfmd(d, &mut rng)),
        ModelSpec::Sbm(s) => Ok(sample_sbm(s, &mut rng)),
        ModelSpec::Waxman(s) => Ok(sample_waxman(s, &mut rng)),
        ModelSpec::Gravity(_) | ModelSpec::Radiation(_) => Err(Error::UnsupportedSampler(spec.name())),
    }
}

pub(crate) fn sample_er<R: Rng>(n: usize, m: u64, rng: &mut R) -> Multigraph {
    let mut g = Multigraph::empty(n).expect("n ≥ 1");
    let cells = n * n;
    for _ in 0..m {
        let c = rng.random_range(0..cells);
        g.add_edges(c / n, c % n, 1);
    }
    g
}

fn sample_cfmd<R: Rng>(d: &DegreeSequence, rng: &mut R) -> Multigraph {
    let mut g = Multigraph::empty(d.n()).expect("n ≥ 1");
    let stubs = |k: &[u64]| -> Vec<usize> {
        k.iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    };
    let out_stubs = stubs(d.k_out());
    let mut in_stubs = stubs(d.k_in());
    in_stubs.shuffle(rng);
    for (&u, &v) in out_stubs.iter().zip(&in_stubs) {
        g.add_edges(u, v, 1);
    }
    g
}

fn block_members(spec: &SbmSpec) -> Vec<Vec<usize>> {
    let part = spec.partition();
    let mut members = vec![Vec::new(); part.num_blocks()];
    for (node, &b) in part.assignment().iter().enumerate() {
        members[b].push(node);
    }
    members
}

fn sample_sbm<R: Rng>(spec: &SbmSpec, rng: &mut R) -> Multigraph {
    let mut g = Multigraph::empty(spec.n()).expect("n ≥ 1");
    let members = block_members(spec);
    for (r, row) in spec.block_matrix().iter().enumerate() {
        for (s, &count) in row.iter().enumerate() {
            let (from, to) = (&members[r], &members[s]);
            for _ in 0..count {
                let u = from[rng.random_range(0..from.len())];
                let v = to[rng.random_range(0..to.len())];
                g.add_edges(u, v, 1);
            }
        }
    }
    g
}

fn max_pairwise_distance(positions: &[[f64; 2]]) -> f64 {
    let mut max = 0.0f64;
    for (u, &a) in positions.iter().enumerate() {
        for &b in &positions[u + 1..] {
            max = max.max(distance(a, b));
        }
    }
    max
}

fn sample_waxman<R: Rng>(spec: &WaxmanSpec, rng: &mut R) -> Multigraph {
    let n = spec.n();
    let drawn;
    let positions = match spec.positions() {
        Some(p) => p,
        None => {
            drawn = (0..n)
                .map(|_| [rng.random::<f64>(), rng.random::<f64>()])
                .collect::<Vec<_>>();
            &drawn
        }
    };
    let max_dist = max_pairwise_distance(positions);
    let mut g = Multigraph::empty(n).expect("n ≥ 1");
    for u in 0..n {
        for v in u + 1..n {
            let p = spec.link_probability(distance(positions[u], positions[v]), max_dist);
            if rng.random::<f64>() < p {
                g.add_edges(u, v, 1);
                g.add_edges(v, u, 1);
            }
        }
    }
    g
}

/// Entrywise expected weight matrix of the ensemble.
pub fn barycenter(spec: &ModelSpec) -> Result<RealGraph> {
    let n = spec.n();
    let mut w = vec![0.0; n * n];
    match spec {
        ModelSpec::Er(s) => {
            w.fill(s.m() as f64 / (n * n) as f64);
        }
        ModelSpec::Cfmd(d) => {
            let m = d.m() as f64;
            if m > 0.0 {
                for (i, &ko) in d.k_out().iter().enumerate() {
                    for (j, &ki) in d.k_in().iter().enumerate() {
                        w[i * n + j] = (ko * ki) as f64 / m;
                    }
                }
            }
        }
        ModelSpec::Sbm(s) => {
            let sizes = s.partition().block_sizes();
            let b = s.partition().assignment();
            for i in 0..n {
                for j in 0..n {
                    let (r, t) = (b[i], b[j]);
                    w[i * n + j] = s.block_matrix()[r][t] as f64 / (sizes[r] * sizes[t]) as f64;
                }
            }
        }
        ModelSpec::Waxman(s) => {
            let pos = s.positions().ok_or_else(|| {
                Error::Config("waxman barycenter needs node positions".into())
            })?;
            let max_dist = max_pairwise_distance(pos);
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        w[i * n + j] = s.link_probability(distance(pos[i], pos[j]), max_dist);
                    }
                }
            }
        }
        ModelSpec::Gravity(s) => {
            let pos = s.positions();
            for i in 0..n {
                for j in 0..n {
                    let f = s.deterrence().eval(distance(pos[i], pos[j]));
                    w[i * n + j] = s.k_out()[i] * s.k_in()[j] * f;
                }
            }
        }
        ModelSpec::Radiation(s) => {
            let pos = s.positions();
            let (k_out, k_in) = (s.k_out(), s.k_in());
            for i in 0..n {
                let d: Vec<f64> = (0..n).map(|u| distance(pos[i], pos[u])).collect();
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    // Total in-strength strictly inside the disc of radius d(i, j).
                    let s_ij: f64 = (0..n)
                        .filter(|&u| d[u] > 0.0 && d[u] < d[j])
                        .map(|u| k_in[u])
                        .sum();
                    let denom = (k_in[i] + s_ij) * (k_in[i] + k_in[j] + s_ij);
                    if denom > 0.0 {
                        w[i * n + j] = k_out[i] * k_in[i] * k_in[j] / denom;
                    }
                }
            }
        }
    }
    RealGraph::from_weights(n, w)
}

/// Ensemble entropy in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    pub nats: f64,
    /// Set when the value is an estimate rather than an exact log-count.
    pub approximate: bool,
}

/// `ln |Ω|` for ER and SBM; for CFMD the stub-configuration estimate
/// `ln m! − Σ ln k_out! − Σ ln k_in!`, flagged approximate.
pub fn entropy(spec: &ModelSpec) -> Result<Entropy> {
    match spec {
        ModelSpec::Er(s) => {
            let cells = (s.n() * s.n()) as u64;
            Ok(Entropy {
                nats: ln_multisets(cells, s.m()),
                approximate: false,
            })
        }
        ModelSpec::Sbm(s) => Ok(Entropy {
            nats: sbm_entropy(&s.partition().block_sizes(), s.block_matrix()),
            approximate: false,
        }),
        ModelSpec::Cfmd(d) => {
            let nats = ln_factorial(d.m())
                - d.k_out().iter().map(|&k| ln_factorial(k)).sum::<f64>()
                - d.k_in().iter().map(|&k| ln_factorial(k)).sum::<f64>();
            Ok(Entropy {
                nats,
                approximate: true,
            })
        }
        _ => Err(Error::Unsupported {
            operation: "entropy",
            model: spec.name(),
        }),
    }
}

/// `Σ_{r,s} ln C(|b_r||b_s| + M[r][s] − 1, M[r][s])`.
pub(crate) fn sbm_entropy(sizes: &[usize], block_matrix: &[Vec<u64>]) -> f64 {
    let mut total = 0.0;
    for (r, row) in block_matrix.iter().enumerate() {
        for (s, &count) in row.iter().enumerate() {
            total += ln_multisets((sizes[r] * sizes[s]) as u64, count);
        }
    }
    total
}

/// Same partition with every block count multiplied by `k`.
pub fn scale_sbm(spec: &SbmSpec, k: u64) -> Result<SbmSpec> {
    if k < 1 {
        return Err(Error::Domain("scale factor must be at least 1".into()));
    }
    let scaled = spec
        .block_matrix()
        .iter()
        .map(|row| row.iter().map(|&c| c * k).collect())
        .collect();
    SbmSpec::new(spec.partition().clone(), scaled)
}
