//! Distances between a graph and an ensemble: edit distance expected value
//! (EDEV), distance to the barycenter, modularity, and probes of how SBM
//! ensembles contract around their barycenters as they are scaled up.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{barycenter, sample, scale_sbm, ModelSpec, SbmSpec};
use crate::error::{Error, Result};
use crate::graph::{edit_distance_int, normalized_edit_distance, Multigraph, Partition};
use crate::numerics::BinomialAbsDev;
use crate::rng::RngStream;

/// Monte-Carlo estimate of the EDEV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdevEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub per_sample: Vec<f64>,
}

impl EdevEstimate {
    pub fn from_samples(per_sample: Vec<f64>) -> Self {
        let n = per_sample.len();
        let mean = per_sample.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = per_sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_samples: n,
            per_sample,
        }
    }
}

/// The edge count `m` used to normalize distances between `g` and graphs of
/// `spec`.
///
/// Microcanonical families fix `m`, and `g` must carry exactly that weight.
/// Waxman graphs have no fixed edge count, so the observed weight is used.
pub fn reference_edges(g: &Multigraph, spec: &ModelSpec) -> Result<f64> {
    if g.n() != spec.n() {
        return Err(Error::Dimension {
            expected: spec.n(),
            found: g.n(),
        });
    }
    let m = match (spec.total_edges(), spec) {
        (Some(m), _) => {
            if g.m() != m {
                return Err(Error::Normalization {
                    observed: g.m() as f64,
                    model: m as f64,
                });
            }
            m
        }
        (None, ModelSpec::Waxman(_)) => g.m(),
        (None, _) => return Err(Error::UnsupportedSampler(spec.name())),
    };
    if m == 0 {
        return Err(Error::Domain("normalized distances need at least one edge".into()));
    }
    Ok(m as f64)
}

/// Monte-Carlo EDEV: mean normalized edit distance from `g` to
/// `n_samples` graphs drawn from `spec`. Sample `t` uses `stream.child(t)`.
pub fn edev_mc(g: &Multigraph, spec: &ModelSpec, n_samples: usize, stream: RngStream) -> Result<EdevEstimate> {
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let m_ref = reference_edges(g, spec)?;
    let per_sample = (0..n_samples as u64)
        .into_par_iter()
        .map(|t| {
            let h = sample(spec, stream.child(t))?;
            Ok(edit_distance_int(g, &h) as f64 / (2.0 * m_ref))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EdevEstimate::from_samples(per_sample))
}

/// Exact EDEV for ER and SBM, whose entries are binomial:
/// `(1/2m) Σ_{i,j} E|W_G[i][j] − X_ij|`.
pub fn edev_exact(g: &Multigraph, spec: &ModelSpec) -> Result<f64> {
    let unsupported = || Error::Unsupported {
        operation: "exact EDEV",
        model: spec.name(),
    };
    if !matches!(spec, ModelSpec::Er(_) | ModelSpec::Sbm(_)) {
        return Err(unsupported());
    }
    let m_ref = reference_edges(g, spec)?;
    let n = g.n();
    let w = g.weights();
    let total: f64 = match spec {
        ModelSpec::Er(s) => {
            let table = BinomialAbsDev::new(s.m(), 1.0 / (n * n) as f64)?;
            w.iter().map(|&a| table.at(a)).sum()
        }
        ModelSpec::Sbm(s) => {
            let sizes = s.partition().block_sizes();
            let tables = s
                .block_matrix()
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(t, &count)| BinomialAbsDev::new(count, 1.0 / (sizes[r] * sizes[t]) as f64))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let b = s.partition().assignment();
            let mut sum = 0.0;
            for i in 0..n {
                let row = &tables[b[i]];
                for j in 0..n {
                    sum += row[b[j]].at(w[i * n + j]);
                }
            }
            sum
        }
        _ => return Err(unsupported()),
    };
    Ok(total / (2.0 * m_ref))
}

/// Five-number summary plus mean. Quartiles are medians of the lower and
/// upper halves, excluding the overall median when the count is odd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("cannot summarize an empty sample".into()));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let (lower, upper) = (&v[..n / 2], &v[n.div_ceil(2)..]);
        let (q1, q3) = if lower.is_empty() {
            (v[0], v[0])
        } else {
            (median_sorted(lower), median_sorted(upper))
        };
        Ok(Self {
            min: v[0],
            q1,
            median: median_sorted(&v),
            q3,
            max: v[n - 1],
            mean: values.iter().sum::<f64>() / n as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceDistribution {
    pub values: Vec<f64>,
    pub summary: Summary,
}

/// Normalized edit distance from `n_samples` ensemble draws to the
/// barycenter. Waxman draws are normalized by the barycenter's expected
/// weight.
pub fn distance_to_barycenter(spec: &ModelSpec, n_samples: usize, stream: RngStream) -> Result<DistanceDistribution> {
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let center = barycenter(spec)?;
    let m_ref = spec.total_edges().map_or(center.m(), |m| m as f64);
    let values = (0..n_samples as u64)
        .into_par_iter()
        .map(|t| {
            let g = sample(spec, stream.child(t))?;
            normalized_edit_distance(&g, &center, m_ref)
        })
        .collect::<Result<Vec<f64>>>()?;
    let summary = Summary::of(&values)?;
    Ok(DistanceDistribution { values, summary })
}

/// Modularity as a comparison with the configuration-model barycenter:
/// `(1/2m) Σ_blocks Σ_{u,v ∈ block} (W[u][v] − k_u^out k_v^in / m)`.
pub fn modularity(g: &Multigraph, partition: &Partition) -> Result<f64> {
    if partition.n() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            found: partition.n(),
        });
    }
    if g.m() == 0 {
        return Err(Error::Undefined("modularity of a graph without edges".into()));
    }
    let m = g.m() as f64;
    let p = partition.num_blocks();
    let b = partition.assignment();
    let degrees = g.degrees();
    let mut inside = vec![0u64; p];
    let mut out_mass = vec![0u64; p];
    let mut in_mass = vec![0u64; p];
    for (u, v, w) in g.entries() {
        if b[u] == b[v] {
            inside[b[u]] += w;
        }
    }
    for u in 0..g.n() {
        out_mass[b[u]] += degrees.k_out()[u];
        in_mass[b[u]] += degrees.k_in()[u];
    }
    let q: f64 = (0..p)
        .map(|r| inside[r] as f64 - out_mass[r] as f64 * in_mass[r] as f64 / m)
        .sum();
    Ok(q / (2.0 * m))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Normalized edit distance between the barycenters of two SBMs with the
/// same node count and edge count.
///
/// The distance is homogeneous of degree zero in the block matrices, so both
/// are first divided by the gcd of all their entries. `S1(k)`, `S2(k)` and
/// `S1`, `S2` then reduce to the same pair and give bit-identical results.
pub fn sbm_barycenter_distance(s1: &SbmSpec, s2: &SbmSpec) -> Result<f64> {
    if s1.n() != s2.n() {
        return Err(Error::Domain(format!(
            "SBMs have different node counts ({} and {})",
            s1.n(),
            s2.n()
        )));
    }
    if s1.m() != s2.m() {
        return Err(Error::Domain(format!(
            "SBMs have different edge counts ({} and {})",
            s1.m(),
            s2.m()
        )));
    }
    if s1.m() == 0 {
        return Err(Error::Domain("SBMs without edges".into()));
    }
    let g = s1
        .block_matrix()
        .iter()
        .chain(s2.block_matrix())
        .flatten()
        .fold(0, |acc, &c| gcd(acc, c));
    let cell_values = |s: &SbmSpec| -> Vec<Vec<f64>> {
        let sizes = s.partition().block_sizes();
        s.block_matrix()
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(|(t, &c)| (c / g) as f64 / (sizes[r] * sizes[t]) as f64)
                    .collect()
            })
            .collect()
    };
    let (v1, v2) = (cell_values(s1), cell_values(s2));
    let (b1, b2) = (s1.partition().assignment(), s2.partition().assignment());
    let n = s1.n();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            sum += (v1[b1[i]][b1[j]] - v2[b2[i]][b2[j]]).abs();
        }
    }
    Ok(sum / (2.0 * (s1.m() / g) as f64))
}

/// One row of [`convergence_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub k: u64,
    /// Mean `ned(G_k, barycenter(S1(k)))`.
    pub ned_to_own_barycenter: f64,
    /// Mean `EDEV(G_k, S2(k))`.
    pub edev: f64,
}

/// Draws `G_k ~ S1(k)` for every `k` in the schedule and records its
/// distance to its own barycenter and its exact EDEV against `S2(k)`.
pub fn convergence_probe(
    s1: &SbmSpec,
    s2: &SbmSpec,
    k_schedule: &[u64],
    n_samples: usize,
    stream: RngStream,
) -> Result<Vec<ProbeRow>> {
    if k_schedule.is_empty() || k_schedule[0] < 1 || k_schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("k schedule must be non-empty, positive and strictly increasing".into()));
    }
    if n_samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    if s1.n() != s2.n() || s1.m() != s2.m() {
        return Err(Error::Domain("SBMs must share node and edge counts".into()));
    }
    k_schedule
        .iter()
        .map(|&k| {
            let a = ModelSpec::Sbm(scale_sbm(s1, k)?);
            let b = ModelSpec::Sbm(scale_sbm(s2, k)?);
            let center = barycenter(&a)?;
            let m_ref = (k * s1.m()) as f64;
            let family = stream.child(k);
            let rows = (0..n_samples as u64)
                .into_par_iter()
                .map(|t| {
                    let g = sample(&a, family.child(t))?;
                    Ok((normalized_edit_distance(&g, &center, m_ref)?, edev_exact(&g, &b)?))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let count = rows.len() as f64;
            Ok(ProbeRow {
                k,
                ned_to_own_barycenter: rows.iter().map(|r| r.0).sum::<f64>() / count,
                edev: rows.iter().map(|r| r.1).sum::<f64>() / count,
            })
        })
        .collect()
}
