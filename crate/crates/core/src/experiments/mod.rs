//! Figure presets: each regenerates one experiment as CSV files (and,
//! optionally, an SVG chart) in an output directory.
//!
//! Every preset is a pure function of its [`ExperimentConfig`]. Work is
//! spread over rayon, but results are collected in index order and written
//! once at the end, so a fixed seed gives byte-identical files.

mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{entropy, sample, sample_er, ErSpec, ModelSpec, SbmSpec, WaxmanSpec};
use crate::error::{Error, Result};
use crate::geometry::{distance_to_barycenter, edev_exact, Summary};
use crate::graph::{DegreeSequence, Multigraph, Partition};
use crate::inference::{
    fit_cfmd, fit_sbm, greedy_min_entropy_partition, permutation_test, TestReport, DEFAULT_INNER_SAMPLES,
};
use crate::rng::RngStream;

use svg::BoxSeries;

pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown preset {s:?} (expected one of fig2..fig7)")))
    }
}

/// Size overrides. Explicit counts win over `scale`, which multiplies every
/// default size (rounding up, never below 1).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scale: Option<f64>,
    /// Monte-Carlo sample count (fig2 draws per model, fig5 inner EDEV draws).
    pub samples: Option<usize>,
    /// Sampled graphs per permutation test.
    pub q: Option<usize>,
    /// Observed graphs per model (fig4–fig7).
    pub graphs: Option<usize>,
    /// Density grid points (fig3).
    pub grid: Option<usize>,
    /// Blocks for the fig7 partition search.
    pub blocks: Option<usize>,
    /// Restarts for the fig7 partition search.
    pub restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub overrides: Overrides,
    pub svg: bool,
}

impl ExperimentConfig {
    pub fn new(preset: Preset, out_dir: impl Into<PathBuf>, seed: u64) -> Self {
        Self {
            preset,
            out_dir: out_dir.into(),
            seed,
            overrides: Overrides::default(),
            svg: false,
        }
    }

    fn size(&self, default: usize, explicit: Option<usize>, min: usize) -> Result<usize> {
        let v = match (explicit, self.overrides.scale) {
            (Some(v), _) => v,
            (None, Some(s)) => {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Config(format!("scale must be positive, got {s}")));
                }
                (default as f64 * s).ceil() as usize
            }
            (None, None) => default,
        };
        if v < min {
            return Err(Error::Config(format!("size {v} below minimum {min}")));
        }
        Ok(v)
    }

    fn root(&self) -> RngStream {
        RngStream::from_seed(self.seed)
    }
}

/// Runs the preset and returns the files written, in order.
pub fn run(config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&config.out_dir)?;
    let outputs = match config.preset {
        Preset::Fig2 => fig2(config)?.write(config)?,
        Preset::Fig3 => fig3(config)?.write(config)?,
        Preset::Fig4 | Preset::Fig5 | Preset::Fig6 => cross_model(config)?.write(config)?,
        Preset::Fig7 => fig7(config)?.write(config)?,
    };
    Ok(outputs)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn write_svg(dir: &Path, name: &str, body: String, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body)?;
    outputs.push(path);
    Ok(())
}

// ---------------------------------------------------------------- fig2 ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Sample {
    pub model: String,
    pub sample: usize,
    pub ned: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Summary {
    pub model: String,
    pub n: usize,
    pub m: u64,
    pub entropy: f64,
    pub entropy_approximate: bool,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2 {
    pub samples: Vec<Fig2Sample>,
    pub summary: Vec<Fig2Summary>,
}

/// Block model on 5 blocks of 10 nodes with the given per-cell densities.
fn five_block_sbm(internal: [u64; 5], external: u64) -> Result<SbmSpec> {
    let cells = 10 * 10;
    let matrix = (0..5)
        .map(|r| {
            (0..5)
                .map(|s| if r == s { internal[r] } else { external } * cells / 100)
                .collect()
        })
        .collect();
    SbmSpec::new(Partition::equal_blocks(5, 10)?, matrix)
}

/// The five reference models of the distance-to-barycenter experiment.
/// SBM densities are per ordered node pair (×100 here to stay integral).
pub fn fig2_models() -> Result<Vec<(&'static str, ModelSpec)>> {
    Ok(vec![
        ("er", ErSpec::new(50, 1000)?.into()),
        ("cfm_cst", DegreeSequence::symmetric(vec![20; 50])?.into()),
        ("cfm_arith", DegreeSequence::symmetric((1..=50).collect())?.into()),
        ("sbm_hom", five_block_sbm([120; 5], 20)?.into()),
        ("sbm_het", five_block_sbm([40, 80, 120, 160, 200], 20)?.into()),
    ])
}

pub fn fig2(config: &ExperimentConfig) -> Result<Fig2> {
    let n_samples = config.size(100, config.overrides.samples, 1)?;
    let models = fig2_models()?;
    let root = config.root();
    let results = models
        .par_iter()
        .enumerate()
        .map(|(i, (name, spec))| {
            let dist = distance_to_barycenter(spec, n_samples, root.child(i as u64))?;
            let h = entropy(spec)?;
            Ok((name, spec, dist, h))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::new();
    let mut summary = Vec::new();
    for (name, spec, dist, h) in results {
        samples.extend(dist.values.iter().enumerate().map(|(t, &ned)| Fig2Sample {
            model: name.to_string(),
            sample: t,
            ned,
        }));
        let s = dist.summary;
        summary.push(Fig2Summary {
            model: name.to_string(),
            n: spec.n(),
            m: spec.total_edges().unwrap_or(0),
            entropy: h.nats,
            entropy_approximate: h.approximate,
            min: s.min,
            q1: s.q1,
            median: s.median,
            q3: s.q3,
            max: s.max,
            mean: s.mean,
        });
    }
    Ok(Fig2 { samples, summary })
}

impl Outputs for Fig2 {
    fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let dir = &config.out_dir;
        let mut outputs = vec![dir.join("fig2_samples.csv"), dir.join("fig2_summary.csv")];
        write_csv(&outputs[0], &self.samples)?;
        write_csv(&outputs[1], &self.summary)?;
        if config.svg {
            let series = self
                .summary
                .iter()
                .map(|s| BoxSeries {
                    label: s.model.clone(),
                    summary: Summary {
                        min: s.min,
                        q1: s.q1,
                        median: s.median,
                        q3: s.q3,
                        max: s.max,
                        mean: s.mean,
                    },
                    marker: None,
                })
                .collect::<Vec<_>>();
            let body = svg::boxplot("Distance to the barycenter", "ned", &series);
            write_svg(dir, "fig2.svg", body, &mut outputs)?;
        }
        Ok(outputs)
    }
}

// ---------------------------------------------------------------- fig3 ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub m: u64,
    pub density: f64,
    pub entropy: f64,
    pub edev_g1: f64,
    pub edev_g2: f64,
    pub edev_g3: f64,
}

pub const FIG3_NODES: usize = 100;
pub const FIG3_M_MIN: u64 = 100;
pub const FIG3_M_MAX: u64 = 500_000;

/// `points` log-spaced edge counts from 100 to 500 000, rounded to even
/// values so the two-community graph splits them evenly.
pub fn fig3_grid(points: usize) -> Result<Vec<u64>> {
    if points < 2 {
        return Err(Error::Config("fig3 grid needs at least 2 points".into()));
    }
    let (lo, hi) = ((FIG3_M_MIN as f64).ln(), (FIG3_M_MAX as f64).ln());
    let mut grid: Vec<u64> = (0..points)
        .map(|i| {
            let m = (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp();
            2 * (m / 2.0).round() as u64
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

/// Two disjoint halves, each an independent ER graph with `m / 2` edges.
fn two_communities(n: usize, m: u64, stream: RngStream) -> Multigraph {
    let half = n / 2;
    let mut rng = stream.rng();
    let mut g = Multigraph::empty(n).expect("n ≥ 1");
    for offset in [0, half] {
        let part = sample_er(half, m / 2, &mut rng);
        for (i, j, w) in part.entries() {
            g.add_edges(i + offset, j + offset, w);
        }
    }
    g
}

pub fn fig3(config: &ExperimentConfig) -> Result<Vec<Fig3Row>> {
    let points = config.size(25, config.overrides.grid, 2)?;
    let grid = fig3_grid(points)?;
    let n = FIG3_NODES;
    let root = config.root();
    grid.par_iter()
        .enumerate()
        .map(|(idx, &m)| {
            let spec: ModelSpec = ErSpec::new(n, m)?.into();
            let g1 = sample(&spec, root.child(0).child(idx as u64))?;
            let g2 = two_communities(n, m, root.child(1).child(idx as u64));
            let mut g3 = Multigraph::empty(n)?;
            g3.add_edges(0, 1, m);
            Ok(Fig3Row {
                m,
                density: m as f64 / (n * n) as f64,
                entropy: entropy(&spec)?.nats,
                edev_g1: edev_exact(&g1, &spec)?,
                edev_g2: edev_exact(&g2, &spec)?,
                edev_g3: edev_exact(&g3, &spec)?,
            })
        })
        .collect()
}

trait Outputs {
    fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>>;
}

impl Outputs for Vec<Fig3Row> {
    fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let path = config.out_dir.join("fig3.csv");
        write_csv(&path, self)?;
        Ok(vec![path])
    }
}

// ---------------------------------------------------------- fig4 – fig6 ----

/// One permutation test of a cross-model experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRow {
    pub graph: usize,
    pub candidate: String,
    pub observed_edev: f64,
    pub reference_mean: f64,
    pub reference_min: f64,
    pub reference_max: f64,
    pub theta: f64,
    pub p_value: f64,
    pub reject: bool,
    pub q: usize,
    pub delta: f64,
    pub edev_method: String,
    pub inner_samples: Option<usize>,
}

/// EDEV of one sampled reference graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub graph: usize,
    pub sample: usize,
    pub edev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossModel {
    pub preset: Preset,
    pub tests: Vec<TestRow>,
    pub reference: Vec<ReferenceRow>,
}

/// Generative model of fig5/fig6: two blocks of 25 nodes, 500 edges inside
/// each, none across.
pub fn sbm_zero() -> Result<SbmSpec> {
    SbmSpec::new(Partition::equal_blocks(2, 25)?, vec![vec![500, 0], vec![0, 500]])
}

/// Generative model of fig4: `k_out_i = k_in_i = i` on 50 nodes.
pub fn cfmd_arith_zero() -> Result<DegreeSequence> {
    DegreeSequence::symmetric((0..50).collect())
}

/// Even nodes in block 0, odd nodes in block 1.
pub fn even_odd(n: usize) -> Result<Partition> {
    Partition::new((0..n).map(|i| i % 2).collect())
}

fn test_row(graph: usize, candidate: &str, r: &TestReport) -> Result<TestRow> {
    let s = Summary::of(&r.x)?;
    Ok(TestRow {
        graph,
        candidate: candidate.to_string(),
        observed_edev: r.y,
        reference_mean: s.mean,
        reference_min: s.min,
        reference_max: s.max,
        theta: r.theta,
        p_value: r.p_value,
        reject: r.reject,
        q: r.x.len(),
        delta: r.delta,
        edev_method: r.edev_method.clone(),
        inner_samples: r.inner_samples,
    })
}

pub fn cross_model(config: &ExperimentConfig) -> Result<CrossModel> {
    let preset = config.preset;
    let default_q = match preset {
        Preset::Fig6 => 200,
        Preset::Fig4 | Preset::Fig5 => 100,
        _ => return Err(Error::Config(format!("{preset} is not a cross-model preset"))),
    };
    let graphs = config.size(5, config.overrides.graphs, 1)?;
    let q = config.size(default_q, config.overrides.q, 1)?;
    let inner = config.size(DEFAULT_INNER_SAMPLES, config.overrides.samples, 1)?;
    let generative: ModelSpec = match preset {
        Preset::Fig4 => cfmd_arith_zero()?.into(),
        _ => sbm_zero()?.into(),
    };
    let root = config.root();
    let reports = (0..graphs)
        .into_par_iter()
        .map(|i| {
            let g = sample(&generative, root.child(0).child(i as u64))?;
            let (name, candidate): (&str, ModelSpec) = match preset {
                Preset::Fig4 => ("sbm_even_odd", fit_sbm(&g, &even_odd(g.n())?)?.into()),
                Preset::Fig5 => ("cfmd_fitted", fit_cfmd(&g)?.into()),
                _ => ("sbm_zero", generative.clone()),
            };
            let r = permutation_test(&g, &candidate, q, DEFAULT_DELTA, inner, root.child(1).child(i as u64))?;
            Ok((name, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tests = Vec::new();
    let mut reference = Vec::new();
    for (i, (name, r)) in reports.iter().enumerate() {
        tests.push(test_row(i, name, r)?);
        reference.extend(r.x.iter().enumerate().map(|(t, &edev)| ReferenceRow {
            graph: i,
            sample: t,
            edev,
        }));
    }
    Ok(CrossModel {
        preset,
        tests,
        reference,
    })
}

impl Outputs for CrossModel {
    fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let dir = &config.out_dir;
        let name = self.preset.name();
        let mut outputs = vec![dir.join(format!("{name}_tests.csv")), dir.join(format!("{name}_reference.csv"))];
        write_csv(&outputs[0], &self.tests)?;
        write_csv(&outputs[1], &self.reference)?;
        if config.svg {
            let series = self
                .tests
                .iter()
                .map(|t| {
                    let xs: Vec<f64> = self
                        .reference
                        .iter()
                        .filter(|r| r.graph == t.graph)
                        .map(|r| r.edev)
                        .collect();
                    Ok(BoxSeries {
                        label: format!("G{}", t.graph),
                        summary: Summary::of(&xs)?,
                        marker: Some(t.observed_edev),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let body = svg::boxplot("EDEV: sampled graphs (boxes) vs observed (dot)", "EDEV", &series);
            write_svg(dir, &format!("{name}.svg"), body, &mut outputs)?;
        }
        Ok(outputs)
    }
}

// ---------------------------------------------------------------- fig7 ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig7Row {
    /// Model index 0..8 (0–3 SBM, 4–7 Waxman).
    pub row: usize,
    pub model: String,
    /// Graph index within the model.
    pub col: usize,
    pub m: u64,
    pub observed_edev: f64,
    pub reference_mean: f64,
    pub p_value: f64,
    pub reject: bool,
}

pub const FIG7_NODES: usize = 100;

/// The eight generative models: four 4-block SBMs from perfectly separated
/// to weakly assortative, then four Waxman models of increasing locality.
pub fn fig7_models() -> Result<Vec<(String, ModelSpec)>> {
    let mut models = Vec::new();
    for (i, (int, ext)) in [(90u64, 0u64), (75, 5), (60, 10), (45, 15)].into_iter().enumerate() {
        let matrix = (0..4)
            .map(|r| (0..4).map(|s| if r == s { int } else { ext }).collect())
            .collect();
        let spec = SbmSpec::new(Partition::equal_blocks(4, 25)?, matrix)?;
        models.push((format!("M{i}_sbm"), spec.into()));
    }
    for (i, (alpha, beta)) in [(0.1, 1.0), (0.08, 1.6), (0.06, 2.7), (0.04, 8.5)].into_iter().enumerate() {
        let spec = WaxmanSpec::new(FIG7_NODES, alpha, beta, None)?;
        models.push((format!("M{}_waxman", i + 4), spec.into()));
    }
    Ok(models)
}

pub fn fig7(config: &ExperimentConfig) -> Result<Vec<Fig7Row>> {
    let graphs = config.size(8, config.overrides.graphs, 1)?;
    let q = config.size(200, config.overrides.q, 1)?;
    let blocks = config.overrides.blocks.unwrap_or(4);
    let restarts = config.size(10, config.overrides.restarts, 1)?;
    let models = fig7_models()?;
    let root = config.root();
    let cells: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|r| (0..graphs).map(move |c| (r, c)))
        .collect();
    cells
        .par_iter()
        .map(|&(row, col)| {
            let (name, spec) = &models[row];
            let cell = root.child(row as u64).child(col as u64);
            let g = sample(spec, cell.child(0))?;
            let partition = greedy_min_entropy_partition(&g, blocks, restarts, cell.child(1))?;
            let candidate: ModelSpec = fit_sbm(&g, &partition)?.into();
            let r = permutation_test(&g, &candidate, q, DEFAULT_DELTA, DEFAULT_INNER_SAMPLES, cell.child(2))?;
            Ok(Fig7Row {
                row,
                model: name.clone(),
                col,
                m: g.m(),
                observed_edev: r.y,
                reference_mean: r.x.iter().sum::<f64>() / r.x.len() as f64,
                p_value: r.p_value,
                reject: r.reject,
            })
        })
        .collect()
}

impl Outputs for Vec<Fig7Row> {
    fn write(&self, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
        let dir = &config.out_dir;
        let mut outputs = vec![dir.join("fig7.csv")];
        write_csv(&outputs[0], self)?;
        if config.svg {
            let n_rows = self.iter().map(|r| r.row + 1).max().unwrap_or(0);
            let n_cols = self.iter().map(|r| r.col + 1).max().unwrap_or(0);
            let mut labels = vec![String::new(); n_rows];
            let mut grid = vec![vec![0.0; n_cols]; n_rows];
            for r in self {
                labels[r.row] = r.model.clone();
                grid[r.row][r.col] = r.p_value;
            }
            let body = svg::heatmap("p-values (rows: model, columns: graph)", &labels, n_cols, &grid);
            write_svg(dir, "fig7.svg", body, &mut outputs)?;
        }
        Ok(outputs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn fig2_models_have_thousand_edges() {
        for (name, spec) in fig2_models().unwrap() {
            assert_eq!(spec.n(), 50, "{name}");
            if name != "cfm_arith" {
                assert_eq!(spec.total_edges(), Some(1000), "{name}");
            }
        }
    }

    #[test]
    fn fig7_sbms_match_target_density() {
        for (name, spec) in fig7_models().unwrap().into_iter().take(4) {
            assert_eq!(spec.total_edges(), Some(360), "{name}");
        }
    }

    #[test]
    fn grid_endpoints_and_parity() {
        let g = fig3_grid(25).unwrap();
        assert_eq!(g[0], 100);
        assert_eq!(*g.last().unwrap(), 500_000);
        assert!(g.iter().all(|m| m % 2 == 0));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scale_rounds_up_and_explicit_wins() {
        let mut c = ExperimentConfig::new(Preset::Fig2, "unused", 0);
        c.overrides.scale = Some(0.01);
        assert_eq!(c.size(100, None, 1).unwrap(), 1);
        assert_eq!(c.size(200, None, 1).unwrap(), 2);
        assert_eq!(c.size(200, Some(7), 1).unwrap(), 7);
        assert!(c.size(200, Some(0), 1).is_err());
    }
}
