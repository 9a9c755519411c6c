use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeSequence, Partition};

/// A statistical graph model and its parameters.
///
/// JSON form: `{"model": "er" | "cfmd" | "sbm" | "waxman" | "gravity" |
/// "radiation", ...fields}`; see the README for each family's fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Er(ErSpec),
    Cfmd(DegreeSequence),
    Sbm(SbmSpec),
    Waxman(WaxmanSpec),
    Gravity(GravitySpec),
    Radiation(RadiationSpec),
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Er(_) => "er",
            ModelSpec::Cfmd(_) => "cfmd",
            ModelSpec::Sbm(_) => "sbm",
            ModelSpec::Waxman(_) => "waxman",
            ModelSpec::Gravity(_) => "gravity",
            ModelSpec::Radiation(_) => "radiation",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ModelSpec::Er(s) => s.n,
            ModelSpec::Cfmd(d) => d.n(),
            ModelSpec::Sbm(s) => s.n(),
            ModelSpec::Waxman(s) => s.n,
            ModelSpec::Gravity(s) => s.positions.len(),
            ModelSpec::Radiation(s) => s.positions.len(),
        }
    }

    /// Edge count shared by every graph of the ensemble, for the
    /// microcanonical families.
    pub fn total_edges(&self) -> Option<u64> {
        match self {
            ModelSpec::Er(s) => Some(s.m),
            ModelSpec::Cfmd(d) => Some(d.m()),
            ModelSpec::Sbm(s) => Some(s.m()),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl From<ErSpec> for ModelSpec {
    fn from(s: ErSpec) -> Self {
        ModelSpec::Er(s)
    }
}

impl From<DegreeSequence> for ModelSpec {
    fn from(d: DegreeSequence) -> Self {
        ModelSpec::Cfmd(d)
    }
}

impl From<SbmSpec> for ModelSpec {
    fn from(s: SbmSpec) -> Self {
        ModelSpec::Sbm(s)
    }
}

impl From<WaxmanSpec> for ModelSpec {
    fn from(s: WaxmanSpec) -> Self {
        ModelSpec::Waxman(s)
    }
}

/// Erdős–Rényi multigraphs with `n` nodes and exactly `m` edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawEr")]
pub struct ErSpec {
    n: usize,
    m: u64,
}

#[derive(Deserialize)]
struct RawEr {
    n: usize,
    m: u64,
}

impl TryFrom<RawEr> for ErSpec {
    type Error = Error;
    fn try_from(r: RawEr) -> Result<Self> {
        Self::new(r.n, r.m)
    }
}

impl ErSpec {
    pub fn new(n: usize, m: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Spec("er: n must be at least 1".into()));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

/// Stochastic blockmodel: exact edge counts between every ordered pair of
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSbm")]
pub struct SbmSpec {
    block_of: Partition,
    block_matrix: Vec<Vec<u64>>,
}

#[derive(Deserialize)]
struct RawSbm {
    block_of: Partition,
    block_matrix: Vec<Vec<u64>>,
}

impl TryFrom<RawSbm> for SbmSpec {
    type Error = Error;
    fn try_from(r: RawSbm) -> Result<Self> {
        Self::new(r.block_of, r.block_matrix)
    }
}

impl SbmSpec {
    pub fn new(partition: Partition, block_matrix: Vec<Vec<u64>>) -> Result<Self> {
        let p = partition.num_blocks();
        if block_matrix.len() != p || block_matrix.iter().any(|row| row.len() != p) {
            return Err(Error::Spec(format!(
                "sbm: block matrix must be {p}×{p} to match the partition"
            )));
        }
        Ok(Self {
            block_of: partition,
            block_matrix,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.block_of
    }

    pub fn block_matrix(&self) -> &[Vec<u64>] {
        &self.block_matrix
    }

    pub fn n(&self) -> usize {
        self.block_of.n()
    }

    pub fn m(&self) -> u64 {
        self.block_matrix.iter().flatten().sum()
    }
}

/// Waxman random geometric graph on `[0,1]²`. Each unordered pair is linked
/// with probability `min(1, β·exp(−d/(α·L)))`, `L` the largest pairwise
/// distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWaxman")]
pub struct WaxmanSpec {
    n: usize,
    alpha: f64,
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    positions: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct RawWaxman {
    n: usize,
    alpha: f64,
    beta: f64,
    #[serde(default)]
    positions: Option<Vec<[f64; 2]>>,
}

impl TryFrom<RawWaxman> for WaxmanSpec {
    type Error = Error;
    fn try_from(r: RawWaxman) -> Result<Self> {
        Self::new(r.n, r.alpha, r.beta, r.positions)
    }
}

impl WaxmanSpec {
    pub fn new(n: usize, alpha: f64, beta: f64, positions: Option<Vec<[f64; 2]>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Spec("waxman: n must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Spec(format!("waxman: alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Spec(format!("waxman: beta must be positive, got {beta}")));
        }
        if let Some(pos) = &positions {
            if pos.len() != n {
                return Err(Error::Spec(format!(
                    "waxman: {} positions given for n={n}",
                    pos.len()
                )));
            }
            if pos.iter().flatten().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::Spec("waxman: positions must lie in [0,1]²".into()));
            }
        }
        Ok(Self {
            n,
            alpha,
            beta,
            positions,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn positions(&self) -> Option<&[[f64; 2]]> {
        self.positions.as_deref()
    }

    /// Same parameters with fixed node positions.
    pub fn with_positions(&self, positions: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(self.n, self.alpha, self.beta, Some(positions))
    }

    /// Link probability at distance `d` when the largest pairwise distance
    /// is `max_dist`.
    pub fn link_probability(&self, d: f64, max_dist: f64) -> f64 {
        let decay = if max_dist > 0.0 {
            (-d / (self.alpha * max_dist)).exp()
        } else {
            1.0
        };
        (self.beta * decay).min(1.0)
    }
}

/// Deterrence function `f(d)` of the gravity model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Deterrence {
    /// `c · exp(−d / r)`
    Exponential { c: f64, r: f64 },
    /// Piecewise-linear through `(distances[k], values[k])`, constant beyond
    /// either end.
    Tabulated { distances: Vec<f64>, values: Vec<f64> },
}

impl Deterrence {
    pub fn eval(&self, d: f64) -> f64 {
        match self {
            Deterrence::Exponential { c, r } => c * (-d / r).exp(),
            Deterrence::Tabulated { distances, values } => {
                let k = distances.partition_point(|&x| x <= d);
                if k == 0 {
                    values[0]
                } else if k == distances.len() {
                    values[k - 1]
                } else {
                    let (x0, x1) = (distances[k - 1], distances[k]);
                    let (y0, y1) = (values[k - 1], values[k]);
                    y0 + (y1 - y0) * (d - x0) / (x1 - x0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Deterrence::Exponential { c, r } => {
                if !(*c >= 0.0 && c.is_finite() && *r > 0.0 && r.is_finite()) {
                    return Err(Error::Spec("gravity: exponential deterrence needs c ≥ 0, r > 0".into()));
                }
            }
            Deterrence::Tabulated { distances, values } => {
                if distances.is_empty() || distances.len() != values.len() {
                    return Err(Error::Spec(
                        "gravity: tabulated deterrence needs equally long, non-empty tables".into(),
                    ));
                }
                if distances.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::Spec("gravity: tabulated distances must increase strictly".into()));
                }
                if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::Spec("gravity: deterrence values must be non-negative".into()));
                }
            }
        }
        Ok(())
    }
}

fn validate_spatial(model: &str, positions: &[[f64; 2]], k_out: &[f64], k_in: &[f64]) -> Result<()> {
    let n = positions.len();
    if n == 0 {
        return Err(Error::Spec(format!("{model}: no nodes")));
    }
    if k_out.len() != n || k_in.len() != n {
        return Err(Error::Spec(format!(
            "{model}: strengths must have one entry per position ({n})"
        )));
    }
    if positions.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Spec(format!("{model}: positions must be finite")));
    }
    if k_out.iter().chain(k_in).any(|k| !(*k >= 0.0 && k.is_finite())) {
        return Err(Error::Spec(format!("{model}: strengths must be non-negative")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGravity")]
pub struct GravitySpec {
    positions: Vec<[f64; 2]>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
    deterrence: Deterrence,
}

#[derive(Deserialize)]
struct RawGravity {
    positions: Vec<[f64; 2]>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
    deterrence: Deterrence,
}

impl TryFrom<RawGravity> for GravitySpec {
    type Error = Error;
    fn try_from(r: RawGravity) -> Result<Self> {
        Self::new(r.positions, r.k_out, r.k_in, r.deterrence)
    }
}

impl GravitySpec {
    pub fn new(
        positions: Vec<[f64; 2]>,
        k_out: Vec<f64>,
        k_in: Vec<f64>,
        deterrence: Deterrence,
    ) -> Result<Self> {
        validate_spatial("gravity", &positions, &k_out, &k_in)?;
        deterrence.validate()?;
        Ok(Self {
            positions,
            k_out,
            k_in,
            deterrence,
        })
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn k_out(&self) -> &[f64] {
        &self.k_out
    }

    pub fn k_in(&self) -> &[f64] {
        &self.k_in
    }

    pub fn deterrence(&self) -> &Deterrence {
        &self.deterrence
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRadiation")]
pub struct RadiationSpec {
    positions: Vec<[f64; 2]>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
}

#[derive(Deserialize)]
struct RawRadiation {
    positions: Vec<[f64; 2]>,
    k_out: Vec<f64>,
    k_in: Vec<f64>,
}

impl TryFrom<RawRadiation> for RadiationSpec {
    type Error = Error;
    fn try_from(r: RawRadiation) -> Result<Self> {
        Self::new(r.positions, r.k_out, r.k_in)
    }
}

impl RadiationSpec {
    pub fn new(positions: Vec<[f64; 2]>, k_out: Vec<f64>, k_in: Vec<f64>) -> Result<Self> {
        validate_spatial("radiation", &positions, &k_out, &k_in)?;
        Ok(Self {
            positions,
            k_out,
            k_in,
        })
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn k_out(&self) -> &[f64] {
        &self.k_out
    }

    pub fn k_in(&self) -> &[f64] {
        &self.k_in
    }
}

pub(crate) fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_all_families() {
        let texts = [
            r#"{"model":"er","n":3,"m":4}"#,
            r#"{"model":"cfmd","k_out":[1,1],"k_in":[2,0]}"#,
            r#"{"model":"sbm","block_of":[0,0,1],"block_matrix":[[1,2],[0,3]]}"#,
            r#"{"model":"waxman","n":2,"alpha":0.1,"beta":1.0,"positions":[[0.0,0.0],[1.0,1.0]]}"#,
            r#"{"model":"waxman","n":5,"alpha":0.1,"beta":2.7}"#,
            r#"{"model":"gravity","positions":[[0,0],[3,4]],"k_out":[1,2],"k_in":[2,1],"deterrence":{"kind":"exponential","c":1.0,"r":2.0}}"#,
            r#"{"model":"gravity","positions":[[0,0]],"k_out":[1],"k_in":[1],"deterrence":{"kind":"tabulated","distances":[0,1],"values":[1,0.5]}}"#,
            r#"{"model":"radiation","positions":[[0,0],[1,0]],"k_out":[1,2],"k_in":[3,4]}"#,
        ];
        for text in texts {
            let spec = ModelSpec::from_json(text).unwrap();
            let back = ModelSpec::from_json(&spec.to_json().unwrap()).unwrap();
            assert_eq!(spec, back, "{text}");
        }
    }

    #[test]
    fn json_rejects_invalid_specs() {
        let texts = [
            r#"{"model":"er","n":0,"m":4}"#,
            r#"{"model":"cfmd","k_out":[1,1],"k_in":[1,0]}"#,
            r#"{"model":"sbm","block_of":[0,0,1],"block_matrix":[[1,2]]}"#,
            r#"{"model":"sbm","block_of":[0,2],"block_matrix":[[1,2],[1,1]]}"#,
            r#"{"model":"waxman","n":2,"alpha":0.0,"beta":1.0}"#,
            r#"{"model":"waxman","n":2,"alpha":0.1,"beta":1.0,"positions":[[0.0,2.0],[1.0,1.0]]}"#,
            r#"{"model":"waxman","n":3,"alpha":0.1,"beta":1.0,"positions":[[0.0,0.0]]}"#,
            r#"{"model":"radiation","positions":[[0,0]],"k_out":[1,2],"k_in":[3]}"#,
            r#"{"model":"gravity","positions":[[0,0]],"k_out":[1],"k_in":[1],"deterrence":{"kind":"tabulated","distances":[1,0],"values":[1,1]}}"#,
            r#"{"model":"lattice","n":3}"#,
        ];
        for text in texts {
            assert!(ModelSpec::from_json(text).is_err(), "accepted {text}");
        }
    }

    #[test]
    fn tabulated_deterrence_interpolates() {
        let f = Deterrence::Tabulated {
            distances: vec![0.0, 1.0, 3.0],
            values: vec![1.0, 0.5, 0.0],
        };
        assert_eq!(f.eval(-1.0), 1.0);
        assert_eq!(f.eval(0.5), 0.75);
        assert_eq!(f.eval(2.0), 0.25);
        assert_eq!(f.eval(10.0), 0.0);
    }
}
