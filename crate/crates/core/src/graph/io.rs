//! Plain-text graph files.
//!
//! ```text
//! n=2 m=3
//! 0 1 2
//! 1 0 1
//! ```
//!
//! The header gives the node count and total weight, then one `i j w` line
//! per nonzero entry (0-based indices, row-major order on save). Real-valued
//! graphs use the same layout with decimal weights.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{Multigraph, RealGraph};
use crate::error::{Error, Result};

pub fn save_graph(g: &Multigraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_graph(g, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_graph<W: Write>(g: &Multigraph, out: &mut W) -> Result<()> {
    writeln!(out, "n={} m={}", g.n(), g.m())?;
    for (i, j, w) in g.entries() {
        writeln!(out, "{i} {j} {w}")?;
    }
    Ok(())
}

pub fn save_real_graph(g: &RealGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_real_graph(g, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_real_graph<W: Write>(g: &RealGraph, out: &mut W) -> Result<()> {
    writeln!(out, "n={} m={:?}", g.n(), g.m())?;
    let n = g.n();
    for (idx, &w) in g.weights().iter().enumerate() {
        if w != 0.0 {
            writeln!(out, "{} {} {:?}", idx / n, idx % n, w)?;
        }
    }
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Multigraph> {
    let path = path.as_ref();
    read_graph_from(File::open(path)?, path)
}

pub fn read_graph<R: Read>(input: R) -> Result<Multigraph> {
    read_graph_from(input, Path::new("<input>"))
}

pub fn load_real_graph(path: impl AsRef<Path>) -> Result<RealGraph> {
    let path = path.as_ref();
    read_real_graph_from(File::open(path)?, path)
}

pub fn read_real_graph<R: Read>(input: R) -> Result<RealGraph> {
    read_real_graph_from(input, Path::new("<input>"))
}

fn read_graph_from<R: Read>(input: R, path: &Path) -> Result<Multigraph> {
    let parsed = parse::<u64, R>(input, path)?;
    let total: u64 = parsed.weights.iter().sum();
    if total != parsed.declared_m {
        return Err(parse_error(
            path,
            1,
            format!("header declares m={} but entries sum to {total}", parsed.declared_m),
        ));
    }
    Multigraph::from_weights(parsed.n, parsed.weights)
}

fn read_real_graph_from<R: Read>(input: R, path: &Path) -> Result<RealGraph> {
    let parsed = parse::<f64, R>(input, path)?;
    let total: f64 = parsed.weights.iter().sum();
    let tol = 1e-9 * parsed.declared_m.abs().max(1.0);
    if (total - parsed.declared_m).abs() > tol {
        return Err(parse_error(
            path,
            1,
            format!("header declares m={} but entries sum to {total}", parsed.declared_m),
        ));
    }
    RealGraph::from_weights(parsed.n, parsed.weights)
}

struct Parsed<T> {
    n: usize,
    declared_m: T,
    weights: Vec<T>,
}

trait Weight: FromStr + Copy + Default + std::ops::AddAssign {
    fn is_valid(&self) -> bool;
}

impl Weight for u64 {
    fn is_valid(&self) -> bool {
        true
    }
}

impl Weight for f64 {
    fn is_valid(&self) -> bool {
        self.is_finite() && *self >= 0.0
    }
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: PathBuf::from(path),
        line,
        message: message.into(),
    }
}

fn parse_weight<T: Weight>(tok: &str, path: &Path, line: usize) -> Result<T> {
    if tok.starts_with('-') {
        return Err(parse_error(path, line, format!("negative weight {tok}")));
    }
    let w: T = tok
        .parse()
        .map_err(|_| parse_error(path, line, format!("invalid weight {tok:?}")))?;
    if !w.is_valid() {
        return Err(parse_error(path, line, format!("invalid weight {tok:?}")));
    }
    Ok(w)
}

fn parse<T: Weight, R: Read>(input: R, path: &Path) -> Result<Parsed<T>> {
    let mut lines = BufReader::new(input).lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(parse_error(path, 1, "missing header")),
    };
    let (n, declared_m) = parse_header::<T>(&header, path)?;
    let mut weights = vec![T::default(); n * n];

    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_error(
                path,
                lineno,
                format!("expected `i j w`, found {trimmed:?}"),
            ));
        }
        let index = |tok: &str| -> Result<usize> {
            let v: usize = tok
                .parse()
                .map_err(|_| parse_error(path, lineno, format!("invalid node index {tok:?}")))?;
            if v >= n {
                return Err(parse_error(
                    path,
                    lineno,
                    format!("node index {v} out of range for n={n}"),
                ));
            }
            Ok(v)
        };
        let i = index(toks[0])?;
        let j = index(toks[1])?;
        let w = parse_weight::<T>(toks[2], path, lineno)?;
        weights[i * n + j] += w;
    }
    Ok(Parsed {
        n,
        declared_m,
        weights,
    })
}

fn parse_header<T: Weight>(header: &str, path: &Path) -> Result<(usize, T)> {
    let mut n = None;
    let mut m = None;
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("n", v)) => {
                n = Some(
                    v.parse::<usize>()
                        .map_err(|_| parse_error(path, 1, format!("invalid node count {v:?}")))?,
                )
            }
            Some(("m", v)) => m = Some(parse_weight::<T>(v, path, 1)?),
            _ => return Err(parse_error(path, 1, format!("unexpected header token {tok:?}"))),
        }
    }
    match (n, m) {
        (Some(0), _) => Err(parse_error(path, 1, "node count must be positive")),
        (Some(n), Some(m)) => Ok((n, m)),
        _ => Err(parse_error(path, 1, "header must read `n=<int> m=<int>`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_documented_example() {
        let g = read_graph("n=2 m=3\n0 1 2\n1 0 1\n".as_bytes()).unwrap();
        assert_eq!(g, Multigraph::from_rows(vec![vec![0, 2], vec![1, 0]]).unwrap());
    }

    #[test]
    fn writes_row_major() {
        let g = Multigraph::from_rows(vec![vec![0, 2], vec![1, 0]]).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n=2 m=3\n0 1 2\n1 0 1\n");
    }

    #[test]
    fn out_of_range_index_reports_line() {
        let err = read_graph("n=2 m=1\n0 5 1\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("out of range"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "",
            "n=2\n",
            "n=0 m=0\n",
            "n=2 m=1\n0 1\n",
            "n=2 m=1\n0 1 -1\n",
            "n=2 m=1\n0 x 1\n",
            "n=2 m=2\n0 1 1\n",
        ] {
            assert!(
                matches!(read_graph(bad.as_bytes()), Err(Error::Parse { .. })),
                "accepted {bad:?}"
            );
        }
    }

    #[test]
    fn real_graph_round_trip() {
        let g = RealGraph::from_weights(2, vec![0.1, 0.0, 1.0 / 3.0, 2.5]).unwrap();
        let mut buf = Vec::new();
        write_real_graph(&g, &mut buf).unwrap();
        let back = read_real_graph(buf.as_slice()).unwrap();
        assert_eq!(back.weights(), g.weights());
    }
}
