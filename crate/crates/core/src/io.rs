//! Plain-text instance formats.
//!
//! Both formats are line oriented and whitespace delimited; `#` starts a
//! comment and blank lines are ignored. The first content line is the header
//! `n m`, followed by exactly `m` records with 1-based indices.
//!
//! Triplet (`i j v`): `i == j` adds `v` to the linear term `c_i` (on binaries
//! `x_i^2 = x_i`); `i < j` makes `v` the coefficient of `x_i x_j`, stored as
//! `v/2` in both `Q[i][j]` and `Q[j][i]`. A record with `i > j` is read as
//! `(j, i)`. Repeated pairs are rejected.
//!
//! MaxCut edge list (`i j w`): the cut value
//! `sum w_ij (x_i + x_j - 2 x_i x_j)` becomes `c_i = sum_j w_ij` and
//! `Q[i][j] = Q[j][i] = -w_ij`. Self-loops and repeated edges are rejected.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::QuboProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Triplet,
    MaxCut,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "triplet" | "qubo" => Ok(Format::Triplet),
            "maxcut" | "edges" => Ok(Format::MaxCut),
            other => Err(Error::InvalidInput(format!("unknown format '{other}'"))),
        }
    }
}

pub fn parse(text: &str, format: Format) -> Result<QuboProblem> {
    match format {
        Format::Triplet => parse_triplet(text),
        Format::MaxCut => parse_maxcut(text),
    }
}

struct Records {
    n: usize,
    /// (line, i, j, value) with 0-based indices.
    entries: Vec<(usize, usize, usize, f64)>,
}

fn read_records(text: &str) -> Result<Records> {
    let mut header: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(Error::parse(line, "header must be 'n m'"));
                }
                let n = parse_count(fields[0], line, "n")?;
                let m = parse_count(fields[1], line, "m")?;
                if n == 0 {
                    return Err(Error::parse(line, "n must be at least 1"));
                }
                header = Some((n, m));
            }
            Some((n, m)) => {
                if fields.len() != 3 {
                    return Err(Error::parse(line, format!("expected 3 fields, found {}", fields.len())));
                }
                if entries.len() == m {
                    return Err(Error::parse(line, format!("more than the {m} declared records")));
                }
                let i = parse_index(fields[0], n, line)?;
                let j = parse_index(fields[1], n, line)?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| Error::parse(line, format!("invalid number '{}'", fields[2])))?;
                if !v.is_finite() {
                    return Err(Error::parse(line, "value must be finite"));
                }
                entries.push((line, i, j, v));
            }
        }
    }
    let Some((n, m)) = header else {
        return Err(Error::parse(last_line.max(1), "missing header"));
    };
    if entries.len() != m {
        return Err(Error::parse(
            last_line.max(1),
            format!("declared {m} records, found {}", entries.len()),
        ));
    }
    Ok(Records { n, entries })
}

fn parse_count(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::parse(line, format!("invalid {what} '{s}'")))
}

fn parse_index(s: &str, n: usize, line: usize) -> Result<usize> {
    let i: usize = s.parse().map_err(|_| Error::parse(line, format!("invalid index '{s}'")))?;
    if i == 0 || i > n {
        return Err(Error::parse(line, format!("index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

pub fn parse_triplet(text: &str) -> Result<QuboProblem> {
    let Records { n, entries } = read_records(text)?;
    let mut q = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    let mut seen = HashSet::new();
    for (line, i, j, v) in entries {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if !seen.insert((i, j)) {
            return Err(Error::parse(line, format!("duplicate entry ({}, {})", i + 1, j + 1)));
        }
        if i == j {
            c[i] = v;
        } else {
            q[(i, j)] = v / 2.0;
            q[(j, i)] = v / 2.0;
        }
    }
    QuboProblem::new(q, c, 0.0)
}

pub fn parse_maxcut(text: &str) -> Result<QuboProblem> {
    let Records { n, entries } = read_records(text)?;
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(entries.len());
    for (line, i, j, w) in entries {
        if i == j {
            return Err(Error::parse(line, format!("self-loop on node {}", i + 1)));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::parse(line, format!("duplicate edge ({}, {})", i + 1, j + 1)));
        }
        edges.push((i, j, w));
    }
    maxcut_to_qubo(n, &edges)
}

/// Cut-value QUBO of a weighted simple graph with 0-based endpoints.
pub fn maxcut_to_qubo(n: usize, edges: &[(usize, usize, f64)]) -> Result<QuboProblem> {
    let mut q = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    for &(i, j, w) in edges {
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidInput(format!("bad edge ({i}, {j}) for {n} nodes")));
        }
        c[i] += w;
        c[j] += w;
        q[(i, j)] -= w;
        q[(j, i)] -= w;
    }
    QuboProblem::new(q, c, 0.0)
}

/// Writes `p` in triplet format, folding `Q[i][i]` into the linear term.
///
/// Fails when the offset is nonzero, which the format cannot express.
pub fn write_triplet(p: &QuboProblem) -> Result<String> {
    if p.offset() != 0.0 {
        return Err(Error::InvalidInput("triplet format cannot represent a nonzero offset".into()));
    }
    let n = p.n();
    let mut records = Vec::new();
    for i in 0..n {
        let lin = p.c()[i] + p.q()[(i, i)];
        if lin != 0.0 {
            records.push((i, i, lin));
        }
        for j in i + 1..n {
            let v = 2.0 * p.q()[(i, j)];
            if v != 0.0 {
                records.push((i, j, v));
            }
        }
    }
    let mut out = format!("{} {}\n", n, records.len());
    for (i, j, v) in records {
        writeln!(out, "{} {} {}", i + 1, j + 1, v).expect("writing to a String");
    }
    Ok(out)
}
