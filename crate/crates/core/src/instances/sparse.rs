//! Plain-text sparse symmetric instances.
//!
//! ```text
//! # comment
//! n nnz
//! i j value        (nnz lines, 1-based, i ≤ j)
//! c v_1 … v_n      (optional cost vector)
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A symmetric matrix given by its upper triangle plus a cost vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseInstance {
    pub q: DMatrix<f64>,
    pub c: DVector<f64>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot read {what} from {tok:?}")))
}

/// Parses the text format.
pub fn parse_sparse_instance(text: &str) -> Result<SparseInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header \"n nnz\""))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(hline, "header must be \"n nnz\""));
    }
    let n: usize = number(toks[0], hline, "n")?;
    let nnz: usize = number(toks[1], hline, "nnz")?;
    if n == 0 {
        return Err(parse_err(hline, "n must be positive"));
    }

    let mut q = DMatrix::zeros(n, n);
    let mut seen = HashSet::new();
    for k in 0..nnz {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {nnz} entries, found {k}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(ln, "entry must be \"i j value\""));
        }
        let i: usize = number(toks[0], ln, "row index")?;
        let j: usize = number(toks[1], ln, "column index")?;
        let v: f64 = number(toks[2], ln, "value")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(ln, format!("index ({i}, {j}) outside 1..={n}")));
        }
        if i > j {
            return Err(parse_err(ln, format!("entry ({i}, {j}) is below the diagonal")));
        }
        if !v.is_finite() {
            return Err(parse_err(ln, "value is not finite"));
        }
        if !seen.insert((i, j)) {
            return Err(parse_err(ln, format!("duplicate entry ({i}, {j})")));
        }
        q[(i - 1, j - 1)] = v;
        q[(j - 1, i - 1)] = v;
    }

    let mut c = DVector::zeros(n);
    if let Some((ln, l)) = lines.next() {
        let mut toks = l.split_whitespace();
        if toks.next() != Some("c") {
            return Err(parse_err(ln, "expected the cost line \"c v_1 … v_n\""));
        }
        let mut vals: Vec<f64> = toks.map(|t| number(t, ln, "cost")).collect::<Result<_>>()?;
        // Costs may continue on following lines.
        while vals.len() < n {
            let Some((ln2, l2)) = lines.next() else { break };
            for t in l2.split_whitespace() {
                vals.push(number(t, ln2, "cost")?);
            }
        }
        if vals.len() != n {
            return Err(parse_err(ln, format!("cost vector has {} values, expected {n}", vals.len())));
        }
        c = DVector::from_vec(vals);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected trailing content"));
    }
    Ok(SparseInstance { q, c })
}

pub fn load_sparse_instance(path: &Path) -> Result<SparseInstance> {
    parse_sparse_instance(&std::fs::read_to_string(path)?)
}

/// Writes the text format; values use the shortest round-tripping form.
pub fn write_sparse_instance(inst: &SparseInstance) -> String {
    let n = inst.q.nrows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in 0..=j {
            let v = inst.q[(i, j)];
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = format!("{n} {}\n", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {v:?}");
    }
    if inst.c.iter().any(|&v| v != 0.0) {
        out.push('c');
        for v in inst.c.iter() {
            let _ = write!(out, " {v:?}");
        }
        out.push('\n');
    }
    out
}
