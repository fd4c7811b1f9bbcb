//! Textual grid dump.
//!
//! Line 1 is a JSON header:
//! `{"format":"hypflow-grid","version":1,"grid":{...},"fields":["u1","u2"]}`.
//! Each following line holds one node in storage order: `i j v_1 ... v_m`,
//! with values printed as `{:.16e}` (17 significant digits), which parses
//! back to the identical `f64`.

use super::{Grid, MapField};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub const FORMAT: &str = "hypflow-grid";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    pub format: String,
    pub version: u32,
    pub grid: Grid,
    pub fields: Vec<String>,
}

/// Writes named nodal arrays, each of length `grid.len()`.
pub fn write_dump<W: Write>(mut w: W, grid: &Grid, names: &[&str], arrays: &[&[f64]]) -> Result<()> {
    if names.len() != arrays.len() || arrays.iter().any(|a| a.len() != grid.len()) {
        return Err(Error::GridMismatch("dump arrays do not match grid".into()));
    }
    let header = DumpHeader {
        format: FORMAT.into(),
        version: VERSION,
        grid: *grid,
        fields: names.iter().map(|s| s.to_string()).collect(),
    };
    let json = serde_json::to_string(&header).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(w, "{json}")?;
    let mut line = String::new();
    for k in 0..grid.len() {
        let (i, j) = grid.coords(k);
        line.clear();
        line.push_str(&format!("{i} {j}"));
        for a in arrays {
            line.push_str(&format!(" {:.16e}", a[k]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_dump<R: BufRead>(r: R) -> Result<(DumpHeader, Vec<Vec<f64>>)> {
    let mut lines = r.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty dump".into()))??;
    let header: DumpHeader =
        serde_json::from_str(&first).map_err(|e| Error::Parse(format!("header: {e}")))?;
    if header.format != FORMAT || header.version != VERSION {
        return Err(Error::Parse(format!(
            "unsupported dump {} v{}",
            header.format, header.version
        )));
    }
    header.grid.validate()?;
    let n = header.grid.len();
    let m = header.fields.len();
    let mut out = vec![vec![0.0; n]; m];
    let mut seen = 0usize;
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_ascii_whitespace();
        let mut idx = || -> Result<usize> {
            it.next()
                .ok_or_else(|| Error::Parse(format!("row {row}: missing index")))?
                .parse::<usize>()
                .map_err(|e| Error::Parse(format!("row {row}: {e}")))
        };
        let (i, j) = (idx()?, idx()?);
        if i >= header.grid.n1 || j >= header.grid.n2 {
            return Err(Error::Parse(format!("row {row}: node ({i}, {j}) outside grid")));
        }
        let k = header.grid.idx(i, j);
        for arr in out.iter_mut() {
            let v = it
                .next()
                .ok_or_else(|| Error::Parse(format!("row {row}: missing value")))?;
            arr[k] = v
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::Parse(format!("expected {n} nodes, found {seen}")));
    }
    Ok((header, out))
}

pub fn write_map<W: Write>(w: W, u: &MapField) -> Result<()> {
    write_dump(w, &u.grid, &["u1", "u2"], &[u.u1(), u.u2()])
}

pub fn read_map<R: BufRead>(r: R) -> Result<MapField> {
    let (h, mut arrays) = read_dump(r)?;
    if h.fields != ["u1", "u2"] {
        return Err(Error::Parse(format!("expected fields u1,u2, got {:?}", h.fields)));
    }
    let b = arrays.pop().unwrap();
    let a = arrays.pop().unwrap();
    MapField::from_components(h.grid, a, b)
}
