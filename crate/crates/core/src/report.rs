//! CSV tables: header row, comma-separated, floats at 17 significant digits.

use crate::error::{Error, Result};
use crate::flows::EnergyReport;
use crate::gauge::{EvolutionRow, GaugeResiduals};
use crate::kernels::RatioRow;
use std::io::Write;

/// A row type with a fixed column layout.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn values(&self) -> Vec<f64>;
}

/// `{:.16e}`, which round-trips every finite `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write, R: CsvRecord>(w: W, rows: &[R]) -> Result<()> {
    write_table(w, &R::header(), rows.iter().map(|r| r.values()))
}

/// Writes rows of floats under `header`.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let err = |e: csv::Error| Error::Parse(e.to_string());
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(err)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::InvalidParam {
                field: "row".into(),
                reason: format!("{} values for {} columns", r.len(), header.len()),
            });
        }
        out.write_record(r.iter().map(|x| format_float(*x))).map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

impl CsvRecord for EnergyReport {
    fn header() -> Vec<&'static str> {
        vec!["t", "E1", "E2", "E3", "tau_l2", "dissipation_residual"]
    }
    fn values(&self) -> Vec<f64> {
        vec![self.t, self.e1, self.e2, self.e3, self.tau_l2, self.dissipation_residual]
    }
}

/// Gauge residuals tagged with the heat time `s` or flow time `t` of the slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaggedResiduals {
    pub at: f64,
    pub residuals: GaugeResiduals,
}

impl CsvRecord for TaggedResiduals {
    fn header() -> Vec<&'static str> {
        vec!["s", "torsion", "commutator", "w_norm", "heat_tension", "At_limit"]
    }
    fn values(&self) -> Vec<f64> {
        let r = &self.residuals;
        vec![self.at, r.torsion, r.commutator, r.w_norm, r.heat_tension, r.at_limit]
    }
}

impl CsvRecord for EvolutionRow {
    fn header() -> Vec<&'static str> {
        vec!["s", "heat_tension_eq", "heat_tension_eq_flat", "heat_tension_scale", "w_eq", "w_scale"]
    }
    fn values(&self) -> Vec<f64> {
        vec![
            self.s,
            self.heat_tension_eq,
            self.heat_tension_eq_flat,
            self.heat_tension_scale,
            self.w_eq,
            self.w_scale,
        ]
    }
}

impl CsvRecord for RatioRow {
    fn header() -> Vec<&'static str> {
        vec!["s", "sup_norm", "l1_norm", "envelope", "ratio"]
    }
    fn values(&self) -> Vec<f64> {
        vec![self.s, self.sup_norm, self.l1_norm, self.envelope, self.ratio]
    }
}
