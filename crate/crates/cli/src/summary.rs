//! Run summaries and artifact writing.

use crate::config::ScenarioKind;
use hypflow::report::{write_csv, write_table, CsvRecord};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub const SUMMARY_FORMAT: &str = "hypflow-summary";
pub const SUMMARY_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One checked property: `value` compared against `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Property {
    pub criterion: u8,
    pub name: String,
    pub value: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub pass: bool,
}

impl Property {
    pub fn at_most(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            comparison: Comparison::AtMost,
            threshold,
            pass: value <= threshold,
        }
    }

    pub fn at_least(criterion: u8, name: &str, value: f64, threshold: f64) -> Self {
        Self {
            criterion,
            name: name.into(),
            value,
            comparison: Comparison::AtLeast,
            threshold,
            pass: value >= threshold,
        }
    }

    /// A yes/no property recorded as 1 or 0 against a threshold of 1.
    pub fn holds(criterion: u8, name: &str, ok: bool) -> Self {
        Self::at_least(criterion, name, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn line(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        format!(
            "{} {}: {:.6e} {op} {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub format: &'static str,
    pub version: u32,
    pub scenario: ScenarioKind,
    pub passed: bool,
    pub properties: Vec<Property>,
    /// Informational scalars, sorted by name.
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Files written, relative to the output directory.
    pub artifacts: Vec<String>,
}

impl Summary {
    pub fn new(scenario: ScenarioKind) -> Self {
        Self {
            format: SUMMARY_FORMAT,
            version: SUMMARY_VERSION,
            scenario,
            passed: true,
            properties: Vec::new(),
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn check(&mut self, p: Property) {
        self.passed &= p.pass;
        self.properties.push(p);
    }

    pub fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.into(), v);
    }

    /// All properties of one criterion pass.
    pub fn criterion_passed(&self, c: u8) -> bool {
        let mut it = self.properties.iter().filter(|p| p.criterion == c).peekable();
        it.peek().is_some() && it.all(|p| p.pass)
    }
}

/// Writes files into the output directory and records them.
pub struct Artifacts {
    pub dir: PathBuf,
    pub written: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> std::io::Result<BufWriter<File>> {
        let path = self.dir.join(name);
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        self.written.push(name.into());
        Ok(BufWriter::new(File::create(path)?))
    }

    pub fn csv<R: CsvRecord>(&mut self, name: &str, rows: &[R]) -> hypflow::Result<()> {
        write_csv(self.create(name)?, rows)
    }

    pub fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> hypflow::Result<()> {
        write_table(self.create(name)?, header, rows)
    }

    pub fn map(&mut self, name: &str, u: &hypflow::MapField) -> hypflow::Result<()> {
        hypflow::fields::io::write_map(self.create(name)?, u)
    }

    pub fn bundle(&mut self, name: &str, b: &hypflow::gauge::GaugeBundle) -> hypflow::Result<()> {
        b.write_snapshot(self.create(name)?)
    }

    pub fn summary(&mut self, s: &mut Summary) -> std::io::Result<()> {
        self.written.push("summary.json".into());
        s.artifacts = self.written.clone();
        let text = serde_json::to_string_pretty(s).map_err(std::io::Error::other)?;
        std::fs::write(self.dir.join("summary.json"), text + "\n")
    }
}
