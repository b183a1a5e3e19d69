//! Run outputs: CSV tables, fit summaries and the run record.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use hyperent::entropy::{EntropyEstimate, Stability};
use hyperent::GrowthMode;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use crate::error::LabResult;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    /// The declared expectation, in words.
    pub expected: String,
    pub measured: Value,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRecord {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (u64, u64),
    pub mode: GrowthMode,
    pub epsilon: Option<f64>,
    pub stable: bool,
}

impl FitRecord {
    pub fn from_estimate(est: &EntropyEstimate) -> Self {
        let f = est.fit();
        FitRecord {
            slope: f.slope,
            intercept: f.intercept,
            r2: f.r2,
            window: f.window,
            mode: f.mode,
            epsilon: Some(est.epsilon()),
            stable: est.status == Stability::Stable,
        }
    }

    pub fn from_fit(f: &hyperent::GrowthFit) -> Self {
        FitRecord { slope: f.slope, intercept: f.intercept, r2: f.r2, window: f.window, mode: f.mode, epsilon: None, stable: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResult {
    pub scenario: String,
    pub citation: String,
    pub seed: u64,
    /// The validated config, expectations included, exactly as read.
    pub config: Value,
    pub tables: Vec<String>,
    pub fits: BTreeMap<String, FitRecord>,
    pub measurements: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
}

/// Collects tables and verdicts while a scenario runs.
pub struct Recorder {
    dir: PathBuf,
    seed: u64,
    pub tables: Vec<String>,
    pub fits: BTreeMap<String, FitRecord>,
    pub measurements: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
}

impl Recorder {
    pub fn new(dir: &Path, seed: u64) -> LabResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Recorder {
            dir: dir.to_path_buf(),
            seed,
            tables: Vec::new(),
            fits: BTreeMap::new(),
            measurements: BTreeMap::new(),
            verdicts: Vec::new(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn verdict(&mut self, name: &str, expected: impl Into<String>, measured: impl Serialize, pass: bool) {
        let measured = serde_json::to_value(measured).unwrap_or(Value::Null);
        self.verdicts.push(Verdict { name: name.to_string(), expected: expected.into(), measured, pass });
    }

    pub fn measure(&mut self, name: &str, value: impl Serialize) {
        self.measurements.insert(name.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    /// Writes every row of every per-epsilon fit as `n,epsilon,count,grid,seed`.
    pub fn sep_table(&mut self, file: &str, grid: &str, est: &EntropyEstimate) -> LabResult<()> {
        let mut w = csv::Writer::from_path(self.dir.join(file))?;
        w.write_record(["n", "epsilon", "count", "grid", "seed"])?;
        for f in &est.fits {
            for r in &f.fit.rows {
                w.write_record([
                    r.n.to_string(),
                    f.epsilon.to_string(),
                    r.count.to_string(),
                    grid.to_string(),
                    self.seed.to_string(),
                ])?;
            }
        }
        w.flush()?;
        self.tables.push(file.to_string());
        Ok(())
    }

    /// Writes `m,count,family,k` rows.
    pub fn complexity_table(&mut self, file: &str, rows: &[(u64, BigUint, String, usize)]) -> LabResult<()> {
        let mut w = csv::Writer::from_path(self.dir.join(file))?;
        w.write_record(["m", "count", "family", "k"])?;
        for (m, c, fam, k) in rows {
            w.write_record([m.to_string(), c.to_string(), fam.clone(), k.to_string()])?;
        }
        w.flush()?;
        self.tables.push(file.to_string());
        Ok(())
    }

    /// Writes a free-form table with the given header.
    pub fn table(&mut self, file: &str, header: &[&str], rows: &[Vec<String>]) -> LabResult<()> {
        let mut w = csv::Writer::from_path(self.dir.join(file))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.tables.push(file.to_string());
        Ok(())
    }

    pub fn estimate(&mut self, name: &str, file: &str, grid: &str, est: &EntropyEstimate) -> LabResult<()> {
        self.sep_table(file, grid, est)?;
        self.fits.insert(name.to_string(), FitRecord::from_estimate(est));
        Ok(())
    }

    /// Writes `fits.json` and `run.json` and returns the run record.
    pub fn finish(self, scenario: &str, citation: &str, config: Value) -> LabResult<RunResult> {
        let fits_text = serde_json::to_string_pretty(&self.fits)?;
        fs::write(self.dir.join("fits.json"), fits_text + "\n")?;
        let pass = self.verdicts.iter().all(|v| v.pass);
        let mut tables = self.tables;
        tables.sort();
        let result = RunResult {
            scenario: scenario.to_string(),
            citation: citation.to_string(),
            seed: self.seed,
            config,
            tables,
            fits: self.fits,
            measurements: self.measurements,
            verdicts: self.verdicts,
            pass,
        };
        fs::write(self.dir.join("run.json"), serde_json::to_string_pretty(&result)? + "\n")?;
        Ok(result)
    }
}
