//! Scenario configuration: one JSON document per run, parsed with the
//! offending location reported as a JSON pointer.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;

use crate::error::{LabError, LabResult};

/// Every config has the same envelope; `params` and `expect` are
/// scenario specific.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope<P, E> {
    pub seed: u64,
    pub params: P,
    pub expect: E,
}

pub fn parse<T: DeserializeOwned>(text: &str) -> LabResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| LabError::config(pointer(e.path()), e.inner().to_string()))
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// A decreasing list of scales and an increasing list of horizons.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub epsilons: Vec<f64>,
    pub n: Vec<usize>,
}

impl Schedule {
    pub fn validate(&self, at: &str) -> LabResult<()> {
        if self.epsilons.is_empty() {
            return Err(LabError::config(format!("{at}/epsilons"), "at least one epsilon is required"));
        }
        for (i, &e) in self.epsilons.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(LabError::config(format!("{at}/epsilons/{i}"), "epsilon must be positive"));
            }
            if i > 0 && e >= self.epsilons[i - 1] {
                return Err(LabError::config(format!("{at}/epsilons/{i}"), "epsilons must be strictly decreasing"));
            }
        }
        if self.n.len() < 3 {
            return Err(LabError::config(format!("{at}/n"), "at least three horizons are required for a fit"));
        }
        for (i, &n) in self.n.iter().enumerate() {
            if n == 0 {
                return Err(LabError::config(format!("{at}/n/{i}"), "horizons must be positive"));
            }
            if i > 0 && n <= self.n[i - 1] {
                return Err(LabError::config(format!("{at}/n/{i}"), "horizons must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn max_n(&self) -> usize {
        *self.n.last().unwrap_or(&0)
    }
}

/// Candidate index window for orbit-lattice families: a family used at
/// horizon `n` draws orbit indices from `-(n + back)` to `forward`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeWindow {
    /// Position of the base point `x^j` as a fraction of its edge.
    pub base: f64,
    pub back: i32,
    pub forward: i32,
}

impl LatticeWindow {
    pub fn validate(&self, at: &str) -> LabResult<()> {
        if !(self.base > 0.0 && self.base < 1.0) {
            return Err(LabError::config(format!("{at}/base"), "base must lie strictly between 0 and 1"));
        }
        if self.back < 0 {
            return Err(LabError::config(format!("{at}/back"), "must be nonnegative"));
        }
        if self.forward < 0 {
            return Err(LabError::config(format!("{at}/forward"), "must be nonnegative"));
        }
        Ok(())
    }

    pub fn lo(&self, horizon: usize) -> i32 {
        -(horizon as i32) - self.back
    }
}

/// An expected value with a symmetric tolerance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    pub value: f64,
    pub tolerance: f64,
}

impl Target {
    pub fn validate(&self, at: &str) -> LabResult<()> {
        if !self.value.is_finite() {
            return Err(LabError::config(format!("{at}/value"), "must be finite"));
        }
        nonneg(self.tolerance, &format!("{at}/tolerance"))
    }

    pub fn holds(&self, measured: f64) -> bool {
        (measured - self.value).abs() <= self.tolerance
    }
}

pub fn nonneg(x: f64, at: &str) -> LabResult<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LabError::config(at, "must be a nonnegative number"))
    }
}

pub fn positive(x: f64, at: &str) -> LabResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LabError::config(at, "must be a positive number"))
    }
}

/// Power-map exponents, one per edge.
pub fn exponents(ps: &[f64], k: usize, at: &str) -> LabResult<()> {
    if ps.len() != k {
        return Err(LabError::config(at, format!("expected {k} exponents, found {}", ps.len())));
    }
    for (i, &p) in ps.iter().enumerate() {
        if !(p > 0.0 && p.is_finite()) || p == 1.0 {
            return Err(LabError::config(format!("{at}/{i}"), "exponent must be positive and different from 1"));
        }
    }
    Ok(())
}

pub fn range(x: usize, lo: usize, hi: usize, at: &str) -> LabResult<()> {
    if (lo..=hi).contains(&x) {
        Ok(())
    } else {
        Err(LabError::config(at, format!("must lie in {lo}..={hi}")))
    }
}
