//! Least-squares growth fits of counts against a size parameter.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// `log count` against `n`: a topological entropy rate.
    Exponential,
    /// `log count` against `log n`: a polynomial entropy exponent.
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
}

fn decimal<S: Serializer>(c: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_str_radix(10))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub rows: Vec<GrowthRow>,
    pub mode: GrowthMode,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// First and last `n` of the rows used by the fit.
    pub window: (u64, u64),
}

/// The fit summary written next to count tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub window: (u64, u64),
    pub mode: GrowthMode,
}

impl GrowthFit {
    pub fn summary(&self) -> FitSummary {
        FitSummary { slope: self.slope, intercept: self.intercept, r2: self.r2, window: self.window, mode: self.mode }
    }
}

/// Natural logarithm of an arbitrary-precision integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 64;
    let top: u64 = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Ordinary least squares `y = slope * x + intercept`; returns `(slope, intercept, r2)`.
/// Constant `y` fits perfectly, so its R² is 1.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return domain(format!("need at least two paired samples, got {} and {}", xs.len(), ys.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return domain("all x values coincide");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok((slope, intercept, r2))
}

/// Fit the upper half (by row count) of `rows`, sorted by `n`.
pub fn fit_rows(mut rows: Vec<GrowthRow>, mode: GrowthMode) -> Result<GrowthFit> {
    rows.sort_by_key(|r| r.n);
    if rows.iter().any(|r| r.count == BigUint::default()) {
        return domain("counts must be positive");
    }
    if rows.iter().any(|r| r.n == 0) && mode == GrowthMode::Polynomial {
        return domain("a polynomial fit needs n >= 1");
    }
    let upper = &rows[rows.len() / 2..];
    if upper.len() < 2 {
        return domain(format!("{} rows leave fewer than two in the upper half", rows.len()));
    }
    let xs: Vec<f64> = upper
        .iter()
        .map(|r| match mode {
            GrowthMode::Exponential => r.n as f64,
            GrowthMode::Polynomial => (r.n as f64).ln(),
        })
        .collect();
    let ys: Vec<f64> = upper.iter().map(|r| ln_big(&r.count)).collect();
    let (slope, intercept, r2) = least_squares(&xs, &ys)?;
    let window = (upper[0].n, upper[upper.len() - 1].n);
    Ok(GrowthFit { rows, mode, slope, intercept, r2, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_big_values() {
        assert_eq!(ln_big(&BigUint::from(1u32)), 0.0);
        let big = BigUint::from(1u32) << 300usize;
        assert!((ln_big(&big) - 300.0 * std::f64::consts::LN_2).abs() < 1e-9);
        let odd = BigUint::from(3u32).pow(100);
        assert!((ln_big(&odd) - 100.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (s, c, r2) = least_squares(&xs, &ys).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
        let (s, _, r2) = least_squares(&xs, &[4.0; 4]).unwrap();
        assert_eq!((s, r2), (0.0, 1.0));
        assert!(least_squares(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn fit_uses_upper_half() {
        // the first rows are off the power law and must be ignored
        let rows: Vec<GrowthRow> = [(1u64, 50u64), (2, 50), (4, 16), (8, 64), (16, 256), (32, 1024)]
            .iter()
            .map(|&(n, c)| GrowthRow { n, epsilon: None, count: BigUint::from(c) })
            .collect();
        let fit = fit_rows(rows, GrowthMode::Polynomial).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert_eq!(fit.window, (8, 32));
    }

    #[test]
    fn zero_counts_rejected() {
        let rows = vec![
            GrowthRow { n: 1, epsilon: None, count: BigUint::from(0u32) },
            GrowthRow { n: 2, epsilon: None, count: BigUint::from(1u32) },
        ];
        assert!(fit_rows(rows, GrowthMode::Exponential).is_err());
    }
}
