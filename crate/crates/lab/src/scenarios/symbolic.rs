//! Exact complexity counts, the coding of sub-stars along wandering orbits,
//! and the cylinder-join identity.

use hyperent::hyperspace::{endpoints, induced_apply, make_y_element};
use hyperent::maps::wandering_lattice;
use hyperent::symbolic::{
    code_set, complexity_enumerated, MAX_COVER, covering_windows, cylinder_join_count, cylinder_join_count_windows,
    entropy_from_complexity, shift, words_sampled,
};
use hyperent::{GrowthMode, StarPoint, SymbolWindow, SymbolicFamily};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{exponents, nonneg, range, Envelope};
use crate::error::{LabError, LabResult};
use crate::output::{FitRecord, Recorder};
use crate::scenarios::estimates::power_homeo;

fn check_tracks(tracks: &[usize], max: usize, at: &str) -> LabResult<()> {
    if tracks.is_empty() {
        return Err(LabError::config(at, "at least one track count is required"));
    }
    for (i, &k) in tracks.iter().enumerate() {
        range(k, 1, max, &format!("{at}/{i}"))?;
    }
    Ok(())
}

/// Enumerated counts for `m = 1..=max`, with a verdict against the closed form.
fn enumerate(rec: &mut Recorder, fam: SymbolicFamily, max: usize, rows: &mut Vec<(u64, BigUint, String, usize)>) -> LabResult<Vec<(u64, BigUint)>> {
    let counts: Vec<(u64, BigUint)> = (1..=max)
        .into_par_iter()
        .map(|m| complexity_enumerated(fam, m).map(|c| (m as u64, c)))
        .collect::<hyperent::Result<_>>()?;
    let bad: Vec<u64> = counts.iter().filter(|(m, c)| *c != fam.closed_form(*m as usize)).map(|(m, _)| *m).collect();
    let what = match fam {
        SymbolicFamily::AtMostOnePerTrack(_) => "(m+1)^k",
        SymbolicFamily::FullShift(_) => "2^(km)",
    };
    rec.verdict(
        &format!("enumerated_{}_{}", fam.name(), fam.tracks()),
        format!("complexity of {} with k = {} equals {what} for m = 1..={max}", fam.name(), fam.tracks()),
        serde_json::json!({ "mismatched_lengths": bad }),
        bad.is_empty(),
    );
    rows.extend(counts.iter().map(|(m, c)| (*m, c.clone(), fam.name().to_string(), fam.tracks())));
    Ok(counts)
}

/// Sampled counts over covering windows must equal the enumeration.
fn sampled(rec: &mut Recorder, fam: SymbolicFamily, max: usize, rows: &mut Vec<(u64, BigUint, String, usize)>) -> LabResult<()> {
    let mut bad = Vec::new();
    for m in 1..=max {
        let windows = covering_windows(fam, m)?;
        let got = words_sampled(&windows, m)?.count();
        let want = complexity_enumerated(fam, m)?;
        if BigUint::from(got) != want {
            bad.push(m);
        }
        rows.push((m as u64, BigUint::from(got), format!("{}_sampled", fam.name()), fam.tracks()));
    }
    rec.verdict(
        &format!("sampled_{}_{}", fam.name(), fam.tracks()),
        format!("sampled words over covering windows equal the enumeration for m = 1..={max}"),
        serde_json::json!({ "mismatched_lengths": bad }),
        bad.is_empty(),
    );
    Ok(())
}

// ----------------------------------------------------------- fullshift_code

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullShiftParams {
    pub tracks: Vec<usize>,
    pub max_length: usize,
    /// Sampled counts are checked while `k * m` stays at most 24.
    pub sampled_max_length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullShiftExpect {
    /// Allowed error of the fitted exponential rate against `k log 2`.
    pub rate_tolerance: f64,
}

pub type FullShiftConfig = Envelope<FullShiftParams, FullShiftExpect>;

pub fn validate_fullshift(c: &FullShiftConfig) -> LabResult<()> {
    let p = &c.params;
    check_tracks(&p.tracks, 16, "/params/tracks")?;
    range(p.max_length, 8, 4096, "/params/max_length")?;
    range(p.sampled_max_length, 0, p.max_length, "/params/sampled_max_length")?;
    if p.tracks.iter().any(|k| k * p.sampled_max_length > 24) {
        return Err(LabError::config("/params/sampled_max_length", "tracks * sampled_max_length must not exceed 24"));
    }
    nonneg(c.expect.rate_tolerance, "/expect/rate_tolerance")
}

pub fn run_fullshift(c: &FullShiftConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let mut rows = Vec::new();
    for &k in &p.tracks {
        let fam = SymbolicFamily::FullShift(k);
        let counts = enumerate(rec, fam, p.max_length, &mut rows)?;
        if p.sampled_max_length > 0 {
            sampled(rec, fam, p.sampled_max_length, &mut rows)?;
        }
        let fit = entropy_from_complexity(&counts, GrowthMode::Exponential)?;
        let want = k as f64 * std::f64::consts::LN_2;
        rec.fits.insert(format!("full_shift_{k}"), FitRecord::from_fit(&fit));
        rec.verdict(
            &format!("rate_full_shift_{k}"),
            format!("exponential rate within {} of {k} log 2", c.expect.rate_tolerance),
            serde_json::json!({ "rate": fit.slope, "target": want }),
            (fit.slope - want).abs() <= c.expect.rate_tolerance,
        );
    }
    rec.complexity_table("complexity.csv", &rows)
}

// -------------------------------------------------------- coding_crosscheck

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCoding {
    /// One power-map exponent per edge of the star.
    pub exponents: Vec<f64>,
    pub base: f64,
    /// Lattice radius; tips are drawn from orbit indices `-radius..=radius`.
    pub radius: usize,
    /// Longest word compared with the enumeration.
    pub max_length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthRange {
    pub from: usize,
    pub to: usize,
    pub step: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingParams {
    pub tracks: Vec<usize>,
    pub max_length: usize,
    pub sampled_max_length: usize,
    pub orbit: OrbitCoding,
    pub fit_tracks: Vec<usize>,
    pub fit_lengths: LengthRange,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingExpect {
    /// Allowed error of the fitted polynomial exponent against `k`.
    pub exponent_tolerance: f64,
}

pub type CodingConfig = Envelope<CodingParams, CodingExpect>;

pub fn validate_coding(c: &CodingConfig) -> LabResult<()> {
    let p = &c.params;
    check_tracks(&p.tracks, 16, "/params/tracks")?;
    range(p.max_length, 1, 4096, "/params/max_length")?;
    range(p.sampled_max_length, 0, 12, "/params/sampled_max_length")?;
    if p.tracks.iter().any(|&k| (2 * p.sampled_max_length).checked_pow(k as u32).is_none_or(|t| t > 1 << 24)) {
        return Err(LabError::config("/params/sampled_max_length", "covering collection would exceed 2^24 windows"));
    }
    let o = &p.orbit;
    range(o.exponents.len(), 2, 6, "/params/orbit/exponents")?;
    exponents(&o.exponents, o.exponents.len(), "/params/orbit/exponents")?;
    if !(o.base > 0.0 && o.base < 1.0) {
        return Err(LabError::config("/params/orbit/base", "base must lie strictly between 0 and 1"));
    }
    range(o.radius, 1, 12, "/params/orbit/radius")?;
    range(o.max_length, 1, 2 * o.radius, "/params/orbit/max_length")?;
    if (2 * o.radius + 2).checked_pow(o.exponents.len() as u32).is_none_or(|t| t > 1 << 22) {
        return Err(LabError::config("/params/orbit/radius", "orbit tip choices would exceed 2^22 sets"));
    }
    check_tracks(&p.fit_tracks, 16, "/params/fit_tracks")?;
    let r = &p.fit_lengths;
    range(r.step, 1, usize::MAX, "/params/fit_lengths/step")?;
    range(r.from, 1, r.to, "/params/fit_lengths/from")?;
    if (r.to - r.from) / r.step + 1 < 8 {
        return Err(LabError::config("/params/fit_lengths", "at least 8 word lengths are required"));
    }
    range(r.to, 1, 1 << 14, "/params/fit_lengths/to")?;
    nonneg(c.expect.exponent_tolerance, "/expect/exponent_tolerance")
}

pub fn run_coding(c: &CodingConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let mut rows = Vec::new();
    for &k in &p.tracks {
        let fam = SymbolicFamily::AtMostOnePerTrack(k);
        enumerate(rec, fam, p.max_length, &mut rows)?;
        if p.sampled_max_length > 0 {
            sampled(rec, fam, p.sampled_max_length, &mut rows)?;
        }
    }
    orbit_coding(rec, &p.orbit, &mut rows)?;
    rec.complexity_table("complexity.csv", &rows)?;

    let r = &p.fit_lengths;
    let mut fit_rows = Vec::new();
    for &k in &p.fit_tracks {
        let fam = SymbolicFamily::AtMostOnePerTrack(k);
        let counts: Vec<(u64, BigUint)> = (r.from..=r.to)
            .step_by(r.step)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|m| complexity_enumerated(fam, m).map(|c| (m as u64, c)))
            .collect::<hyperent::Result<_>>()?;
        let fit = entropy_from_complexity(&counts, GrowthMode::Polynomial)?;
        fit_rows.extend(counts.iter().map(|(m, c)| (*m, c.clone(), fam.name().to_string(), k)));
        rec.fits.insert(format!("at_most_one_{k}"), FitRecord::from_fit(&fit));
        rec.verdict(
            &format!("exponent_at_most_one_{k}"),
            format!("polynomial exponent within {} of {k}", c.expect.exponent_tolerance),
            serde_json::json!({ "exponent": fit.slope }),
            (fit.slope - k as f64).abs() <= c.expect.exponent_tolerance,
        );
    }
    rec.complexity_table("complexity_fit.csv", &fit_rows)
}

/// Codes the endpoint sets of every sub-star with tips on the orbit lattice
/// and compares the observed words with the one-per-track enumeration; the
/// same elements check that coding conjugates the induced map to the shift.
fn orbit_coding(rec: &mut Recorder, o: &OrbitCoding, rows: &mut Vec<(u64, BigUint, String, usize)>) -> LabResult<()> {
    let h = power_homeo(&o.exponents)?;
    let x = h.space().clone();
    let k = x.k();
    let base: Vec<StarPoint> = (0..k).map(|j| x.point(j, o.base * x.edge_length(j))).collect::<hyperent::Result<_>>()?;
    let lattice = wandering_lattice(&h, &base, o.radius)?;
    let r = o.radius as i64;
    let choices = (2 * r + 2) as usize;
    let total = choices.pow(k as u32);
    let mut windows: Vec<SymbolWindow> = Vec::new();
    let mut conjugacy_cases = 0usize;
    let mut conjugacy_failures = 0usize;
    for code in 0..total {
        let mut c = code;
        let mut tips: Vec<(usize, i64)> = Vec::new();
        for j in 0..k {
            let pick = c % choices;
            c /= choices;
            if pick > 0 {
                tips.push((j, pick as i64 - 1 - r));
            }
        }
        if tips.len() < 2 {
            continue;
        }
        let coords: Vec<(usize, f64)> = tips.iter().map(|&(j, n)| (j, lattice.point(j, n).t)).collect();
        let set = make_y_element(&x, &coords)?;
        let window = code_set(&lattice, &endpoints(&set), o.radius)?;
        let ones: usize = window.columns().iter().map(|c| c.count_ones() as usize).sum();
        if ones != tips.len() {
            return Err(LabError::Invariant(format!("coding of {tips:?} found {ones} orbit points")));
        }
        if tips.iter().all(|&(_, n)| n < r) {
            conjugacy_cases += 1;
            let image = code_set(&lattice, &endpoints(&induced_apply(&h, &set)), o.radius - 1)?;
            let moved = shift(&window, -1).truncate(-(r - 1), r - 1)?;
            if image != moved {
                conjugacy_failures += 1;
            }
        }
        windows.push(window);
    }
    rec.verdict(
        "coding_conjugacy",
        "code of the image equals the code shifted by one place, on every lattice sub-star",
        serde_json::json!({ "cases": conjugacy_cases, "failures": conjugacy_failures }),
        conjugacy_failures == 0,
    );
    let fam = SymbolicFamily::AtMostOnePerTrack(k);
    let mut bad = Vec::new();
    for m in 1..=o.max_length {
        let got = words_sampled(&windows, m)?.count();
        if BigUint::from(got) != complexity_enumerated(fam, m)? {
            bad.push(m);
        }
        rows.push((m as u64, BigUint::from(got), "coded_substars".to_string(), k));
    }
    rec.measure("coded_windows", windows.len());
    rec.verdict(
        "coded_words",
        format!("words of coded sub-stars equal the one-per-track enumeration for m = 1..={}", o.max_length),
        serde_json::json!({ "mismatched_lengths": bad }),
        bad.is_empty(),
    );
    Ok(())
}

// ----------------------------------------------------------- cylinder_check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderParams {
    pub tracks: Vec<usize>,
    pub max_radius: usize,
    pub max_depth: usize,
    /// Also count joins over covering windows while the collection has at
    /// most 2^16 windows.
    pub windows: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderExpect {
    /// Word length matched by the join count is `2 n + length_offset + l`.
    pub length_offset: usize,
}

pub type CylinderConfig = Envelope<CylinderParams, CylinderExpect>;

pub fn validate_cylinder(c: &CylinderConfig) -> LabResult<()> {
    let p = &c.params;
    check_tracks(&p.tracks, 8, "/params/tracks")?;
    range(p.max_depth, 1, 64, "/params/max_depth")?;
    for &k in &p.tracks {
        let cover = SymbolicFamily::FullShift(k).closed_form(2 * p.max_radius + 1);
        if cover > BigUint::from(MAX_COVER) {
            return Err(LabError::config("/params/max_radius", format!("full-shift cover for k = {k} exceeds {MAX_COVER} cylinders")));
        }
    }
    range(c.expect.length_offset, 0, 1, "/expect/length_offset")
}

pub fn run_cylinder(c: &CylinderConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let off = c.expect.length_offset;
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let mut window_mismatches = Vec::new();
    for &k in &p.tracks {
        for fam in [SymbolicFamily::AtMostOnePerTrack(k), SymbolicFamily::FullShift(k)] {
            for n in 0..=p.max_radius {
                for l in 1..=p.max_depth {
                    let join = cylinder_join_count(fam, n, l)?;
                    let want = complexity_enumerated(fam, 2 * n + off + l)?;
                    let other = complexity_enumerated(fam, 2 * n + (1 - off) + l)?;
                    if join != want {
                        mismatches.push(serde_json::json!({ "family": fam.name(), "k": k, "n": n, "l": l }));
                    }
                    let mut from_windows = String::new();
                    let len = 2 * n + l;
                    let coverable = match fam {
                        SymbolicFamily::FullShift(_) => k * len <= 16,
                        SymbolicFamily::AtMostOnePerTrack(_) => (2 * len).checked_pow(k as u32).is_some_and(|t| t <= 1 << 16),
                    };
                    if p.windows && coverable {
                        let w = covering_windows(fam, len)?;
                        let got = cylinder_join_count_windows(&w, n, l)?;
                        if BigUint::from(got) != join {
                            window_mismatches.push(serde_json::json!({ "family": fam.name(), "k": k, "n": n, "l": l }));
                        }
                        from_windows = got.to_string();
                    }
                    rows.push(vec![
                        fam.name().to_string(),
                        k.to_string(),
                        n.to_string(),
                        l.to_string(),
                        join.to_string(),
                        want.to_string(),
                        other.to_string(),
                        from_windows,
                    ]);
                }
            }
        }
    }
    let header = ["family", "k", "n", "l", "join", "complexity_matched", "complexity_other", "join_windows"];
    rec.table("cylinder.csv", &header, &rows)?;
    rec.verdict(
        "join_identity",
        format!("join count equals the complexity at length 2n+{}l", if off == 1 { "1+" } else { "" }),
        serde_json::json!({ "cells": rows.len(), "mismatches": mismatches }),
        mismatches.is_empty(),
    );
    if p.windows {
        rec.verdict(
            "join_windows",
            "join count over covering windows equals the family count",
            serde_json::json!({ "mismatches": window_mismatches }),
            window_mismatches.is_empty(),
        );
    }
    Ok(())
}
