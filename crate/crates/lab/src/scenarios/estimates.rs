//! Separated-set estimates of polynomial entropy on orbit-lattice and
//! uniform-grid candidate families.

use hyperent::entropy::{estimate_entropy, greedy_separated, product_power_check, EntropyEstimate};
use hyperent::families::{
    grid_arc_unions, grid_arcs, grid_point_sets, grid_points, grid_y_elements, lattice_arc_unions, lattice_arcs,
    lattice_point_sets, lattice_points, lattice_y_elements,
};
use hyperent::maps::orbit_table;
use hyperent::{ArcUnion, EdgeMap, GrowthMode, HyperSystem, LatticeSet, LatticeSystem, PointSystem, StarHomeo, StarSpace, Subcontinuum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{exponents, positive, range, Envelope, LatticeWindow, Schedule, Target};
use crate::error::{LabError, LabResult};
use crate::output::Recorder;

const POLY: GrowthMode = GrowthMode::Polynomial;

/// Orbit-lattice families are enumerated in full, so their size is capped.
const MAX_CANDIDATES: f64 = 4.0e6;

pub fn power_homeo(ps: &[f64]) -> LabResult<StarHomeo> {
    let x = StarSpace::uniform(ps.len())?;
    let maps = ps.iter().map(|&p| EdgeMap::power(p)).collect::<hyperent::Result<Vec<_>>>()?;
    Ok(StarHomeo::fixing_edges(x, maps)?)
}

/// A lattice system whose orbit table covers every candidate used up to
/// `horizon` (scaled horizons included) and `steps` forward iterates.
fn lattice_system(h: &StarHomeo, win: &LatticeWindow, horizon: usize, steps: usize) -> LabResult<LatticeSystem> {
    let x = h.space().clone();
    let base = (0..x.k()).map(|j| x.point(j, win.base * x.edge_length(j))).collect::<hyperent::Result<Vec<_>>>()?;
    let lo = win.lo(horizon) as i64 - 1;
    let hi = win.forward as i64 + steps as i64 + 1;
    Ok(LatticeSystem::new(x, orbit_table(h, &base, lo, hi)?)?)
}

fn width(win: &LatticeWindow, horizon: usize) -> f64 {
    (horizon as i64 + win.back as i64 + win.forward as i64 + 1) as f64
}

fn too_many(at: &str, size: f64) -> LabResult<()> {
    if size > MAX_CANDIDATES {
        return Err(LabError::config(at, format!("candidate family of about {size:.0} elements exceeds {MAX_CANDIDATES:.0}")));
    }
    Ok(())
}

fn choose(n: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i as f64) / (i + 1) as f64)
}

/// A uniform-grid comparison run; it is reported, never judged.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uniform {
    pub resolution: usize,
    pub schedule: Schedule,
}

impl Uniform {
    fn validate(&self, at: &str, max_resolution: usize) -> LabResult<()> {
        range(self.resolution, 1, max_resolution, &format!("{at}/resolution"))?;
        self.schedule.validate(&format!("{at}/schedule"))
    }
}

fn judge(rec: &mut Recorder, name: &str, what: &str, est: &EntropyEstimate, t: &Target) {
    let slope = est.slope();
    rec.verdict(
        name,
        format!("{what}: stable fit with exponent within {} ± {}", t.value, t.tolerance),
        serde_json::json!({ "slope": slope, "epsilon": est.epsilon(), "stable": est.is_stable() }),
        est.is_stable() && t.holds(slope),
    );
}

// ---------------------------------------------------------------- star_hpol

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarParams {
    /// One power-map exponent per edge.
    pub exponents: Vec<f64>,
    pub lattice: LatticeWindow,
    pub schedule: Schedule,
    #[serde(default)]
    pub uniform: Option<Uniform>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarExpect {
    pub exponent: Target,
}

pub type StarConfig = Envelope<StarParams, StarExpect>;

pub fn validate_star(c: &StarConfig) -> LabResult<()> {
    let p = &c.params;
    range(p.exponents.len(), 2, 6, "/params/exponents")?;
    exponents(&p.exponents, p.exponents.len(), "/params/exponents")?;
    p.lattice.validate("/params/lattice")?;
    p.schedule.validate("/params/schedule")?;
    too_many("/params/schedule/n", (width(&p.lattice, p.schedule.max_n()) + 1.0).powi(p.exponents.len() as i32))?;
    if let Some(u) = &p.uniform {
        u.validate("/params/uniform", 64)?;
        too_many("/params/uniform/resolution", (u.resolution as f64 + 1.0).powi(p.exponents.len() as i32))?;
    }
    c.expect.exponent.validate("/expect/exponent")
}

pub fn run_star(c: &StarConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let k = p.exponents.len();
    let h = power_homeo(&p.exponents)?;
    let sys = lattice_system(&h, &p.lattice, p.schedule.max_n(), p.schedule.max_n())?;
    let win = &p.lattice;
    let gen = |hz: usize| lattice_y_elements(k, win.lo(hz), win.forward).expect("validated size");
    let est = estimate_entropy(&sys, &gen, &p.schedule.epsilons, &p.schedule.n, POLY)?;
    rec.estimate("y_lattice", "sep_y_lattice.csv", "lattice", &est)?;
    judge(rec, "exponent", "induced map on Y, orbit-lattice candidates", &est, &c.expect.exponent);

    if let Some(u) = &p.uniform {
        let hs = HyperSystem::<Subcontinuum>::new(h.clone());
        let cands = grid_y_elements(h.space(), u.resolution)?;
        let est = estimate_entropy(&hs, &|_| cands.clone(), &u.schedule.epsilons, &u.schedule.n, POLY)?;
        rec.estimate("y_uniform", "sep_y_uniform.csv", "uniform", &est)?;
    }
    Ok(())
}

// --------------------------------------------------------------- interval_C

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalParams {
    /// Exponent `p` of the map `x ↦ x^p` on `[0, 1]`.
    pub exponent: f64,
    pub lattice: LatticeWindow,
    pub points: Schedule,
    pub arcs: Schedule,
    #[serde(default)]
    pub uniform: Option<IntervalUniform>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalUniform {
    pub resolution: usize,
    pub points: Schedule,
    pub arcs: Schedule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalExpect {
    pub points: Target,
    pub arcs: Target,
}

pub type IntervalConfig = Envelope<IntervalParams, IntervalExpect>;

pub fn validate_interval(c: &IntervalConfig) -> LabResult<()> {
    let p = &c.params;
    exponents(&[p.exponent], 1, "/params/exponent")?;
    p.lattice.validate("/params/lattice")?;
    p.points.validate("/params/points")?;
    p.arcs.validate("/params/arcs")?;
    too_many("/params/arcs/n", choose(width(&p.lattice, p.arcs.max_n()) + 1.0, 2))?;
    if let Some(u) = &p.uniform {
        range(u.resolution, 1, 2000, "/params/uniform/resolution")?;
        u.points.validate("/params/uniform/points")?;
        u.arcs.validate("/params/uniform/arcs")?;
    }
    c.expect.points.validate("/expect/points")?;
    c.expect.arcs.validate("/expect/arcs")
}

pub fn run_interval(c: &IntervalConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let h = power_homeo(&[p.exponent])?;
    let horizon = p.points.max_n().max(p.arcs.max_n());
    let sys = lattice_system(&h, &p.lattice, horizon, horizon)?;
    let win = &p.lattice;

    let gen = |hz: usize| lattice_points(1, win.lo(hz), win.forward).expect("validated range");
    let est = estimate_entropy(&sys, &gen, &p.points.epsilons, &p.points.n, POLY)?;
    rec.estimate("points_lattice", "sep_points_lattice.csv", "lattice", &est)?;
    judge(rec, "points_exponent", "map on the interval, orbit-lattice points", &est, &c.expect.points);

    let gen = |hz: usize| lattice_arcs(0, win.lo(hz), win.forward).expect("validated range");
    let est = estimate_entropy(&sys, &gen, &p.arcs.epsilons, &p.arcs.n, POLY)?;
    rec.estimate("arcs_lattice", "sep_arcs_lattice.csv", "lattice", &est)?;
    judge(rec, "arcs_exponent", "induced map on subcontinua, orbit-lattice arcs", &est, &c.expect.arcs);

    if let Some(u) = &p.uniform {
        let ps = PointSystem { h: h.clone() };
        let pts = grid_points(h.space(), u.resolution)?;
        let est = estimate_entropy(&ps, &|_| pts.clone(), &u.points.epsilons, &u.points.n, POLY)?;
        rec.estimate("points_uniform", "sep_points_uniform.csv", "uniform", &est)?;
        let hs = HyperSystem::<Subcontinuum>::new(h.clone());
        let arcs = grid_arcs(h.space(), u.resolution)?;
        let est = estimate_entropy(&hs, &|_| arcs.clone(), &u.arcs.epsilons, &u.arcs.n, POLY)?;
        rec.estimate("arcs_uniform", "sep_arcs_uniform.csv", "uniform", &est)?;
    }
    Ok(())
}

// -------------------------------------------------------------- interval_Cn

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnParams {
    /// Maximal number of components `n` of the sets in `C_n`.
    pub components: usize,
    pub exponent: f64,
    pub lattice: LatticeWindow,
    /// Schedule for unions of at most `components` arcs.
    pub unions: Schedule,
    /// Schedule for sets of at most `2 * components` points.
    pub points: Schedule,
    /// Cells comparing arc unions with their boundary sets.
    #[serde(default)]
    pub factor: Option<Schedule>,
    #[serde(default)]
    pub uniform: Option<Uniform>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnExpect {
    pub unions: Target,
    pub points: Target,
    /// Lipschitz constant of the boundary map for the factor inequality.
    #[serde(default)]
    pub factor_lipschitz: Option<f64>,
}

pub type CnConfig = Envelope<CnParams, CnExpect>;

pub fn validate_cn(c: &CnConfig) -> LabResult<()> {
    let p = &c.params;
    range(p.components, 1, 3, "/params/components")?;
    exponents(&[p.exponent], 1, "/params/exponent")?;
    p.lattice.validate("/params/lattice")?;
    p.unions.validate("/params/unions")?;
    p.points.validate("/params/points")?;
    let w = width(&p.lattice, p.unions.max_n());
    too_many("/params/unions/n", choose(w + p.components as f64, 2 * p.components as u32))?;
    let w = width(&p.lattice, p.points.max_n());
    too_many("/params/points/n", choose(w + 1.0, 2 * p.components as u32))?;
    if let Some(f) = &p.factor {
        f.validate("/params/factor")?;
        too_many("/params/factor/n", choose(width(&p.lattice, f.max_n()) + p.components as f64, 2 * p.components as u32))?;
        if c.expect.factor_lipschitz.is_none() {
            return Err(LabError::config("/expect/factor_lipschitz", "required when factor cells are requested"));
        }
    }
    if let Some(l) = c.expect.factor_lipschitz {
        positive(l, "/expect/factor_lipschitz")?;
    }
    if let Some(u) = &p.uniform {
        u.validate("/params/uniform", 64)?;
    }
    c.expect.unions.validate("/expect/unions")?;
    c.expect.points.validate("/expect/points")
}

pub fn run_cn(c: &CnConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let n = p.components;
    let h = power_homeo(&[p.exponent])?;
    let horizon = p.unions.max_n().max(p.points.max_n()).max(p.factor.as_ref().map_or(0, |f| f.max_n()));
    let sys = lattice_system(&h, &p.lattice, horizon, horizon)?;
    let win = &p.lattice;

    let gen = |hz: usize| lattice_arc_unions(win.lo(hz), win.forward, n).expect("validated range");
    let est = estimate_entropy(&sys, &gen, &p.unions.epsilons, &p.unions.n, POLY)?;
    rec.estimate("unions_lattice", "sep_unions_lattice.csv", "lattice", &est)?;
    judge(rec, "unions_exponent", "induced map on C_n, orbit-lattice arc unions", &est, &c.expect.unions);

    let gen = |hz: usize| lattice_point_sets(1, win.lo(hz), win.forward, 2 * n).expect("validated range");
    let est = estimate_entropy(&sys, &gen, &p.points.epsilons, &p.points.n, POLY)?;
    rec.estimate("points_lattice", "sep_point_sets_lattice.csv", "lattice", &est)?;
    judge(rec, "points_exponent", "induced map on F_2n, orbit-lattice point sets", &est, &c.expect.points);

    if let (Some(f), Some(l)) = (&p.factor, c.expect.factor_lipschitz) {
        factor_cells(rec, &sys, win, n, f, l)?;
    }

    if let Some(u) = &p.uniform {
        let hs = HyperSystem::<ArcUnion>::new(h.clone());
        let cands = grid_arc_unions(u.resolution, n)?;
        let est = estimate_entropy(&hs, &|_| cands.clone(), &u.schedule.epsilons, &u.schedule.n, POLY)?;
        rec.estimate("unions_uniform", "sep_unions_uniform.csv", "uniform", &est)?;
        let hs = HyperSystem::<hyperent::FinitePointSet>::new(h.clone());
        let cands = grid_point_sets(u.resolution, 2 * n)?;
        let est = estimate_entropy(&hs, &|_| cands.clone(), &u.schedule.epsilons, &u.schedule.n, POLY)?;
        rec.estimate("points_uniform", "sep_point_sets_uniform.csv", "uniform", &est)?;
    }
    Ok(())
}

/// An `L`-Lipschitz factor cannot separate more than its source: the
/// images of a set that is `(n, eps)`-separated downstream come from a set
/// `(n, eps / L)`-separated upstream. Compared here on greedy counts over
/// the same candidate list and its boundary images.
fn factor_cells(rec: &mut Recorder, sys: &LatticeSystem, win: &LatticeWindow, n: usize, f: &Schedule, l: f64) -> LabResult<()> {
    let cells: Vec<(f64, usize)> = f.epsilons.iter().flat_map(|&e| f.n.iter().map(move |&h| (e, h))).collect();
    let counts: Vec<LabResult<(usize, usize)>> = cells
        .par_iter()
        .map(|&(eps, hz)| {
            let up: Vec<LatticeSet> = lattice_arc_unions(win.lo(hz), win.forward, n)?;
            let down: Vec<LatticeSet> = up.iter().map(|s| s.boundary()).collect::<hyperent::Result<_>>()?;
            let a = greedy_separated(sys, &up, hz, eps / l)?.count();
            let b = greedy_separated(sys, &down, hz, eps)?.count();
            Ok((a, b))
        })
        .collect();
    let mut rows = Vec::with_capacity(cells.len());
    let mut failures = Vec::new();
    for (&(eps, hz), c) in cells.iter().zip(counts) {
        let (up, down) = c?;
        if up < down {
            failures.push(serde_json::json!({ "n": hz, "epsilon": eps, "upstream": up, "downstream": down }));
        }
        rows.push(vec![hz.to_string(), eps.to_string(), up.to_string(), down.to_string(), (up >= down).to_string()]);
    }
    rec.table("factor_cells.csv", &["n", "epsilon", "upstream", "downstream", "holds"], &rows)?;
    rec.verdict(
        "factor_inequality",
        format!("boundary map with Lipschitz constant {l}: upstream count >= downstream count in every cell"),
        serde_json::json!({ "cells": cells.len(), "violations": failures }),
        failures.is_empty(),
    );
    Ok(())
}

// ------------------------------------------------------------ product_power

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFamily {
    Points,
    Arcs,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductPowerParams {
    pub exponent: f64,
    pub family: BaseFamily,
    pub lattice: LatticeWindow,
    /// Number `k` of factors in the product system.
    pub factors: usize,
    /// The power `m` of the map.
    pub power: usize,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductPowerExpect {
    /// Tolerance on `exponent(product) - factors * exponent(base)`.
    pub product_tolerance: f64,
    /// Tolerance on `exponent(power) - exponent(base)`.
    pub power_tolerance: f64,
}

pub type ProductPowerConfig = Envelope<ProductPowerParams, ProductPowerExpect>;

pub fn validate_product_power(c: &ProductPowerConfig) -> LabResult<()> {
    let p = &c.params;
    exponents(&[p.exponent], 1, "/params/exponent")?;
    p.lattice.validate("/params/lattice")?;
    range(p.factors, 1, 3, "/params/factors")?;
    range(p.power, 1, 8, "/params/power")?;
    p.schedule.validate("/params/schedule")?;
    let w = width(&p.lattice, p.schedule.max_n());
    let base = match p.family {
        BaseFamily::Points => w,
        BaseFamily::Arcs => choose(w + 1.0, 2),
    };
    too_many("/params/schedule/n", base.powi(p.factors as i32))?;
    too_many("/params/power", match p.family {
        BaseFamily::Points => width(&p.lattice, p.schedule.max_n() * p.power),
        BaseFamily::Arcs => choose(width(&p.lattice, p.schedule.max_n() * p.power) + 1.0, 2),
    })?;
    config_nonneg(c.expect.product_tolerance, "/expect/product_tolerance")?;
    config_nonneg(c.expect.power_tolerance, "/expect/power_tolerance")
}

fn config_nonneg(x: f64, at: &str) -> LabResult<()> {
    crate::config::nonneg(x, at)
}

pub fn run_product_power(c: &ProductPowerConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let h = power_homeo(&[p.exponent])?;
    let horizon = p.schedule.max_n() * p.power;
    let sys = lattice_system(&h, &p.lattice, horizon, horizon)?;
    let win = &p.lattice;
    let family = p.family;
    let gen = move |hz: usize| match family {
        BaseFamily::Points => lattice_points(1, win.lo(hz), win.forward).expect("validated range"),
        BaseFamily::Arcs => lattice_arcs(0, win.lo(hz), win.forward).expect("validated range"),
    };
    let r = product_power_check(&sys, &gen, p.factors, p.power, &p.schedule.epsilons, &p.schedule.n, POLY)?;
    rec.estimate("base", "sep_base.csv", "lattice", &r.base)?;
    rec.estimate("product", "sep_product.csv", "lattice", &r.product)?;
    rec.estimate("power", "sep_power.csv", "lattice", &r.power)?;
    rec.measure("product_ratio", r.product_ratio);
    rec.measure("power_ratio", r.power_ratio);
    let (b, pr, pw) = (r.base.slope(), r.product.slope(), r.power.slope());
    rec.verdict(
        "stable",
        "base, product and power fits all pass the R² gate",
        serde_json::json!({ "base": r.base.is_stable(), "product": r.product.is_stable(), "power": r.power.is_stable() }),
        r.all_stable(),
    );
    let k = p.factors as f64;
    rec.verdict(
        "product_exponent",
        format!("exponent of the {}-fold product within {} of {} times the base exponent", p.factors, c.expect.product_tolerance, p.factors),
        serde_json::json!({ "base": b, "product": pr }),
        (pr - k * b).abs() <= c.expect.product_tolerance,
    );
    rec.verdict(
        "power_exponent",
        format!("exponent of the {}-th power within {} of the base exponent", p.power, c.expect.power_tolerance),
        serde_json::json!({ "base": b, "power": pw }),
        (pw - b).abs() <= c.expect.power_tolerance,
    );
    Ok(())
}
