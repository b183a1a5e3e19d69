//! Structural identities on random samples: conjugacy of the endpoint and
//! boundary maps, their metric distortion, the closed-form Hausdorff
//! distance against a dense oracle, and the identity map.

use hyperent::hyperspace::{boundary, classify_c2, endpoints, hausdorff, induced_apply, SegmentSet};
use hyperent::{C2Class, FinitePointSet, StarHomeo, StarSpace, Subcontinuum};
use serde::{Deserialize, Serialize};

use crate::config::{exponents, nonneg, positive, range, Envelope};
use crate::error::{LabError, LabResult};
use crate::oracle;
use crate::output::Recorder;
use crate::sample::{self, SeededRng};
use crate::scenarios::estimates::power_homeo;
use hyperent::EdgeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub conjugacy: usize,
    pub isometry_pairs: usize,
    pub distortion_pairs: usize,
    pub oracle_pairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryParams {
    pub edge_lengths: Vec<f64>,
    /// Power-map exponents per edge of the star; the first one also drives
    /// the interval map.
    pub exponents: Vec<f64>,
    pub samples: Samples,
    pub oracle_resolution: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsometryExpect {
    /// Allowed `|d_H(K, K') - d_H(∂K, ∂K')|` inside class `A`.
    pub isometry_tolerance: f64,
    /// Allowed gap between closed form and oracle.
    pub oracle_tolerance: f64,
    /// Bound on the distortion of the endpoint map in either direction,
    /// for pairs reaching the same edges.
    pub distortion_bound: f64,
}

pub type IsometryConfig = Envelope<IsometryParams, IsometryExpect>;

pub fn validate_isometry(c: &IsometryConfig) -> LabResult<()> {
    let p = &c.params;
    range(p.edge_lengths.len(), 2, 8, "/params/edge_lengths")?;
    for (i, &l) in p.edge_lengths.iter().enumerate() {
        positive(l, &format!("/params/edge_lengths/{i}"))?;
    }
    if p.edge_lengths[0] < 1.0 {
        return Err(LabError::config("/params/edge_lengths/0", "edge 0 must contain [0, 1] for arc unions"));
    }
    exponents(&p.exponents, p.edge_lengths.len(), "/params/exponents")?;
    let s = &p.samples;
    range(s.conjugacy, 1, 1_000_000, "/params/samples/conjugacy")?;
    range(s.isometry_pairs, 1, 1_000_000, "/params/samples/isometry_pairs")?;
    range(s.distortion_pairs, 1, 1_000_000, "/params/samples/distortion_pairs")?;
    range(s.oracle_pairs, 1, 100_000, "/params/samples/oracle_pairs")?;
    if !(p.oracle_resolution >= 1e-6 && p.oracle_resolution <= 0.1) {
        return Err(LabError::config("/params/oracle_resolution", "must lie in [1e-6, 0.1]"));
    }
    nonneg(c.expect.isometry_tolerance, "/expect/isometry_tolerance")?;
    nonneg(c.expect.oracle_tolerance, "/expect/oracle_tolerance")?;
    positive(c.expect.distortion_bound, "/expect/distortion_bound")
}

fn star_homeo(p: &IsometryParams) -> LabResult<StarHomeo> {
    let x = StarSpace::new(p.edge_lengths.clone())?;
    let maps = p.exponents.iter().map(|&e| EdgeMap::power(e)).collect::<hyperent::Result<Vec<_>>>()?;
    Ok(StarHomeo::fixing_edges(x, maps)?)
}

fn image(h: &StarHomeo, s: &FinitePointSet) -> LabResult<FinitePointSet> {
    Ok(FinitePointSet::new(h.space(), s.points().iter().map(|p| h.apply(p)))?)
}

pub fn run_isometry(c: &IsometryConfig, rec: &mut Recorder) -> LabResult<()> {
    let p = &c.params;
    let e = &c.expect;
    let h = star_homeo(p)?;
    let x = h.space().clone();
    let hi = power_homeo(&p.exponents[..1])?;
    let interval = hi.space().clone();
    let mut rng = sample::rng(rec.seed());

    // endpoint map on Y commutes with the maps
    let mut bad = 0;
    for _ in 0..p.samples.conjugacy {
        let k = sample::y_element(&mut rng, &x);
        if endpoints(&induced_apply(&h, &k)) != image(&h, &endpoints(&k))? {
            bad += 1;
        }
    }
    rec.verdict(
        "endpoint_conjugacy",
        "endpoints of the image equal the image of the endpoints, exactly",
        serde_json::json!({ "cases": p.samples.conjugacy, "failures": bad }),
        bad == 0,
    );

    // boundary map on C_2 commutes with the maps
    let mut bad = 0;
    for _ in 0..p.samples.conjugacy {
        let k = sample::c2_element(&mut rng);
        if boundary(&induced_apply(&hi, &k)) != image(&hi, &boundary(&k))? {
            bad += 1;
        }
    }
    rec.verdict(
        "boundary_conjugacy",
        "boundary of the image equals the image of the boundary, exactly",
        serde_json::json!({ "cases": p.samples.conjugacy, "failures": bad }),
        bad == 0,
    );

    boundary_isometry(rec, &mut rng, &interval, p.samples.isometry_pairs, e.isometry_tolerance)?;
    endpoint_distortion(rec, &mut rng, &x, p.samples.distortion_pairs, e.distortion_bound);
    hausdorff_oracle(rec, &mut rng, &x, p.samples.oracle_pairs, p.oracle_resolution, e.oracle_tolerance);

    // the identity induces an isometry
    let id = StarHomeo::identity(x.clone());
    let mut bad = 0;
    for _ in 0..p.samples.conjugacy {
        let (a, b) = (sample::subcontinuum(&mut rng, &x), sample::subcontinuum(&mut rng, &x));
        if hausdorff(&x, &induced_apply(&id, &a), &induced_apply(&id, &b)) != hausdorff(&x, &a, &b) {
            bad += 1;
        }
    }
    rec.verdict(
        "identity_isometry",
        "the identity leaves every Hausdorff distance unchanged, exactly",
        serde_json::json!({ "cases": p.samples.conjugacy, "failures": bad }),
        bad == 0,
    );
    Ok(())
}

/// Inside class `A` the boundary map is claimed to be an isometry.
fn boundary_isometry(rec: &mut Recorder, rng: &mut SeededRng, i: &StarSpace, pairs: usize, tol: f64) -> LabResult<()> {
    let mut worst = 0.0f64;
    let mut witness = None;
    let mut over = 0usize;
    for _ in 0..pairs {
        let (k, kk) = (sample::class_a(rng), sample::class_a(rng));
        if classify_c2(&k)? != C2Class::A || classify_c2(&kk)? != C2Class::A {
            return Err(LabError::Invariant("class A sampler left class A".into()));
        }
        let gap = (hausdorff(i, &k, &kk) - hausdorff(i, &boundary(&k), &boundary(&kk))).abs();
        if gap > tol {
            over += 1;
        }
        if gap > worst {
            worst = gap;
            witness = Some(serde_json::json!({ "first": k.arcs(), "second": kk.arcs() }));
        }
    }
    rec.verdict(
        "boundary_isometry_on_A",
        format!("|d_H(K,K') - d_H(bd K, bd K')| <= {tol} for pairs in class A"),
        serde_json::json!({ "pairs": pairs, "violations": over, "max_gap": worst, "worst_pair": witness }),
        over == 0,
    );
    Ok(())
}

/// Distortion of the endpoint map on `Y`, judged on pairs reaching the same
/// edges and reported for arbitrary pairs.
fn endpoint_distortion(rec: &mut Recorder, rng: &mut SeededRng, x: &StarSpace, pairs: usize, bound: f64) {
    let ratio = |a: &Subcontinuum, b: &Subcontinuum| {
        let d = hausdorff(x, a, b);
        let de = hausdorff(x, &endpoints(a), &endpoints(b));
        if d == 0.0 || de == 0.0 {
            return if d == de { 1.0 } else { f64::INFINITY };
        }
        (de / d).max(d / de)
    };
    let mut within = 1.0f64;
    for _ in 0..pairs {
        let k = sample::y_element(rng, x);
        let edges: Vec<usize> = endpoints(&k).points().iter().map(|p| p.edge).collect();
        let kk = sample::y_element_on(rng, x, &edges);
        within = within.max(ratio(&k, &kk));
    }
    let mut mixed = 1.0f64;
    for _ in 0..pairs {
        let (k, kk) = (sample::y_element(rng, x), sample::y_element(rng, x));
        mixed = mixed.max(ratio(&k, &kk));
    }
    rec.measure("endpoint_distortion_any_edges", mixed);
    rec.verdict(
        "endpoint_distortion",
        format!("endpoint map distorts Hausdorff distance by at most {bound} between sub-stars reaching the same edges"),
        serde_json::json!({ "pairs": pairs, "distortion": within }),
        within <= bound,
    );
}

fn hausdorff_oracle(rec: &mut Recorder, rng: &mut SeededRng, x: &StarSpace, pairs: usize, res: f64, tol: f64) {
    let mut worst = 0.0f64;
    for i in 0..pairs {
        let s = draw(rng, x, i % 3);
        let t = draw(rng, x, (i / 3) % 3);
        let closed = hyperent::hyperspace::hausdorff_segments(&s, &t);
        let brute = oracle::hausdorff(x.k(), &s, &t, res);
        worst = worst.max((closed - brute).abs());
    }
    rec.verdict(
        "hausdorff_oracle",
        format!("closed form within {tol} of the dense oracle at resolution {res}, all representation pairs"),
        serde_json::json!({ "pairs": pairs, "max_gap": worst }),
        worst <= tol,
    );
}

/// Segments of a random subcontinuum, finite set or arc union; unions lie
/// in `[0, 1]` on edge 0.
fn draw(rng: &mut SeededRng, x: &StarSpace, kind: usize) -> hyperent::hyperspace::Segments {
    match kind {
        0 => sample::subcontinuum(rng, x).segments(),
        1 => sample::point_set(rng, x, 4).segments(),
        _ => sample::arc_union(rng, 3).segments(),
    }
}
