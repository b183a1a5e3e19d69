//! Dynamic metrics, greedy separated and spanning sets, and growth-rate
//! estimates of their cardinalities.

use std::marker::PhantomData;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::growth::{fit_rows, GrowthFit, GrowthMode, GrowthRow};
use crate::hyperspace::{hausdorff_segments, point_to_segments, probe_points, Induced, SegmentSet, Segments};
use crate::maps::StarHomeo;
use crate::spaces::StarPoint;

/// A map together with a metric on the states it moves.
///
/// The metric is evaluated on snapshots, a form of the state prepared
/// once per orbit step so repeated distance queries stay cheap.
pub trait DynSystem: Sync {
    type State: Clone + Send + Sync;
    type Snapshot: Send + Sync;

    fn snapshot(&self, s: &Self::State) -> Self::Snapshot;
    fn distance(&self, a: &Self::Snapshot, b: &Self::Snapshot) -> f64;
    fn step(&self, s: &Self::State) -> Self::State;

    /// Real functions of a snapshot that are 1-Lipschitz for `distance`.
    /// Two snapshots whose features differ by `eps` are at least `eps`
    /// apart, which lets the greedy scans skip exact comparisons.
    fn features(&self, _snap: &Self::Snapshot, _out: &mut Vec<f64>) {}

    /// Upper bound on every feature value (features are nonnegative).
    fn feature_bound(&self) -> f64 {
        0.0
    }

    /// Snapshots of `s, f(s), ..., f^{n-1}(s)`.
    fn orbit(&self, s: &Self::State, n: usize) -> Vec<Self::Snapshot> {
        let mut out = Vec::with_capacity(n);
        let mut cur = s.clone();
        for i in 0..n {
            out.push(self.snapshot(&cur));
            if i + 1 < n {
                cur = self.step(&cur);
            }
        }
        out
    }
}

/// `f` acting on the star itself.
#[derive(Debug, Clone)]
pub struct PointSystem {
    pub h: StarHomeo,
}

impl DynSystem for PointSystem {
    type State = StarPoint;
    type Snapshot = StarPoint;

    fn snapshot(&self, s: &StarPoint) -> StarPoint {
        *s
    }

    fn distance(&self, a: &StarPoint, b: &StarPoint) -> f64 {
        self.h.space().distance(a, b)
    }

    fn step(&self, s: &StarPoint) -> StarPoint {
        self.h.apply(s)
    }

    fn features(&self, snap: &StarPoint, out: &mut Vec<f64>) {
        let x = self.h.space();
        out.extend(probe_points(x).iter().map(|y| x.distance(y, snap)));
    }

    fn feature_bound(&self) -> f64 {
        self.h.space().diameter()
    }
}

/// The induced map on one of the hyperspace representations.
#[derive(Debug, Clone)]
pub struct HyperSystem<T> {
    pub h: StarHomeo,
    _elem: PhantomData<fn() -> T>,
}

impl<T> HyperSystem<T> {
    pub fn new(h: StarHomeo) -> Self {
        Self { h, _elem: PhantomData }
    }
}

impl<T: SegmentSet + Induced + Clone + Send + Sync> DynSystem for HyperSystem<T> {
    type State = T;
    type Snapshot = Segments;

    fn snapshot(&self, s: &T) -> Segments {
        s.segments()
    }

    fn distance(&self, a: &Segments, b: &Segments) -> f64 {
        hausdorff_segments(a, b)
    }

    fn step(&self, s: &T) -> T {
        s.induced(&self.h)
    }

    fn features(&self, snap: &Segments, out: &mut Vec<f64>) {
        out.extend(probe_points(self.h.space()).iter().map(|y| point_to_segments(y, snap)));
    }

    fn feature_bound(&self) -> f64 {
        self.h.space().diameter()
    }
}

/// `f × … × f` with the max metric.
#[derive(Debug, Clone)]
pub struct ProductSystem<S> {
    pub base: S,
}

impl<S: DynSystem> DynSystem for ProductSystem<S> {
    type State = Vec<S::State>;
    type Snapshot = Vec<S::Snapshot>;

    fn snapshot(&self, s: &Self::State) -> Self::Snapshot {
        s.iter().map(|x| self.base.snapshot(x)).collect()
    }

    fn distance(&self, a: &Self::Snapshot, b: &Self::Snapshot) -> f64 {
        a.iter().zip(b).map(|(x, y)| self.base.distance(x, y)).fold(0.0, f64::max)
    }

    fn step(&self, s: &Self::State) -> Self::State {
        s.iter().map(|x| self.base.step(x)).collect()
    }

    fn features(&self, snap: &Self::Snapshot, out: &mut Vec<f64>) {
        for x in snap {
            self.base.features(x, out);
        }
    }

    fn feature_bound(&self) -> f64 {
        self.base.feature_bound()
    }
}

/// `f^m`.
#[derive(Debug, Clone)]
pub struct PowerSystem<S> {
    pub base: S,
    pub m: usize,
}

impl<S: DynSystem> DynSystem for PowerSystem<S> {
    type State = S::State;
    type Snapshot = S::Snapshot;

    fn snapshot(&self, s: &S::State) -> S::Snapshot {
        self.base.snapshot(s)
    }

    fn distance(&self, a: &S::Snapshot, b: &S::Snapshot) -> f64 {
        self.base.distance(a, b)
    }

    fn step(&self, s: &S::State) -> S::State {
        let mut cur = s.clone();
        for _ in 0..self.m {
            cur = self.base.step(&cur);
        }
        cur
    }

    fn features(&self, snap: &S::Snapshot, out: &mut Vec<f64>) {
        self.base.features(snap, out);
    }

    fn feature_bound(&self) -> f64 {
        self.base.feature_bound()
    }
}

/// `max_{0 <= t < n} d(f^t x, f^t y)`.
pub fn dyn_distance<S: DynSystem>(sys: &S, x: &S::State, y: &S::State, n: usize) -> Result<f64> {
    if n == 0 {
        return domain("the dynamic metric needs n >= 1");
    }
    let (ox, oy) = (sys.orbit(x, n), sys.orbit(y, n));
    Ok(orbit_distance(sys, &ox, &oy))
}

fn orbit_distance<S: DynSystem>(sys: &S, a: &[S::Snapshot], b: &[S::Snapshot]) -> f64 {
    a.iter().zip(b).map(|(x, y)| sys.distance(x, y)).fold(0.0, f64::max)
}

fn orbits_closer<S: DynSystem>(sys: &S, a: &[S::Snapshot], b: &[S::Snapshot], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| sys.distance(x, y) < eps)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatedSet {
    /// Positions in the candidate list, in selection order.
    pub members: Vec<usize>,
}

impl SeparatedSet {
    pub fn count(&self) -> usize {
        self.members.len()
    }
}

/// First-fit `(n, eps)`-separated subset of `candidates`: a candidate is kept
/// when its `d_n` distance to every kept one is at least `eps`. The result is
/// maximal with respect to the candidate list.
pub fn greedy_separated<S: DynSystem>(sys: &S, candidates: &[S::State], n: usize, eps: f64) -> Result<SeparatedSet> {
    check_cell(n, eps)?;
    let mut members = Vec::new();
    let mut kept: Vec<Vec<S::Snapshot>> = Vec::new();
    let mut index = FeatureIndex::new(sys.feature_bound(), eps);
    let mut feats = Vec::new();
    let mut near = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let orbit = sys.orbit(c, n);
        feats.clear();
        for snap in &orbit {
            sys.features(snap, &mut feats);
        }
        let rejected = if index.enabled(feats.len()) {
            index.near(&feats, &mut near);
            near.iter().any(|&k| orbits_closer(sys, &orbit, &kept[k as usize], eps))
        } else {
            // recent members are the likeliest to be close
            kept.iter().rev().any(|k| orbits_closer(sys, &orbit, k, eps))
        };
        if !rejected {
            members.push(i);
            kept.push(orbit);
            index.insert(&feats);
        }
    }
    Ok(SeparatedSet { members })
}

/// Bucketed feature vectors of the kept orbits. A kept orbit can be within
/// `eps` of a query only if every feature is within `eps`; the query scans
/// the buckets of its most selective coordinate and filters on the rest.
struct FeatureIndex {
    eps: f64,
    width: f64,
    per_dim: usize,
    dims: usize,
    buckets: Vec<Vec<u32>>,
    feats: Vec<f64>,
}

impl FeatureIndex {
    fn new(bound: f64, eps: f64) -> Self {
        let width = eps / 2.0;
        let per_dim = if bound > 0.0 { (bound / width).floor() as usize + 1 } else { 0 };
        Self { eps, width, per_dim, dims: 0, buckets: Vec::new(), feats: Vec::new() }
    }

    fn enabled(&mut self, dims: usize) -> bool {
        if dims == 0 || self.per_dim == 0 {
            return false;
        }
        if self.dims == 0 {
            self.dims = dims;
            self.buckets = vec![Vec::new(); dims * self.per_dim];
        }
        debug_assert_eq!(self.dims, dims);
        true
    }

    fn bucket(&self, v: f64) -> usize {
        ((v / self.width).max(0.0) as usize).min(self.per_dim - 1)
    }

    fn insert(&mut self, f: &[f64]) {
        if self.dims == 0 {
            return;
        }
        let id = (self.feats.len() / self.dims) as u32;
        for (d, &v) in f.iter().enumerate() {
            let b = self.bucket(v);
            self.buckets[d * self.per_dim + b].push(id);
        }
        self.feats.extend_from_slice(f);
    }

    fn near(&self, f: &[f64], out: &mut Vec<u32>) {
        out.clear();
        if self.feats.is_empty() {
            return;
        }
        let range = |d: usize| {
            let lo = self.bucket(f[d] - self.eps);
            let hi = self.bucket(f[d] + self.eps);
            d * self.per_dim + lo..=d * self.per_dim + hi
        };
        let best = (0..self.dims)
            .min_by_key(|&d| self.buckets[range(d)].iter().map(Vec::len).sum::<usize>())
            .expect("at least one feature");
        for bucket in &self.buckets[range(best)] {
            for &id in bucket {
                let g = &self.feats[id as usize * self.dims..(id as usize + 1) * self.dims];
                if f.iter().zip(g).all(|(a, b)| (a - b).abs() < self.eps) {
                    out.push(id);
                }
            }
        }
    }
}

/// Size of a greedily built `(n, eps)`-spanning set for `targets` drawn from
/// `candidates`: repeatedly take the first uncovered target and cover it by
/// the candidate within `eps` that covers the most uncovered targets (ties
/// go to the earlier candidate).
pub fn greedy_spanning<S: DynSystem>(
    sys: &S,
    candidates: &[S::State],
    targets: &[S::State],
    n: usize,
    eps: f64,
) -> Result<usize> {
    check_cell(n, eps)?;
    let cand_orbits: Vec<Vec<S::Snapshot>> = candidates.iter().map(|c| sys.orbit(c, n)).collect();
    let target_orbits: Vec<Vec<S::Snapshot>> = targets.iter().map(|t| sys.orbit(t, n)).collect();
    let covers: Vec<Vec<u32>> = cand_orbits
        .iter()
        .map(|c| {
            target_orbits
                .iter()
                .enumerate()
                .filter(|(_, t)| orbit_distance(sys, c, t) <= eps)
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect();
    let mut coverers: Vec<Vec<u32>> = vec![Vec::new(); targets.len()];
    for (c, list) in covers.iter().enumerate() {
        for &t in list {
            coverers[t as usize].push(c as u32);
        }
    }
    let mut covered = vec![false; targets.len()];
    let mut count = 0;
    for t in 0..targets.len() {
        if covered[t] {
            continue;
        }
        let gain = |c: u32| covers[c as usize].iter().filter(|&&x| !covered[x as usize]).count();
        let best = coverers[t].iter().copied().map(|c| (gain(c), std::cmp::Reverse(c))).max();
        let Some((_, std::cmp::Reverse(c))) = best else {
            return Err(Error::Uncoverable { index: t, epsilon: eps });
        };
        for &x in &covers[c as usize] {
            covered[x as usize] = true;
        }
        count += 1;
    }
    Ok(count)
}

fn check_cell(n: usize, eps: f64) -> Result<()> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    if !(eps > 0.0) {
        return domain(format!("epsilon must be positive, got {eps}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonFit {
    pub epsilon: f64,
    pub fit: GrowthFit,
}

/// Fits at every epsilon; `chosen` is the smallest epsilon whose fit has
/// R² >= 0.98, or the best-R² fit when none qualifies (then `Unstable`).
#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub fits: Vec<EpsilonFit>,
    pub chosen: usize,
    pub status: Stability,
}

pub const R2_GATE: f64 = 0.98;

impl EntropyEstimate {
    pub fn fit(&self) -> &GrowthFit {
        &self.fits[self.chosen].fit
    }

    pub fn epsilon(&self) -> f64 {
        self.fits[self.chosen].epsilon
    }

    pub fn slope(&self) -> f64 {
        self.fit().slope
    }

    pub fn is_stable(&self) -> bool {
        self.status == Stability::Stable
    }

    /// Every `(n, eps, count)` row, grouped by epsilon in input order.
    pub fn rows(&self) -> Vec<GrowthRow> {
        self.fits.iter().flat_map(|f| f.fit.rows.iter().cloned()).collect()
    }
}

/// Candidate lists by horizon: `gen(h)` must return states whose orbits
/// stay representable for `h` steps of the underlying map.
pub type CandidateGen<'a, T> = dyn Fn(usize) -> Vec<T> + Sync + 'a;

/// Separated-set counts over the `(eps, n)` grid, then one growth fit per
/// epsilon. Cells run in parallel; the result does not depend on scheduling.
pub fn estimate_entropy<S: DynSystem>(
    sys: &S,
    candidates: &CandidateGen<'_, S::State>,
    eps_list: &[f64],
    n_list: &[usize],
    mode: GrowthMode,
) -> Result<EntropyEstimate> {
    estimate_entropy_scaled(sys, candidates, 1, eps_list, n_list, mode)
}

/// As [`estimate_entropy`], for a system whose one step is `horizon_scale`
/// steps of the map the candidates are generated for.
pub fn estimate_entropy_scaled<S: DynSystem>(
    sys: &S,
    candidates: &CandidateGen<'_, S::State>,
    horizon_scale: usize,
    eps_list: &[f64],
    n_list: &[usize],
    mode: GrowthMode,
) -> Result<EntropyEstimate> {
    let table = sep_table(sys, candidates, horizon_scale, eps_list, n_list)?;
    fit_table(&table, eps_list, n_list, mode)
}

/// `counts[i][j]` is the greedy separated count at `eps_list[i]`, `n_list[j]`.
pub fn sep_table<S: DynSystem>(
    sys: &S,
    candidates: &CandidateGen<'_, S::State>,
    horizon_scale: usize,
    eps_list: &[f64],
    n_list: &[usize],
) -> Result<Vec<Vec<usize>>> {
    if eps_list.is_empty() || n_list.is_empty() {
        return domain("empty epsilon or n schedule");
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) || eps_list.iter().any(|e| !(*e > 0.0)) {
        return domain("epsilon schedule must be positive and strictly decreasing");
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list[0] == 0 {
        return domain("n schedule must be positive and strictly increasing");
    }
    let pools: Vec<Vec<S::State>> = n_list.par_iter().map(|&n| candidates(n * horizon_scale)).collect();
    let cells: Vec<(usize, usize)> = (0..eps_list.len()).flat_map(|i| (0..n_list.len()).map(move |j| (i, j))).collect();
    let counts: Vec<Result<usize>> = cells
        .par_iter()
        .map(|&(i, j)| greedy_separated(sys, &pools[j], n_list[j], eps_list[i]).map(|s| s.count()))
        .collect();
    let mut table = vec![vec![0; n_list.len()]; eps_list.len()];
    for (&(i, j), c) in cells.iter().zip(counts) {
        table[i][j] = c?;
    }
    Ok(table)
}

pub fn fit_table(table: &[Vec<usize>], eps_list: &[f64], n_list: &[usize], mode: GrowthMode) -> Result<EntropyEstimate> {
    let mut fits = Vec::with_capacity(eps_list.len());
    for (i, &eps) in eps_list.iter().enumerate() {
        let rows = n_list
            .iter()
            .zip(&table[i])
            .map(|(&n, &c)| GrowthRow { n: n as u64, epsilon: Some(eps), count: BigUint::from(c) })
            .collect();
        fits.push(EpsilonFit { epsilon: eps, fit: fit_rows(rows, mode)? });
    }
    let gated = fits.iter().rposition(|f| f.fit.r2 >= R2_GATE);
    let (chosen, status) = match gated {
        Some(i) => (i, Stability::Stable),
        None => {
            let best = (0..fits.len()).max_by(|&a, &b| fits[a].fit.r2.total_cmp(&fits[b].fit.r2)).unwrap_or(0);
            (best, Stability::Unstable)
        }
    };
    Ok(EntropyEstimate { fits, chosen, status })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductPowerReport {
    pub k: usize,
    pub m: usize,
    pub base: EntropyEstimate,
    pub product: EntropyEstimate,
    pub power: EntropyEstimate,
    /// `slope(f^{×k}) / (k · slope(f))`
    pub product_ratio: f64,
    /// `slope(f^m) / slope(f)`
    pub power_ratio: f64,
}

impl ProductPowerReport {
    pub fn all_stable(&self) -> bool {
        self.base.is_stable() && self.product.is_stable() && self.power.is_stable()
    }
}

/// Estimates for `f`, the `k`-fold product `f × … × f` (candidates are
/// all `k`-tuples of base candidates) and the power `f^m`.
pub fn product_power_check<S: DynSystem + Clone>(
    sys: &S,
    candidates: &CandidateGen<'_, S::State>,
    k: usize,
    m: usize,
    eps_list: &[f64],
    n_list: &[usize],
    mode: GrowthMode,
) -> Result<ProductPowerReport>
where
    S::State: 'static,
{
    if k == 0 || m == 0 {
        return domain("product size and power must be positive");
    }
    let base = estimate_entropy(sys, candidates, eps_list, n_list, mode)?;
    let product_sys = ProductSystem { base: sys.clone() };
    let tuples = |h: usize| -> Vec<Vec<S::State>> {
        let pool = candidates(h);
        let mut out: Vec<Vec<S::State>> = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    pool.iter().map(move |c| {
                        let mut t = prefix.clone();
                        t.push(c.clone());
                        t
                    })
                })
                .collect();
        }
        out
    };
    let product = estimate_entropy(&product_sys, &tuples, eps_list, n_list, mode)?;
    let power_sys = PowerSystem { base: sys.clone(), m };
    let power = estimate_entropy_scaled(&power_sys, candidates, m, eps_list, n_list, mode)?;
    let product_ratio = product.slope() / (k as f64 * base.slope());
    let power_ratio = power.slope() / base.slope();
    Ok(ProductPowerReport { k, m, base, product, power, product_ratio, power_ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorCell {
    pub n: usize,
    pub epsilon: f64,
    pub upstream: usize,
    pub downstream: usize,
}

impl FactorCell {
    pub fn holds(&self) -> bool {
        self.upstream >= self.downstream
    }
}

/// Separated counts upstream and of the factor images downstream at one
/// `(n, eps)`; the factor map `pi` must intertwine the two systems.
pub fn factor_cell<U: DynSystem, D: DynSystem>(
    up: &U,
    down: &D,
    candidates: &[U::State],
    pi: impl Fn(&U::State) -> D::State,
    n: usize,
    eps: f64,
) -> Result<FactorCell> {
    let images: Vec<D::State> = candidates.iter().map(&pi).collect();
    let upstream = greedy_separated(up, candidates, n, eps)?.count();
    let downstream = greedy_separated(down, &images, n, eps)?.count();
    Ok(FactorCell { n, epsilon: eps, upstream, downstream })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{lattice_arcs, lattice_points, LatticeSystem};
    use crate::hyperspace::Subcontinuum;
    use crate::maps::{orbit_table, EdgeMap};
    use crate::spaces::StarSpace;

    /// Hides the features of `S`, forcing exhaustive scans.
    struct Plain<S>(S);

    impl<S: DynSystem> DynSystem for Plain<S> {
        type State = S::State;
        type Snapshot = S::Snapshot;
        fn snapshot(&self, s: &S::State) -> S::Snapshot {
            self.0.snapshot(s)
        }
        fn distance(&self, a: &S::Snapshot, b: &S::Snapshot) -> f64 {
            self.0.distance(a, b)
        }
        fn step(&self, s: &S::State) -> S::State {
            self.0.step(s)
        }
    }

    fn interval(map: EdgeMap) -> StarHomeo {
        StarHomeo::fixing_edges(StarSpace::unit_interval(), vec![map]).unwrap()
    }

    fn grid(n: usize) -> Vec<StarPoint> {
        let x = StarSpace::unit_interval();
        (0..=n).map(|i| x.point(0, i as f64 / n as f64).unwrap()).collect()
    }

    fn square_lattice(hmax: usize) -> LatticeSystem {
        let h = interval(EdgeMap::power(2.0).unwrap());
        let x = h.space().clone();
        let table = orbit_table(&h, &[x.point(0, 0.5).unwrap()], -(hmax as i64) - 8, hmax as i64 + 8).unwrap();
        LatticeSystem::new(x, table).unwrap()
    }

    #[test]
    fn dyn_distance_examples() {
        let x = StarSpace::unit_interval();
        let (p, q) = (x.point(0, 0.5).unwrap(), x.point(0, 0.6).unwrap());
        let sq = PointSystem { h: interval(EdgeMap::power(2.0).unwrap()) };
        assert!((dyn_distance(&sq, &p, &q, 1).unwrap() - 0.1).abs() < 1e-15);
        assert!((dyn_distance(&sq, &p, &q, 2).unwrap() - 0.11).abs() < 1e-15);
        let id = PointSystem { h: interval(EdgeMap::identity()) };
        assert!((dyn_distance(&id, &p, &q, 50).unwrap() - 0.1).abs() < 1e-15);
        assert!(dyn_distance(&id, &p, &q, 0).is_err());
    }

    #[test]
    fn separated_examples() {
        let id = PointSystem { h: interval(EdgeMap::identity()) };
        // dyadic spacing keeps the grid gaps exact
        for n in [1, 7, 30] {
            let s = greedy_separated(&id, &grid(64), n, 2.0 / 64.0).unwrap();
            assert_eq!(s.count(), 33);
            assert_eq!(s.members, (0..=64).step_by(2).collect::<Vec<_>>());
        }
        // decimal grids round their gaps, so stay clear of the spacing
        let s = greedy_separated(&id, &grid(100), 5, 0.0199).unwrap();
        assert_eq!(s.count(), 51);
        assert_eq!(greedy_separated(&id, &grid(4)[2..3], 3, 0.1).unwrap().count(), 1);
        assert_eq!(greedy_separated(&id, &grid(64), 3, 1.5).unwrap().count(), 1);
        assert_eq!(greedy_separated(&id, &[], 3, 0.1).unwrap().count(), 0);
        assert!(greedy_separated(&id, &grid(4), 3, 0.0).is_err());
    }

    #[test]
    fn spanning_examples() {
        let id = PointSystem { h: interval(EdgeMap::identity()) };
        let g = grid(64);
        assert_eq!(greedy_spanning(&id, &g, &g, 4, 1.0).unwrap(), 1);
        // closed balls of radius 1/64 hold three grid points: ceil(65 / 3)
        assert_eq!(greedy_spanning(&id, &g, &g, 4, 1.0 / 64.0).unwrap(), 22);
        let far = vec![StarSpace::unit_interval().point(0, 1.0).unwrap()];
        let near = grid(4)[..2].to_vec();
        match greedy_spanning(&id, &near, &far, 2, 0.1) {
            Err(Error::Uncoverable { index: 0, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn features_never_change_the_result() {
        let sys = square_lattice(40);
        let cands = lattice_arcs(0, -40, 6).unwrap();
        for (n, eps) in [(4, 0.3), (12, 0.2), (30, 0.1), (40, 0.45)] {
            let fast = greedy_separated(&sys, &cands, n, eps).unwrap();
            let slow = greedy_separated(&Plain(sys.clone()), &cands, n, eps).unwrap();
            assert_eq!(fast, slow);
        }
        let hs = HyperSystem::<Subcontinuum>::new(interval(EdgeMap::power(2.0).unwrap()));
        let arcs = crate::families::grid_arcs(&StarSpace::unit_interval(), 24).unwrap();
        let fast = greedy_separated(&hs, &arcs, 6, 0.15).unwrap();
        let slow = greedy_separated(&Plain(HyperSystem::<Subcontinuum>::new(hs.h.clone())), &arcs, 6, 0.15).unwrap();
        assert_eq!(fast, slow);
    }

    #[test]
    fn sep_is_monotone_and_bounds_span() {
        let sys = square_lattice(24);
        let cands = |h: usize| lattice_arcs(0, -(h as i32) - 3, 4).unwrap();
        let eps = [0.4, 0.3, 0.2, 0.1];
        let ns = [2, 4, 8, 16, 24];
        let table = sep_table(&sys, &cands, 1, &eps, &ns).unwrap();
        for i in 0..eps.len() {
            for j in 0..ns.len() {
                if j > 0 {
                    assert!(table[i][j] >= table[i][j - 1]);
                }
                if i > 0 {
                    assert!(table[i][j] >= table[i - 1][j]);
                }
            }
        }
        for &n in &[4, 8] {
            for &e in &eps {
                let c = cands(n);
                let span = greedy_spanning(&sys, &c, &c, n, e).unwrap();
                let sep = greedy_separated(&sys, &c, n, e).unwrap().count();
                assert!(span <= sep, "n={n} eps={e}: {span} > {sep}");
            }
        }
    }

    #[test]
    fn identity_has_zero_exponent() {
        let id = PointSystem { h: interval(EdgeMap::identity()) };
        let g = grid(50);
        let est = estimate_entropy(&id, &|_| g.clone(), &[0.2, 0.1], &[2, 4, 8, 16, 32], GrowthMode::Polynomial).unwrap();
        assert_eq!(est.slope(), 0.0);
        assert!(est.is_stable());
        assert_eq!(est.epsilon(), 0.1);
    }

    #[test]
    fn squaring_points_have_exponent_near_one() {
        let sys = square_lattice(128);
        let gen = |h: usize| lattice_points(1, -(h as i32) - 4, 4).unwrap();
        let est = estimate_entropy(&sys, &gen, &[0.4, 0.3], &[8, 16, 32, 64, 128], GrowthMode::Polynomial).unwrap();
        assert!((est.slope() - 1.0).abs() < 0.1, "{}", est.slope());
        assert_eq!(est.rows().len(), 10);
    }

    #[test]
    fn schedules_are_validated() {
        let id = PointSystem { h: interval(EdgeMap::identity()) };
        let g = grid(4);
        let gen = |_: usize| g.clone();
        assert!(estimate_entropy(&id, &gen, &[0.1, 0.2], &[2, 4, 8], GrowthMode::Polynomial).is_err());
        assert!(estimate_entropy(&id, &gen, &[0.1], &[4, 2], GrowthMode::Polynomial).is_err());
        assert!(estimate_entropy(&id, &gen, &[0.1], &[0, 2], GrowthMode::Polynomial).is_err());
    }

    #[test]
    fn unstable_when_no_fit_passes_the_gate() {
        let rows = vec![vec![1, 50, 2, 70, 3, 90]];
        let est = fit_table(&rows, &[0.1], &[1, 2, 3, 4, 5, 6], GrowthMode::Polynomial).unwrap();
        assert_eq!(est.status, Stability::Unstable);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let sys = square_lattice(32);
        let gen = |h: usize| lattice_arcs(0, -(h as i32) - 3, 4).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                sep_table(&sys, &gen, 1, &[0.4, 0.2], &[4, 8, 16, 32]).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn product_and_power_of_squaring() {
        let sys = square_lattice(64);
        let gen = |h: usize| lattice_points(1, -(h as i32) - 4, 4).unwrap();
        let r = product_power_check(&sys, &gen, 2, 2, &[0.4], &[8, 16, 24, 32], GrowthMode::Polynomial).unwrap();
        assert!(r.all_stable());
        assert!((r.product.slope() - 2.0 * r.base.slope()).abs() < 0.4, "{:?}", (r.product.slope(), r.base.slope()));
        assert!((r.power.slope() - r.base.slope()).abs() < 0.2);
    }
}
