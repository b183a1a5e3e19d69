//! Star homeomorphisms: an edge permutation plus one strictly increasing
//! map per edge, together with orbits, the edge period, the wandering test
//! and the finite orbit lattice used by the coding map.
//!
//! Edge maps act on normalized coordinates `u = t / L` in `[0, 1]`, which
//! takes care of rescaling when an edge is carried onto an edge of a
//! different length.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::spaces::{StarPoint, StarSpace};

/// Coordinates below this are snapped onto the branch point.
pub const UNDERFLOW_CLAMP: f64 = 1e-300;

/// A strictly increasing self-map of `[0, 1]` fixing both ends.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeMap {
    /// `u ↦ u^p`.
    Power { p: f64 },
    /// Linear interpolation through `(x, y)` knots from `(0, 0)` to `(1, 1)`.
    Pwl { knots: Vec<(f64, f64)> },
    /// Apply the maps left to right.
    Chain(Vec<EdgeMap>),
}

/// JSON form of an edge map, e.g. `{"family":"power","p":2.0}` or
/// `{"family":"pwl","points":[[0,0],[0.5,0.25],[1,1]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum EdgeMapSpec {
    Power { p: f64 },
    Pwl { points: Vec<[f64; 2]> },
}

impl TryFrom<EdgeMapSpec> for EdgeMap {
    type Error = Error;

    fn try_from(spec: EdgeMapSpec) -> Result<Self> {
        match spec {
            EdgeMapSpec::Power { p } => EdgeMap::power(p),
            EdgeMapSpec::Pwl { points } => EdgeMap::pwl(points.iter().map(|[x, y]| (*x, *y)).collect()),
        }
    }
}

impl EdgeMap {
    pub fn identity() -> Self {
        EdgeMap::Power { p: 1.0 }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return domain(format!("power exponent must be positive and finite, got {p}"));
        }
        Ok(EdgeMap::Power { p })
    }

    pub fn pwl(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return domain("a piecewise-linear map needs at least two knots");
        }
        if knots[0] != (0.0, 0.0) || *knots.last().unwrap() != (1.0, 1.0) {
            return domain("piecewise-linear map must run from (0,0) to (1,1)");
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return domain(format!("knots {:?} -> {:?} are not strictly increasing", w[0], w[1]));
            }
        }
        Ok(EdgeMap::Pwl { knots })
    }

    pub fn forward(&self, u: f64) -> f64 {
        match self {
            EdgeMap::Power { p } => {
                if *p == 1.0 {
                    u
                } else {
                    u.powf(*p)
                }
            }
            EdgeMap::Pwl { knots } => interpolate(knots, u, |k| k.0, |k| k.1),
            EdgeMap::Chain(maps) => maps.iter().fold(u, |acc, g| g.forward(acc)),
        }
    }

    pub fn inverse(&self, v: f64) -> f64 {
        match self {
            EdgeMap::Power { p } => {
                if *p == 1.0 {
                    v
                } else {
                    v.powf(1.0 / p)
                }
            }
            EdgeMap::Pwl { knots } => interpolate(knots, v, |k| k.1, |k| k.0),
            EdgeMap::Chain(maps) => maps.iter().rev().fold(v, |acc, g| g.inverse(acc)),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            EdgeMap::Power { p } => *p == 1.0,
            EdgeMap::Pwl { knots } => knots.iter().all(|(x, y)| x == y),
            EdgeMap::Chain(maps) => maps.iter().all(EdgeMap::is_identity),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &EdgeMap) -> EdgeMap {
        match (self, next) {
            (a, b) if b.is_identity() => a.clone(),
            (a, b) if a.is_identity() => b.clone(),
            (EdgeMap::Power { p }, EdgeMap::Power { p: q }) => EdgeMap::Power { p: p * q },
            (EdgeMap::Chain(a), EdgeMap::Chain(b)) => EdgeMap::Chain(a.iter().chain(b).cloned().collect()),
            (EdgeMap::Chain(a), b) => {
                let mut v = a.clone();
                v.push(b.clone());
                EdgeMap::Chain(v)
            }
            (a, EdgeMap::Chain(b)) => {
                let mut v = vec![a.clone()];
                v.extend(b.iter().cloned());
                EdgeMap::Chain(v)
            }
            (a, b) => EdgeMap::Chain(vec![a.clone(), b.clone()]),
        }
    }
}

fn interpolate(knots: &[(f64, f64)], s: f64, from: impl Fn(&(f64, f64)) -> f64, to: impl Fn(&(f64, f64)) -> f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    // first knot whose source coordinate is >= s
    let i = knots.partition_point(|k| from(k) < s);
    let (a, b) = (&knots[i - 1], &knots[i]);
    if from(b) == s {
        return to(b);
    }
    let slope = (to(b) - to(a)) / (from(b) - from(a));
    to(a) + (s - from(a)) * slope
}

/// A homeomorphism of a star.
#[derive(Debug, Clone, PartialEq)]
pub struct StarHomeo {
    space: StarSpace,
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    edge_maps: Vec<EdgeMap>,
    /// Edges carried onto an edge of the same length by an identity map;
    /// their coordinates are copied rather than rescaled.
    rigid: Vec<bool>,
}

impl StarHomeo {
    /// `edge_maps[j]` carries edge `j` onto edge `perm[j]`.
    pub fn new(space: StarSpace, perm: Vec<usize>, edge_maps: Vec<EdgeMap>) -> Result<Self> {
        let k = space.k();
        if perm.len() != k || edge_maps.len() != k {
            return domain(format!(
                "{k}-star needs {k} permutation entries and {k} edge maps, got {} and {}",
                perm.len(),
                edge_maps.len()
            ));
        }
        let mut inv_perm = vec![usize::MAX; k];
        for (j, &target) in perm.iter().enumerate() {
            if target >= k || inv_perm[target] != usize::MAX {
                return domain(format!("{perm:?} is not a permutation of 0..{k}"));
            }
            inv_perm[target] = j;
        }
        let rigid = (0..k)
            .map(|j| edge_maps[j].is_identity() && space.edge_length(j) == space.edge_length(perm[j]))
            .collect();
        Ok(Self { space, perm, inv_perm, edge_maps, rigid })
    }

    /// Identity permutation with the given edge maps.
    pub fn fixing_edges(space: StarSpace, edge_maps: Vec<EdgeMap>) -> Result<Self> {
        let perm = (0..space.k()).collect();
        Self::new(space, perm, edge_maps)
    }

    pub fn identity(space: StarSpace) -> Self {
        let k = space.k();
        Self::fixing_edges(space, vec![EdgeMap::identity(); k]).expect("identity is valid")
    }

    pub fn space(&self) -> &StarSpace {
        &self.space
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn edge_map(&self, edge: usize) -> &EdgeMap {
        &self.edge_maps[edge]
    }

    pub fn apply(&self, p: &StarPoint) -> StarPoint {
        if p.is_branch() {
            return StarPoint::BRANCH;
        }
        let from = p.edge;
        let to = self.perm[from];
        if self.rigid[from] {
            return StarPoint { edge: to, t: p.t };
        }
        let u = p.t / self.space.edge_length(from);
        let v = self.edge_maps[from].forward(u);
        self.settle(to, v)
    }

    pub fn apply_inverse(&self, p: &StarPoint) -> StarPoint {
        if p.is_branch() {
            return StarPoint::BRANCH;
        }
        let to = p.edge;
        let from = self.inv_perm[to];
        if self.rigid[from] {
            return StarPoint { edge: from, t: p.t };
        }
        let v = p.t / self.space.edge_length(to);
        let u = self.edge_maps[from].inverse(v);
        self.settle(from, u)
    }

    fn settle(&self, edge: usize, u: f64) -> StarPoint {
        let len = self.space.edge_length(edge);
        let t = (u * len).min(len);
        if t < UNDERFLOW_CLAMP {
            StarPoint::BRANCH
        } else {
            StarPoint { edge, t }
        }
    }

    /// `f^n(p)`; negative `n` iterates the inverse. Iterates are built one
    /// step at a time so `apply(iterate(p, n)) == iterate(p, n + 1)` holds
    /// bitwise for `n >= 0`.
    pub fn iterate(&self, p: &StarPoint, n: i64) -> StarPoint {
        let mut q = *p;
        if n >= 0 {
            for _ in 0..n {
                q = self.apply(&q);
            }
        } else {
            for _ in 0..(-n) {
                q = self.apply_inverse(&q);
            }
        }
        q
    }

    /// Least `m >= 1` with `perm^m = id`.
    pub fn edge_period(&self) -> usize {
        let k = self.perm.len();
        let mut seen = vec![false; k];
        let mut period = 1usize;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            period = lcm(period, len);
        }
        period
    }

    /// The homeomorphism `f^m` (`m >= 1`) with composed edge maps.
    pub fn power(&self, m: usize) -> Result<StarHomeo> {
        if m == 0 {
            return domain("power must be at least 1");
        }
        let k = self.perm.len();
        let mut perm = Vec::with_capacity(k);
        let mut maps = Vec::with_capacity(k);
        for start in 0..k {
            let mut j = start;
            let mut g = EdgeMap::identity();
            for _ in 0..m {
                g = g.then(&self.edge_maps[j]);
                j = self.perm[j];
            }
            perm.push(j);
            maps.push(g);
        }
        StarHomeo::new(self.space.clone(), perm, maps)
    }

    /// Whether an interior point moves under `f^m`, `m` the edge period.
    /// On a fixed edge `f^m` is an increasing homeomorphism of an interval
    /// fixing the branch, so a point is wandering exactly when it is not fixed.
    pub fn is_wandering(&self, p: &StarPoint) -> Result<bool> {
        self.space.check_point(p)?;
        if p.is_branch() || p.t >= self.space.edge_length(p.edge) {
            return domain(format!("{p:?} is an edge endpoint, hence fixed by f^m"));
        }
        let m = self.edge_period() as i64;
        Ok(self.iterate(p, m) != *p)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// The grid `x^j_n = f^n(x^j)`, `|n| <= radius`, one row per edge, with the
/// minimum pairwise separation `delta` of all grid points.
///
/// Each row is produced as the forward orbit of `f^{-radius}(x^j)`, so the
/// induced map sends grid points to grid points bitwise:
/// `apply(point(j, n)) == point(j, n + 1)`.
#[derive(Debug, Clone)]
pub struct OrbitLattice {
    homeo: StarHomeo,
    radius: usize,
    rows: Vec<Vec<StarPoint>>,
    delta: f64,
    index: HashMap<StarPoint, (usize, i64)>,
}

impl OrbitLattice {
    pub fn homeo(&self) -> &StarHomeo {
        &self.homeo
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn tracks(&self) -> usize {
        self.rows.len()
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `x^j_n` for `|n| <= radius`.
    pub fn point(&self, j: usize, n: i64) -> StarPoint {
        assert!(n.unsigned_abs() as usize <= self.radius, "index {n} outside lattice radius {}", self.radius);
        self.rows[j][(n + self.radius as i64) as usize]
    }

    pub fn row(&self, j: usize) -> &[StarPoint] {
        &self.rows[j]
    }

    /// Grid position of `p`, if `p` is exactly a grid point.
    pub fn locate(&self, p: &StarPoint) -> Option<(usize, i64)> {
        self.index.get(p).copied()
    }
}

/// Builds the orbit lattice for the base points `base[j]` (interior to edge
/// `j`) of a homeomorphism that fixes every edge.
pub fn wandering_lattice(h: &StarHomeo, base: &[StarPoint], radius: usize) -> Result<OrbitLattice> {
    let space = h.space();
    if h.edge_period() != 1 {
        return domain("raise the map to its edge period before building the lattice");
    }
    if base.len() != space.k() {
        return domain(format!("need one base point per edge ({}), got {}", space.k(), base.len()));
    }
    for (j, x) in base.iter().enumerate() {
        space.check_point(x)?;
        if x.edge != j || x.is_branch() || x.t >= space.edge_length(j) {
            return domain(format!("base point {x:?} is not interior to edge {j}"));
        }
    }
    let rows: Vec<Vec<StarPoint>> = base
        .iter()
        .map(|x| {
            let mut q = h.iterate(x, -(radius as i64));
            let mut row = Vec::with_capacity(2 * radius + 1);
            row.push(q);
            for _ in 0..2 * radius {
                q = h.apply(&q);
                row.push(q);
            }
            row
        })
        .collect();

    let mut index = HashMap::new();
    let mut delta = f64::INFINITY;
    let flat: Vec<(usize, i64, StarPoint)> = rows
        .iter()
        .enumerate()
        .flat_map(|(j, row)| row.iter().enumerate().map(move |(i, p)| (j, i as i64 - radius as i64, *p)))
        .collect();
    for (a, &(j, n, p)) in flat.iter().enumerate() {
        if let Some(&(j0, n0)) = index.get(&p) {
            return Err(Error::InvariantViolation(format!(
                "orbit points ({j0},{n0}) and ({j},{n}) coincide; base point is not wandering at this radius"
            )));
        }
        index.insert(p, (j, n));
        for &(_, _, q) in &flat[a + 1..] {
            delta = delta.min(space.distance(&p, &q));
        }
    }
    if !(delta > 0.0) {
        return Err(Error::InvariantViolation("orbit lattice separation is zero".into()));
    }
    Ok(OrbitLattice { homeo: h.clone(), radius, rows, delta, index })
}

/// Coordinates of the orbit points `x^j_r`, `lo <= r <= hi`, one row per
/// edge: forward iterates of `x^j` for `r > 0`, inverse iterates for `r < 0`.
///
/// Unlike [`OrbitLattice`] there is no separation requirement, so the
/// table may reach far enough that distinct orbit points round to the
/// same double (near an attracting end) or to the branch point.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    lo: i64,
    rows: Vec<Vec<f64>>,
}

impl OrbitTable {
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.rows[0].len() as i64 - 1
    }

    pub fn tracks(&self) -> usize {
        self.rows.len()
    }

    /// Coordinate of `x^j_r` on edge `j`; zero means the branch point.
    pub fn value(&self, j: usize, r: i64) -> f64 {
        assert!(r >= self.lo && r <= self.hi(), "index {r} outside {}..={}", self.lo, self.hi());
        self.rows[j][(r - self.lo) as usize]
    }

    pub fn point(&self, j: usize, r: i64) -> StarPoint {
        let t = self.value(j, r);
        if t == 0.0 {
            StarPoint::BRANCH
        } else {
            StarPoint { edge: j, t }
        }
    }
}

pub fn orbit_table(h: &StarHomeo, base: &[StarPoint], lo: i64, hi: i64) -> Result<OrbitTable> {
    let space = h.space();
    if h.edge_period() != 1 {
        return domain("raise the map to its edge period before tabulating orbits");
    }
    if !(lo <= 0 && 0 <= hi) {
        return domain(format!("index range {lo}..={hi} must contain 0"));
    }
    if base.len() != space.k() {
        return domain(format!("need one base point per edge ({}), got {}", space.k(), base.len()));
    }
    let mut rows = Vec::with_capacity(base.len());
    for (j, x) in base.iter().enumerate() {
        space.check_point(x)?;
        if x.edge != j || x.is_branch() || x.t >= space.edge_length(j) {
            return domain(format!("base point {x:?} is not interior to edge {j}"));
        }
        let mut row = vec![0.0; (hi - lo + 1) as usize];
        let at = (-lo) as usize;
        row[at] = x.t;
        let mut q = *x;
        for slot in row[at + 1..].iter_mut() {
            q = h.apply(&q);
            *slot = q.t;
        }
        let mut q = *x;
        for slot in row[..at].iter_mut().rev() {
            q = h.apply_inverse(&q);
            *slot = q.t;
        }
        rows.push(row);
    }
    Ok(OrbitTable { lo, rows })
}
