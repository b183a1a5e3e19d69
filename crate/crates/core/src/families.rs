//! Candidate families for entropy estimates: hyperspace elements whose
//! endpoints are wandering-orbit points, and uniform grids.
//!
//! Orbit-based elements are stored by orbit index. Their image under the
//! induced map is the same element with every index advanced by one, which
//! is exact no matter how close the coordinates of neighbouring orbit
//! points are; coordinates are read from an [`OrbitTable`] only to measure
//! distances.

use std::sync::Arc;

use serde::Serialize;
use smallvec::SmallVec;

use crate::entropy::DynSystem;
use crate::error::{domain, Result};
use crate::hyperspace::{hausdorff_segments, point_to_segments, probe_points, ArcUnion, FinitePointSet, Segment, Segments, Subcontinuum};
use crate::maps::OrbitTable;
use crate::spaces::{StarPoint, StarSpace};

/// A segment of edge `track` between the orbit points with indices `from`
/// and `to`, or from the branch point to `to` when `from` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticePiece {
    pub track: u8,
    pub from: Option<i32>,
    pub to: i32,
}

impl LatticePiece {
    pub fn point(track: usize, r: i32) -> Self {
        Self { track: track as u8, from: Some(r), to: r }
    }

    pub fn arc(track: usize, a: i32, b: i32) -> Self {
        Self { track: track as u8, from: Some(a), to: b }
    }

    pub fn reach(track: usize, r: i32) -> Self {
        Self { track: track as u8, from: None, to: r }
    }
}

/// A finite union of lattice pieces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeSet {
    pub pieces: SmallVec<[LatticePiece; 4]>,
}

impl LatticeSet {
    pub fn new(pieces: impl IntoIterator<Item = LatticePiece>) -> Self {
        Self { pieces: pieces.into_iter().collect() }
    }

    pub fn shifted(&self, by: i32) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| LatticePiece { track: p.track, from: p.from.map(|a| a + by), to: p.to + by })
            .collect();
        Self { pieces }
    }

    pub fn max_index(&self) -> i32 {
        self.pieces.iter().map(|p| p.to.max(p.from.unwrap_or(i32::MIN))).max().unwrap_or(0)
    }

    /// Segments of the realized set, `shift` steps along the orbits.
    pub fn segments_at(&self, table: &OrbitTable, shift: i32) -> Segments {
        self.pieces
            .iter()
            .map(|p| {
                let j = p.track as usize;
                let b = table.value(j, (p.to + shift) as i64);
                let a = match p.from {
                    Some(a) => table.value(j, (a + shift) as i64),
                    None => 0.0,
                };
                Segment { edge: j, lo: a.min(b), hi: a.max(b) }
            })
            .collect()
    }

    /// The set of endpoints of the pieces; every piece must run between
    /// two orbit points.
    pub fn boundary(&self) -> Result<LatticeSet> {
        let mut pts: Vec<LatticePiece> = Vec::with_capacity(2 * self.pieces.len());
        for p in &self.pieces {
            let Some(a) = p.from else {
                return domain("a piece starting at the branch has no orbit-point endpoint");
            };
            pts.push(LatticePiece::point(p.track as usize, a));
            pts.push(LatticePiece::point(p.track as usize, p.to));
        }
        pts.sort();
        pts.dedup();
        Ok(LatticeSet::new(pts))
    }

    pub fn to_point_set(&self, space: &StarSpace, table: &OrbitTable) -> Result<FinitePointSet> {
        let mut pts = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            if p.from != Some(p.to) {
                return domain("not a point set");
            }
            pts.push(table.point(p.track as usize, p.to as i64));
        }
        FinitePointSet::new(space, pts)
    }

    pub fn to_arc_union(&self, table: &OrbitTable) -> Result<ArcUnion> {
        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(self.pieces.len());
        for s in self.segments_at(table, 0) {
            if s.edge != 0 {
                return domain("arc unions live on a single edge");
            }
            arcs.push((s.lo, s.hi));
        }
        arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
        ArcUnion::new(arcs)
    }

    pub fn to_subcontinuum(&self, space: &StarSpace, table: &OrbitTable) -> Result<Subcontinuum> {
        let segs = self.segments_at(table, 0);
        if segs.iter().all(|s| s.lo == 0.0) {
            let mut reaches = vec![0.0f64; space.k()];
            for s in &segs {
                reaches[s.edge] = reaches[s.edge].max(s.hi);
            }
            return Subcontinuum::star_piece(space, &reaches);
        }
        match segs.as_slice() {
            [s] => Subcontinuum::arc(space, s.edge, s.lo, s.hi),
            _ => domain("pieces do not form a continuum"),
        }
    }
}

/// The induced map on orbit-indexed sets, measured with the Hausdorff metric.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    table: Arc<OrbitTable>,
    space: StarSpace,
    probes: Vec<StarPoint>,
}

impl LatticeSystem {
    pub fn new(space: StarSpace, table: OrbitTable) -> Result<Self> {
        if table.tracks() != space.k() {
            return domain(format!("table has {} tracks for a {}-star", table.tracks(), space.k()));
        }
        let probes = probe_points(&space);
        Ok(Self { table: Arc::new(table), space, probes })
    }

    pub fn table(&self) -> &OrbitTable {
        &self.table
    }

    pub fn space(&self) -> &StarSpace {
        &self.space
    }
}

impl DynSystem for LatticeSystem {
    type State = LatticeSet;
    type Snapshot = Segments;

    fn snapshot(&self, s: &LatticeSet) -> Segments {
        s.segments_at(&self.table, 0)
    }

    fn distance(&self, a: &Segments, b: &Segments) -> f64 {
        hausdorff_segments(a, b)
    }

    fn step(&self, s: &LatticeSet) -> LatticeSet {
        s.shifted(1)
    }

    fn features(&self, snap: &Segments, out: &mut Vec<f64>) {
        out.extend(self.probes.iter().map(|y| point_to_segments(y, snap)));
    }

    fn feature_bound(&self) -> f64 {
        self.space.diameter()
    }

    fn orbit(&self, s: &LatticeSet, n: usize) -> Vec<Segments> {
        (0..n as i32).map(|t| s.segments_at(&self.table, t)).collect()
    }
}

fn check_range(lo: i32, hi: i32) -> Result<()> {
    if hi < lo {
        return domain(format!("empty index range {lo}..={hi}"));
    }
    Ok(())
}

/// Single orbit points `x^j_r`, `lo <= r <= hi`, on every track.
pub fn lattice_points(tracks: usize, lo: i32, hi: i32) -> Result<Vec<LatticeSet>> {
    check_range(lo, hi)?;
    Ok((0..tracks).flat_map(|j| (lo..=hi).map(move |r| LatticeSet::new([LatticePiece::point(j, r)]))).collect())
}

/// Arcs (including degenerate ones) between orbit points of one track.
pub fn lattice_arcs(track: usize, lo: i32, hi: i32) -> Result<Vec<LatticeSet>> {
    check_range(lo, hi)?;
    Ok((lo..=hi).flat_map(|a| (a..=hi).map(move |b| LatticeSet::new([LatticePiece::arc(track, a, b)]))).collect())
}

/// Sub-stars through the branch point reaching orbit points on at least two
/// edges (the set `Y`).
pub fn lattice_y_elements(tracks: usize, lo: i32, hi: i32) -> Result<Vec<LatticeSet>> {
    check_range(lo, hi)?;
    if tracks < 2 {
        return domain("Y needs at least two edges");
    }
    let choices = (hi - lo + 2) as usize;
    let total = choices.checked_pow(tracks as u32).filter(|t| *t <= 1 << 26);
    let Some(total) = total else {
        return domain("candidate family too large");
    };
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut pieces = SmallVec::new();
        for j in 0..tracks {
            let pick = c % choices;
            c /= choices;
            if pick > 0 {
                pieces.push(LatticePiece::reach(j, lo + pick as i32 - 1));
            }
        }
        if pieces.len() >= 2 {
            out.push(LatticeSet { pieces });
        }
    }
    Ok(out)
}

/// Sets of between 1 and `max_size` distinct orbit points.
pub fn lattice_point_sets(tracks: usize, lo: i32, hi: i32, max_size: usize) -> Result<Vec<LatticeSet>> {
    check_range(lo, hi)?;
    let pts: Vec<LatticePiece> =
        (0..tracks).flat_map(|j| (lo..=hi).map(move |r| LatticePiece::point(j, r))).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    subsets(pts.len(), max_size, 0, &mut chosen, &mut |idx| {
        out.push(LatticeSet::new(idx.iter().map(|&i| pts[i])));
    });
    Ok(out)
}

fn subsets(n: usize, max: usize, start: usize, chosen: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    for i in start..n {
        chosen.push(i);
        emit(chosen);
        if chosen.len() < max {
            subsets(n, max, i + 1, chosen, emit);
        }
        chosen.pop();
    }
}

/// Unions of between 1 and `max_components` disjoint arcs on track 0 with
/// orbit-point endpoints.
pub fn lattice_arc_unions(lo: i32, hi: i32, max_components: usize) -> Result<Vec<LatticeSet>> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    let mut stack: Vec<LatticePiece> = Vec::new();
    arc_chains(lo, hi, max_components, &mut stack, &mut out);
    Ok(out)
}

fn arc_chains(start: i32, hi: i32, max: usize, stack: &mut Vec<LatticePiece>, out: &mut Vec<LatticeSet>) {
    for a in start..=hi {
        for b in a..=hi {
            stack.push(LatticePiece::arc(0, a, b));
            out.push(LatticeSet::new(stack.iter().copied()));
            if stack.len() < max {
                arc_chains(b + 1, hi, max, stack, out);
            }
            stack.pop();
        }
    }
}

fn grid(space: &StarSpace, edge: usize, n: usize) -> impl Iterator<Item = f64> + '_ {
    let len = space.edge_length(edge);
    (0..=n).map(move |i| if i == n { len } else { len * i as f64 / n as f64 })
}

/// The branch point and the points `i L_j / N`, `1 <= i <= N`, of every edge.
pub fn grid_points(space: &StarSpace, n: usize) -> Result<Vec<StarPoint>> {
    if n == 0 {
        return domain("grid resolution must be positive");
    }
    let mut out = vec![StarPoint::BRANCH];
    for j in 0..space.k() {
        for t in grid(space, j, n).skip(1) {
            out.push(space.point(j, t)?);
        }
    }
    Ok(out)
}

/// Subcontinua lying in one closed edge with grid endpoints; the branch
/// singleton is listed once.
pub fn grid_arcs(space: &StarSpace, n: usize) -> Result<Vec<Subcontinuum>> {
    if n == 0 {
        return domain("grid resolution must be positive");
    }
    let mut out = vec![Subcontinuum::singleton(space, StarPoint::BRANCH)?];
    for j in 0..space.k() {
        let ts: Vec<f64> = grid(space, j, n).collect();
        for (i, &a) in ts.iter().enumerate() {
            for &b in &ts[i..] {
                if b > 0.0 {
                    out.push(Subcontinuum::arc(space, j, a, b)?);
                }
            }
        }
    }
    Ok(out)
}

/// Sub-stars through the branch point with grid reaches on at least two edges.
pub fn grid_y_elements(space: &StarSpace, n: usize) -> Result<Vec<Subcontinuum>> {
    let tips: Vec<Vec<(usize, f64)>> = (0..space.k()).map(|j| grid(space, j, n).skip(1).map(|t| (j, t)).collect()).collect();
    let lattice = lattice_y_elements(space.k(), 0, n as i32 - 1)?;
    lattice
        .into_iter()
        .map(|s| {
            let chosen: Vec<(usize, f64)> = s.pieces.iter().map(|p| tips[p.track as usize][p.to as usize]).collect();
            crate::hyperspace::make_y_element(space, &chosen)
        })
        .collect()
}

/// Sets of at most `max_size` points of the grid `i/N` in `[0, 1]`.
pub fn grid_point_sets(n: usize, max_size: usize) -> Result<Vec<FinitePointSet>> {
    let space = StarSpace::unit_interval();
    let pts = grid_points(&space, n)?;
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut err = None;
    subsets(pts.len(), max_size, 0, &mut chosen, &mut |idx| match FinitePointSet::new(&space, idx.iter().map(|&i| pts[i])) {
        Ok(s) => out.push(s),
        Err(e) => err = Some(e),
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Unions of at most `max_components` disjoint arcs with endpoints on the grid `i/N`.
pub fn grid_arc_unions(n: usize, max_components: usize) -> Result<Vec<ArcUnion>> {
    let space = StarSpace::unit_interval();
    let ts: Vec<f64> = grid(&space, 0, n).collect();
    lattice_arc_unions(0, n as i32, max_components)?
        .into_iter()
        .map(|s| ArcUnion::new(s.pieces.iter().map(|p| (ts[p.from.unwrap() as usize], ts[p.to as usize]))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperspace::{Induced, SegmentSet};
    use crate::maps::{orbit_table, EdgeMap, StarHomeo};
    use proptest::prelude::*;

    fn star() -> (StarHomeo, OrbitTable) {
        let x = StarSpace::new(vec![1.0; 3]).unwrap();
        let maps = [2.0, 2.0, 3.0].iter().map(|&p| EdgeMap::power(p).unwrap()).collect();
        let h = StarHomeo::fixing_edges(x.clone(), maps).unwrap();
        let base: Vec<StarPoint> = (0..3).map(|j| x.point(j, 0.5).unwrap()).collect();
        let t = orbit_table(&h, &base, -40, 40).unwrap();
        (h, t)
    }

    fn close(a: &Segments, b: &Segments, tol: f64) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(s, t)| s.edge == t.edge && (s.lo - t.lo).abs() <= tol && (s.hi - t.hi).abs() <= tol)
    }

    #[test]
    fn index_shift_is_the_induced_map_on_forward_indices() {
        let (h, t) = star();
        let x = h.space().clone();
        for s in lattice_y_elements(3, 0, 6).unwrap().iter().chain(&lattice_arcs(2, 0, 8).unwrap()) {
            let image = s.to_subcontinuum(&x, &t).unwrap().induced(&h).segments();
            let moved = s.shifted(1).to_subcontinuum(&x, &t).unwrap().segments();
            assert_eq!(image, moved, "{s:?}");
        }
        for s in lattice_point_sets(3, 0, 5, 2).unwrap() {
            let image = s.to_point_set(&x, &t).unwrap().induced(&h);
            assert_eq!(image, s.shifted(1).to_point_set(&x, &t).unwrap());
        }
    }

    // far enough out the coordinates underflow to the branch point, where
    // distinct indices stop being distinct points
    proptest! {
        #[test]
        fn index_shift_tracks_the_induced_map(a in -30i32..-2, len in 0i32..8, j in 0usize..3) {
            let (h, t) = star();
            let x = h.space().clone();
            let s = LatticeSet::new([LatticePiece::arc(j, a, a + len)]);
            let image = s.to_subcontinuum(&x, &t).unwrap().induced(&h).segments();
            let moved = s.shifted(1).segments_at(&t, 0);
            prop_assert!(close(&image, &moved, 1e-12), "{image:?} vs {moved:?}");
            prop_assert_eq!(s.segments_at(&t, 1), moved);
        }

        #[test]
        fn union_shift_tracks_the_induced_map(a in -30i32..-12, gap in 1i32..5, l1 in 0i32..4, l2 in 0i32..4) {
            let x = StarSpace::unit_interval();
            let h = StarHomeo::fixing_edges(x.clone(), vec![EdgeMap::power(2.0).unwrap()]).unwrap();
            let t = orbit_table(&h, &[x.point(0, 0.5).unwrap()], -40, 40).unwrap();
            let b = a + l1 + gap;
            let s = LatticeSet::new([LatticePiece::arc(0, a, a + l1), LatticePiece::arc(0, b, b + l2)]);
            let image = s.to_arc_union(&t).unwrap().induced(&h).segments();
            let moved = s.shifted(1).to_arc_union(&t).unwrap().segments();
            prop_assert!(close(&image, &moved, 1e-12));
        }
    }

    #[test]
    fn generator_sizes() {
        let (lo, hi) = (-3, 5);
        let w = (hi - lo + 1) as usize;
        assert_eq!(lattice_points(3, lo, hi).unwrap().len(), 3 * w);
        assert_eq!(lattice_arcs(0, lo, hi).unwrap().len(), w * (w + 1) / 2);
        assert_eq!(lattice_y_elements(3, lo, hi).unwrap().len(), (w + 1).pow(3) - 1 - 3 * w);

        let mut pairs = 0;
        for a in lo..=hi {
            for b in a..=hi {
                for c in b + 1..=hi {
                    pairs += hi - c + 1;
                }
            }
        }
        let unions = lattice_arc_unions(lo, hi, 2).unwrap();
        assert_eq!(unions.len(), w * (w + 1) / 2 + pairs as usize);
        let mut sorted = unions.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), unions.len());

        let sets = lattice_point_sets(1, lo, hi, 3).unwrap();
        assert_eq!(sets.len(), w + w * (w - 1) / 2 + w * (w - 1) * (w - 2) / 6);
        assert!(lattice_y_elements(1, 0, 3).is_err());
        assert!(lattice_points(1, 3, 2).is_err());
    }

    #[test]
    fn grid_sizes() {
        let x = StarSpace::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(grid_points(&x, 8).unwrap().len(), 17);
        assert_eq!(grid_arcs(&x, 8).unwrap().len(), 1 + 2 * (9 * 10 / 2 - 1));
        assert_eq!(grid_y_elements(&x, 8).unwrap().len(), 64);
        assert!(grid_y_elements(&x, 8).unwrap().iter().all(|s| s.in_y()));
        assert_eq!(grid_point_sets(4, 2).unwrap().len(), 5 + 10);
        let unions = grid_arc_unions(4, 2).unwrap();
        assert_eq!(unions.len(), lattice_arc_unions(0, 4, 2).unwrap().len());
        assert!(unions.iter().all(|u| u.components() <= 2));
        assert!(grid_points(&x, 0).is_err());
    }

    #[test]
    fn boundary_of_pieces() {
        let s = LatticeSet::new([LatticePiece::arc(0, 1, 3), LatticePiece::arc(0, 5, 5)]);
        let b = s.boundary().unwrap();
        assert_eq!(b.pieces.as_slice(), &[LatticePiece::point(0, 1), LatticePiece::point(0, 3), LatticePiece::point(0, 5)]);
        assert!(LatticeSet::new([LatticePiece::reach(0, 2)]).boundary().is_err());
    }

    #[test]
    fn lattice_distance_matches_the_realized_sets() {
        let (h, t) = star();
        let x = h.space().clone();
        let sys = LatticeSystem::new(x.clone(), t.clone()).unwrap();
        let ys = lattice_y_elements(3, -4, 2).unwrap();
        for (a, b) in ys.iter().zip(ys.iter().skip(7)).take(200) {
            let d = sys.distance(&sys.snapshot(a), &sys.snapshot(b));
            let real = crate::hyperspace::hausdorff(&x, &a.to_subcontinuum(&x, &t).unwrap(), &b.to_subcontinuum(&x, &t).unwrap());
            assert_eq!(d, real);
        }
    }
}
