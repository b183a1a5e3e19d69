//! Elements of the hyperspaces `C(X)`, `F_n(X)` and `C_n([0,1])` in exact
//! finite form, the Hausdorff metric between any two of them, induced maps,
//! and the endpoint and boundary maps.
//!
//! Every representation is a finite union of closed segments lying on
//! single edges; the Hausdorff distance is computed from that common form.

use serde::Serialize;
use smallvec::SmallVec;

use crate::error::{domain, Result};
use crate::maps::StarHomeo;
use crate::spaces::{StarPoint, StarSpace};

/// Closed segment `[lo, hi]` on one edge. `lo == 0` means it contains the branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub edge: usize,
    pub lo: f64,
    pub hi: f64,
}

pub type Segments = SmallVec<[Segment; 8]>;

/// A nonempty closed set given as a finite union of segments.
pub trait SegmentSet {
    fn segments(&self) -> Segments;
}

/// Sets that can be pushed forward by a star homeomorphism.
pub trait Induced: Sized {
    fn induced(&self, h: &StarHomeo) -> Self;
}

/// A subcontinuum of a star: either an arc inside one open edge, or a
/// closed connected set through the branch point given by its reach
/// `[0, r_j]` along every edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Subcontinuum {
    Arc { edge: usize, a: f64, b: f64 },
    StarPiece { reaches: SmallVec<[f64; 4]> },
}

impl Subcontinuum {
    /// The arc `[a, b]` on `edge`; an arc starting at the branch becomes a star piece.
    pub fn arc(space: &StarSpace, edge: usize, a: f64, b: f64) -> Result<Self> {
        space.point(edge, a)?;
        space.point(edge, b)?;
        if !(a <= b) {
            return domain(format!("arc endpoints out of order: {a} > {b}"));
        }
        if a == 0.0 {
            let mut reaches: SmallVec<[f64; 4]> = SmallVec::from_elem(0.0, space.k());
            reaches[edge] = b;
            return Ok(Subcontinuum::StarPiece { reaches });
        }
        Ok(Subcontinuum::Arc { edge, a, b })
    }

    pub fn star_piece(space: &StarSpace, reaches: &[f64]) -> Result<Self> {
        if reaches.len() != space.k() {
            return domain(format!("need {} reaches, got {}", space.k(), reaches.len()));
        }
        for (j, &r) in reaches.iter().enumerate() {
            space.point(j, r)?;
        }
        // fold -0.0
        Ok(Subcontinuum::StarPiece { reaches: reaches.iter().map(|r| r + 0.0).collect() })
    }

    pub fn singleton(space: &StarSpace, p: StarPoint) -> Result<Self> {
        space.check_point(&p)?;
        if p.is_branch() {
            Self::star_piece(space, &vec![0.0; space.k()])
        } else {
            Ok(Subcontinuum::Arc { edge: p.edge, a: p.t, b: p.t })
        }
    }

    /// Whether the set contains the branch point and reaches at least two edges.
    pub fn in_y(&self) -> bool {
        match self {
            Subcontinuum::StarPiece { reaches } => reaches.iter().filter(|r| **r > 0.0).count() >= 2,
            Subcontinuum::Arc { .. } => false,
        }
    }
}

impl SegmentSet for Subcontinuum {
    fn segments(&self) -> Segments {
        let mut out = Segments::new();
        match self {
            Subcontinuum::Arc { edge, a, b } => out.push(Segment { edge: *edge, lo: *a, hi: *b }),
            Subcontinuum::StarPiece { reaches } => {
                for (edge, &r) in reaches.iter().enumerate() {
                    if r > 0.0 {
                        out.push(Segment { edge, lo: 0.0, hi: r });
                    }
                }
                if out.is_empty() {
                    out.push(Segment { edge: 0, lo: 0.0, hi: 0.0 });
                }
            }
        }
        out
    }
}

impl Induced for Subcontinuum {
    fn induced(&self, h: &StarHomeo) -> Self {
        match self {
            Subcontinuum::Arc { edge, a, b } => {
                let pa = h.apply(&StarPoint { edge: *edge, t: *a });
                let pb = h.apply(&StarPoint { edge: *edge, t: *b });
                if pa.is_branch() {
                    let mut reaches: SmallVec<[f64; 4]> = SmallVec::from_elem(0.0, h.space().k());
                    if !pb.is_branch() {
                        reaches[pb.edge] = pb.t;
                    }
                    Subcontinuum::StarPiece { reaches }
                } else {
                    Subcontinuum::Arc { edge: pa.edge, a: pa.t, b: pb.t }
                }
            }
            Subcontinuum::StarPiece { reaches } => {
                let mut out: SmallVec<[f64; 4]> = SmallVec::from_elem(0.0, reaches.len());
                for (j, &r) in reaches.iter().enumerate() {
                    if r > 0.0 {
                        let q = h.apply(&StarPoint { edge: j, t: r });
                        if !q.is_branch() {
                            out[q.edge] = q.t;
                        }
                    }
                }
                Subcontinuum::StarPiece { reaches: out }
            }
        }
    }
}

/// A nonempty finite set of canonical points, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FinitePointSet {
    points: SmallVec<[StarPoint; 4]>,
}

impl FinitePointSet {
    pub fn new(space: &StarSpace, points: impl IntoIterator<Item = StarPoint>) -> Result<Self> {
        let points: SmallVec<[StarPoint; 4]> = points.into_iter().collect();
        for p in &points {
            space.check_point(p)?;
        }
        Self::from_canonical(points)
    }

    fn from_canonical(mut points: SmallVec<[StarPoint; 4]>) -> Result<Self> {
        if points.is_empty() {
            return domain("a finite point set must be nonempty");
        }
        points.sort_unstable();
        points.dedup();
        Ok(Self { points })
    }

    pub fn points(&self) -> &[StarPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn contains(&self, p: &StarPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }
}

impl SegmentSet for FinitePointSet {
    fn segments(&self) -> Segments {
        self.points.iter().map(|p| Segment { edge: p.edge, lo: p.t, hi: p.t }).collect()
    }
}

impl Induced for FinitePointSet {
    fn induced(&self, h: &StarHomeo) -> Self {
        let image = self.points.iter().map(|p| h.apply(p)).collect();
        Self::from_canonical(image).expect("image of a nonempty set is nonempty")
    }
}

/// A finite union of pairwise disjoint closed intervals in `[0, 1]`, the
/// unit interval being the one-edge star.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcUnion {
    arcs: SmallVec<[(f64, f64); 2]>,
}

impl ArcUnion {
    pub fn new(arcs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let arcs: SmallVec<[(f64, f64); 2]> = arcs.into_iter().collect();
        if arcs.is_empty() {
            return domain("an arc union must be nonempty");
        }
        for (i, &(a, b)) in arcs.iter().enumerate() {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return domain(format!("arc {i} = [{a}, {b}] is not a subinterval of [0, 1]"));
            }
            if i > 0 && !(arcs[i - 1].1 < a) {
                return domain(format!("arcs {} and {i} overlap or are out of order", i - 1));
            }
        }
        Ok(Self { arcs: arcs.into_iter().map(|(a, b)| (a + 0.0, b + 0.0)).collect() })
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn components(&self) -> usize {
        self.arcs.len()
    }
}

impl SegmentSet for ArcUnion {
    fn segments(&self) -> Segments {
        self.arcs.iter().map(|&(a, b)| Segment { edge: 0, lo: a, hi: b }).collect()
    }
}

impl Induced for ArcUnion {
    /// `h` must live on the unit interval.
    fn induced(&self, h: &StarHomeo) -> Self {
        debug_assert_eq!(h.space().k(), 1);
        let image = |t: f64| h.apply(&StarPoint { edge: 0, t }).t;
        let mut arcs: SmallVec<[(f64, f64); 2]> = SmallVec::new();
        for &(a, b) in &self.arcs {
            let (fa, fb) = (image(a), image(b));
            match arcs.last_mut() {
                // only the underflow clamp can make two images touch
                Some(last) if last.1 >= fa => last.1 = last.1.max(fb),
                _ => arcs.push((fa, fb)),
            }
        }
        ArcUnion { arcs }
    }
}

/// Any of the three representations, for heterogeneous collections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HyperElement {
    Continuum(Subcontinuum),
    Points(FinitePointSet),
    Arcs(ArcUnion),
}

impl SegmentSet for HyperElement {
    fn segments(&self) -> Segments {
        match self {
            HyperElement::Continuum(c) => c.segments(),
            HyperElement::Points(p) => p.segments(),
            HyperElement::Arcs(a) => a.segments(),
        }
    }
}

impl Induced for HyperElement {
    fn induced(&self, h: &StarHomeo) -> Self {
        match self {
            HyperElement::Continuum(c) => HyperElement::Continuum(c.induced(h)),
            HyperElement::Points(p) => HyperElement::Points(p.induced(h)),
            HyperElement::Arcs(a) => HyperElement::Arcs(a.induced(h)),
        }
    }
}

/// Image of a set under the induced map `2^f`.
pub fn induced_apply<S: Induced>(h: &StarHomeo, s: &S) -> S {
    s.induced(h)
}

/// Hausdorff distance between two finite unions of segments.
///
/// The distance from a moving point to a union of segments is piecewise
/// linear with slopes ±1 along an edge, so the directed supremum over a
/// segment is attained at one of its endpoints or at the midpoint of a gap
/// of the other set (the route through the branch acts as one more interval
/// to the left of the edge).
pub fn hausdorff<A: SegmentSet + ?Sized, B: SegmentSet + ?Sized>(_space: &StarSpace, s: &A, t: &B) -> f64 {
    hausdorff_segments(&s.segments(), &t.segments())
}

/// Distance from the point `y` to a union of segments.
pub fn point_to_segments(y: &StarPoint, segs: &[Segment]) -> f64 {
    segs.iter().fold(f64::INFINITY, |best, s| {
        let d = if s.edge == y.edge || y.t == 0.0 {
            if y.t < s.lo {
                s.lo - y.t
            } else if y.t > s.hi {
                y.t - s.hi
            } else {
                0.0
            }
        } else {
            y.t + s.lo
        };
        best.min(d)
    })
}

/// Points whose distance functions serve as 1-Lipschitz probes: the branch
/// point and the quarter points of every edge.
pub fn probe_points(space: &StarSpace) -> Vec<StarPoint> {
    let mut out = vec![StarPoint::BRANCH];
    for j in 0..space.k() {
        let len = space.edge_length(j);
        out.extend([0.25, 0.5, 0.75, 1.0].map(|q| StarPoint { edge: j, t: q * len }));
    }
    out
}

/// Hausdorff distance between two segment lists.
pub fn hausdorff_segments(s: &[Segment], t: &[Segment]) -> f64 {
    directed(s, t).max(directed(t, s))
}

/// `sup_{x in s} dist(x, t)`.
pub fn directed(s: &[Segment], t: &[Segment]) -> f64 {
    let mut worst = 0.0f64;
    let mut line: SmallVec<[(f64, f64); 8]> = SmallVec::new();
    for seg in s {
        line.clear();
        let mut via_branch = f64::INFINITY;
        for other in t {
            if other.edge == seg.edge {
                line.push((other.lo, other.hi));
            } else {
                via_branch = via_branch.min(other.lo);
            }
        }
        if via_branch.is_finite() {
            line.push((f64::NEG_INFINITY, -via_branch));
        }
        line.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        let dist = |x: f64| -> f64 {
            line.iter().fold(f64::INFINITY, |best, &(lo, hi)| {
                let d = if x < lo {
                    lo - x
                } else if x > hi {
                    x - hi
                } else {
                    0.0
                };
                best.min(d)
            })
        };
        worst = worst.max(dist(seg.lo)).max(dist(seg.hi));
        let mut reach = f64::NEG_INFINITY;
        for &(lo, hi) in line.iter() {
            if lo > reach && reach > f64::NEG_INFINITY {
                let mid = 0.5 * (reach + lo);
                if mid > seg.lo && mid < seg.hi {
                    worst = worst.max(dist(mid));
                }
            }
            reach = reach.max(hi);
        }
    }
    worst
}

/// The endpoint set `E(K)`: tips of the positive reaches of a star piece (or
/// the branch itself when every reach is zero), or the ends of an arc.
pub fn endpoints(s: &Subcontinuum) -> FinitePointSet {
    let pts: SmallVec<[StarPoint; 4]> = match s {
        Subcontinuum::Arc { edge, a, b } => {
            [StarPoint { edge: *edge, t: *a }, StarPoint { edge: *edge, t: *b }].into_iter().collect()
        }
        Subcontinuum::StarPiece { reaches } => {
            let tips: SmallVec<[StarPoint; 4]> = reaches
                .iter()
                .enumerate()
                .filter(|(_, r)| **r > 0.0)
                .map(|(edge, &t)| StarPoint { edge, t })
                .collect();
            if tips.is_empty() {
                [StarPoint::BRANCH].into_iter().collect()
            } else {
                tips
            }
        }
    };
    FinitePointSet::from_canonical(pts).expect("endpoint sets are nonempty")
}

/// All interval endpoints of an arc union, as a subset of `[0, 1]`.
pub fn boundary(u: &ArcUnion) -> FinitePointSet {
    let pts = u
        .arcs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .map(|t| if t == 0.0 { StarPoint::BRANCH } else { StarPoint { edge: 0, t } })
        .collect();
    FinitePointSet::from_canonical(pts).expect("boundary of a nonempty union is nonempty")
}

/// The pieces of `C_2([0,1])`: two nondegenerate intervals (`A`), an
/// interval then a point (`B1`), a point then an interval (`B2`), a single
/// interval (`C`), and two points (`Other`, which fits none of the four).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum C2Class {
    A,
    B1,
    B2,
    C,
    Other,
}

pub fn classify_c2(u: &ArcUnion) -> Result<C2Class> {
    match u.arcs() {
        [_] => Ok(C2Class::C),
        [(a, b), (c, d)] => Ok(match (a < b, c < d) {
            (true, true) => C2Class::A,
            (true, false) => C2Class::B1,
            (false, true) => C2Class::B2,
            (false, false) => C2Class::Other,
        }),
        arcs => domain(format!("{} components is more than C_2 allows", arcs.len())),
    }
}

/// The star piece with the given tips, an element of `Y` (at least two
/// edges reached).
pub fn make_y_element(space: &StarSpace, tips: &[(usize, f64)]) -> Result<Subcontinuum> {
    if tips.len() < 2 || tips.len() > space.k() {
        return domain(format!("an element of Y has between 2 and {} tips, got {}", space.k(), tips.len()));
    }
    let mut reaches = vec![0.0; space.k()];
    for &(edge, t) in tips {
        if edge >= space.k() {
            return domain(format!("edge {edge} does not exist"));
        }
        if reaches[edge] > 0.0 {
            return domain(format!("two tips on edge {edge}"));
        }
        if !(t > 0.0 && t <= space.edge_length(edge)) {
            return domain(format!("tip {t} must lie in (0, {}] on edge {edge}", space.edge_length(edge)));
        }
        reaches[edge] = t;
    }
    Subcontinuum::star_piece(space, &reaches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::EdgeMap;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hausdorff_examples() {
        let i = StarSpace::unit_interval();
        let whole = ArcUnion::new([(0.0, 1.0)]).unwrap();
        let ends = FinitePointSet::new(&i, [StarPoint::BRANCH, StarPoint { edge: 0, t: 1.0 }]).unwrap();
        assert!(close(hausdorff(&i, &whole, &ends), 0.5));

        let x = StarSpace::uniform(3).unwrap();
        let a = Subcontinuum::star_piece(&x, &[0.5, 0.2, 0.0]).unwrap();
        let b = Subcontinuum::star_piece(&x, &[0.3, 0.2, 0.1]).unwrap();
        assert!(close(hausdorff(&x, &a, &b), 0.2));

        let two = ArcUnion::new([(0.1, 0.2), (0.5, 0.9)]).unwrap();
        let one = ArcUnion::new([(0.1, 0.9)]).unwrap();
        assert!(close(hausdorff(&i, &two, &one), 0.15));
    }

    #[test]
    fn hausdorff_across_branch() {
        let x = StarSpace::uniform(3).unwrap();
        let arc = Subcontinuum::arc(&x, 2, 0.4, 0.6).unwrap();
        let b = Subcontinuum::singleton(&x, StarPoint::BRANCH).unwrap();
        assert!(close(hausdorff(&x, &arc, &b), 0.6));
        let tip = FinitePointSet::new(&x, [x.point(0, 0.3).unwrap()]).unwrap();
        // farthest arc point from (0, 0.3) is (2, 0.6): 0.9
        assert!(close(hausdorff(&x, &arc, &tip), 0.9));
        // from (1, 1.0) the arc is 0.6 away, from the branch 0.2
        let a = Subcontinuum::star_piece(&x, &[0.0, 1.0, 0.0]).unwrap();
        let c = Subcontinuum::arc(&x, 1, 0.2, 0.4).unwrap();
        assert!(close(hausdorff(&x, &a, &c), 0.6));
        assert_eq!(hausdorff(&x, &a, &a), 0.0);
    }

    #[test]
    fn induced_examples() {
        let x = StarSpace::uniform(2).unwrap();
        let sq = StarHomeo::fixing_edges(x.clone(), vec![EdgeMap::identity(), EdgeMap::power(2.0).unwrap()]).unwrap();
        let arc = Subcontinuum::arc(&x, 1, 0.4, 0.6).unwrap();
        match induced_apply(&sq, &arc) {
            Subcontinuum::Arc { edge, a, b } => {
                assert_eq!(edge, 1);
                assert!(close(a, 0.16) && close(b, 0.36));
            }
            other => panic!("{other:?}"),
        }
        let id = StarHomeo::identity(x.clone());
        assert_eq!(induced_apply(&id, &arc), arc);

        let swap = StarHomeo::new(x.clone(), vec![1, 0], vec![EdgeMap::identity(); 2]).unwrap();
        let piece = Subcontinuum::star_piece(&x, &[0.3, 0.7]).unwrap();
        assert_eq!(induced_apply(&swap, &piece), Subcontinuum::star_piece(&x, &[0.7, 0.3]).unwrap());
    }

    #[test]
    fn underflow_turns_arc_into_star_piece() {
        let x = StarSpace::uniform(2).unwrap();
        let h = StarHomeo::fixing_edges(x.clone(), vec![EdgeMap::power(400.0).unwrap(), EdgeMap::identity()]).unwrap();
        let arc = Subcontinuum::arc(&x, 0, 1e-3, 0.99).unwrap();
        match induced_apply(&h, &arc) {
            Subcontinuum::StarPiece { reaches } => assert!(reaches[0] > 0.0 && reaches[1] == 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn endpoint_examples() {
        let x = StarSpace::uniform(3).unwrap();
        let e = endpoints(&Subcontinuum::star_piece(&x, &[0.5, 0.2, 0.0]).unwrap());
        assert_eq!(e.points(), &[x.point(0, 0.5).unwrap(), x.point(1, 0.2).unwrap()]);
        let e = endpoints(&Subcontinuum::star_piece(&x, &[0.0; 3]).unwrap());
        assert_eq!(e.points(), &[StarPoint::BRANCH]);
        let e = endpoints(&Subcontinuum::arc(&x, 2, 0.3, 0.3).unwrap());
        assert_eq!(e.points(), &[x.point(2, 0.3).unwrap()]);
    }

    #[test]
    fn boundary_examples() {
        let ts = |u: &ArcUnion| boundary(u).points().iter().map(|p| p.t).collect::<Vec<_>>();
        assert_eq!(ts(&ArcUnion::new([(0.1, 0.2), (0.5, 0.9)]).unwrap()), vec![0.1, 0.2, 0.5, 0.9]);
        assert_eq!(ts(&ArcUnion::new([(0.3, 0.3)]).unwrap()), vec![0.3]);
        assert_eq!(ts(&ArcUnion::new([(0.0, 1.0)]).unwrap()), vec![0.0, 1.0]);
    }

    #[test]
    fn c2_classes() {
        let c = |arcs: &[(f64, f64)]| classify_c2(&ArcUnion::new(arcs.iter().copied()).unwrap()).unwrap();
        assert_eq!(c(&[(0.1, 0.2), (0.5, 0.9)]), C2Class::A);
        assert_eq!(c(&[(0.1, 0.4), (0.7, 0.7)]), C2Class::B1);
        assert_eq!(c(&[(0.1, 0.1), (0.7, 0.8)]), C2Class::B2);
        assert_eq!(c(&[(0.2, 0.6)]), C2Class::C);
        assert_eq!(c(&[(0.2, 0.2), (0.6, 0.6)]), C2Class::Other);
        let three = ArcUnion::new([(0.1, 0.2), (0.3, 0.4), (0.5, 0.6)]).unwrap();
        assert!(classify_c2(&three).is_err());
    }

    #[test]
    fn arc_union_validation() {
        assert!(ArcUnion::new([]).is_err());
        assert!(ArcUnion::new([(0.2, 0.1)]).is_err());
        assert!(ArcUnion::new([(0.1, 0.3), (0.3, 0.5)]).is_err());
        assert!(ArcUnion::new([(0.5, 0.6), (0.1, 0.2)]).is_err());
        assert!(ArcUnion::new([(0.5, 1.2)]).is_err());
    }

    #[test]
    fn y_elements() {
        let x = StarSpace::uniform(3).unwrap();
        let k = make_y_element(&x, &[(0, 0.5), (2, 0.1)]).unwrap();
        assert_eq!(k, Subcontinuum::star_piece(&x, &[0.5, 0.0, 0.1]).unwrap());
        assert!(k.in_y());
        let e = endpoints(&k);
        assert_eq!(e.points(), &[x.point(0, 0.5).unwrap(), x.point(2, 0.1).unwrap()]);
        assert!(make_y_element(&x, &[(1, 0.4)]).is_err());
        assert!(make_y_element(&x, &[(1, 0.4), (1, 0.3)]).is_err());
        assert!(make_y_element(&x, &[(1, 0.4), (2, 0.0)]).is_err());
        let full = make_y_element(&x, &[(0, 0.2), (1, 0.2), (2, 0.2)]).unwrap();
        assert_eq!(full, Subcontinuum::star_piece(&x, &[0.2; 3]).unwrap());
    }

    #[test]
    fn point_sets_sort_and_dedup() {
        let x = StarSpace::uniform(2).unwrap();
        let s = FinitePointSet::new(&x, [x.point(1, 0.2).unwrap(), x.point(0, 0.4).unwrap(), x.point(1, 0.2).unwrap()]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.points()[0].edge, 0);
        assert!(FinitePointSet::new(&x, []).is_err());
    }
}
