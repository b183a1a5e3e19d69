//! Seeded random hyperspace elements.

use hyperent::hyperspace::make_y_element;
use hyperent::{ArcUnion, FinitePointSet, StarPoint, StarSpace, Subcontinuum};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A coordinate in `(0, len]`.
fn coord(rng: &mut SeededRng, len: f64) -> f64 {
    len * (1.0 - rng.gen::<f64>())
}

pub fn point(rng: &mut SeededRng, x: &StarSpace) -> StarPoint {
    let e = rng.gen_range(0..x.k());
    x.point(e, coord(rng, x.edge_length(e))).expect("coordinate in range")
}

/// An arc inside one closed edge, or a sub-star through the branch point,
/// with equal odds.
pub fn subcontinuum(rng: &mut SeededRng, x: &StarSpace) -> Subcontinuum {
    if rng.gen_bool(0.5) {
        let e = rng.gen_range(0..x.k());
        let (a, b) = (coord(rng, x.edge_length(e)), coord(rng, x.edge_length(e)));
        Subcontinuum::arc(x, e, a.min(b), a.max(b)).expect("valid arc")
    } else {
        let reaches: Vec<f64> =
            (0..x.k()).map(|e| if rng.gen_bool(0.6) { coord(rng, x.edge_length(e)) } else { 0.0 }).collect();
        Subcontinuum::star_piece(x, &reaches).expect("valid reaches")
    }
}

/// A sub-star reaching a random set of at least two edges.
pub fn y_element(rng: &mut SeededRng, x: &StarSpace) -> Subcontinuum {
    let mut edges: Vec<usize> = (0..x.k()).collect();
    edges.shuffle(rng);
    let count = rng.gen_range(2..=x.k());
    y_element_on(rng, x, &edges[..count])
}

/// A sub-star reaching exactly the given edges.
pub fn y_element_on(rng: &mut SeededRng, x: &StarSpace, edges: &[usize]) -> Subcontinuum {
    let tips: Vec<(usize, f64)> = edges.iter().map(|&e| (e, coord(rng, x.edge_length(e)))).collect();
    make_y_element(x, &tips).expect("valid tips")
}

pub fn point_set(rng: &mut SeededRng, x: &StarSpace, max: usize) -> FinitePointSet {
    let n = rng.gen_range(1..=max);
    FinitePointSet::new(x, (0..n).map(|_| point(rng, x))).expect("nonempty")
}

/// `2c` distinct values in `[0, 1]`, sorted.
fn sorted_distinct(rng: &mut SeededRng, count: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.gen::<f64>()).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[0] < w[1]) {
            return v;
        }
    }
}

/// A union of up to `max` disjoint arcs in `[0, 1]`; each arc is
/// degenerate with probability 1/4.
pub fn arc_union(rng: &mut SeededRng, max: usize) -> ArcUnion {
    let c = rng.gen_range(1..=max);
    let ends = sorted_distinct(rng, 2 * c);
    let arcs: Vec<(f64, f64)> =
        ends.chunks(2).map(|w| if rng.gen_bool(0.25) { (w[0], w[0]) } else { (w[0], w[1]) }).collect();
    ArcUnion::new(arcs).expect("disjoint arcs")
}

/// An element of class `A`: two nondegenerate disjoint intervals.
pub fn class_a(rng: &mut SeededRng) -> ArcUnion {
    let v = sorted_distinct(rng, 4);
    ArcUnion::new([(v[0], v[1]), (v[2], v[3])]).expect("disjoint arcs")
}

/// An element of `A`, `B1`, `B2` or `C`, uniformly over the class.
pub fn c2_element(rng: &mut SeededRng) -> ArcUnion {
    match rng.gen_range(0..4) {
        0 => class_a(rng),
        1 => {
            let v = sorted_distinct(rng, 3);
            ArcUnion::new([(v[0], v[1]), (v[2], v[2])]).expect("disjoint")
        }
        2 => {
            let v = sorted_distinct(rng, 3);
            ArcUnion::new([(v[0], v[0]), (v[1], v[2])]).expect("disjoint")
        }
        _ => {
            let v = sorted_distinct(rng, 2);
            ArcUnion::new([(v[0], v[1])]).expect("valid")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperent::hyperspace::classify_c2;
    use hyperent::C2Class;

    #[test]
    fn samplers_are_seeded() {
        let x = StarSpace::new(vec![1.0, 0.7, 1.3]).unwrap();
        let draw = |seed| {
            let mut r = rng(seed);
            (0..20).map(|_| subcontinuum(&mut r, &x)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn class_samplers_hit_their_class() {
        let mut r = rng(1);
        for _ in 0..200 {
            assert_eq!(classify_c2(&class_a(&mut r)).unwrap(), C2Class::A);
            assert_ne!(classify_c2(&c2_element(&mut r)).unwrap(), C2Class::Other);
            assert!(arc_union(&mut r, 3).components() <= 3);
        }
        let x = StarSpace::uniform(3).unwrap();
        assert!((0..200).all(|_| y_element(&mut r, &x).in_y()));
    }
}
