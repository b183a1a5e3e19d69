//! Brute-force Hausdorff distance on densely sampled sets; a test oracle
//! for the closed form, never used for estimates.

use hyperent::hyperspace::Segment;

/// Points of a set of segments, sampled every `resolution` or closer, kept
/// sorted per edge.
pub struct Dense {
    per_edge: Vec<Vec<f64>>,
    /// Smallest coordinate per edge (`inf` when the edge holds no sample).
    nearest_branch: Vec<f64>,
}

impl Dense {
    pub fn new(k: usize, segs: &[Segment], resolution: f64) -> Self {
        let mut per_edge = vec![Vec::new(); k];
        for s in segs {
            let steps = ((s.hi - s.lo) / resolution).ceil().max(1.0) as usize;
            let v = &mut per_edge[s.edge];
            for i in 0..=steps {
                v.push(if i == steps { s.hi } else { s.lo + (s.hi - s.lo) * i as f64 / steps as f64 });
            }
        }
        for v in &mut per_edge {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        let nearest_branch = per_edge.iter().map(|v| v.first().copied().unwrap_or(f64::INFINITY)).collect();
        Dense { per_edge, nearest_branch }
    }

    /// Distance from `(edge, t)` to the nearest sample.
    pub fn distance_from(&self, edge: usize, t: f64) -> f64 {
        let v = &self.per_edge[edge];
        let i = v.partition_point(|&s| s < t);
        let mut best = f64::INFINITY;
        if i < v.len() {
            best = best.min(v[i] - t);
        }
        if i > 0 {
            best = best.min(t - v[i - 1]);
        }
        for (e, &b) in self.nearest_branch.iter().enumerate() {
            if e != edge {
                best = best.min(t + b);
            }
        }
        best
    }

    fn directed_to(&self, other: &Dense) -> f64 {
        let mut worst = 0.0f64;
        for (e, v) in self.per_edge.iter().enumerate() {
            for &t in v {
                worst = worst.max(other.distance_from(e, t));
            }
        }
        worst
    }
}

pub fn hausdorff(k: usize, s: &[Segment], t: &[Segment], resolution: f64) -> f64 {
    let a = Dense::new(k, s, resolution);
    let b = Dense::new(k, t, resolution);
    a.directed_to(&b).max(b.directed_to(&a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(edge: usize, lo: f64, hi: f64) -> Segment {
        Segment { edge, lo, hi }
    }

    #[test]
    fn oracle_on_hand_cases() {
        // [0, 1] against its endpoints
        let d = hausdorff(1, &[seg(0, 0.0, 1.0)], &[seg(0, 0.0, 0.0), seg(0, 1.0, 1.0)], 1e-3);
        assert!((d - 0.5).abs() <= 1e-3);
        // points on different edges meet through the branch point
        let d = hausdorff(3, &[seg(0, 0.3, 0.3)], &[seg(2, 0.4, 0.4)], 1e-3);
        assert_eq!(d, 0.7);
    }
}
