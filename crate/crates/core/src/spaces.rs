//! The k-star: `k` closed edges glued at a single branch point.
//!
//! A point is an edge index plus the arc-length coordinate measured from the
//! branch point. The branch point itself is stored as `(0, 0.0)` so that
//! equal points are bitwise equal. With `k = 1` the star is the interval
//! `[0, L_0]`; with `k = 2` it is an interval whose interior point is the
//! branch.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarSpace {
    edge_lengths: Vec<f64>,
}

impl StarSpace {
    pub fn new(edge_lengths: Vec<f64>) -> Result<Self> {
        if edge_lengths.is_empty() {
            return domain("a star needs at least one edge");
        }
        if let Some(j) = edge_lengths.iter().position(|l| !(l.is_finite() && *l > 0.0)) {
            return domain(format!("edge {j} has non-positive length {}", edge_lengths[j]));
        }
        Ok(Self { edge_lengths })
    }

    /// `k` edges of unit length.
    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0; k])
    }

    /// The unit interval `[0, 1]`, seen as a one-edge star.
    pub fn unit_interval() -> Self {
        Self { edge_lengths: vec![1.0] }
    }

    pub fn k(&self) -> usize {
        self.edge_lengths.len()
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        self.edge_lengths[edge]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn branch(&self) -> StarPoint {
        StarPoint::BRANCH
    }

    /// Largest distance between two points: the two longest edges end to end.
    pub fn diameter(&self) -> f64 {
        let mut sorted = self.edge_lengths.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        sorted.iter().take(2).sum()
    }

    /// Builds a canonical point, rejecting coordinates off the edge.
    pub fn point(&self, edge: usize, t: f64) -> Result<StarPoint> {
        self.canonicalize(StarPoint { edge, t })
    }

    pub fn canonicalize(&self, p: StarPoint) -> Result<StarPoint> {
        if p.edge >= self.k() {
            return domain(format!("edge {} does not exist in a {}-star", p.edge, self.k()));
        }
        let len = self.edge_lengths[p.edge];
        if !(p.t >= 0.0 && p.t <= len) {
            return domain(format!("coordinate {} outside [0, {len}] on edge {}", p.t, p.edge));
        }
        if p.t == 0.0 {
            return Ok(StarPoint::BRANCH);
        }
        Ok(p)
    }

    /// Geodesic distance. Both points must be canonical.
    pub fn distance(&self, p: &StarPoint, q: &StarPoint) -> f64 {
        if p.edge == q.edge {
            (p.t - q.t).abs()
        } else {
            p.t + q.t
        }
    }

    pub(crate) fn check_point(&self, p: &StarPoint) -> Result<()> {
        let c = self.canonicalize(*p)?;
        if c != *p {
            return Err(Error::Domain(format!("point {p:?} is not canonical")));
        }
        Ok(())
    }
}

/// A point of a star: edge index and distance from the branch point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StarPoint {
    pub edge: usize,
    pub t: f64,
}

impl StarPoint {
    pub const BRANCH: StarPoint = StarPoint { edge: 0, t: 0.0 };

    pub fn is_branch(&self) -> bool {
        self.t == 0.0
    }
}

impl PartialEq for StarPoint {
    fn eq(&self, other: &Self) -> bool {
        self.edge == other.edge && self.t.to_bits() == other.t.to_bits()
    }
}

impl Eq for StarPoint {}

impl Hash for StarPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.edge.hash(state);
        self.t.to_bits().hash(state);
    }
}

impl PartialOrd for StarPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StarPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edge.cmp(&other.edge).then(self.t.total_cmp(&other.t))
    }
}
