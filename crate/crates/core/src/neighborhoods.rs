//! Exact point sets and interval sets on [0, 1]: the mod-1/q projection, the
//! obstruction sets X_q, Y_q, Z_q, the smallest-gap value alpha_q, epsilon
//! neighborhoods, and images of interval sets under an IET.

use serde::{Deserialize, Serialize};

use crate::iet::Iet;
use crate::scalar::Scalar;

/// A finite set of exact points in [0, 1], sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet {
    points: Vec<Scalar>,
}

impl PointSet {
    pub fn from_points(mut points: Vec<Scalar>) -> Self {
        points.sort();
        points.dedup();
        PointSet { points }
    }

    pub fn empty() -> Self {
        PointSet { points: Vec::new() }
    }

    pub fn points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Scalar) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        PointSet::from_points(pts)
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }
}

/// The grid {0, 1/q, ..., (q-1)/q} together with 1.
pub fn grid(q: u64) -> PointSet {
    let q = q as i64;
    PointSet::from_points((0..=q).map(|j| Scalar::ratio(j, q)).collect())
}

/// Canonical projection of each point to [0, 1/q) modulo 1/q; 1 maps to 0.
pub fn project_mod_q(set: &PointSet, q: u64) -> PointSet {
    let step = Scalar::ratio(1, q as i64);
    PointSet::from_points(set.points().iter().map(|p| p.rem_euclid(&step)).collect())
}

/// X_q(S): discontinuities of S^{-1}, the image of the grid under S, and the
/// grid itself (with 1).
pub fn x_q(s: &Iet, q: u64) -> PointSet {
    let mut pts = s.inverse_discontinuities().points().to_vec();
    for j in 0..q as i64 {
        let g = Scalar::ratio(j, q as i64);
        pts.push(s.evaluate(&g).expect("grid point below 1"));
        pts.push(g);
    }
    pts.push(Scalar::one());
    PointSet::from_points(pts)
}

/// Y_q(S) = the projection of X_q(S) modulo 1/q.
pub fn y_q(s: &Iet, q: u64) -> PointSet {
    project_mod_q(&x_q(s, q), q)
}

/// Z_q(S): the q translated copies of Y_q(S), plus the point 1.
pub fn z_q(s: &Iet, q: u64) -> PointSet {
    let y = y_q(s, q);
    let mut pts = Vec::with_capacity(y.len() * q as usize + 1);
    for j in 0..q as i64 {
        let shift = Scalar::ratio(j, q as i64);
        for p in y.points() {
            pts.push(p + &shift);
        }
    }
    pts.push(Scalar::one());
    PointSet::from_points(pts)
}

/// alpha_q(S): the length of the smallest connected component of
/// [0, 1/q) minus Y_q(S).
///
/// When S is q-rational, Y_q(S) collapses to the single point {0}; following
/// the characterization "alpha_q(S) = 0 iff S is q-rational", that degenerate
/// case returns 0.
pub fn alpha_q(s: &Iet, q: u64) -> Scalar {
    let y = y_q(s, q);
    let step = Scalar::ratio(1, q as i64);
    debug_assert!(y.contains(&Scalar::zero()));
    if y.len() == 1 {
        return Scalar::zero();
    }
    let pts = y.points();
    let mut min_gap: Option<Scalar> = None;
    for w in pts.windows(2) {
        let gap = &w[1] - &w[0];
        min_gap = Some(match min_gap {
            Some(m) => m.min(gap),
            None => gap,
        });
    }
    let last_gap = &step - pts.last().unwrap();
    min_gap.unwrap().min(last_gap)
}

/// Membership in U_eps^q = { R | alpha_q(R) > eps }.
pub fn in_u_eps_q(r: &Iet, eps: &Scalar, q: u64) -> bool {
    &alpha_q(r, q) > eps
}

/// Whether the points of Delta(S^{-1}) together with 0 are pairwise distinct
/// modulo 1/q (the hypothesis under which U_eps^q is a neighbourhood of S).
pub fn inverse_discontinuities_distinct_mod_q(s: &Iet, q: u64) -> bool {
    let mut pts = s.inverse_discontinuities().points().to_vec();
    pts.push(Scalar::zero());
    distinct_mod_q(&pts, q)
}

/// Whether the points of Delta(S) are pairwise distinct modulo 1/q (the
/// variant hypothesis used by the relation construction).
pub fn discontinuities_distinct_mod_q(s: &Iet, q: u64) -> bool {
    distinct_mod_q(s.discontinuities().points(), q)
}

fn distinct_mod_q(pts: &[Scalar], q: u64) -> bool {
    let step = Scalar::ratio(1, q as i64);
    let mut reps: Vec<Scalar> = pts.iter().map(|p| p.rem_euclid(&step)).collect();
    reps.sort();
    let before = reps.len();
    reps.dedup();
    reps.len() == before
}

/// A finite union of disjoint, non-adjacent half-open intervals [lo, hi)
/// inside [0, 1).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<(Scalar, Scalar)>,
}

impl IntervalSet {
    /// Normalizes arbitrary intervals within [0, 1): drops empty ones,
    /// sorts, merges overlapping or adjacent ones.
    pub fn from_intervals(mut intervals: Vec<(Scalar, Scalar)>) -> Self {
        intervals.retain(|(lo, hi)| lo < hi);
        intervals.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Scalar, Scalar)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        debug_assert!(merged
            .first()
            .is_none_or(|(lo, _)| !lo.is_negative()));
        debug_assert!(merged.last().is_none_or(|(_, hi)| hi <= &Scalar::one()));
        IntervalSet { intervals: merged }
    }

    pub fn empty() -> Self {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        IntervalSet::from_intervals(vec![(Scalar::zero(), Scalar::one())])
    }

    pub fn intervals(&self) -> &[(Scalar, Scalar)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for (lo, hi) in &self.intervals {
            acc = acc + (hi - lo);
        }
        acc
    }

    pub fn contains_point(&self, x: &Scalar) -> bool {
        self.intervals.iter().any(|(lo, hi)| lo <= x && x < hi)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        IntervalSet::from_intervals(v)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (alo, ahi) in &self.intervals {
            for (blo, bhi) in &other.intervals {
                let lo = if alo > blo { alo.clone() } else { blo.clone() };
                let hi = if ahi < bhi { ahi.clone() } else { bhi.clone() };
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// Complement within [0, 1).
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut cursor = Scalar::zero();
        for (lo, hi) in &self.intervals {
            if &cursor < lo {
                out.push((cursor.clone(), lo.clone()));
            }
            cursor = hi.clone();
        }
        if cursor < Scalar::one() {
            out.push((cursor, Scalar::one()));
        }
        IntervalSet::from_intervals(out)
    }

    /// Exact inclusion test: every interval of self lies inside a single
    /// interval of `other` (both are normalized).
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|(lo, hi)| {
            other
                .intervals
                .iter()
                .any(|(olo, ohi)| olo <= lo && hi <= ohi)
        })
    }
}

/// Open epsilon-neighborhood of a point set, clipped to [0, 1) and stored as
/// half-open intervals. All downstream uses are strict-threshold inclusion
/// tests, for which the boundary convention is immaterial.
pub fn neighborhood(points: &PointSet, eps: &Scalar) -> IntervalSet {
    debug_assert!(eps.is_positive());
    let intervals = points
        .points()
        .iter()
        .map(|p| {
            let lo = (p - eps).max(Scalar::zero());
            let hi = (p + eps).min(Scalar::one());
            (lo, hi)
        })
        .collect();
    IntervalSet::from_intervals(intervals)
}

/// Exact image of an interval set under an IET: each fragment of each
/// interval is translated by the containing continuity interval's amount.
pub fn image_set(t: &Iet, a: &IntervalSet) -> IntervalSet {
    let mut out = Vec::new();
    let cuts: Vec<Scalar> = {
        let mut c = vec![Scalar::zero()];
        c.extend_from_slice(t.breakpoints());
        c.push(Scalar::one());
        c
    };
    for (lo, hi) in a.intervals() {
        for i in 0..t.n() {
            let plo = if lo > &cuts[i] { lo.clone() } else { cuts[i].clone() };
            let phi = if hi < &cuts[i + 1] { hi.clone() } else { cuts[i + 1].clone() };
            if plo < phi {
                let w = &t.translations()[i];
                out.push((&plo + w, &phi + w));
            }
        }
    }
    IntervalSet::from_intervals(out)
}
