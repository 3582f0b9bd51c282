//! Rotating sweep over planar directions θ ∈ [0, π).
//!
//! The canonical order of a planar point set along u(θ) = (cos θ, sin θ)
//! changes only at angles where two distinct points have equal
//! projections. The sweep walks those angles in increasing order, merging
//! angles closer than [`ANGLE_TOL`]. At each group the affected positions
//! form disjoint contiguous blocks, which are re-sorted by projection at the
//! midpoint of the following interval. Consumers update their own per
//! position data for the reported blocks only.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::geom::canonical_cmp;

pub(crate) const ANGLE_TOL: f64 = 1e-12;

pub(crate) struct RotatingSweep<'a> {
    pts: &'a [[f64; 2]],
    /// Distinct group angles in (0, π) with the pairs swapping there.
    groups: Vec<(f64, Vec<(u32, u32)>)>,
    next: usize,
    /// `order[k]` is the point at position k (position 0 ranks highest).
    pub order: Vec<usize>,
    /// Inverse of `order`.
    pub pos: Vec<usize>,
}

fn direction(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

fn sort_at(pts: &[[f64; 2]], idx: &mut [usize], theta: f64) {
    let u = direction(theta);
    idx.sort_by(|&a, &b| {
        let pa = pts[a][0] * u[0] + pts[a][1] * u[1];
        let pb = pts[b][0] * u[0] + pts[b][1] * u[1];
        canonical_cmp(pa, &pts[a], a, pb, &pts[b], b)
    });
}

/// Angle in [0, π) at which the projections of `a` and `b` coincide.
pub(crate) fn swap_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    let mut t = (b[1] - a[1]).atan2(b[0] - a[0]) + PI / 2.0;
    while t >= PI {
        t -= PI;
    }
    while t < 0.0 {
        t += PI;
    }
    if PI - t <= ANGLE_TOL {
        0.0
    } else {
        t
    }
}

impl<'a> RotatingSweep<'a> {
    pub fn new(pts: &'a [[f64; 2]]) -> Self {
        let n = pts.len();
        let mut events: Vec<(f64, u32, u32)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                if pts[i] == pts[j] {
                    continue;
                }
                events.push((swap_angle(pts[i], pts[j]), i as u32, j as u32));
            }
        }
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut groups: Vec<(f64, Vec<(u32, u32)>)> = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for (t, i, j) in events {
            if t - last <= ANGLE_TOL {
                groups.last_mut().unwrap().1.push((i, j));
            } else {
                groups.push((t, vec![(i, j)]));
            }
            last = t;
        }
        if groups.first().map_or(false, |g| g.0 <= ANGLE_TOL) {
            groups.remove(0);
        }
        let first_end = groups.first().map_or(PI, |g| g.0);
        let mut order: Vec<usize> = (0..n).collect();
        sort_at(pts, &mut order, first_end / 2.0);
        let mut pos = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        RotatingSweep {
            pts,
            groups,
            next: 0,
            order,
            pos,
        }
    }

    /// Number of intervals partitioning [0, π).
    #[cfg(test)]
    pub fn interval_count(&self) -> usize {
        self.groups.len() + 1
    }

    /// Angles at which intervals start, beginning with 0.
    pub fn interval_starts(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.groups.iter().map(|g| g.0))
            .collect()
    }

    /// Processes the next breakpoint group. Returns its angle and fills
    /// `blocks` with the re-sorted position ranges `[lo, hi]`, or returns
    /// `None` once every group has been processed.
    pub fn advance(&mut self, blocks: &mut Vec<(usize, usize)>) -> Option<f64> {
        if self.next >= self.groups.len() {
            return None;
        }
        let theta = self.groups[self.next].0;
        let end = self.groups.get(self.next + 1).map_or(PI, |g| g.0);
        let mut spans: Vec<(usize, usize)> = self.groups[self.next]
            .1
            .iter()
            .map(|&(i, j)| {
                let (a, b) = (self.pos[i as usize], self.pos[j as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        self.next += 1;
        spans.sort_unstable();
        blocks.clear();
        for (lo, hi) in spans {
            match blocks.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => blocks.push((lo, hi)),
            }
        }
        let mid = 0.5 * (theta + end);
        for &(lo, hi) in blocks.iter() {
            sort_at(self.pts, &mut self.order[lo..=hi], mid);
            for k in lo..=hi {
                self.pos[self.order[k]] = k;
            }
        }
        Some(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn order_matches_fresh_sort_inside_every_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut pts: Vec<[f64; 2]> = (0..30)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        pts.push([0.0, 0.0]);
        pts.push([0.0, 0.5]);
        pts.push([0.0, 1.0]);
        pts.push([0.0, 0.5]);
        let mut sweep = RotatingSweep::new(&pts);
        let starts = sweep.interval_starts();
        let mut blocks = Vec::new();
        let mut k = 0;
        loop {
            let end = starts.get(k + 1).copied().unwrap_or(PI);
            let mid = 0.5 * (starts[k] + end);
            let mut fresh: Vec<usize> = (0..pts.len()).collect();
            sort_at(&pts, &mut fresh, mid);
            assert_eq!(fresh, sweep.order, "interval {k}");
            if sweep.advance(&mut blocks).is_none() {
                break;
            }
            k += 1;
        }
        assert_eq!(k + 1, sweep.interval_count());
    }

    #[test]
    fn swap_angle_is_perpendicular() {
        let t = swap_angle([0.0, 0.0], [1.0, 0.0]);
        assert!((t - PI / 2.0).abs() < 1e-15);
        assert_eq!(swap_angle([0.0, 0.0], [0.0, 1.0]), 0.0);
    }
}
