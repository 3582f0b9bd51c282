//! Deterministic geometry: support and width functions, the canonical tie
//! rule, convex hulls, direction nets, the fat affine transform and
//! deterministic ε-kernels.

mod fat;
mod hull;
mod kernel;
mod net;

use std::cmp::Ordering;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fat::{fat_frame, fat_transform, AffineTransform, FatFrame};
pub use hull::{
    clip_polygon, convex_polygon_contains, hull_2d, hull_3d, polygon_area, polygon_min_width,
    Facet3, Hull3, Polytope3,
};
pub use kernel::{eps_kernel, kernel_from_oracle, DeterministicKernel, Extreme, KernelReport};
pub use net::direction_net;

pub(crate) const MODULE: &str = "geom";

/// A unit vector. In the plane the angle θ ∈ [0, 2π) is available too.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    u: Vec<f64>,
}

impl Direction {
    /// Normalizes `v`; fails on a zero or non-finite vector.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::validation(
                MODULE,
                vec!["direction must be a finite non-zero vector".to_string()],
            ));
        }
        Ok(Direction {
            u: v.iter().map(|x| x / n).collect(),
        })
    }

    /// Planar direction (cos θ, sin θ).
    pub fn from_angle(theta: f64) -> Self {
        Direction {
            u: vec![theta.cos(), theta.sin()],
        }
    }

    /// Angle in [0, 2π) for planar directions.
    pub fn angle(&self) -> Option<f64> {
        if self.u.len() != 2 {
            return None;
        }
        let t = self.u[1].atan2(self.u[0]);
        Some(if t < 0.0 { t + std::f64::consts::TAU } else { t })
    }

    pub fn neg(&self) -> Direction {
        Direction {
            u: self.u.iter().map(|x| -x).collect(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.u
    }
}

impl Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.u
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lexicographic comparison of coordinate vectors.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Canonical order along a direction: `Less` means the first item ranks
/// above the second. Items are ranked by decreasing projection; equal
/// projections rank the lexicographically smaller coordinates first and
/// then the smaller index.
#[inline]
pub fn canonical_cmp(
    proj_a: f64,
    a: &[f64],
    ia: usize,
    proj_b: f64,
    b: &[f64],
    ib: usize,
) -> Ordering {
    match proj_b.partial_cmp(&proj_a).unwrap_or(Ordering::Equal) {
        Ordering::Equal => lex_cmp(a, b).then(ia.cmp(&ib)),
        o => o,
    }
}

/// Maximum inner product with `u` and the index of the canonical winner.
pub fn support(points: &[Vec<f64>], u: &[f64]) -> Result<(f64, usize)> {
    if points.is_empty() {
        return Err(Error::precondition(MODULE, "support of an empty set"));
    }
    let mut best = 0;
    let mut best_val = dot(&points[0], u);
    for (i, p) in points.iter().enumerate().skip(1) {
        let v = dot(p, u);
        if canonical_cmp(v, p, i, best_val, &points[best], best) == Ordering::Less {
            best = i;
            best_val = v;
        }
    }
    Ok((best_val, best))
}

/// Directional width f(P,u) + f(P,−u); zero for the empty set.
pub fn width(points: &[Vec<f64>], u: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for p in points {
        let v = dot(p, u);
        hi = hi.max(v);
        lo = lo.min(v);
    }
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ]
    }

    #[test]
    fn support_examples() {
        assert_eq!(support(&[vec![0.0, 0.0]], &[1.0, 0.0]).unwrap(), (0.0, 0));
        let two = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(support(&two, &[1.0, 0.0]).unwrap(), (1.0, 1));
        assert_eq!(support(&two, &[0.0, 1.0]).unwrap(), (0.0, 0));
        assert!(support(&[], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn tie_falls_back_to_index() {
        let dup = vec![vec![2.0, 2.0], vec![2.0, 2.0]];
        assert_eq!(support(&dup, &[1.0, 0.0]).unwrap().1, 0);
    }

    #[test]
    fn width_examples() {
        assert!((width(&square(), &[1.0, 0.0]) - 1.0).abs() < 1e-15);
        let d = Direction::new(vec![1.0, 1.0]).unwrap();
        assert!((width(&square(), &d) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(width(&[vec![3.0, 4.0]], &[0.6, 0.8]), 0.0);
        assert_eq!(width(&[], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn direction_angle_round_trip() {
        for k in 0..16 {
            let t = k as f64 * 0.39;
            let d = Direction::from_angle(t);
            assert!((d.angle().unwrap() - t).abs() < 1e-12);
        }
        assert!(Direction::new(vec![0.0, 0.0]).is_err());
    }
}
