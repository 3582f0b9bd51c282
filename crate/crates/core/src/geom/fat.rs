//! Affine normalization of a convex body accessed through an extreme-point
//! oracle: the body is mapped into [−1,1]^d so that it touches every face
//! of the cube and contains a cube of constant relative size.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kernel::Extreme;
use super::{direction_net, dot, norm, support, MODULE};
use crate::error::{Error, Result};

/// Invertible affine map x ↦ Ax + b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineTransform {
    pub linear: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
    pub inverse: Vec<Vec<f64>>,
}

impl AffineTransform {
    /// Builds the map and caches the inverse; fails when |det A| ≤ 1e−12.
    pub fn new(linear: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let d = linear.len();
        let m = DMatrix::from_fn(d, d, |i, j| linear[i][j]);
        let det = m.determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::degenerate(MODULE, "affine map is singular"));
        }
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::degenerate(MODULE, "affine map is singular"))?;
        let inverse = (0..d).map(|i| (0..d).map(|j| inv[(i, j)]).collect()).collect();
        Ok(AffineTransform {
            linear,
            offset,
            inverse,
        })
    }

    pub fn identity(d: usize) -> Self {
        let eye: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        AffineTransform {
            linear: eye.clone(),
            offset: vec![0.0; d],
            inverse: eye,
        }
    }

    pub fn dimension(&self) -> usize {
        self.linear.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.linear
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| dot(row, x) + b)
            .collect()
    }

    pub fn apply_inverse(&self, y: &[f64]) -> Vec<f64> {
        let shifted: Vec<f64> = y.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        self.inverse.iter().map(|row| dot(row, &shifted)).collect()
    }

    /// Unit direction in source coordinates whose extreme point maps to the
    /// extreme point of the image in direction `u` (that is, Aᵀu
    /// normalized).
    pub fn direction_to_source(&self, u: &[f64]) -> Vec<f64> {
        let d = self.dimension();
        let mut w = vec![0.0; d];
        for (row, ui) in self.linear.iter().zip(u) {
            for j in 0..d {
                w[j] += row[j] * ui;
            }
        }
        let n = norm(&w);
        w.iter().map(|x| x / n).collect()
    }
}

/// Orthonormal frame found by successive farthest-pair searches, with the
/// exact extent of the body along each axis.
#[derive(Clone, Debug)]
pub struct FatFrame {
    pub dim: usize,
    /// Number of axes with positive extent (the affine dimension found).
    pub rank: usize,
    pub axes: Vec<Vec<f64>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Every probe made while building the frame: (direction, answer).
    pub probes: Vec<(Vec<f64>, Extreme)>,
}

impl FatFrame {
    /// Map onto [−1,1]^rank: y_k = (2⟨x,e_k⟩ − hi_k − lo_k)/(hi_k − lo_k).
    pub fn to_unit_box(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rank)
            .map(|k| (2.0 * dot(&self.axes[k], x) - self.hi[k] - self.lo[k]) / (self.hi[k] - self.lo[k]))
            .collect()
    }

    /// Source direction corresponding to a direction of the normalized box.
    pub fn direction_to_source(&self, u: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for k in 0..self.rank {
            let s = 2.0 * u[k] / (self.hi[k] - self.lo[k]);
            for j in 0..self.dim {
                w[j] += s * self.axes[k][j];
            }
        }
        let n = norm(&w);
        w.iter().map(|x| x / n).collect()
    }

    /// Full-rank frames as an affine transform.
    pub fn transform(&self) -> Option<AffineTransform> {
        if self.rank != self.dim {
            return None;
        }
        let linear: Vec<Vec<f64>> = (0..self.dim)
            .map(|k| {
                self.axes[k]
                    .iter()
                    .map(|a| 2.0 * a / (self.hi[k] - self.lo[k]))
                    .collect()
            })
            .collect();
        let offset = (0..self.dim)
            .map(|k| -(self.hi[k] + self.lo[k]) / (self.hi[k] - self.lo[k]))
            .collect();
        AffineTransform::new(linear, offset).ok()
    }
}

fn complement_basis(axes: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut candidates: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    // Prefer the standard vectors least aligned with the existing axes.
    candidates.sort_by(|a, b| {
        let ra: f64 = axes.iter().map(|e| dot(e, a).powi(2)).sum();
        let rb: f64 = axes.iter().map(|e| dot(e, b).powi(2)).sum();
        ra.partial_cmp(&rb).unwrap()
    });
    for mut v in candidates {
        if basis.len() + axes.len() == d {
            break;
        }
        for e in axes.iter().chain(basis.iter()) {
            let c = dot(e, &v);
            for j in 0..d {
                v[j] -= c * e[j];
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Probes the body through `oracle` and builds a normalizing frame. Each
/// axis is the normalized projected difference x(u) − x(−u) of largest
/// length over a direction net of the current orthogonal complement.
/// Extents below 1e−10 of the first extent end the search (lower rank).
pub fn fat_frame<F>(dim: usize, oracle: &mut F) -> FatFrame
where
    F: FnMut(&[f64]) -> Extreme,
{
    let mut axes: Vec<Vec<f64>> = Vec::new();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut probes: Vec<(Vec<f64>, Extreme)> = Vec::new();
    let mut first_extent = 0.0;
    for _ in 0..dim {
        let comp = complement_basis(&axes, dim);
        let c = comp.len();
        let local: Vec<Vec<f64>> = match c {
            1 => vec![vec![1.0]],
            2 => direction_net(2, 0.2).into_iter().map(|d| d.into_vec()).collect(),
            _ => direction_net(c, 0.5).into_iter().map(|d| d.into_vec()).collect(),
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for w in &local {
            // Each unordered pair {w, −w} once.
            let first = w.iter().find(|x| x.abs() > 1e-12).copied().unwrap_or(0.0);
            if first < 0.0 {
                continue;
            }
            let mut u = vec![0.0; dim];
            for (k, b) in comp.iter().enumerate() {
                for j in 0..dim {
                    u[j] += w[k] * b[j];
                }
            }
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            let a = oracle(&u);
            let b = oracle(&neg);
            let diff: Vec<f64> = a.point.iter().zip(&b.point).map(|(x, y)| x - y).collect();
            let mut proj = vec![0.0; dim];
            for bvec in &comp {
                let cf = dot(bvec, &diff);
                for j in 0..dim {
                    proj[j] += cf * bvec[j];
                }
            }
            let len = norm(&proj);
            probes.push((u, a));
            probes.push((neg, b));
            if best.as_ref().map_or(true, |(l, _)| len > *l) {
                best = Some((len, proj));
            }
        }
        let (len, proj) = best.expect("net is never empty");
        if len <= 0.0 || (!axes.is_empty() && len <= 1e-10 * first_extent) {
            break;
        }
        let e: Vec<f64> = proj.iter().map(|x| x / len).collect();
        let neg: Vec<f64> = e.iter().map(|x| -x).collect();
        let top = oracle(&e);
        let bottom = oracle(&neg);
        let h = dot(&e, &top.point);
        let l = dot(&e, &bottom.point);
        probes.push((e.clone(), top));
        probes.push((neg, bottom));
        if axes.is_empty() {
            first_extent = h - l;
            if !(first_extent > 0.0) {
                break;
            }
        } else if h - l <= 1e-10 * first_extent {
            break;
        }
        axes.push(e);
        lo.push(l);
        hi.push(h);
    }
    FatFrame {
        dim,
        rank: axes.len(),
        axes,
        lo,
        hi,
        probes,
    }
}

/// Affine map T with T(P) ⊂ [−1,1]^d touching every face of the cube;
/// in the plane T(P)'s hull contains an axis-parallel square of half-side
/// at least 1/4 (1/8 for the cube in ℝ³). Fails on lower-dimensional input.
pub fn fat_transform(points: &[Vec<f64>]) -> Result<AffineTransform> {
    if points.is_empty() {
        return Err(Error::degenerate(MODULE, "input not full-dimensional (empty set)"));
    }
    let dim = points[0].len();
    let mut oracle = |u: &[f64]| {
        let (_, i) = support(points, u).expect("non-empty");
        Extreme {
            point: points[i].clone(),
            source: Some(i),
        }
    };
    let frame = fat_frame(dim, &mut oracle);
    frame
        .transform()
        .ok_or_else(|| Error::degenerate(MODULE, "input not full-dimensional"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_round_trip() {
        let t = AffineTransform::new(vec![vec![2.0, 1.0], vec![0.5, 3.0]], vec![1.0, -2.0])
            .unwrap();
        let x = [0.3, -0.7];
        let y = t.apply(&x);
        let back = t.apply_inverse(&y);
        assert!((back[0] - x[0]).abs() < 1e-12 && (back[1] - x[1]).abs() < 1e-12);
        assert!(AffineTransform::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn unit_square_maps_into_cube() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let t = fat_transform(&sq).unwrap();
        for p in &sq {
            let y = t.apply(p);
            assert!(y.iter().all(|c| c.abs() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn collinear_input_is_degenerate() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let err = fat_transform(&pts).unwrap_err();
        assert!(err.to_string().contains("input not full-dimensional"));
    }
}
