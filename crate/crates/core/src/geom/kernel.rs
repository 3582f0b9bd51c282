//! Deterministic ε-kernels of convex bodies available through an
//! extreme-point oracle, and of finite point sets.
//!
//! The body is first normalized with [`fat_frame`]. Directions of the
//! normalized body are organized as cells on the faces of [−1,1]^r. For a
//! direction v inside a cell with corner directions u_j, v = Σ λ_j u_j with
//! λ_j ≥ 0 and Σ λ_j ≤ Λ (ratio of the largest corner norm to the smallest
//! norm over the cell). Sublinearity of the support function then gives,
//! for any point r of the body,
//!
//!   f(M,v) − ⟨r,v⟩ ≤ Σ λ_j (f(M,u_j) − ⟨r,u_j⟩) ≤ Λ · max_j slack_j(r).
//!
//! Cells are refined until one probed point has Λ·max slack ≤ η with
//! η = ε·w/2, where w is a certified lower bound on the minimum width. The
//! per-cell admissible points then feed a greedy set cover, which is the
//! size-reduction step. Every direction is certified, so widths satisfy
//! ω(S,v) ≥ ω(M,v) − 2η ≥ (1−ε)·ω(M,v) for all v.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fat::{fat_frame, AffineTransform, FatFrame};
use super::hull::{hull_2d, hull_3d, polygon_min_width};
use super::{dot, lex_cmp, norm, support, MODULE};
use crate::error::{Error, Result};

/// Answer of an extreme-point oracle: the extreme point in source
/// coordinates and, when the body is a finite set, the index of the point.
#[derive(Clone, Debug, PartialEq)]
pub struct Extreme {
    pub point: Vec<f64>,
    pub source: Option<usize>,
}

/// Construction statistics of a kernel.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// Oracle calls.
    pub probes: usize,
    /// Certified direction cells.
    pub cells: usize,
    /// Certified lower bound on the minimum width of the normalized body.
    pub width_lower_bound: f64,
    /// Affine dimension detected.
    pub rank: usize,
}

/// A deterministic point set approximating every directional width of its
/// source within a factor 1 − ε.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterministicKernel {
    pub points: Vec<Vec<f64>>,
    /// Indices into the construction input when the kernel is a subset.
    pub source_indices: Option<Vec<usize>>,
    pub epsilon: f64,
    pub transform: Option<AffineTransform>,
    /// Set when the source is lower dimensional.
    pub degenerate: bool,
    pub report: KernelReport,
}

impl DeterministicKernel {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Size guarantee 16/ε^{(d−1)/2} used throughout the crate.
pub fn size_bound(d: usize, eps: f64) -> f64 {
    16.0 / eps.powf((d as f64 - 1.0) / 2.0)
}

const START_LEVEL: u32 = 1;
const MAX_LEVEL: u32 = 26;

struct Probe {
    y: Vec<f64>,
    ext: Extreme,
}

struct Engine<'a, F: FnMut(&[f64]) -> Extreme> {
    frame: &'a FatFrame,
    oracle: &'a mut F,
    cache: HashMap<Vec<i64>, usize>,
    probes: Vec<Probe>,
    calls: usize,
}

impl<'a, F: FnMut(&[f64]) -> Extreme> Engine<'a, F> {
    /// Probe in the normalized frame; `key` is the exact dyadic direction.
    fn probe(&mut self, key: &[i64]) -> usize {
        if let Some(&i) = self.cache.get(key) {
            return i;
        }
        let u: Vec<f64> = key.iter().map(|&k| k as f64).collect();
        let w = self.frame.direction_to_source(&normalize(&u));
        let ext = (self.oracle)(&w);
        self.calls += 1;
        let y = self.frame.to_unit_box(&ext.point);
        let i = self.probes.len();
        self.probes.push(Probe { y, ext });
        self.cache.insert(key.to_vec(), i);
        i
    }
}

fn normalize(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

struct Cell {
    axis: usize,
    sign: i64,
    level: u32,
    lower: Vec<i64>,
}

struct Certified {
    us: Vec<Vec<f64>>,
    fs: Vec<f64>,
    lambda: f64,
}

fn corner_keys(cell: &Cell, r: usize) -> Vec<Vec<i64>> {
    let full = 1i64 << MAX_LEVEL;
    let step = 1i64 << (MAX_LEVEL - cell.level);
    let free = r - 1;
    let mut out = Vec::with_capacity(1 << free);
    for mask in 0..(1usize << free) {
        let mut key = Vec::with_capacity(r);
        let mut t = 0;
        for k in 0..r {
            if k == cell.axis {
                key.push(cell.sign * full);
            } else {
                let bit = ((mask >> t) & 1) as i64;
                key.push(-full + 2 * (cell.lower[t] + bit) * step);
                t += 1;
            }
        }
        out.push(key);
    }
    out
}

fn min_norm_over_cell(cell: &Cell, r: usize) -> f64 {
    let full = (1i64 << MAX_LEVEL) as f64;
    let step = (1i64 << (MAX_LEVEL - cell.level)) as f64;
    let mut s = 1.0;
    for t in 0..r - 1 {
        let lo = (-full + 2.0 * cell.lower[t] as f64 * step) / full;
        let hi = (-full + 2.0 * (cell.lower[t] as f64 + 1.0) * step) / full;
        let m = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        s += m * m;
    }
    s.sqrt()
}

fn sigma_min(cols: &[Vec<f64>]) -> f64 {
    let r = cols.len();
    let m = DMatrix::from_fn(r, r, |i, j| cols[j][i]);
    m.singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn width_lower_bound(points: &[Vec<f64>], axis_pairs: &[Vec<f64>]) -> f64 {
    let r = axis_pairs.len();
    let mut lb = sigma_min(axis_pairs) / (r as f64).sqrt();
    if r == 2 {
        let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        let h = hull_2d(&pts);
        let poly: Vec<[f64; 2]> = h.iter().map(|&i| pts[i]).collect();
        lb = lb.max(polygon_min_width(&poly));
    } else if r == 3 {
        let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
        if let Some(h) = hull_3d(&pts) {
            let mut c = [0.0; 3];
            for &i in &h.vertices {
                for k in 0..3 {
                    c[k] += pts[i][k] / h.vertices.len() as f64;
                }
            }
            let rad = h.inradius_at(c);
            if rad > 0.0 {
                lb = lb.max(2.0 * rad);
            }
        }
    }
    lb
}

/// Builds an ε-kernel of the convex body described by `oracle`, which maps
/// a unit direction (source coordinates) to an extreme point. The output
/// points are oracle answers; they satisfy
/// (1−ε)·ω(M,u) ≤ ω(S,u) ≤ ω(M,u) for every direction u.
pub fn kernel_from_oracle<F>(dim: usize, eps: f64, oracle: &mut F) -> DeterministicKernel
where
    F: FnMut(&[f64]) -> Extreme,
{
    let frame = fat_frame(dim, oracle);
    let frame_calls = frame.probes.len();
    let transform = frame.transform();
    let degenerate = frame.rank < dim;
    let r = frame.rank;
    if r <= 1 {
        let mut pts: Vec<Extreme> = Vec::new();
        if r == 0 {
            pts.push(frame.probes[0].1.clone());
        } else {
            let e = frame.axes[0].clone();
            let neg: Vec<f64> = e.iter().map(|x| -x).collect();
            pts.push(oracle(&e));
            pts.push(oracle(&neg));
        }
        return finish(pts, eps, transform, degenerate, KernelReport {
            probes: frame_calls + 2 * r,
            cells: 0,
            width_lower_bound: if r == 0 { 0.0 } else { 2.0 },
            rank: r,
        });
    }

    let mut engine = Engine {
        frame: &frame,
        oracle,
        cache: HashMap::new(),
        probes: Vec::new(),
        calls: 0,
    };
    for (_, ext) in &frame.probes {
        let y = frame.to_unit_box(&ext.point);
        engine.probes.push(Probe {
            y,
            ext: ext.clone(),
        });
    }
    let full = 1i64 << MAX_LEVEL;
    let mut axis_pairs = Vec::with_capacity(r);
    for k in 0..r {
        let mut plus = vec![0i64; r];
        plus[k] = full;
        let mut minus = vec![0i64; r];
        minus[k] = -full;
        let a = engine.probe(&plus);
        let b = engine.probe(&minus);
        axis_pairs.push(
            engine.probes[a]
                .y
                .iter()
                .zip(&engine.probes[b].y)
                .map(|(x, y)| x - y)
                .collect::<Vec<f64>>(),
        );
    }
    let ys: Vec<Vec<f64>> = engine.probes.iter().map(|p| p.y.clone()).collect();
    let w_lb = width_lower_bound(&ys, &axis_pairs);
    let eta = eps * w_lb / 2.0;

    let mut stack: Vec<Cell> = Vec::new();
    let per_side = 1i64 << START_LEVEL;
    for axis in 0..r {
        for sign in [1i64, -1] {
            let count = (per_side as usize).pow((r - 1) as u32);
            for mut code in 0..count {
                let mut lower = Vec::with_capacity(r - 1);
                for _ in 0..r - 1 {
                    lower.push((code % per_side as usize) as i64);
                    code /= per_side as usize;
                }
                stack.push(Cell {
                    axis,
                    sign,
                    level: START_LEVEL,
                    lower,
                });
            }
        }
    }

    let mut certified: Vec<Certified> = Vec::new();
    let mut forced: Vec<usize> = Vec::new();
    while let Some(cell) = stack.pop() {
        let keys = corner_keys(&cell, r);
        let idx: Vec<usize> = keys.iter().map(|k| engine.probe(k)).collect();
        let us: Vec<Vec<f64>> = keys
            .iter()
            .map(|k| normalize(&k.iter().map(|&x| x as f64).collect::<Vec<_>>()))
            .collect();
        let corner_norm = keys
            .iter()
            .map(|k| norm(&k.iter().map(|&x| x as f64 / full as f64).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let lambda = corner_norm / min_norm_over_cell(&cell, r);
        let fs: Vec<f64> = idx
            .iter()
            .zip(&us)
            .map(|(&i, u)| dot(&engine.probes[i].y, u))
            .collect();
        let best = idx
            .iter()
            .map(|&c| {
                let y = &engine.probes[c].y;
                lambda
                    * us
                        .iter()
                        .zip(&fs)
                        .map(|(u, f)| (f - dot(y, u)).max(0.0))
                        .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        if best <= eta {
            certified.push(Certified { us, fs, lambda });
        } else if cell.level < MAX_LEVEL {
            for mask in 0..(1usize << (r - 1)) {
                let lower = cell
                    .lower
                    .iter()
                    .enumerate()
                    .map(|(t, &l)| 2 * l + ((mask >> t) & 1) as i64)
                    .collect();
                stack.push(Cell {
                    axis: cell.axis,
                    sign: cell.sign,
                    level: cell.level + 1,
                    lower,
                });
            }
        } else {
            forced.extend(idx);
        }
    }

    // Greedy set cover over certified cells.
    let n_probe = engine.probes.len();
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n_probe];
    for (ci, cell) in certified.iter().enumerate() {
        for (pi, probe) in engine.probes.iter().enumerate() {
            let worst = cell
                .us
                .iter()
                .zip(&cell.fs)
                .map(|(u, f)| (f - dot(&probe.y, u)).max(0.0))
                .fold(0.0, f64::max);
            if cell.lambda * worst <= eta {
                covers[pi].push(ci);
            }
        }
    }
    let mut covered = vec![false; certified.len()];
    let mut remaining = certified.len();
    let mut chosen: Vec<usize> = forced;
    for &f in &chosen {
        for &c in &covers[f] {
            if !covered[c] {
                covered[c] = true;
                remaining -= 1;
            }
        }
    }
    while remaining > 0 {
        let (best, gain) = covers
            .iter()
            .enumerate()
            .map(|(i, cs)| (i, cs.iter().filter(|&&c| !covered[c]).count()))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        assert!(gain > 0, "every certified cell has an admissible probe");
        for &c in &covers[best] {
            if !covered[c] {
                covered[c] = true;
                remaining -= 1;
            }
        }
        chosen.push(best);
    }
    let pts: Vec<Extreme> = chosen.iter().map(|&i| engine.probes[i].ext.clone()).collect();
    let report = KernelReport {
        probes: frame_calls + engine.calls,
        cells: certified.len(),
        width_lower_bound: w_lb,
        rank: r,
    };
    finish(pts, eps, transform, degenerate, report)
}

fn finish(
    mut pts: Vec<Extreme>,
    eps: f64,
    transform: Option<AffineTransform>,
    degenerate: bool,
    report: KernelReport,
) -> DeterministicKernel {
    pts.sort_by(|a, b| lex_cmp(&a.point, &b.point).then(a.source.cmp(&b.source)));
    pts.dedup_by(|a, b| a.point == b.point);
    if pts.iter().all(|e| e.source.is_some()) {
        pts.sort_by_key(|e| e.source);
    }
    let sources: Option<Vec<usize>> = pts.iter().map(|e| e.source).collect();
    DeterministicKernel {
        points: pts.into_iter().map(|e| e.point).collect(),
        source_indices: sources,
        epsilon: eps,
        transform,
        degenerate,
        report,
    }
}

/// Extreme points of a finite set: hull vertices for d ≤ 3, all distinct
/// points otherwise. Returns `None` when the set is lower dimensional
/// (d = 2, 3).
fn hull_vertices(points: &[Vec<f64>]) -> Option<Vec<usize>> {
    let d = points[0].len();
    match d {
        1 => {
            let (_, a) = support(points, &[1.0]).ok()?;
            let (_, b) = support(points, &[-1.0]).ok()?;
            Some(if a == b { vec![a] } else { vec![a, b] })
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let h = hull_2d(&pts);
            (h.len() >= 3).then_some(h)
        }
        3 => {
            let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            hull_3d(&pts).map(|h| h.vertices)
        }
        _ => {
            let mut idx: Vec<usize> = (0..points.len()).collect();
            idx.sort_by(|&a, &b| lex_cmp(&points[a], &points[b]).then(a.cmp(&b)));
            idx.dedup_by(|a, b| points[*a] == points[*b]);
            Some(idx)
        }
    }
}

/// ε-kernel of a finite point set: a subset S with
/// (1−ε)·ω(P,u) ≤ ω(S,u) ≤ ω(P,u) for all u and |S| ≤ 16/ε^{(d−1)/2}.
///
/// When the extreme points already fit the size bound they are returned
/// as they are (an exact kernel). Lower-dimensional input is flagged as
/// degenerate; the result is still a valid kernel of the lower-dimensional
/// set.
pub fn eps_kernel(points: &[Vec<f64>], eps: f64) -> Result<DeterministicKernel> {
    if points.is_empty() {
        return Err(Error::precondition(MODULE, "eps_kernel of an empty set"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::validation(
            MODULE,
            vec![format!("epsilon must lie in (0,1), got {eps}")],
        ));
    }
    let d = points[0].len();
    let bound = size_bound(d, eps);
    if let Some(h) = hull_vertices(points) {
        if (h.len() as f64) <= bound {
            let pts: Vec<Extreme> = h
                .iter()
                .map(|&i| Extreme {
                    point: points[i].clone(),
                    source: Some(i),
                })
                .collect();
            return Ok(finish(pts, eps, None, false, KernelReport {
                probes: 0,
                cells: 0,
                width_lower_bound: 0.0,
                rank: d,
            }));
        }
    }
    let mut oracle = |u: &[f64]| {
        let (_, i) = support(points, u).expect("non-empty");
        Extreme {
            point: points[i].clone(),
            source: Some(i),
        }
    };
    Ok(kernel_from_oracle(d, eps, &mut oracle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{direction_net, width};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn disk(n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let r: f64 = rng.gen::<f64>().sqrt();
                let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![r * t.cos(), r * t.sin()]
            })
            .collect()
    }

    fn min_ratio(points: &[Vec<f64>], kernel: &[Vec<f64>], d: usize) -> f64 {
        direction_net(d, if d == 2 { 0.0015 } else { 0.05 })
            .iter()
            .map(|u| width(kernel, u) / width(points, u))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn square_corners_are_their_own_kernel() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let k = eps_kernel(&sq, 0.1).unwrap();
        assert_eq!(k.points.len(), 4);
        assert_eq!(k.source_indices, Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn single_point_kernel() {
        let k = eps_kernel(&[vec![1.0, 2.0]], 0.1).unwrap();
        assert_eq!(k.points, vec![vec![1.0, 2.0]]);
    }

    #[test]
    fn disk_kernel_meets_ratio_and_size() {
        let pts = disk(1000, 11);
        let eps = 0.05;
        let k = eps_kernel(&pts, eps).unwrap();
        assert!((k.len() as f64) <= 16.0 / eps.sqrt());
        assert!(min_ratio(&pts, &k.points, 2) >= 1.0 - eps - 1e-9);
    }

    #[test]
    fn oracle_engine_on_large_circle() {
        // Many hull vertices, so the adaptive engine is exercised.
        let pts: Vec<Vec<f64>> = (0..2000)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 2000.0;
                vec![3.0 * t.cos() + 1.0, 0.5 * t.sin() - 2.0]
            })
            .collect();
        for eps in [0.2, 0.05, 0.01] {
            let k = eps_kernel(&pts, eps).unwrap();
            assert!(k.report.probes > 0);
            assert!((k.len() as f64) <= 16.0 / eps.sqrt(), "size {}", k.len());
            let ratio = min_ratio(&pts, &k.points, 2);
            assert!(ratio >= 1.0 - eps - 1e-9, "eps {eps} ratio {ratio}");
        }
    }

    #[test]
    fn sphere_kernel_in_three_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pts: Vec<Vec<f64>> = (0..3000)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
                let n = norm(&v);
                vec![2.0 * v[0] / n, v[1] / n, 0.5 * v[2] / n]
            })
            .collect();
        let eps = 0.1;
        let k = eps_kernel(&pts, eps).unwrap();
        assert!((k.len() as f64) <= 16.0 / eps, "size {}", k.len());
        assert!(min_ratio(&pts, &k.points, 3) >= 1.0 - eps - 1e-9);
    }

    #[test]
    fn collinear_points_flagged() {
        let pts: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64, 0.5 * i as f64]).collect();
        let k = eps_kernel(&pts, 0.01).unwrap();
        assert!(k.degenerate || k.len() == 2);
        assert_eq!(k.len(), 2);
    }
}
