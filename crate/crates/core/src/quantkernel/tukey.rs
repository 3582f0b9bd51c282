//! Weighted Tukey regions ℋ = TK(P, γ) and their dilated kernels
//! 𝒦 = c + (1+ε)·(ConvH(ℰ_ℋ) − c).
//!
//! In the plane ℋ is computed exactly: a rotating sweep tracks, for every
//! direction, the first point at which the swept weight reaches γ, and ℋ is
//! the intersection of the resulting halfplanes. In ℝ³ the halfspaces are
//! taken at every triple-determined normal plus a direction net.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    canonical_cmp, convex_polygon_contains, direction_net, eps_kernel, hull_2d, hull_3d, Polytope3,
};
use crate::sweep::RotatingSweep;

use super::MODULE;

/// Largest input accepted by the three-dimensional region.
pub const TUKEY_3D_CAP: usize = 300;

/// Vertices of ℋ lie on lines through input points; they are pulled
/// toward the vertex centroid by this fraction so that closed-halfplane
/// depth evaluated in floating point sees those points.
const SHRINK: f64 = 1e-9;

/// Relative slack on the weight threshold.
const WEIGHT_SLACK: f64 = 1e-12;

fn reached(fin: f64, inf: usize, theta: f64) -> bool {
    inf > 0 || fin >= theta - WEIGHT_SLACK * theta.abs().max(1.0)
}

fn extent2(pts: &[[f64; 2]]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

/// Clips a convex polygon to ⟨n,x⟩ ≤ b, keeping vertices within `tol`.
fn clip_tol(poly: &[[f64; 2]], n: [f64; 2], b: f64, tol: f64) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
    let sides: Vec<f64> = poly.iter().map(|&p| side(p)).collect();
    if sides.iter().all(|&s| s <= tol) {
        return poly.to_vec();
    }
    let k = poly.len();
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(k + 1);
    for i in 0..k {
        let (p, q) = (poly[i], poly[(i + 1) % k]);
        let (sp, sq) = (sides[i], sides[(i + 1) % k]);
        if sp <= tol {
            out.push(p);
        }
        if (sp < -tol && sq > tol) || (sp > tol && sq < -tol) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    let close = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol;
    out.dedup_by(|a, b| close(*a, *b));
    while out.len() > 1 && close(out[0], out[out.len() - 1]) {
        out.pop();
    }
    out
}

/// Exact planar Tukey region: the points whose every closed halfplane has
/// weight ≥ θ, as a counterclockwise polygon (one or two vertices when the
/// region is a point or a segment; empty when no such point exists).
/// Weights may be +∞.
pub(crate) fn tukey_polygon(pts: &[[f64; 2]], w: &[f64], theta: f64) -> Vec<[f64; 2]> {
    let n = pts.len();
    if n == 0 {
        return Vec::new();
    }
    let fin_total: f64 = w.iter().filter(|x| x.is_finite()).sum();
    let inf_total = w.iter().filter(|x| x.is_infinite()).count();
    if !reached(fin_total, inf_total, theta) {
        return Vec::new();
    }
    let (lo, hi) = extent2(pts);
    let scale = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if scale == 0.0 {
        return vec![pts[0]];
    }
    let tol = 1e-12 * scale.max(lo[0].abs().max(lo[1].abs()).max(hi[0].abs().max(hi[1].abs())));

    let mut sweep = RotatingSweep::new(pts);
    let starts = sweep.interval_starts();
    let wf = |i: usize| if w[i].is_finite() { w[i] } else { 0.0 };
    let wi = |i: usize| usize::from(w[i].is_infinite());
    let mut pre = vec![0.0; n];
    let mut cnt = vec![0usize; n];
    let refill = |order: &[usize], pre: &mut [f64], cnt: &mut [usize], from: usize, to: usize| {
        for k in from..=to {
            let (ps, pc) = if k == 0 { (0.0, 0) } else { (pre[k - 1], cnt[k - 1]) };
            pre[k] = ps + wf(order[k]);
            cnt[k] = pc + wi(order[k]);
        }
    };
    refill(&sweep.order, &mut pre, &mut cnt, 0, n - 1);

    // Spans of constant stop point: (start angle, point).
    let mut top: Vec<(f64, usize)> = Vec::new();
    let mut bottom: Vec<(f64, usize)> = Vec::new();
    let mut blocks = Vec::new();
    let mut groups_seen = 0usize;
    for (k, &start) in starts.iter().enumerate() {
        if k > 0 {
            sweep.advance(&mut blocks);
            groups_seen += 1;
            if groups_seen % 4096 == 0 {
                refill(&sweep.order, &mut pre, &mut cnt, 0, n - 1);
            } else {
                for &(lo_b, hi_b) in &blocks {
                    refill(&sweep.order, &mut pre, &mut cnt, lo_b, hi_b);
                }
            }
        }
        // Binary searches on the monotone prefix and suffix predicates.
        let t = {
            let (mut a, mut b) = (0usize, n);
            while a < b {
                let m = (a + b) / 2;
                if reached(pre[m], cnt[m], theta) {
                    b = m;
                } else {
                    a = m + 1;
                }
            }
            a
        };
        let suffix_ok = |j: usize| {
            let (pf, pc) = if j == 0 { (0.0, 0) } else { (pre[j - 1], cnt[j - 1]) };
            reached(fin_total - pf, inf_total - pc, theta)
        };
        let mut a = 0usize;
        let mut b = n;
        while a < b {
            let m = (a + b) / 2;
            if suffix_ok(m) {
                a = m + 1;
            } else {
                b = m;
            }
        }
        let bpos = a - 1;
        let (ts, bs) = (sweep.order[t.min(n - 1)], sweep.order[bpos]);
        if top.last().map_or(true, |&(_, s)| s != ts) {
            top.push((start, ts));
        }
        if bottom.last().map_or(true, |&(_, s)| s != bs) {
            bottom.push((start, bs));
        }
    }

    let mut poly = vec![
        [lo[0], lo[1]],
        [hi[0], lo[1]],
        [hi[0], hi[1]],
        [lo[0], hi[1]],
    ];
    for (spans, sign) in [(&top, 1.0), (&bottom, -1.0)] {
        for (j, &(a, s)) in spans.iter().enumerate() {
            let b = spans.get(j + 1).map_or(PI, |x| x.0);
            let mut angles = vec![a];
            let mut m = (a / (PI / 4.0)).floor() + 1.0;
            while m * PI / 4.0 < b {
                angles.push(m * PI / 4.0);
                m += 1.0;
            }
            angles.push(b);
            for phi in angles {
                let u = [sign * phi.cos(), sign * phi.sin()];
                let off = u[0] * pts[s][0] + u[1] * pts[s][1];
                poly = clip_tol(&poly, u, off, tol);
                if poly.is_empty() {
                    return poly;
                }
            }
        }
    }
    let h = hull_2d(&poly);
    let poly: Vec<[f64; 2]> = h.iter().map(|&i| poly[i]).collect();
    let k = poly.len() as f64;
    let c = poly
        .iter()
        .fold([0.0, 0.0], |a, p| [a[0] + p[0] / k, a[1] + p[1] / k]);
    poly.iter()
        .map(|v| {
            [
                v[0] + SHRINK * (c[0] - v[0]),
                v[1] + SHRINK * (c[1] - v[1]),
            ]
        })
        .collect()
}

/// Tukey region in ℝ³ as a clipped box.
pub(crate) fn tukey_polytope3(pts: &[[f64; 3]], w: &[f64], theta: f64) -> Polytope3 {
    let n = pts.len();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let scale = (0..3).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
    let pad = 1e-9 * scale.max(1e-300);
    let mut poly = Polytope3::new_box(
        [lo[0] - pad, lo[1] - pad, lo[2] - pad],
        [hi[0] + pad, hi[1] + pad, hi[2] + pad],
    );
    let mut normals: Vec<[f64; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = [pts[j][0] - pts[i][0], pts[j][1] - pts[i][1], pts[j][2] - pts[i][2]];
                let b = [pts[k][0] - pts[i][0], pts[k][1] - pts[i][1], pts[k][2] - pts[i][2]];
                let c = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let len = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                if len <= 1e-12 * scale * scale {
                    continue;
                }
                let c = [c[0] / len, c[1] / len, c[2] / len];
                normals.push(c);
                normals.push([-c[0], -c[1], -c[2]]);
            }
        }
    }
    for u in direction_net(3, 0.2) {
        let s = u.as_slice();
        normals.push([s[0], s[1], s[2]]);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    for u in normals {
        let proj: Vec<f64> = pts.iter().map(|p| u[0] * p[0] + u[1] * p[1] + u[2] * p[2]).collect();
        idx.sort_by(|&a, &b| canonical_cmp(proj[a], &pts[a], a, proj[b], &pts[b], b));
        let mut fin = 0.0;
        let mut inf = 0;
        let mut stop = None;
        for &i in &idx {
            if w[i].is_finite() {
                fin += w[i];
            } else {
                inf += 1;
            }
            if reached(fin, inf, theta) {
                stop = Some(i);
                break;
            }
        }
        match stop {
            Some(s) => poly.clip(u, proj[s]),
            None => {
                poly.clear();
                return poly;
            }
        }
        if poly.is_empty() {
            break;
        }
    }
    poly
}

fn centroid(pts: &[Vec<f64>]) -> Vec<f64> {
    let d = pts[0].len();
    let mut c = vec![0.0; d];
    for p in pts {
        for k in 0..d {
            c[k] += p[k] / pts.len() as f64;
        }
    }
    c
}

fn dilate_about(pts: &[Vec<f64>], c: &[f64], factor: f64) -> Vec<Vec<f64>> {
    pts.iter()
        .map(|p| p.iter().zip(c).map(|(x, ci)| ci + factor * (x - ci)).collect())
        .collect()
}

/// ℰ_ℋ, its centre and 𝒦 for a region given by its vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dilation {
    pub kernel: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub region: Vec<Vec<f64>>,
}

/// Kernel of the vertex set, greedily augmented until every vertex has
/// gauge ≤ 1+ε about the kernel's vertex centroid, then dilated by 1+ε.
pub(crate) fn dilate(h: &[Vec<f64>], eps: f64) -> Dilation {
    let d = h[0].len();
    let full_rank = match d {
        2 => h.len() >= 3,
        3 => {
            let p: Vec<[f64; 3]> = h.iter().map(|v| [v[0], v[1], v[2]]).collect();
            hull_3d(&p).is_some()
        }
        _ => false,
    };
    if !full_rank {
        let c = centroid(h);
        return Dilation {
            kernel: h.to_vec(),
            region: dilate_about(h, &c, 1.0 + eps),
            center: c,
        };
    }
    let k = eps_kernel(h, eps.min(0.5)).expect("non-empty vertex set");
    let mut chosen: Vec<usize> = k.source_indices.unwrap_or_else(|| (0..h.len()).collect());
    loop {
        let e: Vec<Vec<f64>> = chosen.iter().map(|&i| h[i].clone()).collect();
        let facets = facets_of(&e);
        let Some((poly, facets)) = facets else {
            match (0..h.len()).find(|i| !chosen.contains(i)) {
                Some(i) => {
                    chosen.push(i);
                    continue;
                }
                None => unreachable!("full-rank vertex set has a full-rank hull"),
            }
        };
        let c = centroid(&poly);
        let gauge = |x: &[f64]| {
            facets
                .iter()
                .map(|(nrm, off)| {
                    let num: f64 = nrm.iter().zip(x).zip(&c).map(|((a, b), ci)| a * (b - ci)).sum();
                    let den = off - nrm.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
                    num / den
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let worst = (0..h.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| (i, gauge(&h[i])))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match worst {
            Some((i, g)) if g > 1.0 + eps => chosen.push(i),
            _ => {
                return Dilation {
                    region: dilate_about(&poly, &c, 1.0 + eps),
                    kernel: poly,
                    center: c,
                }
            }
        }
    }
}

/// Hull vertices and outward facets (normal, offset) of a point set, or
/// `None` when it is lower dimensional.
fn facets_of(e: &[Vec<f64>]) -> Option<(Vec<Vec<f64>>, Vec<(Vec<f64>, f64)>)> {
    match e[0].len() {
        2 => {
            let p: Vec<[f64; 2]> = e.iter().map(|v| [v[0], v[1]]).collect();
            let h = hull_2d(&p);
            if h.len() < 3 {
                return None;
            }
            let poly: Vec<[f64; 2]> = h.iter().map(|&i| p[i]).collect();
            let k = poly.len();
            let facets = (0..k)
                .map(|i| {
                    let (a, b) = (poly[i], poly[(i + 1) % k]);
                    let nrm = [b[1] - a[1], a[0] - b[0]];
                    let len = nrm[0].hypot(nrm[1]);
                    let nrm = vec![nrm[0] / len, nrm[1] / len];
                    let off = nrm[0] * a[0] + nrm[1] * a[1];
                    (nrm, off)
                })
                .collect();
            Some((poly.iter().map(|v| v.to_vec()).collect(), facets))
        }
        3 => {
            let p: Vec<[f64; 3]> = e.iter().map(|v| [v[0], v[1], v[2]]).collect();
            let h = hull_3d(&p)?;
            let facets = h
                .facets
                .iter()
                .map(|f| (f.normal.to_vec(), f.offset))
                .collect();
            Some((h.vertices.iter().map(|&i| e[i].clone()).collect(), facets))
        }
        _ => None,
    }
}

/// Convex region given by vertices, with membership queries.
pub(crate) struct Region {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Option<Vec<(Vec<f64>, f64)>>,
    poly2: Vec<[f64; 2]>,
    tol: f64,
}

impl Region {
    pub(crate) fn new(vertices: &[Vec<f64>], tol: f64) -> Self {
        let dim = vertices.first().map_or(2, |v| v.len());
        let facets = if vertices.is_empty() {
            None
        } else {
            facets_of(vertices).map(|(_, f)| f)
        };
        let poly2 = if dim == 2 {
            let p: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
            hull_2d(&p).iter().map(|&i| p[i]).collect()
        } else {
            Vec::new()
        };
        Region {
            dim,
            vertices: vertices.to_vec(),
            facets,
            poly2,
            tol,
        }
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        if self.dim == 2 {
            return convex_polygon_contains(&self.poly2, [x[0], x[1]], self.tol);
        }
        match &self.facets {
            Some(f) => f.iter().all(|(nrm, off)| {
                nrm.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= off + self.tol
            }),
            // Flat region in ℝ³: only its vertices count as inside.
            None => self.vertices.iter().any(|v| {
                v.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= self.tol
            }),
        }
    }
}

/// Statistics of one round of the iterative construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundStat {
    pub round: usize,
    pub lambda_before: f64,
    pub lambda_after: f64,
    /// Points fed to the exact region: the ε-approximation sample (merged)
    /// or the remaining points themselves.
    pub sample_size: usize,
    pub threshold: f64,
    pub kernel_size: usize,
    pub halved: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionMethod {
    Exact,
    Fast,
    /// The iterative construction failed to certify and the exact region
    /// was used instead.
    FastFallback,
}

/// ℋ, ℰ_ℋ and 𝒦 together with the weight outside 𝒦.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TukeyRegion {
    pub dim: usize,
    pub tau: f64,
    pub eps: f64,
    /// γ = ln(2/τ).
    pub gamma: f64,
    /// Vertices of ℋ (counterclockwise in the plane).
    pub h_vertices: Vec<Vec<f64>>,
    /// Bounding halfspaces ⟨n,x⟩ ≤ b of ℋ in ℝ³; empty in the plane.
    pub h_halfspaces: Vec<(Vec<f64>, f64)>,
    /// ℰ_ℋ.
    pub kernel_vertices: Vec<Vec<f64>>,
    /// Dilation centre of 𝒦.
    pub center: Vec<f64>,
    /// Vertices of 𝒦.
    pub k_vertices: Vec<Vec<f64>>,
    /// Input indices outside 𝒦.
    pub outside: Vec<usize>,
    /// λ(𝒦̄).
    pub outside_weight: f64,
    pub method: RegionMethod,
    pub rounds: Vec<RoundStat>,
    pub warnings: Vec<String>,
}

impl TukeyRegion {
    /// C in λ(𝒦̄) = C·ln(1/τ)/ε^{(d−1)/2}.
    pub fn outside_constant(&self) -> f64 {
        self.outside_weight * self.eps.powf((self.dim as f64 - 1.0) / 2.0) / (1.0 / self.tau).ln()
    }

    pub fn h_contains(&self, x: &[f64], tol: f64) -> bool {
        Region::new(&self.h_vertices, tol).contains(x)
    }

    pub fn k_contains(&self, x: &[f64], tol: f64) -> bool {
        Region::new(&self.k_vertices, tol).contains(x)
    }
}

/// λ_v = −ln(1−p_v), +∞ for p_v = 1.
pub(crate) fn weights(probs: &[f64]) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| if p >= 1.0 { f64::INFINITY } else { -(-p).ln_1p() })
        .collect()
}

pub(crate) fn gamma(tau: f64) -> f64 {
    (2.0 / tau).ln()
}

pub(crate) fn check_helly(d: usize, total: f64, tau: f64) -> Result<()> {
    let g = gamma(tau);
    let bound = (d as f64 + 1.0) * g;
    if total > bound {
        Ok(())
    } else {
        Err(Error::precondition(
            MODULE,
            format!(
                "lambda(P) = {total} does not exceed the Helly threshold (d+1)*ln(2/tau) = {bound}; \
                 use Poisson sampling (method poisson)"
            ),
        ))
    }
}

pub(crate) fn scale_of(pts: &[Vec<f64>]) -> f64 {
    let d = pts.first().map_or(0, |p| p.len());
    let mut s: f64 = 0.0;
    for k in 0..d {
        let lo = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        s = s.max(hi - lo).max(lo.abs()).max(hi.abs());
    }
    s.max(f64::MIN_POSITIVE)
}

/// Exact region ℋ = TK(P, ln(2/τ)) for d ∈ {2, 3}, its kernel and 𝒦.
pub(crate) fn exact_region(
    pts: &[Vec<f64>],
    lam: &[f64],
    tau: f64,
    eps: f64,
) -> Result<TukeyRegion> {
    let d = pts[0].len();
    let g = gamma(tau);
    let (h_vertices, h_halfspaces) = match d {
        2 => {
            let p: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
            let poly = tukey_polygon(&p, lam, g);
            (poly.iter().map(|v| v.to_vec()).collect::<Vec<_>>(), Vec::new())
        }
        3 => {
            if pts.len() > TUKEY_3D_CAP {
                return Err(Error::limit(
                    MODULE,
                    format!(
                        "three-dimensional Tukey region accepts at most {TUKEY_3D_CAP} points, got {}",
                        pts.len()
                    ),
                ));
            }
            let p: Vec<[f64; 3]> = pts.iter().map(|v| [v[0], v[1], v[2]]).collect();
            let poly = tukey_polytope3(&p, lam, g);
            let verts: Vec<Vec<f64>> = poly.vertices().iter().map(|v| v.to_vec()).collect();
            let hs = poly
                .faces
                .iter()
                .map(|f| (f.normal.to_vec(), f.offset))
                .collect();
            (verts, hs)
        }
        _ => {
            return Err(Error::unsupported(
                MODULE,
                format!("Tukey regions are implemented for d = 2 and d = 3, got d = {d}"),
            ))
        }
    };
    if h_vertices.is_empty() {
        return Err(Error::degenerate(
            MODULE,
            "Tukey region came out empty despite the Helly condition (numerical degeneracy)",
        ));
    }
    Ok(finish_region(pts, lam, tau, eps, h_vertices, h_halfspaces, RegionMethod::Exact))
}

pub(crate) fn finish_region(
    pts: &[Vec<f64>],
    lam: &[f64],
    tau: f64,
    eps: f64,
    h_vertices: Vec<Vec<f64>>,
    h_halfspaces: Vec<(Vec<f64>, f64)>,
    method: RegionMethod,
) -> TukeyRegion {
    let d = pts[0].len();
    let dil = dilate(&h_vertices, eps);
    let tol = 1e-9 * scale_of(pts);
    let k = Region::new(&dil.region, tol);
    let outside: Vec<usize> = (0..pts.len()).filter(|&i| !k.contains(&pts[i])).collect();
    let outside_weight = outside.iter().map(|&i| lam[i]).sum();
    TukeyRegion {
        dim: d,
        tau,
        eps,
        gamma: gamma(tau),
        h_vertices,
        h_halfspaces,
        kernel_vertices: dil.kernel,
        center: dil.center,
        k_vertices: dil.region,
        outside,
        outside_weight,
        method,
        rounds: Vec::new(),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::tukey_depth_brute;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_region_is_the_square() {
        let pts = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
        let poly = tukey_polygon(&pts, &[1.0; 4], 1.0);
        let mut v = poly.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v.len(), 4);
        for (a, b) in v.iter().zip(&[[-1.0, -1.0], [-1.0, 1.0], [1.0, -1.0], [1.0, 1.0]]) {
            assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn single_heavy_point_is_the_region() {
        let pts = [[0.3, 0.4], [1.0, 0.0], [0.0, 2.0]];
        let poly = tukey_polygon(&pts, &[5.0, 0.0, 0.0], 1.0);
        assert!(!poly.is_empty());
        for v in &poly {
            assert!((v[0] - 0.3).abs() < 1e-9 && (v[1] - 0.4).abs() < 1e-9);
        }
    }

    #[test]
    fn too_little_weight_gives_empty_region() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(tukey_polygon(&pts, &[0.3; 3], 1.0).is_empty());
    }

    #[test]
    fn vertices_are_deep_and_outside_is_shallow() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let n = rng.gen_range(8..40);
            let pts: Vec<[f64; 2]> = (0..n)
                .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
                .collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = w.iter().sum();
            let theta = total / 5.0;
            let poly = tukey_polygon(&pts, &w, theta);
            assert!(!poly.is_empty());
            for v in &poly {
                assert!(tukey_depth_brute(&pts, &w, *v) >= theta - 1e-9);
            }
            let k = poly.len();
            for i in 0..k {
                if k < 3 {
                    break;
                }
                let (a, b) = (poly[i], poly[(i + 1) % k]);
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let nrm = [b[1] - a[1], a[0] - b[0]];
                let len = nrm[0].hypot(nrm[1]);
                let out = [mid[0] + 1e-3 * nrm[0] / len, mid[1] + 1e-3 * nrm[1] / len];
                assert!(tukey_depth_brute(&pts, &w, out) < theta);
            }
        }
    }

    #[test]
    fn dilation_contains_region() {
        let h: Vec<Vec<f64>> = (0..200)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 200.0;
                vec![2.0 * t.cos(), t.sin()]
            })
            .collect();
        let d = dilate(&h, 0.05);
        assert!(d.kernel.len() < h.len());
        let k = Region::new(&d.region, 1e-12);
        assert!(h.iter().all(|v| k.contains(v)));
        let inner = Region::new(&d.kernel, 1e-12);
        assert!(d.kernel.iter().all(|v| inner.contains(v)));
    }

    #[test]
    fn region_3d_vertices_satisfy_halfspaces() {
        let mut pts = Vec::new();
        for x in [-1.0, 1.0] {
            for y in [-1.0, 1.0] {
                for z in [-1.0, 1.0] {
                    pts.push([x, y, z]);
                }
            }
        }
        let poly = tukey_polytope3(&pts, &[1.0; 8], 1.0);
        assert!(!poly.is_empty());
        let v = poly.vertices();
        assert_eq!(v.len(), 8);
        // Depth two is the octahedron |x| + |y| + |z| <= 1.
        let poly = tukey_polytope3(&pts, &[1.0; 8], 2.0);
        let v = poly.vertices();
        assert_eq!(v.len(), 6);
        for x in v {
            let mut a: Vec<f64> = x.iter().map(|c| c.abs()).collect();
            a.sort_by(f64::total_cmp);
            assert!(a[0] < 1e-6 && a[1] < 1e-6 && (a[2] - 1.0).abs() < 1e-6);
        }
    }
}
