//! Expected directional width of uncertain point sets.
//!
//! For a direction u the locations are ranked by the canonical order. A
//! location s of point w is the extreme present location exactly when w
//! sits at s and every other point v is absent or sits below s, so
//!
//!   Pr^R(s,u) = p_s · Π_{v≠w} A_v(s),   A_v(s) = 1 − Σ_{s' ∈ v above s} p_{s'}.
//!
//! The expected support is f(𝒫,u) = Σ_s Pr^R(s,u)⟨s,u⟩ and its gradient
//! Σ_s Pr^R(s,u)·s is the vertex of the expectation polytope M extreme in
//! direction u. Existential points are locational points with a single
//! location. Products over points are kept as a count of zero factors and
//! the product of the nonzero ones, so no division by zero occurs.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{canonical_cmp, dot};
use crate::model::{FlatSet, UncertainSet};
use crate::sweep::RotatingSweep;

const MODULE: &str = "width";

/// Factors with absolute value below this are treated as exact zeros.
const ZERO_SNAP: f64 = 1e-12;

/// Groups between full recomputations of the angular coefficients.
const RECOMPUTE_EVERY: usize = 4096;

#[inline]
fn snap(a: f64) -> f64 {
    if a.abs() < ZERO_SNAP {
        0.0
    } else {
        a
    }
}

/// Product of factors stored as (number of zero factors, product of the
/// nonzero ones).
#[derive(Clone, Copy, Debug, PartialEq)]
struct ZProd {
    zeros: u32,
    prod: f64,
}

impl ZProd {
    const ONE: ZProd = ZProd { zeros: 0, prod: 1.0 };

    #[inline]
    fn mul(&mut self, a: f64) {
        if a == 0.0 {
            self.zeros += 1;
        } else {
            self.prod *= a;
        }
    }

    #[inline]
    fn div(&mut self, a: f64) {
        if a == 0.0 {
            self.zeros -= 1;
        } else {
            self.prod /= a;
        }
    }

    #[inline]
    fn replace(&mut self, old: f64, new: f64) {
        self.div(old);
        self.mul(new);
    }

    /// Value of the product with one factor `a` removed.
    #[inline]
    fn without(&self, a: f64) -> f64 {
        let mut z = *self;
        z.div(a);
        if z.zeros > 0 {
            0.0
        } else {
            z.prod
        }
    }
}

/// Canonical order of all locations along `u`, with projections.
pub fn canonical_order(flat: &FlatSet, u: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let proj: Vec<f64> = (0..flat.len()).map(|i| dot(flat.coords(i), u)).collect();
    let mut order: Vec<usize> = (0..flat.len()).collect();
    order.sort_by(|&a, &b| canonical_cmp(proj[a], flat.coords(a), a, proj[b], flat.coords(b), b));
    (order, proj)
}

/// Extreme-location probabilities along one direction.
#[derive(Clone, Debug, PartialEq)]
pub struct PrRTable {
    /// Location indices in canonical order (highest first).
    pub order: Vec<usize>,
    /// Pr^R of `order[k]`.
    pub pr: Vec<f64>,
    /// Probability that no location is realized.
    pub empty: f64,
}

/// Pr^R for locations visited in `order`, which must be the canonical order.
pub(crate) fn pr_along(flat: &FlatSet, order: &[usize]) -> Vec<f64> {
    let mut a = vec![1.0; flat.owners()];
    let mut g = ZProd::ONE;
    let mut out = Vec::with_capacity(order.len());
    for &s in order {
        let w = flat.owner[s];
        out.push(flat.p[s] * g.without(a[w]));
        let new = snap(a[w] - flat.p[s]);
        g.replace(a[w], new);
        a[w] = new;
    }
    out
}

/// Pr^R of every location along `u` (O(m log m)).
pub fn pr_r_table(flat: &FlatSet, u: &[f64]) -> PrRTable {
    let (order, _) = canonical_order(flat, u);
    let pr = pr_along(flat, &order);
    PrRTable {
        order,
        pr,
        empty: flat.empty_probability(),
    }
}

/// Expected support value and its gradient (the extreme vertex of M).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSupport {
    pub f: f64,
    pub gradient: Vec<f64>,
}

/// Expected support when the caller supplies the canonical order along
/// `u`; runs in O(m).
pub fn expected_support_presorted(flat: &FlatSet, order: &[usize], u: &[f64]) -> ExpectedSupport {
    let pr = pr_along(flat, order);
    let mut gradient = vec![0.0; flat.dim];
    for (&s, &q) in order.iter().zip(&pr) {
        if q != 0.0 {
            for (g, x) in gradient.iter_mut().zip(flat.coords(s)) {
                *g += q * x;
            }
        }
    }
    ExpectedSupport {
        f: dot(&gradient, u),
        gradient,
    }
}

/// Expected support f(𝒫,u) and gradient on a flattened set.
pub fn expected_support_flat(flat: &FlatSet, u: &[f64]) -> ExpectedSupport {
    let (order, _) = canonical_order(flat, u);
    expected_support_presorted(flat, &order, u)
}

/// Expected support f(𝒫,u) = E[max_{v∈P}⟨u,v⟩] (empty realizations
/// contribute 0) and its gradient Σ Pr^R(v,u)·v.
pub fn expected_support(set: &UncertainSet, u: &[f64]) -> ExpectedSupport {
    expected_support_flat(&set.flat(), u)
}

/// Expected width ω(𝒫,u) = f(𝒫,u) + f(𝒫,−u).
pub fn expected_width(set: &UncertainSet, u: &[f64]) -> f64 {
    expected_width_flat(&set.flat(), u)
}

pub fn expected_width_flat(flat: &FlatSet, u: &[f64]) -> f64 {
    let neg: Vec<f64> = u.iter().map(|x| -x).collect();
    expected_support_flat(flat, u).f + expected_support_flat(flat, &neg).f
}

/// Expected supports along many directions. The canonical order of the
/// previous direction seeds each sort, so nearby consecutive directions
/// (angular sweeps) cost close to O(m) each.
pub fn expected_support_many(flat: &FlatSet, directions: &[Vec<f64>]) -> Vec<ExpectedSupport> {
    let mut order: Vec<usize> = (0..flat.len()).collect();
    let mut proj = vec![0.0; flat.len()];
    directions
        .iter()
        .map(|u| {
            for (i, p) in proj.iter_mut().enumerate() {
                *p = dot(flat.coords(i), u);
            }
            order.sort_by(|&a, &b| {
                canonical_cmp(proj[a], flat.coords(a), a, proj[b], flat.coords(b), b)
            });
            expected_support_presorted(flat, &order, u)
        })
        .collect()
}

/// Expected widths along many directions (see [`expected_support_many`]).
pub fn expected_width_many(flat: &FlatSet, directions: &[Vec<f64>]) -> Vec<f64> {
    let neg: Vec<Vec<f64>> = directions
        .iter()
        .map(|u| u.iter().map(|x| -x).collect())
        .collect();
    let a = expected_support_many(flat, directions);
    let b = expected_support_many(flat, &neg);
    a.iter().zip(&b).map(|(x, y)| x.f + y.f).collect()
}

/// Vertex of the expectation polytope M extreme in direction `u`.
pub fn extreme_vertex(set: &UncertainSet, u: &[f64]) -> Vec<f64> {
    expected_support(set, u).gradient
}

/// Exact Pr[ω(P,u) ≤ t] for each t in `ts`, where P is a realization of
/// `flat` (closed inequality; empty and single-point realizations have
/// width 0). Grouping realizations by their top location k gives
///
///   Pr[ω ≤ t] = Pr[∅] + Σ_k p_k · Π_{v≠owner(k)} (q_v + Σ_{s∈v below k, x_k − x_s ≤ t} p_s)
///
/// with q_v the absence probability. Each t costs O(m) after one sort.
pub fn width_cdf_flat(flat: &FlatSet, u: &[f64], ts: &[f64]) -> Vec<f64> {
    let (order, proj) = canonical_order(flat, u);
    let x: Vec<f64> = order.iter().map(|&s| proj[s]).collect();
    let m = order.len();
    let n = flat.owners();
    let empty = flat.empty_probability();
    ts.iter()
        .map(|&t| {
            if !(t >= 0.0) {
                return 0.0;
            }
            let mut b: Vec<f64> = flat.absent.iter().map(|&q| snap(q)).collect();
            let fresh = |b: &[f64]| {
                let mut g = ZProd::ONE;
                for &v in b {
                    g.mul(v);
                }
                g
            };
            let mut g = fresh(&b);
            let mut updates = 0usize;
            let mut total = empty;
            let mut j = 0usize;
            for k in 0..m {
                let s = order[k];
                if j > k {
                    let w = flat.owner[s];
                    let new = snap(b[w] - flat.p[s]);
                    g.replace(b[w], new);
                    b[w] = new;
                    updates += 1;
                }
                j = j.max(k + 1);
                while j < m && x[k] - x[j] <= t {
                    let sj = order[j];
                    let w = flat.owner[sj];
                    let new = snap(b[w] + flat.p[sj]);
                    g.replace(b[w], new);
                    b[w] = new;
                    j += 1;
                    updates += 1;
                }
                if updates >= RECOMPUTE_EVERY && n <= 1 << 16 {
                    g = fresh(&b);
                    updates = 0;
                }
                total += flat.p[s] * g.without(b[flat.owner[s]]);
            }
            total.clamp(0.0, 1.0)
        })
        .collect()
}

/// Exact width CDF of an uncertain set at each t.
pub fn width_cdf(set: &UncertainSet, u: &[f64], ts: &[f64]) -> Vec<f64> {
    width_cdf_flat(&set.flat(), u, ts)
}

/// Precomputed expected support in the plane: [0, π) is split into
/// intervals on which the canonical order is fixed, and on each interval
/// f(𝒫,u(θ)) = a·cos θ + b·sin θ with (a, b) the gradient. The reverse
/// track stores the gradient for −u(θ), which covers θ ∈ [π, 2π).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularStructure {
    /// Interval start angles; the first is 0.
    pub starts: Vec<f64>,
    /// Gradient of f along u(θ) on each interval.
    pub forward: Vec<[f64; 2]>,
    /// Gradient of f along −u(θ) on each interval.
    pub reverse: Vec<[f64; 2]>,
}

impl AngularStructure {
    /// Number of breakpoints in (0, π).
    pub fn breakpoints(&self) -> usize {
        self.starts.len() - 1
    }

    /// Interval containing θ ∈ [0, π); a breakpoint belongs to the interval
    /// starting there.
    fn locate(&self, theta: f64) -> usize {
        match self
            .starts
            .binary_search_by(|s| s.partial_cmp(&theta).unwrap_or(Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    fn reduce(theta: f64) -> (f64, bool) {
        let mut t = theta.rem_euclid(2.0 * PI);
        if t >= 2.0 * PI {
            t = 0.0;
        }
        if t >= PI {
            (t - PI, true)
        } else {
            (t, false)
        }
    }

    /// ∇f(𝒫,u(θ)) for any angle.
    pub fn query_gradient(&self, theta: f64) -> [f64; 2] {
        let (t, flipped) = Self::reduce(theta);
        let i = self.locate(t);
        if flipped {
            self.reverse[i]
        } else {
            self.forward[i]
        }
    }

    /// f(𝒫,u(θ)) for any angle.
    pub fn query_support(&self, theta: f64) -> f64 {
        let g = self.query_gradient(theta);
        g[0] * theta.cos() + g[1] * theta.sin()
    }

    /// ω(𝒫,u(θ)) for any angle.
    pub fn query_width(&self, theta: f64) -> f64 {
        let (t, _) = Self::reduce(theta);
        let i = self.locate(t);
        let (c, s) = (t.cos(), t.sin());
        let f = &self.forward[i];
        let r = &self.reverse[i];
        (f[0] - r[0]) * c + (f[1] - r[1]) * s
    }
}

fn planar(flat: &FlatSet) -> Result<Vec<[f64; 2]>> {
    if flat.dim != 2 {
        return Err(Error::unsupported(
            MODULE,
            format!("angular structure needs dimension 2, got {}", flat.dim),
        ));
    }
    Ok((0..flat.len())
        .map(|i| [flat.coords(i)[0], flat.coords(i)[1]])
        .collect())
}

fn reject_shared_locations(flat: &FlatSet, pts: &[[f64; 2]]) -> Result<()> {
    if flat.is_existential() {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .total_cmp(&pts[b][0])
            .then(pts[a][1].total_cmp(&pts[b][1]))
    });
    for w in idx.windows(2) {
        let (a, b) = (w[0], w[1]);
        if pts[a] == pts[b] && flat.owner[a] != flat.owner[b] {
            return Err(Error::precondition(
                MODULE,
                format!(
                    "location {:?} is shared by points {} and {}",
                    pts[a], flat.owner[a], flat.owner[b]
                ),
            ));
        }
    }
    Ok(())
}

/// Incrementally maintained Pr^R along the sweep, both directions.
struct AngularState<'a> {
    flat: &'a FlatSet,
    pts: &'a [[f64; 2]],
    /// Product of A_v over owners before position k (length m + 1).
    fwd: Vec<ZProd>,
    /// Product of A'_v over owners counting positions ≥ k (length m + 1).
    rev: Vec<ZProd>,
    pr_f: Vec<f64>,
    pr_r: Vec<f64>,
    g_f: [f64; 2],
    g_r: [f64; 2],
}

impl<'a> AngularState<'a> {
    fn new(flat: &'a FlatSet, pts: &'a [[f64; 2]]) -> Self {
        let m = pts.len();
        AngularState {
            flat,
            pts,
            fwd: vec![ZProd::ONE; m + 1],
            rev: vec![ZProd::ONE; m + 1],
            pr_f: vec![0.0; m],
            pr_r: vec![0.0; m],
            g_f: [0.0; 2],
            g_r: [0.0; 2],
        }
    }

    fn recompute(&mut self, order: &[usize]) {
        let flat = self.flat;
        let m = order.len();
        let mut a = vec![1.0; flat.owners()];
        let mut g = ZProd::ONE;
        self.g_f = [0.0; 2];
        for k in 0..m {
            let s = order[k];
            let w = flat.owner[s];
            self.fwd[k] = g;
            let q = flat.p[s] * g.without(a[w]);
            self.pr_f[s] = q;
            self.g_f[0] += q * self.pts[s][0];
            self.g_f[1] += q * self.pts[s][1];
            let new = snap(a[w] - flat.p[s]);
            g.replace(a[w], new);
            a[w] = new;
        }
        self.fwd[m] = g;
        a.iter_mut().for_each(|x| *x = 1.0);
        g = ZProd::ONE;
        self.g_r = [0.0; 2];
        self.rev[m] = g;
        for k in (0..m).rev() {
            let s = order[k];
            let w = flat.owner[s];
            let q = flat.p[s] * g.without(a[w]);
            self.pr_r[s] = q;
            self.g_r[0] += q * self.pts[s][0];
            self.g_r[1] += q * self.pts[s][1];
            let new = snap(a[w] - flat.p[s]);
            g.replace(a[w], new);
            a[w] = new;
            self.rev[k] = g;
        }
    }

    /// A_v counting positions < `lo` (forward) or > `hi` (reverse).
    fn survival(&self, v: usize, pos: &[usize], keep: impl Fn(usize) -> bool) -> f64 {
        let mut a = 1.0;
        for &s in &self.flat.members[v] {
            if keep(pos[s]) {
                a -= self.flat.p[s];
            }
        }
        snap(a)
    }

    fn update_block(&mut self, order: &[usize], pos: &[usize], lo: usize, hi: usize) {
        let flat = self.flat;
        let mut local: Vec<(usize, f64)> = Vec::new();
        let lookup = |v: usize, local: &mut Vec<(usize, f64)>, init: &dyn Fn(usize) -> f64| -> usize {
            if let Some(i) = local.iter().position(|e| e.0 == v) {
                i
            } else {
                local.push((v, init(v)));
                local.len() - 1
            }
        };

        let mut g = self.fwd[lo];
        for k in lo..=hi {
            let s = order[k];
            let w = flat.owner[s];
            let i = lookup(w, &mut local, &|v| self.survival(v, pos, |ps| ps < lo));
            self.fwd[k] = g;
            let q = flat.p[s] * g.without(local[i].1);
            let d = q - self.pr_f[s];
            self.pr_f[s] = q;
            self.g_f[0] += d * self.pts[s][0];
            self.g_f[1] += d * self.pts[s][1];
            let new = snap(local[i].1 - flat.p[s]);
            g.replace(local[i].1, new);
            local[i].1 = new;
        }

        local.clear();
        let mut g = self.rev[hi + 1];
        for k in (lo..=hi).rev() {
            let s = order[k];
            let w = flat.owner[s];
            let i = lookup(w, &mut local, &|v| self.survival(v, pos, |ps| ps > hi));
            let q = flat.p[s] * g.without(local[i].1);
            let d = q - self.pr_r[s];
            self.pr_r[s] = q;
            self.g_r[0] += d * self.pts[s][0];
            self.g_r[1] += d * self.pts[s][1];
            let new = snap(local[i].1 - flat.p[s]);
            g.replace(local[i].1, new);
            local[i].1 = new;
            self.rev[k] = g;
        }
    }
}

/// Builds the angular structure of a planar set (either model) by a
/// rotating sweep over the O(m²) pair breakpoints. Locational sets must not
/// share a location between different points.
pub fn build_angular(set: &UncertainSet) -> Result<AngularStructure> {
    build_angular_flat(&set.flat())
}

pub fn build_angular_flat(flat: &FlatSet) -> Result<AngularStructure> {
    let pts = planar(flat)?;
    reject_shared_locations(flat, &pts)?;
    let mut sweep = RotatingSweep::new(&pts);
    let starts = sweep.interval_starts();
    let mut state = AngularState::new(flat, &pts);
    state.recompute(&sweep.order);
    let mut forward = Vec::with_capacity(starts.len());
    let mut reverse = Vec::with_capacity(starts.len());
    forward.push(state.g_f);
    reverse.push(state.g_r);
    let mut blocks = Vec::new();
    let mut since = 0usize;
    while sweep.advance(&mut blocks).is_some() {
        since += 1;
        if since >= RECOMPUTE_EVERY {
            state.recompute(&sweep.order);
            since = 0;
        } else {
            for &(lo, hi) in &blocks {
                state.update_block(&sweep.order, &sweep.pos, lo, hi);
            }
        }
        forward.push(state.g_f);
        reverse.push(state.g_r);
    }
    Ok(AngularStructure {
        starts,
        forward,
        reverse,
    })
}

/// The expectation polytope M in the plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectationPolytope {
    /// Vertices in counterclockwise order.
    pub vertices: Vec<[f64; 2]>,
    /// Number of direction cones (intervals of both tracks).
    pub cones: usize,
}

impl ExpectationPolytope {
    /// Support function of M.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0] * u[0] + v[1] * u[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn same_vertex(a: &[f64; 2], b: &[f64; 2]) -> bool {
    let scale = 1.0f64.max(a[0].abs()).max(a[1].abs()).max(b[0].abs()).max(b[1].abs());
    (a[0] - b[0]).abs() <= 1e-12 * scale && (a[1] - b[1]).abs() <= 1e-12 * scale
}

/// Builds M explicitly in the plane: the distinct gradients over all
/// direction cones, in counterclockwise order.
pub fn build_m(set: &UncertainSet) -> Result<ExpectationPolytope> {
    let ang = build_angular(set)?;
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    for g in ang.forward.iter().chain(&ang.reverse) {
        if vertices.last().map_or(true, |l| !same_vertex(l, g)) {
            vertices.push(*g);
        }
    }
    while vertices.len() > 1 && same_vertex(&vertices[0], vertices.last().unwrap()) {
        vertices.pop();
    }
    Ok(ExpectationPolytope {
        vertices,
        cones: ang.forward.len() + ang.reverse.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ExistentialSet, LocationalPoint, LocationalSet, WeightedPoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_points() -> UncertainSet {
        ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 0.5), (vec![1.0, 0.0], 0.5)])
            .unwrap()
            .into()
    }

    /// Expected width by listing all realizations of an existential set.
    fn enumerate(points: &[(Vec<f64>, f64)], u: &[f64]) -> f64 {
        let n = points.len();
        let mut total = 0.0;
        for mask in 0..(1u32 << n) {
            let mut prob = 1.0;
            let mut present = Vec::new();
            for (i, (x, p)) in points.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prob *= p;
                    present.push(x.clone());
                } else {
                    prob *= 1.0 - p;
                }
            }
            total += prob * crate::geom::width(&present, u);
        }
        total
    }

    fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<(Vec<f64>, f64)> {
        (0..n)
            .map(|_| {
                (
                    vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                    rng.gen_range(0.05..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn two_point_support_and_gradient() {
        let s = two_points();
        let a = expected_support(&s, &[1.0, 0.0]);
        assert!((a.f - 0.5).abs() < 1e-15);
        assert_eq!(a.gradient, vec![0.5, 0.0]);
        let b = expected_support(&s, &[-1.0, 0.0]);
        assert!((b.f + 0.25).abs() < 1e-15);
        assert_eq!(b.gradient, vec![0.25, 0.0]);
        assert!((expected_width(&s, &[1.0, 0.0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn deterministic_singleton() {
        let s: UncertainSet = ExistentialSet::from_pairs(vec![(vec![3.0, 4.0], 1.0)]).unwrap().into();
        let a = expected_support(&s, &[0.0, 1.0]);
        assert_eq!(a.f, 4.0);
        assert_eq!(a.gradient, vec![3.0, 4.0]);
    }

    #[test]
    fn single_locational_point_has_zero_width() {
        let s: UncertainSet = LocationalSet::new(
            2,
            vec![LocationalPoint {
                locations: vec![
                    WeightedPoint::new(vec![0.0, 0.0], 0.5),
                    WeightedPoint::new(vec![1.0, 0.0], 0.5),
                ],
            }],
        )
        .unwrap()
        .into();
        for k in 0..8 {
            let t = k as f64 * 0.7;
            assert!(expected_width(&s, &[t.cos(), t.sin()]).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_of_pr_r() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = random_points(&mut rng, 12);
        let flat = FlatSet::from_set(&ExistentialSet::from_pairs(pts).unwrap().into());
        let t = pr_r_table(&flat, &[0.6, 0.8]);
        let sum: f64 = t.pr.iter().sum();
        assert!((sum + t.empty - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let pts = random_points(&mut rng, 8);
            let set: UncertainSet = ExistentialSet::from_pairs(pts.clone()).unwrap().into();
            let t: f64 = rng.gen_range(0.0..6.3);
            let u = [t.cos(), t.sin()];
            let exact = enumerate(&pts, &u);
            assert!((expected_width(&set, &u) - exact).abs() <= 1e-12 * exact.max(1.0));
        }
    }

    #[test]
    fn cdf_of_two_points() {
        let s = two_points();
        let c = width_cdf(&s, &[1.0, 0.0], &[-0.1, 0.0, 0.5, 1.0, 1.5]);
        assert_eq!(c[0], 0.0);
        assert!((c[1] - 0.75).abs() < 1e-15);
        assert!((c[2] - 0.75).abs() < 1e-15);
        assert!((c[3] - 1.0).abs() < 1e-15);
        assert!((c[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn angular_two_points() {
        let ang = build_angular(&two_points()).unwrap();
        assert_eq!(ang.breakpoints(), 1);
        assert!((ang.starts[1] - PI / 2.0).abs() < 1e-15);
        assert!((ang.query_width(0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn angular_agrees_with_direct_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = random_points(&mut rng, 25);
        let set: UncertainSet = ExistentialSet::from_pairs(pts).unwrap().into();
        let ang = build_angular(&set).unwrap();
        for _ in 0..500 {
            let t: f64 = rng.gen_range(0.0..2.0 * PI);
            let u = [t.cos(), t.sin()];
            let direct = expected_support(&set, &u).f;
            assert!((ang.query_support(t) - direct).abs() < 1e-9 * direct.abs().max(1.0));
            let w = expected_width(&set, &u);
            assert!((ang.query_width(t) - w).abs() < 1e-9 * w.max(1.0));
        }
    }

    #[test]
    fn angular_rejects_other_dimensions_and_shared_locations() {
        let s: UncertainSet = ExistentialSet::from_pairs(vec![(vec![0.0, 0.0, 0.0], 0.5)])
            .unwrap()
            .into();
        assert_eq!(build_angular(&s).unwrap_err().code(), "width.unsupported");
        let loc = |x: f64| WeightedPoint::new(vec![x, 0.0], 0.5);
        let shared: UncertainSet = LocationalSet::new(
            2,
            vec![
                LocationalPoint { locations: vec![loc(0.0), loc(1.0)] },
                LocationalPoint { locations: vec![loc(1.0), loc(2.0)] },
            ],
        )
        .unwrap()
        .into();
        assert!(build_angular(&shared).is_err());
    }

    #[test]
    fn polytope_of_two_points_is_a_segment() {
        let m = build_m(&two_points()).unwrap();
        assert_eq!(m.vertices.len(), 2);
        let mut v = m.vertices.clone();
        v.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
        assert!((v[0][0] - 0.25).abs() < 1e-15 && (v[1][0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polytope_of_deterministic_square_is_the_square() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let m = build_m(&ExistentialSet::deterministic(&sq).unwrap().into()).unwrap();
        assert_eq!(m.vertices.len(), 4);
    }
}
