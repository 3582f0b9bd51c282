//! Shape fitting on coresets: expected minimum enclosing ball, expected
//! spherical shell and the expected squared-radius enclosing ball.
//!
//! The ball and shell fits build an fpow kernel (r = 2) of the lifted
//! points (v, ‖v‖²), for which ‖c − v‖² = ⟨(−2c, 1), (v, ‖v‖²)⟩ + ‖c‖²,
//! and minimize the resulting finite-mixture objective numerically. Local
//! search runs from several starts; a Lipschitz branch and bound over a
//! box known to hold the optimum then bounds the remaining gap.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expkernel::exp_kernel_flat;
use crate::fpowkernel::fpow_kernel;
use crate::geom::{dot, norm};
use crate::model::{ExistentialSet, FlatSet, UncertainSet};
use crate::width::pr_along;

const MODULE: &str = "apps";

/// Local-search starts taken from coreset members.
pub const MEMBER_STARTS: usize = 16;

/// Stopping tolerance of the local search, relative to the objective.
pub const LOCAL_TOL: f64 = 1e-8;

/// Relative gap at which branch and bound stops.
pub const BNB_TOL: f64 = 1e-4;

/// Largest number of objective evaluations spent in branch and bound.
pub const BNB_BUDGET: usize = 200_000;

/// Result of a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub center: Vec<f64>,
    /// Objective of the input set at `center`, computed exactly.
    pub value: f64,
    /// Coreset objective at `center`.
    pub coreset_value: f64,
    /// Number of points stored in the coreset.
    pub coreset_size: usize,
    /// (coreset_value − certified lower bound) / coreset_value.
    pub optimizer_gap: f64,
    pub lower_bound: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

/// Which objective a fit minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Meb,
    Shell,
}

fn lifted_existential(set: &ExistentialSet) -> Result<ExistentialSet> {
    ExistentialSet::from_pairs(
        set.points()
            .iter()
            .map(|p| {
                let mut c = p.coords.clone();
                c.push(dot(&p.coords, &p.coords));
                (c, p.p)
            })
            .collect(),
    )
}

fn lifted_flat(flat: &FlatSet) -> FlatSet {
    let d = flat.dim;
    let mut xs = Vec::with_capacity(flat.len() * (d + 1));
    for i in 0..flat.len() {
        let c = flat.coords(i);
        xs.extend_from_slice(c);
        xs.push(dot(c, c));
    }
    FlatSet {
        dim: d + 1,
        xs,
        p: flat.p.clone(),
        owner: flat.owner.clone(),
        absent: flat.absent.clone(),
        members: flat.members.clone(),
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// E[g(distance of the farthest present location)] with the farthest
/// chosen in the given direction of the distance order; empty
/// realizations contribute 0.
fn expected_extreme<F>(flat: &FlatSet, c: &[f64], farthest: bool, g: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let ds: Vec<f64> = (0..flat.len()).map(|i| dist(flat.coords(i), c)).collect();
    let mut order: Vec<usize> = (0..flat.len()).collect();
    order.sort_by(|&a, &b| {
        let o = ds[a].total_cmp(&ds[b]);
        if farthest {
            o.reverse()
        } else {
            o
        }
        .then(a.cmp(&b))
    });
    let pr = pr_along(flat, &order);
    order.iter().zip(&pr).map(|(&s, &q)| q * g(ds[s])).sum()
}

/// Exact E[max_{v∈P}‖v − c‖] (0 for the empty realization).
pub fn meb_objective(set: &UncertainSet, c: &[f64]) -> f64 {
    expected_extreme(&set.flat(), c, true, |x| x)
}

/// Exact E[max_{v∈P}‖v − c‖ − min_{v∈P}‖v − c‖].
pub fn shell_objective(set: &UncertainSet, c: &[f64]) -> f64 {
    let flat = set.flat();
    (expected_extreme(&flat, c, true, |x| x) - expected_extreme(&flat, c, false, |x| x)).max(0.0)
}

/// Exact E[max_{v∈P}‖v − x‖²].
pub fn sq_meb_objective(set: &UncertainSet, x: &[f64]) -> f64 {
    expected_extreme(&set.flat(), x, true, |t| t * t)
}

/// Finite-mixture objective of a lifted fpow kernel.
struct Mixture {
    dim: usize,
    /// (weight, lifted points with ‖v‖² last) per member.
    members: Vec<(f64, Vec<Vec<f64>>)>,
    shape: Shape,
}

impl Mixture {
    fn value(&self, c: &[f64]) -> f64 {
        let d = self.dim;
        let cc = dot(c, c);
        let mut total = 0.0;
        for (w, pts) in &self.members {
            let mut hi = f64::NEG_INFINITY;
            let mut lo = f64::INFINITY;
            for v in pts {
                let h = cc - 2.0 * dot(c, &v[..d]) + v[d];
                hi = hi.max(h);
                lo = lo.min(h);
            }
            if pts.is_empty() {
                continue;
            }
            total += w * match self.shape {
                Shape::Meb => hi.max(0.0).sqrt(),
                Shape::Shell => hi.max(0.0).sqrt() - lo.max(0.0).sqrt(),
            };
        }
        total
    }

    fn lipschitz(&self) -> f64 {
        match self.shape {
            Shape::Meb => 1.0,
            Shape::Shell => 2.0,
        }
    }

    fn starts(&self, set: &UncertainSet) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut ranked: Vec<&(f64, Vec<Vec<f64>>)> =
            self.members.iter().filter(|(_, p)| !p.is_empty()).collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut out: Vec<Vec<f64>> = ranked
            .iter()
            .take(MEMBER_STARTS)
            .map(|(_, pts)| centroid(pts.iter().map(|v| &v[..d]), d))
            .collect();
        let locs = set.all_locations();
        out.push(centroid(locs.iter().map(|v| v.as_slice()), d));
        out
    }
}

fn centroid<'a>(pts: impl Iterator<Item = &'a [f64]>, d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d];
    let mut k = 0.0;
    for p in pts {
        for (a, x) in c.iter_mut().zip(p) {
            *a += x;
        }
        k += 1.0;
    }
    if k > 0.0 {
        c.iter_mut().for_each(|a| *a /= k);
    }
    c
}

/// Axis-aligned box [lo, hi].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    fn bounding(locs: &[Vec<f64>], d: usize) -> SearchBox {
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in locs {
            for k in 0..d {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if locs.is_empty() {
            lo = vec![0.0; d];
            hi = vec![0.0; d];
        }
        SearchBox { lo, hi }
    }

    fn scale(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    /// Same centre, every half-width multiplied by `factor` and at least
    /// `min_half`.
    fn grown(&self, factor: f64, min_half: f64) -> SearchBox {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for (a, b) in self.lo.iter().zip(&self.hi) {
            let m = (a + b) / 2.0;
            let h = ((b - a) / 2.0 * factor).max(min_half);
            lo.push(m - h);
            hi.push(m + h);
        }
        SearchBox { lo, hi }
    }
}

/// Box searched by the fits: the bounding box of the locations for the
/// ball (the optimum lies in their hull) and the same box with doubled
/// half-widths for the shell, whose optimum can be far away.
pub fn search_box(set: &UncertainSet, shape: Shape) -> SearchBox {
    let b = SearchBox::bounding(&set.all_locations(), set.dimension());
    match shape {
        Shape::Meb => b,
        Shape::Shell => {
            let s = b.scale().max(1e-9);
            b.grown(2.0, s / 2.0)
        }
    }
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    while b - a > tol {
        evals += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    }
}

/// Search directions: the axes and, in two or three dimensions, the
/// diagonals of every coordinate pair.
fn pattern(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        out.push(e);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for sj in [s, -s] {
                let mut e = vec![0.0; d];
                e[i] = s;
                e[j] = sj;
                out.push(e);
            }
        }
    }
    out
}

/// Coordinate and diagonal descent with golden-section line searches on
/// [−step, step], halving the step once a sweep stops improving.
fn local_search<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], scale: f64, evals: &mut usize) -> (Vec<f64>, f64) {
    let d = start.len();
    let dirs = pattern(d);
    let mut c = start.to_vec();
    let mut fc = f(&c);
    *evals += 1;
    let mut step = scale.max(1e-12) / 4.0;
    let floor = 1e-10 * scale.max(1e-12);
    while step > floor {
        let before = fc;
        for e in &dirs {
            let line = |t: f64| {
                let p: Vec<f64> = c.iter().zip(e).map(|(x, y)| x + t * y).collect();
                f(&p)
            };
            let (t, ft, used) = golden(line, -step, step, step * 1e-3);
            *evals += used;
            if ft < fc {
                c.iter_mut().zip(e).for_each(|(x, y)| *x += t * y);
                fc = ft;
            }
        }
        if before - fc <= LOCAL_TOL * before.abs().max(1e-300) {
            step /= 2.0;
        }
    }
    (c, fc)
}

struct Cell {
    lb: f64,
    center: Vec<f64>,
    half: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.lb == other.lb
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb)
    }
}

struct Certified {
    center: Vec<f64>,
    value: f64,
    lower: f64,
    evaluations: usize,
}

/// Lipschitz branch and bound over `bx` seeded with a known point. Each
/// cell's bound is f(centre) − L·(half-diagonal).
fn branch_and_bound<F: Fn(&[f64]) -> f64>(
    f: &F,
    lip: f64,
    bx: &SearchBox,
    mut best: Vec<f64>,
    mut best_f: f64,
) -> Certified {
    let d = bx.lo.len();
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;
    let push = |heap: &mut BinaryHeap<Cell>, center: Vec<f64>, half: Vec<f64>, best: &mut Vec<f64>, best_f: &mut f64| {
        let v = f(&center);
        let r = norm(&half);
        if v < *best_f {
            *best_f = v;
            *best = center.clone();
        }
        heap.push(Cell { lb: v - lip * r, center, half });
    };
    let center: Vec<f64> = bx.lo.iter().zip(&bx.hi).map(|(a, b)| (a + b) / 2.0).collect();
    let half: Vec<f64> = bx.lo.iter().zip(&bx.hi).map(|(a, b)| (b - a) / 2.0).collect();
    push(&mut heap, center, half, &mut best, &mut best_f);
    evals += 1;
    let lower = loop {
        let Some(cell) = heap.pop() else { break best_f };
        let tol = BNB_TOL * best_f.abs().max(1e-9 * bx.scale().max(1e-12));
        if cell.lb >= best_f - tol || evals >= BNB_BUDGET {
            break cell.lb.min(best_f);
        }
        let half: Vec<f64> = cell.half.iter().map(|h| h / 2.0).collect();
        for mask in 0..(1usize << d) {
            let c: Vec<f64> = (0..d)
                .map(|k| cell.center[k] + if mask >> k & 1 == 1 { half[k] } else { -half[k] })
                .collect();
            push(&mut heap, c, half.clone(), &mut best, &mut best_f);
            evals += 1;
        }
    };
    Certified {
        center: best,
        value: best_f,
        lower,
        evaluations: evals,
    }
}

fn check_params(set: &ExistentialSet, eps: f64, beta: f64) -> Result<()> {
    let d = set.dimension();
    if !(2..=3).contains(&d) {
        return Err(Error::unsupported(MODULE, format!("fits support d = 2 or 3, got {d}")));
    }
    if set.is_empty() {
        return Err(Error::precondition(MODULE, "fit of an empty set"));
    }
    let mut bad = Vec::new();
    if !(eps > 0.0 && eps <= 0.5) {
        bad.push(format!("epsilon must lie in (0, 0.5], got {eps}"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        bad.push(format!("beta must lie in (0, 1], got {beta}"));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::validation(MODULE, bad))
    }
}

fn fit(set: &ExistentialSet, eps: f64, beta: f64, seed: u64, shape: Shape) -> Result<Fit> {
    check_params(set, eps, beta)?;
    let d = set.dimension();
    let kernel = fpow_kernel(&lifted_existential(set)?, eps, 2, beta, seed)?;
    let total = kernel.total as f64;
    let mix = Mixture {
        dim: d,
        members: kernel
            .members
            .iter()
            .map(|m| (m.count as f64 / total, m.points.clone()))
            .collect(),
        shape,
    };
    let uset: UncertainSet = set.clone().into();
    let bx = search_box(&uset, shape);
    let scale = bx.scale().max(1e-12);
    let f = |c: &[f64]| mix.value(c);
    let mut evals = 0usize;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in mix.starts(&uset) {
        let (c, v) = local_search(&f, &s, scale, &mut evals);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((c, v));
        }
    }
    let (c0, v0) = best.expect("at least one start");
    let cert = branch_and_bound(&f, mix.lipschitz(), &bx, c0, v0);
    let gap = if cert.value > 0.0 {
        ((cert.value - cert.lower) / cert.value).max(0.0)
    } else {
        0.0
    };
    let mut warnings = kernel.warnings.clone();
    if cert.evaluations >= BNB_BUDGET {
        warnings.push(format!("branch and bound stopped at its budget of {BNB_BUDGET} evaluations"));
    }
    let value = match shape {
        Shape::Meb => meb_objective(&uset, &cert.center),
        Shape::Shell => shell_objective(&uset, &cert.center),
    };
    Ok(Fit {
        center: cert.center,
        value,
        coreset_value: cert.value,
        coreset_size: kernel.size(),
        optimizer_gap: gap,
        lower_bound: cert.lower,
        evaluations: evals + cert.evaluations,
        warnings,
    })
}

/// Center minimizing E[max_{v∈P}‖v − c‖] over an fpow-kernel coreset.
pub fn expected_meb(set: &ExistentialSet, eps: f64, beta: f64, seed: u64) -> Result<Fit> {
    fit(set, eps, beta, seed, Shape::Meb)
}

/// Best-found center for E[max‖v − c‖ − min‖v − c‖] over an fpow-kernel
/// coreset, searched inside [`search_box`].
pub fn expected_shell(set: &ExistentialSet, eps: f64, beta: f64, seed: u64) -> Result<Fit> {
    fit(set, eps, beta, seed, Shape::Shell)
}

/// Deterministic coreset for x ↦ E[max_{v∈P}‖x − v‖²]: points s of the
/// expectation polytope of the lifted set (v, ‖v‖²), evaluated as
/// max_s (mass·‖x‖² − 2⟨x, s_{1..d}⟩ + s_{d+1}).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqMebCoreset {
    pub dim: usize,
    pub eps: f64,
    /// Probability that the realization is nonempty.
    pub mass: f64,
    pub points: Vec<Vec<f64>>,
}

impl SqMebCoreset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Upper envelope at `x`.
    pub fn envelope(&self, x: &[f64]) -> f64 {
        let d = self.dim;
        let xx = dot(x, x);
        self.points
            .iter()
            .map(|s| self.mass * xx - 2.0 * dot(x, &s[..d]) + s[d])
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

/// ε-exp-kernel of the lifted set; its envelope is within a factor
/// (1 ± ε) of E[max‖x − v‖²] at every x.
pub fn expected_sq_meb_coreset(set: &UncertainSet, eps: f64) -> Result<SqMebCoreset> {
    let flat = set.flat();
    let lifted = lifted_flat(&flat);
    let k = exp_kernel_flat(&lifted, eps)?;
    Ok(SqMebCoreset {
        dim: flat.dim,
        eps,
        mass: 1.0 - flat.empty_probability(),
        points: k.points,
    })
}
