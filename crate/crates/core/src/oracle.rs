//! Ground-truth engines: exhaustive enumeration over realizations, Monte
//! Carlo estimates with confidence intervals, (ε,τ)-band checks,
//! Kolmogorov distances and brute-force planar Tukey depth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpowkernel::t_r;
use crate::geom::width;
use crate::model::{FlatSet, UncertainSet};

const MODULE: &str = "oracle";

/// Largest realization bit count accepted by the enumeration engines.
pub const ENUMERATION_BIT_CAP: u32 = 24;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Anything with a width distribution along each direction.
pub trait WidthDistribution {
    fn dimension(&self) -> usize;
    /// Pr[ω(P,u) ≤ t] for each t (closed inequality).
    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64>;
}

impl WidthDistribution for UncertainSet {
    fn dimension(&self) -> usize {
        UncertainSet::dimension(self)
    }

    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        crate::width::width_cdf(self, u, ts)
    }
}

impl WidthDistribution for FlatSet {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        crate::width::width_cdf_flat(self, u, ts)
    }
}

/// Width distribution of a set evaluated by full enumeration.
pub struct Enumerated<'a>(pub &'a FlatSet);

impl WidthDistribution for Enumerated<'_> {
    fn dimension(&self) -> usize {
        self.0.dim
    }

    /// Panics above [`ENUMERATION_BIT_CAP`] realization bits.
    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        enumerate_flat_width_cdf(self.0, u, ts).expect("enumeration within the bit cap")
    }
}

/// Calls `visit(probability, present locations)` for every realization
/// with positive probability.
pub fn for_each_realization<F>(flat: &FlatSet, mut visit: F) -> Result<()>
where
    F: FnMut(f64, &[usize]),
{
    let bits = flat.realization_bits();
    if bits > ENUMERATION_BIT_CAP {
        return Err(Error::limit(
            MODULE,
            format!("enumeration needs {bits} realization bits; the cap is {ENUMERATION_BIT_CAP}"),
        ));
    }
    let mut present = Vec::with_capacity(flat.owners());
    fn rec<F: FnMut(f64, &[usize])>(
        flat: &FlatSet,
        v: usize,
        prob: f64,
        present: &mut Vec<usize>,
        visit: &mut F,
    ) {
        if v == flat.owners() {
            visit(prob, present);
            return;
        }
        if flat.absent[v] > 0.0 {
            rec(flat, v + 1, prob * flat.absent[v], present, visit);
        }
        for &s in &flat.members[v] {
            present.push(s);
            rec(flat, v + 1, prob * flat.p[s], present, visit);
            present.pop();
        }
    }
    rec(flat, 0, 1.0, &mut present, &mut visit);
    Ok(())
}

/// E[g(P)] by enumeration, for a statistic of the present coordinates.
pub fn enumerate_expectation<G>(set: &UncertainSet, mut g: G) -> Result<f64>
where
    G: FnMut(&[Vec<f64>]) -> f64,
{
    let flat = set.flat();
    let mut total = 0.0;
    let mut buf: Vec<Vec<f64>> = Vec::new();
    for_each_realization(&flat, |prob, present| {
        buf.clear();
        buf.extend(present.iter().map(|&s| flat.coords(s).to_vec()));
        total += prob * g(&buf);
    })?;
    Ok(total)
}

/// E[ω(P,u)] by enumeration.
pub fn enumerate_expected_width(set: &UncertainSet, u: &[f64]) -> Result<f64> {
    enumerate_expectation(set, |p| width(p, u))
}

/// Pr[ω(P,u) ≤ t] by enumeration, for each t.
pub fn enumerate_width_cdf(set: &UncertainSet, u: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
    enumerate_flat_width_cdf(&set.flat(), u, ts)
}

/// Enumeration CDF of any flattened set (independent Bernoulli kernels
/// included).
pub fn enumerate_flat_width_cdf(flat: &FlatSet, u: &[f64], ts: &[f64]) -> Result<Vec<f64>> {
    let proj: Vec<f64> = (0..flat.len())
        .map(|s| crate::geom::dot(flat.coords(s), u))
        .collect();
    let mut out = vec![0.0; ts.len()];
    for_each_realization(flat, |prob, present| {
        let w = if present.is_empty() {
            0.0
        } else {
            let hi = present.iter().map(|&s| proj[s]).fold(f64::NEG_INFINITY, f64::max);
            let lo = present.iter().map(|&s| proj[s]).fold(f64::INFINITY, f64::min);
            hi - lo
        };
        for (o, &t) in out.iter_mut().zip(ts) {
            if w <= t {
                *o += prob;
            }
        }
    })?;
    Ok(out)
}

/// Statistic estimated by [`mc_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Statistic {
    Width,
    /// T_r(P,u); realizations must lie in the polar cone of u.
    Tr(u32),
}

/// Monte Carlo mean with the half-width of a 99% normal confidence interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub samples: usize,
}

/// Monte Carlo estimate of E[statistic(P,u)], deterministic given `seed`.
pub fn mc_estimate(
    set: &UncertainSet,
    u: &[f64],
    statistic: Statistic,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::validation(MODULE, vec!["n_samples must be positive".into()]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n_samples {
        let r = set.sample_with(&mut rng);
        let x = match statistic {
            Statistic::Width => width(&r.present, u),
            Statistic::Tr(k) => t_r(&r.present, u, k)?,
        };
        sum += x;
        sum_sq += x * x;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let var = if n_samples > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        ci_halfwidth: Z99 * (var / n).sqrt(),
        samples: n_samples,
    })
}

/// One (direction, t) cell of a band check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub direction: usize,
    pub t: f64,
    /// CDF_ref((1−ε)t) − τ.
    pub lower: f64,
    pub kernel: f64,
    /// CDF_ref((1+ε)t) + τ.
    pub upper: f64,
    pub in_band: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub rows: Vec<BandRow>,
    pub pass_fraction: f64,
}

impl BandReport {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.in_band).count()
    }
}

/// Checks Pr_ref[ω ≤ (1−ε)t] − τ ≤ Pr_kernel[ω ≤ t] ≤ Pr_ref[ω ≤ (1+ε)t] + τ
/// on every (direction, t) pair, with slack 1e−9. Setting ε = 0 gives the
/// additive Kolmogorov-style check.
pub fn band_check(
    reference: &dyn WidthDistribution,
    kernel: &dyn WidthDistribution,
    eps: f64,
    tau: f64,
    directions: &[Vec<f64>],
    t_values: &[f64],
) -> BandReport {
    let mut rows = Vec::with_capacity(directions.len() * t_values.len());
    let lo_t: Vec<f64> = t_values.iter().map(|t| (1.0 - eps) * t).collect();
    let hi_t: Vec<f64> = t_values.iter().map(|t| (1.0 + eps) * t).collect();
    for (d, u) in directions.iter().enumerate() {
        let lo = reference.width_cdf(u, &lo_t);
        let hi = reference.width_cdf(u, &hi_t);
        let k = kernel.width_cdf(u, t_values);
        for i in 0..t_values.len() {
            let lower = lo[i] - tau;
            let upper = hi[i] + tau;
            rows.push(BandRow {
                direction: d,
                t: t_values[i],
                lower,
                kernel: k[i],
                upper,
                in_band: k[i] >= lower - 1e-9 && k[i] <= upper + 1e-9,
            });
        }
    }
    let pass_fraction = if rows.is_empty() {
        1.0
    } else {
        rows.iter().filter(|r| r.in_band).count() as f64 / rows.len() as f64
    };
    BandReport { rows, pass_fraction }
}

/// max_t |F_a(t) − F_b(t)| over the given t values along `u`.
pub fn kolmogorov_distance(
    a: &dyn WidthDistribution,
    b: &dyn WidthDistribution,
    u: &[f64],
    t_values: &[f64],
) -> f64 {
    let fa = a.width_cdf(u, t_values);
    let fb = b.width_cdf(u, t_values);
    fa.iter()
        .zip(&fb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Kolmogorov distance of two empirical samples of real numbers.
pub fn empirical_kolmogorov(a: &[f64], b: &[f64]) -> f64 {
    let mut xs: Vec<f64> = a.iter().chain(b).copied().collect();
    xs.sort_by(|x, y| x.total_cmp(y));
    xs.dedup();
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.total_cmp(y));
    sb.sort_by(|x, y| x.total_cmp(y));
    let cdf = |s: &[f64], t: f64| s.partition_point(|&x| x <= t) as f64 / s.len() as f64;
    xs.iter()
        .map(|&t| (cdf(&sa, t) - cdf(&sb, t)).abs())
        .fold(0.0, f64::max)
}

/// Weighted Tukey depth of `x` among planar points: the minimum total
/// weight of a closed halfplane whose boundary passes through `x`.
/// Weights may be +∞. Runs in O(n log n).
pub fn tukey_depth_brute(points: &[[f64; 2]], weights: &[f64], x: [f64; 2]) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut base = 0.0;
    let mut base_inf = false;
    let mut ang: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for (p, &w) in points.iter().zip(weights) {
        let dx = p[0] - x[0];
        let dy = p[1] - x[1];
        if dx == 0.0 && dy == 0.0 {
            if w.is_infinite() {
                base_inf = true;
            } else {
                base += w;
            }
        } else {
            ang.push((dy.atan2(dx).rem_euclid(TAU), w));
        }
    }
    if base_inf {
        return f64::INFINITY;
    }
    if ang.is_empty() {
        return base;
    }
    ang.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = ang.len();
    // Doubled angle array with prefix sums of finite weights and counts of
    // infinite ones.
    let mut a2 = Vec::with_capacity(2 * n);
    let mut pre = vec![0.0; 2 * n + 1];
    let mut pinf = vec![0usize; 2 * n + 1];
    for k in 0..2 * n {
        let (a, w) = ang[k % n];
        a2.push(if k < n { a } else { a + TAU });
        pre[k + 1] = pre[k] + if w.is_finite() { w } else { 0.0 };
        pinf[k + 1] = pinf[k] + usize::from(w.is_infinite());
    }
    let mut crit: Vec<f64> = ang
        .iter()
        .flat_map(|&(a, _)| [(a + PI / 2.0).rem_euclid(TAU), (a - PI / 2.0).rem_euclid(TAU)])
        .collect();
    crit.sort_by(|a, b| a.total_cmp(b));
    crit.dedup();
    let mut best = f64::INFINITY;
    for i in 0..crit.len() {
        let a = crit[i];
        let b = if i + 1 < crit.len() { crit[i + 1] } else { crit[0] + TAU };
        let mid = (0.5 * (a + b)).rem_euclid(TAU);
        // Points strictly within π/2 of `mid`: angles in (mid − π/2, mid + π/2).
        let mut lo = mid - PI / 2.0;
        if lo < 0.0 {
            lo += TAU;
        }
        let hi = lo + PI;
        let i0 = a2.partition_point(|&v| v <= lo);
        let i1 = a2.partition_point(|&v| v < hi);
        let i1 = i1.min(i0 + n);
        let w = if pinf[i1] > pinf[i0] {
            f64::INFINITY
        } else {
            pre[i1] - pre[i0]
        };
        best = best.min(w);
    }
    base + best
}
