//! (ε,τ)-quant-kernels: small stochastic sets whose width distribution
//! matches the input's in every direction up to a (1±ε) length factor and
//! an additive τ in probability.
//!
//! Two output forms exist. A [`MixtureKernel`] is a finite mixture of
//! deterministic sets (the simple method). A [`BernoulliKernel`] is a set
//! of independent points, some of them anchors present with probability 1
//! (Algorithms 1 and 2 and the subset method).

mod fast;
mod tukey;

use std::collections::HashMap;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expkernel::exp_kernel_subset;
use crate::geom::{eps_kernel, width};
use crate::model::{ExistentialSet, FlatSet, UncertainSet};
use crate::oracle::WidthDistribution;

pub use fast::FastTukeyConfig;
pub use tukey::{Dilation, RegionMethod, RoundStat, TukeyRegion, TUKEY_3D_CAP};

pub(crate) const MODULE: &str = "quantkernel";

/// Construction method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Simple,
    Poisson,
    Tukey,
    TukeyFast,
    Subset,
    Auto,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Simple => "simple",
            Method::Poisson => "poisson",
            Method::Tukey => "tukey",
            Method::TukeyFast => "tukey-fast",
            Method::Subset => "subset",
            Method::Auto => "auto",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "simple" => Method::Simple,
            "poisson" => Method::Poisson,
            "tukey" => Method::Tukey,
            "tukey-fast" => Method::TukeyFast,
            "subset" => Method::Subset,
            "auto" => Method::Auto,
            other => {
                return Err(Error::validation(
                    MODULE,
                    vec![format!("unknown method {other:?}")],
                ))
            }
        })
    }
}

/// Sample-size rule of Poisson sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PoissonBound {
    /// τ₁ = (τ/λ)², N = c·ln(1/δ)·λ⁴/τ⁴.
    General,
    /// τ₁ = τ/λ, N = c·ln(1/δ)·λ²/τ²; valid when some point lies in the
    /// convex hull of the realization with probability ≥ 1 − δ/2.
    SpecialPoint,
}

/// Explicit constants of the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantConfig {
    /// Leading constant c of every sample-size formula.
    pub c: f64,
    /// Largest sample count N accepted by the sampling algorithms.
    pub sample_cap: f64,
    pub poisson_bound: PoissonBound,
    pub fast: FastTukeyConfig,
    /// Fraction β used by the subset method; `None` takes the smallest
    /// input probability.
    pub beta: Option<f64>,
}

impl Default for QuantConfig {
    fn default() -> Self {
        QuantConfig {
            c: 4.0,
            sample_cap: 1e7,
            poisson_bound: PoissonBound::General,
            fast: FastTukeyConfig::default(),
            beta: None,
        }
    }
}

/// Construction record stored with every kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantMeta {
    pub method: Method,
    pub eps: f64,
    pub tau: f64,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    /// Number of samples N drawn (realizations or Poisson samples).
    pub samples: u64,
    /// λ(𝒫) or λ(𝒦̄), whichever the construction sampled from.
    pub lambda: Option<f64>,
    /// Dilation centre of 𝒦 (the Tukey construction).
    pub center: Option<Vec<f64>>,
    pub region_method: Option<RegionMethod>,
    pub rounds: Option<usize>,
    pub warnings: Vec<String>,
}

impl QuantMeta {
    fn new(method: Method, eps: f64, tau: f64) -> Self {
        QuantMeta {
            method,
            eps,
            tau,
            delta: None,
            seed: None,
            samples: 0,
            lambda: None,
            center: None,
            region_method: None,
            rounds: None,
            warnings: Vec::new(),
        }
    }
}

/// One distinct member of a mixture with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureMember {
    pub points: Vec<Vec<f64>>,
    pub count: u64,
}

/// Mixture of deterministic sets; member i occurs with probability
/// count_i/total.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureKernel {
    pub dim: usize,
    pub members: Vec<MixtureMember>,
    pub total: u64,
    pub meta: QuantMeta,
}

impl MixtureKernel {
    /// Number of distinct stored points over all members.
    pub fn stored_points(&self) -> usize {
        self.members.iter().map(|m| m.points.len()).sum()
    }

    fn counting_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        let mut widths: Vec<(f64, u64)> = self
            .members
            .iter()
            .map(|m| (width(&m.points, u), m.count))
            .collect();
        widths.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = Vec::with_capacity(widths.len());
        let mut run = 0u64;
        for &(_, c) in &widths {
            run += c;
            acc.push(run);
        }
        ts.iter()
            .map(|&t| {
                let k = widths.partition_point(|&(w, _)| w <= t);
                if k == 0 {
                    0.0
                } else {
                    acc[k - 1] as f64 / self.total as f64
                }
            })
            .collect()
    }
}

impl WidthDistribution for MixtureKernel {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        self.counting_cdf(u, ts)
    }
}

/// Independent points: anchors with probability 1 plus points with their
/// own probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliKernel {
    pub dim: usize,
    pub anchors: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
    /// Multiplicity of each point in the drawn sample (1 for subset kernels).
    pub multiplicity: Vec<u64>,
    pub meta: QuantMeta,
}

impl BernoulliKernel {
    pub fn len(&self) -> usize {
        self.anchors.len() + self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The kernel as a flat existential set (anchors first).
    pub fn flat(&self) -> FlatSet {
        let mut pts = self.anchors.clone();
        pts.extend(self.points.iter().cloned());
        let mut probs = vec![1.0; self.anchors.len()];
        probs.extend(&self.probs);
        FlatSet::independent(self.dim, &pts, &probs)
    }

    /// The kernel as an existential set.
    pub fn to_set(&self) -> Result<ExistentialSet> {
        let mut pairs: Vec<(Vec<f64>, f64)> = self.anchors.iter().map(|a| (a.clone(), 1.0)).collect();
        pairs.extend(self.points.iter().cloned().zip(self.probs.iter().copied()));
        if pairs.is_empty() {
            return ExistentialSet::new(self.dim, Vec::new());
        }
        ExistentialSet::from_pairs(pairs)
    }
}

impl WidthDistribution for BernoulliKernel {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        crate::width::width_cdf_flat(&self.flat(), u, ts)
    }
}

/// Output of any quant-kernel construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum QuantKernel {
    Mixture(MixtureKernel),
    Bernoulli(BernoulliKernel),
}

impl QuantKernel {
    pub fn meta(&self) -> &QuantMeta {
        match self {
            QuantKernel::Mixture(k) => &k.meta,
            QuantKernel::Bernoulli(k) => &k.meta,
        }
    }

    /// Number of stored points.
    pub fn size(&self) -> usize {
        match self {
            QuantKernel::Mixture(k) => k.stored_points(),
            QuantKernel::Bernoulli(k) => k.len(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernels serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation(MODULE, vec![format!("kernel JSON: {e}")]))
    }
}

impl WidthDistribution for QuantKernel {
    fn dimension(&self) -> usize {
        match self {
            QuantKernel::Mixture(k) => k.dim,
            QuantKernel::Bernoulli(k) => k.dim,
        }
    }

    fn width_cdf(&self, u: &[f64], ts: &[f64]) -> Vec<f64> {
        match self {
            QuantKernel::Mixture(k) => k.width_cdf(u, ts),
            QuantKernel::Bernoulli(k) => k.width_cdf(u, ts),
        }
    }
}

/// Width CDF values and how they were obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthCdf {
    pub values: Vec<f64>,
    /// "counting" for mixtures, "exact" for independent points.
    pub method: String,
}

/// Pr[ω(·,u) ≤ t] of a kernel, exact for both forms.
pub fn cdf(kernel: &QuantKernel, u: &[f64], ts: &[f64]) -> WidthCdf {
    WidthCdf {
        values: kernel.width_cdf(u, ts),
        method: match kernel {
            QuantKernel::Mixture(_) => "counting",
            QuantKernel::Bernoulli(_) => "exact",
        }
        .to_string(),
    }
}

/// Pr[ω(𝒫,u) ≤ t] of an uncertain set by the exact engine.
pub fn set_cdf(set: &UncertainSet, u: &[f64], ts: &[f64]) -> WidthCdf {
    WidthCdf {
        values: crate::width::width_cdf(set, u, ts),
        method: "exact".to_string(),
    }
}

fn check_unit(name: &str, x: f64, hi: f64) -> Result<()> {
    if x > 0.0 && x <= hi {
        Ok(())
    } else {
        Err(Error::validation(MODULE, vec![format!("{name} must lie in (0, {hi}], got {x}")]))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::validation(MODULE, vec![format!("delta must lie in (0, 1), got {delta}")]))
    }
}

/// N = ⌈c·ln(1/ε)/(τ²·ε^{d−1})⌉ for the simple method.
pub fn simple_sample_count(d: usize, eps: f64, tau: f64, c: f64) -> u64 {
    (c * (1.0 / eps).ln() / (tau * tau * eps.powi(d as i32 - 1))).ceil() as u64
}

/// Simple mixture kernel: N i.i.d. realizations, each replaced by a
/// deterministic ε/(1+ε)-kernel, each with probability 1/N. Realization i
/// is drawn from stream i of a ChaCha8 generator seeded with `seed`.
pub fn quant_simple(
    set: &UncertainSet,
    eps: f64,
    tau: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<MixtureKernel> {
    check_unit("epsilon", eps, 0.5)?;
    check_unit("tau", tau, 0.5)?;
    let d = set.dimension();
    let n_samples = simple_sample_count(d, eps, tau, cfg.c);
    if n_samples as f64 > cfg.sample_cap {
        return Err(Error::limit(
            MODULE,
            format!("simple method needs {n_samples} samples; the cap is {}", cfg.sample_cap),
        ));
    }
    let kernel_eps = eps / (1.0 + eps);
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut members: Vec<MixtureMember> = Vec::new();
    for i in 0..n_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let r = set.sample_with(&mut rng);
        if let Some(&j) = index.get(&r.sources) {
            members[j].count += 1;
            continue;
        }
        let points = if r.present.is_empty() {
            Vec::new()
        } else {
            eps_kernel(&r.present, kernel_eps)?.points
        };
        index.insert(r.sources, members.len());
        members.push(MixtureMember { points, count: 1 });
    }
    let mut meta = QuantMeta::new(Method::Simple, eps, tau);
    meta.seed = Some(seed);
    meta.samples = n_samples;
    Ok(MixtureKernel {
        dim: d,
        members,
        total: n_samples,
        meta,
    })
}

/// Draws N samples from 𝔄({v}) = λ_v/λ over `idx` and returns the
/// multiplicity of each entry (sequential conditional binomials).
fn multinomial(rng: &mut ChaCha8Rng, lam: &[f64], n: u64) -> Vec<u64> {
    let mut left = n;
    let mut rest: f64 = lam.iter().sum();
    let mut out = Vec::with_capacity(lam.len());
    for &l in lam {
        if left == 0 || rest <= 0.0 {
            out.push(0);
            continue;
        }
        let p = (l / rest).clamp(0.0, 1.0);
        let k = if p >= 1.0 {
            left
        } else {
            Binomial::new(left, p).expect("valid binomial").sample(rng)
        };
        out.push(k);
        left -= k;
        rest -= l;
    }
    out
}

/// Independent points carrying the Poissonized sample: point v appears
/// with probability 1 − exp(−k_v·λ/N) where k_v is its multiplicity.
fn poisson_points(
    pts: &[Vec<f64>],
    lam: &[f64],
    n: u64,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<f64>>, Vec<f64>, Vec<u64>) {
    let total: f64 = lam.iter().sum();
    let counts = multinomial(rng, lam, n);
    let mut points = Vec::new();
    let mut probs = Vec::new();
    let mut mult = Vec::new();
    for (i, &k) in counts.iter().enumerate() {
        if k > 0 {
            points.push(pts[i].clone());
            probs.push(-(-(k as f64) * total / n as f64).exp_m1());
            mult.push(k);
        }
    }
    (points, probs, mult)
}

/// Sample count of Poisson sampling.
pub fn poisson_sample_count(lambda: f64, tau: f64, delta: f64, cfg: &QuantConfig) -> f64 {
    let r = lambda / tau;
    let scale = match cfg.poisson_bound {
        PoissonBound::General => r.powi(4),
        PoissonBound::SpecialPoint => r * r,
    };
    (cfg.c * (1.0 / delta).ln() * scale).ceil().max(1.0)
}

/// Poissonized sampling. Draws N points from
/// 𝔄({v}) = λ_v/λ, each present with probability 1 − e^{−λ/N}
/// (co-located samples merged).
pub fn quant_poisson(
    set: &ExistentialSet,
    tau: f64,
    delta: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<BernoulliKernel> {
    check_unit("tau", tau, 1.0)?;
    check_delta(delta)?;
    if let Some(i) = set.points().iter().position(|w| w.p >= 1.0) {
        return Err(Error::precondition(
            MODULE,
            format!("Poisson sampling needs p < 1 for every point; point {i} has p = 1"),
        ));
    }
    let probs: Vec<f64> = set.points().iter().map(|w| w.p).collect();
    let lam = tukey::weights(&probs);
    let total: f64 = lam.iter().sum();
    let coords: Vec<Vec<f64>> = set.points().iter().map(|w| w.coords.clone()).collect();
    let mut meta = QuantMeta::new(Method::Poisson, 0.0, tau);
    meta.delta = Some(delta);
    meta.seed = Some(seed);
    meta.lambda = Some(total);
    if total == 0.0 || set.is_empty() {
        return Ok(BernoulliKernel {
            dim: set.dimension(),
            anchors: Vec::new(),
            points: Vec::new(),
            probs: Vec::new(),
            multiplicity: Vec::new(),
            meta,
        });
    }
    let n = poisson_sample_count(total, tau, delta, cfg);
    if n > cfg.sample_cap {
        return Err(Error::limit(
            MODULE,
            format!(
                "Poisson sampling needs N = {n:.3e} samples (lambda = {total}); the cap is {:.3e}; \
                 use the Tukey construction (method tukey)",
                cfg.sample_cap
            ),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, probs, multiplicity) = poisson_points(&coords, &lam, n as u64, &mut rng);
    meta.samples = n as u64;
    Ok(BernoulliKernel {
        dim: set.dimension(),
        anchors: Vec::new(),
        points,
        probs,
        multiplicity,
        meta,
    })
}

fn region_inputs(set: &ExistentialSet) -> (Vec<Vec<f64>>, Vec<f64>) {
    let coords = set.points().iter().map(|w| w.coords.clone()).collect();
    let probs: Vec<f64> = set.points().iter().map(|w| w.p).collect();
    (coords, tukey::weights(&probs))
}

/// Exact ℋ = TK(𝒫, ln(2/τ)) for d ∈ {2,3} with ℰ_ℋ and 𝒦.
pub fn tukey_region(set: &ExistentialSet, tau: f64, eps: f64) -> Result<TukeyRegion> {
    check_unit("tau", tau, 1.0)?;
    check_unit("epsilon", eps, 0.5)?;
    let d = set.dimension();
    if !(d == 2 || d == 3) {
        return Err(Error::unsupported(
            MODULE,
            format!("Tukey regions are implemented for d = 2 and d = 3, got d = {d}"),
        ));
    }
    let (coords, lam) = region_inputs(set);
    tukey::check_helly(d, lam.iter().sum(), tau)?;
    tukey::exact_region(&coords, &lam, tau, eps)
}

/// Iterative near-linear ℋ and 𝒦 in the plane.
pub fn tukey_region_fast(
    set: &ExistentialSet,
    tau: f64,
    eps: f64,
    seed: u64,
    cfg: &FastTukeyConfig,
) -> Result<TukeyRegion> {
    check_unit("tau", tau, 1.0)?;
    check_unit("epsilon", eps, 0.5)?;
    if set.dimension() != 2 {
        return Err(Error::unsupported(MODULE, "the iterative Tukey construction is planar"));
    }
    let (coords, lam) = region_inputs(set);
    fast::fast_region(&coords, &lam, tau, eps, seed, cfg)
}

/// The Tukey construction from a computed region: the vertices of 𝒦 with
/// probability 1 plus N = ⌈c·ln(1/δ)·λ(𝒦̄)²/τ²⌉ Poissonized samples of
/// the points outside 𝒦.
pub fn quant_from_region(
    set: &ExistentialSet,
    region: &TukeyRegion,
    eps: f64,
    tau: f64,
    delta: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<BernoulliKernel> {
    let (coords, lam) = region_inputs(set);
    let out_pts: Vec<Vec<f64>> = region.outside.iter().map(|&i| coords[i].clone()).collect();
    let out_lam: Vec<f64> = region.outside.iter().map(|&i| lam[i]).collect();
    let lbar: f64 = out_lam.iter().sum();
    let method = match region.method {
        RegionMethod::Exact => Method::Tukey,
        _ => Method::TukeyFast,
    };
    let mut meta = QuantMeta::new(method, eps, tau);
    meta.delta = Some(delta);
    meta.seed = Some(seed);
    meta.lambda = Some(lbar);
    meta.center = Some(region.center.clone());
    meta.region_method = Some(region.method);
    meta.rounds = Some(region.rounds.len());
    meta.warnings = region.warnings.clone();
    if !lbar.is_finite() {
        return Err(Error::degenerate(
            MODULE,
            "a point with p = 1 lies outside the dilated region",
        ));
    }
    let (points, probs, multiplicity) = if lbar > 0.0 {
        let n = (cfg.c * (1.0 / delta).ln() * (lbar / tau).powi(2)).ceil().max(1.0);
        if n > cfg.sample_cap {
            return Err(Error::limit(
                MODULE,
                format!("The Tukey construction needs N = {n:.3e} samples; the cap is {:.3e}", cfg.sample_cap),
            ));
        }
        meta.samples = n as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        poisson_points(&out_pts, &out_lam, n as u64, &mut rng)
    } else {
        (Vec::new(), Vec::new(), Vec::new())
    };
    Ok(BernoulliKernel {
        dim: set.dimension(),
        anchors: region.k_vertices.clone(),
        points,
        probs,
        multiplicity,
        meta,
    })
}

/// The Tukey construction with the exact region.
pub fn quant_tukey(
    set: &ExistentialSet,
    eps: f64,
    tau: f64,
    delta: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<BernoulliKernel> {
    check_delta(delta)?;
    let region = tukey_region(set, tau, eps)?;
    quant_from_region(set, &region, eps, tau, delta, seed, cfg)
}

/// The Tukey construction with the iterative region.
pub fn quant_tukey_fast(
    set: &ExistentialSet,
    eps: f64,
    tau: f64,
    delta: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<BernoulliKernel> {
    check_delta(delta)?;
    let region = tukey_region_fast(set, tau, eps, seed, &cfg.fast)?;
    quant_from_region(set, &region, eps, tau, delta, seed, cfg)
}

/// Subset quant-kernel: the subset exp-kernel at μ = min(ε, τ).
pub fn quant_subset(
    set: &ExistentialSet,
    eps: f64,
    tau: f64,
    beta: f64,
) -> Result<BernoulliKernel> {
    check_unit("epsilon", eps, 0.5)?;
    check_unit("tau", tau, 0.5)?;
    let mu = eps.min(tau);
    let k = exp_kernel_subset(set, mu, beta)?;
    let mut meta = QuantMeta::new(Method::Subset, eps, tau);
    meta.samples = k.indices.len() as u64;
    Ok(BernoulliKernel {
        dim: set.dimension(),
        anchors: Vec::new(),
        points: k.set.points().iter().map(|w| w.coords.clone()).collect(),
        probs: k.set.points().iter().map(|w| w.p).collect(),
        multiplicity: vec![1; k.indices.len()],
        meta,
    })
}

/// Method chosen by `auto`: Poisson sampling when λ(𝒫) ≤ (d+1)·ln(2/τ),
/// otherwise the Tukey construction (iterative region above `fast.exact_fallback_n`
/// points in the plane). Locational input and d ∉ {2,3} use the simple
/// method.
pub fn auto_method(set: &UncertainSet, tau: f64, cfg: &QuantConfig) -> Method {
    let UncertainSet::Existential(s) = set else {
        return Method::Simple;
    };
    let d = s.dimension();
    if s.is_empty() {
        return Method::Simple;
    }
    let probs: Vec<f64> = s.points().iter().map(|w| w.p).collect();
    let total: f64 = tukey::weights(&probs).iter().sum();
    if total <= (d as f64 + 1.0) * tukey::gamma(tau) {
        return Method::Poisson;
    }
    match d {
        2 if s.len() > cfg.fast.exact_fallback_n => Method::TukeyFast,
        2 => Method::Tukey,
        3 if s.len() <= TUKEY_3D_CAP => Method::Tukey,
        _ => Method::Simple,
    }
}

/// Runs a construction by method name.
pub fn build(
    set: &UncertainSet,
    method: Method,
    eps: f64,
    tau: f64,
    delta: f64,
    seed: u64,
    cfg: &QuantConfig,
) -> Result<QuantKernel> {
    let existential = |m: Method| match set {
        UncertainSet::Existential(s) => Ok(s),
        UncertainSet::Locational(_) => Err(Error::unsupported(
            MODULE,
            format!("method {} needs existential input; use simple", m.name()),
        )),
    };
    let chosen = if method == Method::Auto {
        auto_method(set, tau, cfg)
    } else {
        method
    };
    let mut k = match chosen {
        Method::Simple => QuantKernel::Mixture(quant_simple(set, eps, tau, seed, cfg)?),
        Method::Poisson => {
            QuantKernel::Bernoulli(quant_poisson(existential(chosen)?, tau, delta, seed, cfg)?)
        }
        Method::Tukey => {
            QuantKernel::Bernoulli(quant_tukey(existential(chosen)?, eps, tau, delta, seed, cfg)?)
        }
        Method::TukeyFast => QuantKernel::Bernoulli(quant_tukey_fast(
            existential(chosen)?,
            eps,
            tau,
            delta,
            seed,
            cfg,
        )?),
        Method::Subset => {
            let s = existential(chosen)?;
            let beta = match cfg.beta {
                Some(b) => b,
                None => s.beta().ok_or_else(|| {
                    Error::precondition(MODULE, "subset method needs a nonempty input")
                })?,
            };
            QuantKernel::Bernoulli(quant_subset(s, eps, tau, beta)?)
        }
        Method::Auto => unreachable!("auto resolves to a concrete method"),
    };
    if method == Method::Auto {
        let note = format!("auto selected {}", chosen.name());
        match &mut k {
            QuantKernel::Mixture(m) => m.meta.warnings.push(note),
            QuantKernel::Bernoulli(b) => b.meta.warnings.push(note),
        }
    }
    Ok(k)
}

#[cfg(test)]
mod tests;
