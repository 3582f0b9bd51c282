//! Iterative near-linear construction of ℋ and 𝒦 in the plane.
//!
//! Each round samples an ε₂-approximation of the remaining weight, adds
//! the vertices of the previous 𝒦 with infinite weight, computes the
//! exact Tukey region of that small set at threshold γ + ε₂·λ_i and
//! deletes every point inside its (1+ε₁)-dilated kernel. Rounds stop once
//! the remaining weight is at most C_P3·γ/√ε. The final ℋ is
//! 𝒦/(1+ε) about the kernel centre, certified by brute-force depth.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::hull_2d;
use crate::oracle::tukey_depth_brute;

use super::tukey::{
    check_helly, dilate, exact_region, finish_region, gamma, scale_of, tukey_polygon, Region,
    RegionMethod, RoundStat, TukeyRegion,
};
use super::MODULE;

/// Constants of the iterative construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastTukeyConfig {
    /// z_max = ⌈c_z·log₂ n⌉.
    pub c_z: f64,
    /// ε₂ = c_2·√(ε/ln n).
    pub c_2: f64,
    /// L = ⌈c_L·(3 + ln n)/ε₂²⌉ (δ = 1/n per round).
    pub c_l: f64,
    /// Stop once λ(𝒫_i) ≤ c_p3·γ/√ε.
    pub c_p3: f64,
    /// Restarts with ε₂ halved after a failed halving or certification.
    pub escalations: usize,
    /// Inputs up to this size fall back to the exact region on failure.
    pub exact_fallback_n: usize,
}

impl Default for FastTukeyConfig {
    fn default() -> Self {
        FastTukeyConfig {
            c_z: 1.0,
            c_2: 0.25,
            c_l: 0.1,
            c_p3: 16.0,
            escalations: 3,
            exact_fallback_n: 3000,
        }
    }
}

enum Attempt {
    Done(TukeyRegion),
    Failed(String),
}

/// Region satisfying ConvH/(1+ε) ⊆ ℋ ⊆ 𝒦, depth(ℋ) ≥ γ and
/// λ(𝒦̄) ≤ C_P3·γ/√ε for planar existential input with weights λ.
pub(crate) fn fast_region(
    pts: &[Vec<f64>],
    lam: &[f64],
    tau: f64,
    eps: f64,
    seed: u64,
    cfg: &FastTukeyConfig,
) -> Result<TukeyRegion> {
    let n = pts.len();
    if pts[0].len() != 2 {
        return Err(Error::unsupported(MODULE, "the iterative Tukey construction is planar"));
    }
    let total: f64 = lam.iter().sum();
    check_helly(2, total, tau)?;
    let flat: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
    let mut warnings = Vec::new();
    if hull_2d(&flat).len() < 3 {
        warnings.push("collinear input; exact region used".to_string());
        let mut r = exact_region(pts, lam, tau, eps)?;
        r.method = RegionMethod::FastFallback;
        r.warnings = warnings;
        return Ok(r);
    }
    let mut c2 = cfg.c_2;
    for attempt in 0..=cfg.escalations {
        match attempt_once(&flat, pts, lam, tau, eps, seed, attempt as u64, c2, cfg)? {
            Attempt::Done(mut r) => {
                r.warnings.splice(0..0, warnings);
                return Ok(r);
            }
            Attempt::Failed(why) => {
                warnings.push(format!("attempt {attempt}: {why}"));
                c2 /= 2.0;
            }
        }
    }
    if n <= cfg.exact_fallback_n {
        warnings.push("falling back to the exact region".to_string());
        let mut r = exact_region(pts, lam, tau, eps)?;
        r.method = RegionMethod::FastFallback;
        r.warnings = warnings;
        return Ok(r);
    }
    Err(Error::limit(
        MODULE,
        format!(
            "iterative Tukey construction failed after {} escalations: {}",
            cfg.escalations,
            warnings.join("; ")
        ),
    ))
}

#[allow(clippy::too_many_arguments)]
fn attempt_once(
    flat: &[[f64; 2]],
    pts: &[Vec<f64>],
    lam: &[f64],
    tau: f64,
    eps: f64,
    seed: u64,
    stream: u64,
    c2: f64,
    cfg: &FastTukeyConfig,
) -> Result<Attempt> {
    let n = pts.len();
    let g = gamma(tau);
    let ln_n = (n.max(3) as f64).ln();
    let z_max = (cfg.c_z * (n.max(2) as f64).log2()).ceil().max(1.0) as usize;
    let eps1 = (1.0 + eps).ln() / (z_max as f64 + 1.0);
    let eps2 = (c2 * (eps / ln_n).sqrt()).min(0.25);
    let sample_len = (cfg.c_l * (3.0 + ln_n) / (eps2 * eps2)).ceil() as usize;
    let stop = cfg.c_p3 * g / eps.sqrt();
    let tol = 1e-9 * scale_of(pts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    // Round 0: points that are deep on their own.
    let heavy: Vec<Vec<f64>> = (0..n).filter(|&i| lam[i] >= g).map(|i| pts[i].clone()).collect();
    let mut anchors: Vec<Vec<f64>> = Vec::new();
    let mut center: Vec<f64> = Vec::new();
    let mut kernel: Vec<Vec<f64>> = Vec::new();
    if !heavy.is_empty() {
        let h = hull_of(&heavy);
        let d = dilate(&h, eps1);
        anchors = d.region;
        center = d.center;
        kernel = d.kernel;
    }
    let k0 = Region::new(&anchors, tol);
    let mut remaining: Vec<usize> = (0..n)
        .filter(|&i| lam[i] < g && !k0.contains(&pts[i]))
        .collect();
    let mut rounds: Vec<RoundStat> = Vec::new();
    let mut lam_i: f64 = remaining.iter().map(|&i| lam[i]).sum();
    loop {
        if !rounds.is_empty() && lam_i <= stop {
            break;
        }
        if remaining.is_empty() {
            break;
        }
        if rounds.len() >= z_max {
            return Ok(Attempt::Failed(format!("round cap z_max = {z_max} reached")));
        }
        let (mut spts, mut sw, theta) = if remaining.len() <= sample_len {
            let p: Vec<[f64; 2]> = remaining.iter().map(|&i| flat[i]).collect();
            let w: Vec<f64> = remaining.iter().map(|&i| lam[i]).collect();
            (p, w, g)
        } else {
            let dist = WeightedIndex::new(remaining.iter().map(|&i| lam[i]))
                .expect("positive remaining weight");
            let mut counts = vec![0usize; remaining.len()];
            for _ in 0..sample_len {
                counts[dist.sample(&mut rng)] += 1;
            }
            let unit = lam_i / sample_len as f64;
            let mut p = Vec::new();
            let mut w = Vec::new();
            for (j, &c) in counts.iter().enumerate() {
                if c > 0 {
                    p.push(flat[remaining[j]]);
                    w.push(c as f64 * unit);
                }
            }
            (p, w, g + eps2 * lam_i)
        };
        let sample_size = spts.len();
        for a in &anchors {
            spts.push([a[0], a[1]]);
            sw.push(f64::INFINITY);
        }
        let h = tukey_polygon(&spts, &sw, theta);
        if h.is_empty() {
            return Ok(Attempt::Failed(format!("round {} produced an empty region", rounds.len() + 1)));
        }
        let hv: Vec<Vec<f64>> = h.iter().map(|v| v.to_vec()).collect();
        let d = dilate(&hv, eps1);
        let k = Region::new(&d.region, tol);
        remaining.retain(|&i| !k.contains(&pts[i]));
        let after: f64 = remaining.iter().map(|&i| lam[i]).sum();
        let halved = after <= lam_i / 2.0;
        rounds.push(RoundStat {
            round: rounds.len() + 1,
            lambda_before: lam_i,
            lambda_after: after,
            sample_size,
            threshold: theta,
            kernel_size: d.kernel.len(),
            halved,
        });
        anchors = d.region;
        center = d.center;
        kernel = d.kernel;
        if !halved && after > stop {
            return Ok(Attempt::Failed(format!(
                "round {} did not halve the outside weight ({lam_i} -> {after})",
                rounds.len()
            )));
        }
        lam_i = after;
    }

    // ℋ = 𝒦/(1+ε) about the centre, certified vertex by vertex.
    let h_vertices: Vec<Vec<f64>> = anchors
        .iter()
        .map(|v| v.iter().zip(&center).map(|(x, c)| c + (x - c) / (1.0 + eps)).collect())
        .collect();
    for v in &h_vertices {
        let depth = tukey_depth_brute(flat, lam, [v[0], v[1]]);
        if depth < g - 1e-9 {
            return Ok(Attempt::Failed(format!(
                "certification failed: a vertex of K/(1+eps) has depth {depth} < {g}"
            )));
        }
    }
    let mut r = finish_region(pts, lam, tau, eps, h_vertices, Vec::new(), RegionMethod::Fast);
    // Keep the iterative 𝒦 rather than re-dilating ℋ.
    let kr = Region::new(&anchors, tol);
    r.outside = (0..n).filter(|&i| !kr.contains(&pts[i])).collect();
    r.outside_weight = r.outside.iter().map(|&i| lam[i]).sum();
    r.kernel_vertices = kernel;
    r.center = center;
    r.k_vertices = anchors;
    r.rounds = rounds;
    Ok(Attempt::Done(r))
}

fn hull_of(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
    hull_2d(&p).iter().map(|&i| pts[i].clone()).collect()
}
