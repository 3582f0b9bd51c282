//! (ε,r)-fpow-kernels: mixtures of kernels of sampled realizations that
//! preserve E[T_r(P,u)] for directions u in the polar cone.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{direction_net, dot, eps_kernel};
use crate::model::{ExistentialSet, FlatSet, UncertainSet};
use crate::quantkernel::MixtureMember;
use crate::width::{canonical_order, pr_along};

const MODULE: &str = "fpowkernel";

/// Inner products down to this value count as nonnegative.
pub const POLAR_TOL: f64 = 1e-12;

/// Default constant c in the sample count.
pub const DEFAULT_C: f64 = 4.0;

/// Largest number of sampled realizations.
pub const SAMPLE_CAP: f64 = 1e7;

/// True when ⟨u,s⟩ ≥ −1e−12 for every location s of the set.
pub fn polar_contains(set: &UncertainSet, u: &[f64]) -> bool {
    set.all_locations().iter().all(|s| dot(s, u) >= -POLAR_TOL)
}

/// T_r(P,u) = max⟨u,v⟩^{1/r} − min⟨u,v⟩^{1/r}; zero for the empty set.
pub fn t_r(points: &[Vec<f64>], u: &[f64], r: u32) -> Result<f64> {
    check_r(r)?;
    if points.is_empty() {
        return Ok(0.0);
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for p in points {
        let x = dot(p, u);
        if x < -POLAR_TOL {
            return Err(outside_cone());
        }
        hi = hi.max(x);
        lo = lo.min(x);
    }
    Ok(root(hi, r) - root(lo, r))
}

fn root(x: f64, r: u32) -> f64 {
    let x = x.max(0.0);
    match r {
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        _ => x.powf(1.0 / r as f64),
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        Err(Error::validation(MODULE, vec!["r must be a positive integer".into()]))
    } else {
        Ok(())
    }
}

fn outside_cone() -> Error {
    Error::precondition(MODULE, "direction outside polar cone")
}

/// Exact E[T_r(𝒫,u)] in O(m log m): the expected r-th root of the top
/// projection minus that of the bottom projection (empty realizations
/// contribute 0).
pub fn expected_t_r(set: &UncertainSet, u: &[f64], r: u32) -> Result<f64> {
    expected_t_r_flat(&set.flat(), u, r)
}

pub fn expected_t_r_flat(flat: &FlatSet, u: &[f64], r: u32) -> Result<f64> {
    check_r(r)?;
    let neg: Vec<f64> = u.iter().map(|x| -x).collect();
    let mut total = 0.0;
    for (dir, sign) in [(u, 1.0), (neg.as_slice(), -1.0)] {
        let (order, proj) = canonical_order(flat, dir);
        let pr = pr_along(flat, &order);
        for (&s, &q) in order.iter().zip(&pr) {
            let x = sign * proj[s];
            if x < -POLAR_TOL {
                return Err(outside_cone());
            }
            total += sign * q * root(x, r);
        }
    }
    Ok(total.max(0.0))
}

/// Unit directions inside the polar cone of the set's locations.
///
/// In the plane the cone is an arc and `k` directions are spread evenly
/// over its interior (a single boundary direction when the arc is a
/// point). In higher dimensions a direction net is filtered and thinned
/// to at most `k` members. The result is empty when the cone is {0}.
pub fn polar_directions(set: &UncertainSet, k: usize) -> Vec<Vec<f64>> {
    let locs = set.all_locations();
    let d = set.dimension();
    if d == 2 {
        let angles: Vec<f64> = locs
            .iter()
            .filter(|s| s[0] != 0.0 || s[1] != 0.0)
            .map(|s| s[1].atan2(s[0]))
            .collect();
        let (lo, hi) = match angles.first() {
            None => (-PI, PI),
            Some(&a0) => {
                let rel = angles.iter().map(|&a| {
                    let mut t = a - a0;
                    while t > PI {
                        t -= 2.0 * PI;
                    }
                    while t <= -PI {
                        t += 2.0 * PI;
                    }
                    t
                });
                let (mn, mx) = rel.fold((0.0f64, 0.0f64), |(mn, mx), t| (mn.min(t), mx.max(t)));
                (a0 + mx - FRAC_PI_2, a0 + mn + FRAC_PI_2)
            }
        };
        if hi < lo - 1e-12 {
            return Vec::new();
        }
        if hi - lo <= 1e-12 {
            let candidate = vec![lo.cos(), lo.sin()];
            return if polar_contains(set, &candidate) {
                vec![candidate]
            } else {
                Vec::new()
            };
        }
        return (0..k)
            .map(|j| {
                let t = lo + (j as f64 + 0.5) * (hi - lo) / k as f64;
                vec![t.cos(), t.sin()]
            })
            .filter(|u| polar_contains(set, u))
            .collect();
    }
    let inside: Vec<Vec<f64>> = direction_net(d, 0.1)
        .into_iter()
        .map(|u| u.into_vec())
        .filter(|u| polar_contains(set, u))
        .collect();
    if inside.len() <= k {
        return inside;
    }
    (0..k).map(|j| inside[j * inside.len() / k].clone()).collect()
}

/// ε₀ of the per-realization kernels: ε/4 for r = 1, (ε/(4(r−1)))^r otherwise.
pub fn realization_eps(eps: f64, r: u32) -> f64 {
    if r <= 1 {
        eps / 4.0
    } else {
        (eps / (4.0 * (r - 1) as f64)).powi(r as i32)
    }
}

/// N = ⌈c/ε^{(rd−r+4)/2}·ln(1/ε)⌉.
pub fn fpow_sample_count(d: usize, eps: f64, r: u32, c: f64) -> f64 {
    let r = r as f64;
    let e = (r * d as f64 - r + 4.0) / 2.0;
    (c / eps.powf(e) * (1.0 / eps).ln()).ceil()
}

/// Mixture of N deterministic sets, member i occurring with probability
/// count_i/total.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FpowKernel {
    pub dim: usize,
    pub r: u32,
    pub eps: f64,
    pub eps0: f64,
    pub beta: f64,
    pub seed: u64,
    pub members: Vec<MixtureMember>,
    pub total: u64,
    pub warnings: Vec<String>,
}

impl FpowKernel {
    /// Number of stored points over all distinct members.
    pub fn size(&self) -> usize {
        self.members.iter().map(|m| m.points.len()).sum()
    }

    /// E[T_r(𝒮,u)] = (1/N)·Σ T_r(ℰ_i,u), computed exactly over the mixture.
    pub fn expected_t_r(&self, u: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for m in &self.members {
            acc += m.count as f64 * t_r(&m.points, u, self.r)?;
        }
        Ok(acc / self.total as f64)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation(MODULE, vec![format!("invalid kernel JSON: {e}")]))
    }
}

/// Builds an (ε,r)-fpow-kernel of an existential set whose probabilities
/// are all at least β.
pub fn fpow_kernel(set: &ExistentialSet, eps: f64, r: u32, beta: f64, seed: u64) -> Result<FpowKernel> {
    fpow_kernel_with(set, eps, r, beta, seed, DEFAULT_C)
}

/// [`fpow_kernel`] with an explicit sample-count constant.
pub fn fpow_kernel_with(
    set: &ExistentialSet,
    eps: f64,
    r: u32,
    beta: f64,
    seed: u64,
    c: f64,
) -> Result<FpowKernel> {
    check_r(r)?;
    let mut bad = Vec::new();
    if !(eps > 0.0 && eps <= 0.5) {
        bad.push(format!("epsilon must lie in (0, 0.5], got {eps}"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        bad.push(format!("beta must lie in (0, 1], got {beta}"));
    }
    if !bad.is_empty() {
        return Err(Error::validation(MODULE, bad));
    }
    if let Some(b) = set.beta() {
        if b < beta {
            return Err(Error::precondition(
                MODULE,
                format!("beta assumption violated: minimum probability {b} < {beta}"),
            ));
        }
    }
    let d = set.dimension();
    let n = fpow_sample_count(d, eps, r, c);
    if n > SAMPLE_CAP {
        return Err(Error::limit(
            MODULE,
            format!("fpow kernel needs {n:.3e} samples; the cap is {SAMPLE_CAP:.0e}"),
        ));
    }
    let n = n as u64;
    let eps0 = realization_eps(eps, r);
    let uset: UncertainSet = set.clone().into();
    let mut warnings = Vec::new();
    if !set.is_empty() && polar_directions(&uset, 1).is_empty() {
        warnings.push("the polar cone of the locations is {0}; no direction can be evaluated".into());
    }
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut members: Vec<MixtureMember> = Vec::new();
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let real = uset.sample_with(&mut rng);
        if let Some(&j) = index.get(&real.sources) {
            members[j].count += 1;
            continue;
        }
        let points = if real.present.is_empty() {
            Vec::new()
        } else {
            eps_kernel(&real.present, eps0)?.points
        };
        index.insert(real.sources, members.len());
        members.push(MixtureMember { points, count: 1 });
    }
    Ok(FpowKernel {
        dim: d,
        r,
        eps,
        eps0,
        beta,
        seed,
        members,
        total: n,
        warnings,
    })
}
