//! ε-exp-kernels: deterministic point sets whose directional widths
//! approximate the expected width ω(𝒫,u) within a factor 1 − ε.
//!
//! The weak kernel is a deterministic ε-kernel of the expectation polytope
//! M, built from extreme-vertex probes only; M is never materialized. The
//! subset kernel peels the input, taking a fine deterministic kernel of the
//! remaining points in every round.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{eps_kernel, kernel_from_oracle, DeterministicKernel, Extreme};
use crate::model::{ExistentialSet, FlatSet, UncertainSet};
use crate::width::expected_support_flat;

const MODULE: &str = "expkernel";

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::validation(
            MODULE,
            vec![format!("epsilon must lie in (0, 1/2], got {eps}")],
        ));
    }
    Ok(())
}

/// Weak ε-exp-kernel: points of M with
/// (1−ε)·ω(𝒫,u) ≤ ω(S,u) ≤ ω(𝒫,u) for every direction u and
/// |S| ≤ 16/ε^{(d−1)/2}. A lower-dimensional M yields a kernel of that
/// extent with the `degenerate` flag set.
pub fn exp_kernel(set: &UncertainSet, eps: f64) -> Result<DeterministicKernel> {
    check_eps(eps)?;
    exp_kernel_flat(&set.flat(), eps)
}

pub fn exp_kernel_flat(flat: &FlatSet, eps: f64) -> Result<DeterministicKernel> {
    check_eps(eps)?;
    if flat.is_empty() {
        return Err(Error::precondition(MODULE, "empty uncertain set"));
    }
    let mut oracle = |u: &[f64]| Extreme {
        point: expected_support_flat(flat, u).gradient,
        source: None,
    };
    Ok(kernel_from_oracle(flat.dim, eps, &mut oracle))
}

/// Fatness constant α assumed for the peeling schedule.
pub fn fatness_alpha(d: usize) -> f64 {
    match d {
        1 => 0.5,
        2 => 0.25,
        _ => 0.125f64.powf(d as f64 / 3.0),
    }
}

/// Peeling schedule of the subset kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelingPlan {
    /// ε₁ = ε·α·β²/(4√d).
    pub eps1: f64,
    /// Accuracy of the per-round kernels, ε₁/√d.
    pub round_eps: f64,
    /// L = ⌈ln ε₁ / ln(1−β)⌉ (1 when β = 1).
    pub rounds: usize,
}

pub fn peeling_plan(d: usize, eps: f64, beta: f64) -> PeelingPlan {
    let sd = (d as f64).sqrt();
    let eps1 = eps * fatness_alpha(d) * beta * beta / (4.0 * sd);
    let rounds = if beta >= 1.0 {
        1
    } else {
        (eps1.ln() / (1.0 - beta).ln()).ceil().max(1.0) as usize
    };
    PeelingPlan {
        eps1,
        round_eps: eps1 / sd,
        rounds,
    }
}

/// C in |𝒮| ≤ C·ln(1/ε)/ε^{(d−1)/2} for the subset kernel at β = 0.5 and
/// ε ∈ [0.05, 0.2]. Measured once on generated disk, circle and cluster
/// instances (n ≤ 2000 in the plane, n ≤ 500 in ℝ³; largest ratio 311)
/// and frozen.
pub const SUBSET_SIZE_C: f64 = 400.0;

/// Subset ε-exp-kernel: input points with their original probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetKernel {
    /// Indices into the input, increasing.
    pub indices: Vec<usize>,
    pub set: ExistentialSet,
    pub epsilon: f64,
    pub beta: f64,
    pub plan: PeelingPlan,
    /// Rounds actually run (fewer when the input is exhausted).
    pub rounds_run: usize,
}

/// Subset ε-exp-kernel under the β-assumption: L rounds of
/// (ε₁/√d)-kernels of the remaining points, each round removing the points
/// it selects.
pub fn exp_kernel_subset(set: &ExistentialSet, eps: f64, beta: f64) -> Result<SubsetKernel> {
    check_eps(eps)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::validation(
            MODULE,
            vec![format!("beta must lie in (0, 1], got {beta}")],
        ));
    }
    if set.is_empty() {
        return Err(Error::precondition(MODULE, "empty uncertain set"));
    }
    if let Some((i, p)) = set
        .points()
        .iter()
        .enumerate()
        .map(|(i, w)| (i, w.p))
        .find(|&(_, p)| p < beta)
    {
        return Err(Error::precondition(
            MODULE,
            format!("beta-assumption violated: point {i} has p = {p} < beta = {beta}"),
        ));
    }
    let d = set.dimension();
    let plan = peeling_plan(d, eps, beta);
    let mut remaining: Vec<usize> = (0..set.len()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut rounds_run = 0;
    for _ in 0..plan.rounds {
        if remaining.is_empty() {
            break;
        }
        rounds_run += 1;
        let coords: Vec<Vec<f64>> = remaining
            .iter()
            .map(|&i| set.points()[i].coords.clone())
            .collect();
        let k = eps_kernel(&coords, plan.round_eps.min(0.5))?;
        let picked: Vec<usize> = k
            .source_indices
            .expect("kernels of finite sets carry indices")
            .into_iter()
            .map(|j| remaining[j])
            .collect();
        chosen.extend(&picked);
        remaining.retain(|i| !picked.contains(i));
    }
    chosen.sort_unstable();
    chosen.dedup();
    Ok(SubsetKernel {
        set: set.subset(&chosen),
        indices: chosen,
        epsilon: eps,
        beta,
        plan,
        rounds_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{direction_net, width};
    use crate::width::expected_width_many;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sweep(d: usize) -> Vec<Vec<f64>> {
        if d == 2 {
            (0..4096)
                .map(|k| {
                    let t = k as f64 * std::f64::consts::TAU / 4096.0;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        } else {
            direction_net(d, 0.1).into_iter().map(|u| u.into_vec()).collect()
        }
    }

    fn check_weak(set: &UncertainSet, eps: f64) -> DeterministicKernel {
        let k = exp_kernel(set, eps).unwrap();
        let d = set.dimension();
        let dirs = sweep(d);
        let truth = expected_width_many(&set.flat(), &dirs);
        for (u, w) in dirs.iter().zip(&truth) {
            let s = width(&k.points, u);
            assert!(s <= w + 1e-9, "upper side {s} > {w}");
            assert!(s >= (1.0 - eps) * w - 1e-9, "ratio {}", s / w);
        }
        assert!(k.len() as f64 <= 16.0 / eps.powf((d as f64 - 1.0) / 2.0));
        k
    }

    #[test]
    fn deterministic_square_gives_corners() {
        let sq = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let set: UncertainSet = ExistentialSet::deterministic(&sq).unwrap().into();
        let k = check_weak(&set, 0.1);
        let mut pts = k.points.clone();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut expected = sq.clone();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, expected);
    }

    #[test]
    fn circle_instance() {
        let pts: Vec<(Vec<f64>, f64)> = (0..200)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 200.0;
                (vec![t.cos(), t.sin()], 0.5)
            })
            .collect();
        let set: UncertainSet = ExistentialSet::from_pairs(pts).unwrap().into();
        let k = check_weak(&set, 0.05);
        assert!(k.len() <= 72);
    }

    #[test]
    fn line_plus_outlier() {
        let set: UncertainSet = ExistentialSet::from_pairs(vec![
            (vec![0.0, 0.0], 0.5),
            (vec![1.0, 0.0], 0.5),
            (vec![0.5, 1.0], 0.5),
        ])
        .unwrap()
        .into();
        check_weak(&set, 0.1);
    }

    #[test]
    fn three_dimensional_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<(Vec<f64>, f64)> = (0..100)
            .map(|_| {
                (
                    (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    rng.gen_range(0.1..1.0),
                )
            })
            .collect();
        let set: UncertainSet = ExistentialSet::from_pairs(pts).unwrap().into();
        check_weak(&set, 0.1);
    }

    #[test]
    fn degenerate_extent_is_flagged() {
        let set: UncertainSet = ExistentialSet::from_pairs(vec![
            (vec![0.0, 0.0], 0.5),
            (vec![1.0, 1.0], 0.5),
            (vec![2.0, 2.0], 0.5),
        ])
        .unwrap()
        .into();
        let k = exp_kernel(&set, 0.1).unwrap();
        assert!(k.degenerate);
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn subset_kernel_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pts: Vec<(Vec<f64>, f64)> = (0..100)
            .map(|_| {
                let r: f64 = rng.gen::<f64>().sqrt();
                let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (vec![r * t.cos(), r * t.sin()], 0.5)
            })
            .collect();
        let set = ExistentialSet::from_pairs(pts).unwrap();
        let k = exp_kernel_subset(&set, 0.1, 0.5).unwrap();
        for (j, &i) in k.indices.iter().enumerate() {
            assert_eq!(k.set.points()[j], set.points()[i]);
        }
        let dirs: Vec<Vec<f64>> = (0..512)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 512.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let full = expected_width_many(&UncertainSet::from(set.clone()).flat(), &dirs);
        let sub = expected_width_many(&UncertainSet::from(k.set.clone()).flat(), &dirs);
        for (a, b) in full.iter().zip(&sub) {
            assert!(*b <= a + 1e-9 && *b >= 0.9 * a - 1e-9);
        }
    }

    #[test]
    fn subset_rejects_low_probability() {
        let set = ExistentialSet::from_pairs(vec![(vec![0.0], 0.2), (vec![1.0], 0.9)]).unwrap();
        let err = exp_kernel_subset(&set, 0.1, 0.5).unwrap_err();
        assert_eq!(err.code(), "expkernel.precondition");
    }

    #[test]
    fn peeling_schedule() {
        let p = peeling_plan(2, 0.1, 0.5);
        assert!((p.eps1 - 0.1 * 0.25 * 0.25 / (4.0 * 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(p.rounds, (p.eps1.ln() / 0.5f64.ln()).ceil() as usize);
        assert_eq!(peeling_plan(2, 0.1, 1.0).rounds, 1);
    }
}
