use super::*;
use crate::model::ExistentialSet;
use crate::oracle::{band_check, kolmogorov_distance, tukey_depth_brute, Enumerated};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{E, TAU};

fn dirs(k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let t = i as f64 * std::f64::consts::PI / k as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

fn t_grid(max: f64, k: usize) -> Vec<f64> {
    (1..=k).map(|i| max * i as f64 / k as f64).collect()
}

fn two_points() -> ExistentialSet {
    ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 0.5), (vec![1.0, 0.0], 0.5)]).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> ExistentialSet {
    ExistentialSet::from_pairs(
        (0..n)
            .map(|_| {
                (
                    vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                    rng.gen_range(lo..hi),
                )
            })
            .collect(),
    )
    .unwrap()
}

fn ring(n: usize, p: f64) -> ExistentialSet {
    ExistentialSet::from_pairs(
        (0..n)
            .map(|i| {
                let t = i as f64 * TAU / n as f64;
                (vec![t.cos(), t.sin()], p)
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn simple_sample_count_formula() {
    assert_eq!(simple_sample_count(2, 0.2, 0.2, 4.0), 805);
}

#[test]
fn simple_deterministic_members_are_identical() {
    let set: UncertainSet = ExistentialSet::deterministic(&[vec![0.0, 0.0], vec![2.0, 1.0], vec![1.0, 3.0]])
        .unwrap()
        .into();
    let k = quant_simple(&set, 0.2, 0.2, 1, &QuantConfig::default()).unwrap();
    assert_eq!(k.members.len(), 1);
    assert_eq!(k.members[0].count, k.total);
    let u = [1.0, 0.0];
    let c = k.width_cdf(&u, &[1.999, 2.0]);
    assert_eq!(c, vec![0.0, 1.0]);
}

#[test]
fn simple_two_point_band() {
    let set: UncertainSet = two_points().into();
    let k = quant_simple(&set, 0.1, 0.1, 7, &QuantConfig::default()).unwrap();
    let r = band_check(&set, &k, 0.1, 0.1, &[vec![1.0, 0.0]], &[0.5, 1.0, 1.5]);
    assert_eq!(r.pass_fraction, 1.0);
    let c = k.width_cdf(&[1.0, 0.0], &[0.5]);
    assert!((c[0] - 0.75).abs() <= 0.1);
}

#[test]
fn simple_random_twelve_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set: UncertainSet = random_set(&mut rng, 12, 0.1, 0.9).into();
    let k = quant_simple(&set, 0.2, 0.2, 11, &QuantConfig::default()).unwrap();
    let flat = set.flat();
    let r = band_check(&Enumerated(&flat), &k, 0.2, 0.2, &dirs(64), &t_grid(3.0, 20));
    assert!(r.pass_fraction >= 0.99, "pass fraction {}", r.pass_fraction);
}

#[test]
fn simple_is_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let set: UncertainSet = random_set(&mut rng, 8, 0.2, 0.8).into();
    let cfg = QuantConfig::default();
    let a = quant_simple(&set, 0.3, 0.3, 5, &cfg).unwrap();
    let b = quant_simple(&set, 0.3, 0.3, 5, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn poisson_single_point_mass() {
    let p = 1.0 - (-1.0f64).exp();
    let set = ExistentialSet::from_pairs(vec![(vec![0.5, 0.5], p)]).unwrap();
    let k = quant_poisson(&set, 0.2, 0.1, 3, &QuantConfig::default()).unwrap();
    assert_eq!(k.points.len(), 1);
    assert!((k.probs[0] - p).abs() <= 0.05);
}

#[test]
fn poisson_colocated_cluster_has_zero_distance() {
    let set = ExistentialSet::from_pairs((0..6).map(|_| (vec![0.0, 0.0], 0.3)).collect()).unwrap();
    let k = quant_poisson(&set, 0.25, 0.05, 3, &QuantConfig::default()).unwrap();
    let us: UncertainSet = set.into();
    for u in dirs(8) {
        assert!(kolmogorov_distance(&us, &k, &u, &[0.0, 0.5, 1.0]) < 1e-12);
    }
}

#[test]
fn poisson_circle_kolmogorov() {
    let set = ring(10, 0.3);
    let k = quant_poisson(&set, 0.25, 0.1, 9, &QuantConfig::default()).unwrap();
    let flat = UncertainSet::from(set).flat();
    let kflat = k.flat();
    let ts = t_grid(2.2, 20);
    for u in dirs(32) {
        let d = kolmogorov_distance(&Enumerated(&flat), &Enumerated(&kflat), &u, &ts);
        assert!(d <= 0.25, "distance {d}");
    }
}

#[test]
fn poisson_rejects_certain_points() {
    let set = ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 1.0)]).unwrap();
    let e = quant_poisson(&set, 0.2, 0.1, 0, &QuantConfig::default()).unwrap_err();
    assert_eq!(e.code(), "quantkernel.precondition");
}

#[test]
fn poisson_cap_advises_the_tukey_method() {
    let set = ring(40, 0.9);
    let e = quant_poisson(&set, 0.1, 0.1, 0, &QuantConfig::default()).unwrap_err();
    assert_eq!(e.code(), "quantkernel.limit");
    assert!(e.to_string().contains("the Tukey construction"));
}

#[test]
fn region_of_one_heavy_point() {
    let tau: f64 = 0.2;
    let g = (2.0 / tau).ln();
    let p = 1.0 - (-4.0 * g).exp();
    let set = ExistentialSet::from_pairs(vec![
        (vec![0.3, 0.4], p),
        (vec![1.0, 0.0], 1e-9),
        (vec![0.0, 2.0], 1e-9),
    ])
    .unwrap();
    let r = tukey_region(&set, tau, 0.1).unwrap();
    for v in &r.h_vertices {
        assert!((v[0] - 0.3).abs() < 1e-9 && (v[1] - 0.4).abs() < 1e-9);
    }
}

#[test]
fn region_of_square_matches_grid_oracle() {
    let p = 1.0 - (-1.0f64).exp();
    let corners = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    let set = ExistentialSet::from_pairs(corners.iter().map(|c| (c.to_vec(), p)).collect()).unwrap();
    let tau = 2.0 / E;
    let r = tukey_region(&set, tau, 0.1).unwrap();
    assert!((r.gamma - 1.0).abs() < 1e-12);
    let w = [1.0; 4];
    let mut mismatches = 0;
    for i in 0..201 {
        for j in 0..201 {
            let x = [-2.0 + 0.02 * i as f64, -2.0 + 0.02 * j as f64];
            let deep = tukey_depth_brute(&corners, &w, x) >= 1.0 - 1e-9;
            if deep != r.h_contains(&x, 1e-9) {
                mismatches += 1;
            }
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn region_requires_helly_weight() {
    let set = ring(6, 0.3);
    let e = tukey_region(&set, 0.25, 0.1).unwrap_err();
    assert_eq!(e.code(), "quantkernel.precondition");
    assert!(e.to_string().contains("Helly"));
}

#[test]
fn region_invariants_on_random_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..5 {
        let set = random_set(&mut rng, 30, 0.4, 0.95);
        let r = tukey_region(&set, 0.25, 0.25).unwrap();
        let pts: Vec<[f64; 2]> = set.points().iter().map(|w| [w.coords[0], w.coords[1]]).collect();
        let lam: Vec<f64> = set.points().iter().map(|w| -(-w.p).ln_1p()).collect();
        for v in &r.h_vertices {
            assert!(tukey_depth_brute(&pts, &lam, [v[0], v[1]]) >= r.gamma - 1e-9);
            assert!(r.k_contains(v, 1e-9));
        }
        for v in &r.kernel_vertices {
            assert!(r.h_contains(v, 1e-9));
        }
        let direct: f64 = (0..pts.len())
            .filter(|&i| !r.k_contains(&set.points()[i].coords, 1e-9))
            .map(|i| lam[i])
            .sum();
        assert!((direct - r.outside_weight).abs() < 1e-9);
    }
}

#[test]
fn region_in_three_dimensions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let set = ExistentialSet::from_pairs(
        (0..14)
            .map(|_| ((0..3).map(|_| rng.gen_range(-1.0..1.0)).collect(), 0.8))
            .collect(),
    )
    .unwrap();
    let r = tukey_region(&set, 0.5, 0.25).unwrap();
    assert!(!r.h_vertices.is_empty());
    assert!(!r.h_halfspaces.is_empty());
    for v in &r.h_vertices {
        assert!(r.k_contains(v, 1e-9));
    }
}

#[test]
fn tukey_cluster_with_outliers_band() {
    let mut pairs: Vec<(Vec<f64>, f64)> = (0..10)
        .map(|i| {
            let t = i as f64 * TAU / 10.0;
            (vec![0.1 * t.cos(), 0.1 * t.sin()], 1.0)
        })
        .collect();
    pairs.push((vec![2.0, 0.3], 0.5));
    pairs.push((vec![-0.5, 1.5], 0.5));
    let set = ExistentialSet::from_pairs(pairs).unwrap();
    let k = quant_tukey(&set, 0.2, 0.2, 0.05, 2, &QuantConfig::default()).unwrap();
    let r = tukey_region(&set, 0.2, 0.2).unwrap();
    assert_eq!(r.outside, vec![10, 11]);
    let flat = UncertainSet::from(set).flat();
    let rep = band_check(&Enumerated(&flat), &k, 0.2, 0.2, &dirs(32), &t_grid(3.0, 15));
    assert!(rep.pass_fraction >= 0.99, "{}", rep.pass_fraction);
}

#[test]
fn tukey_with_nothing_outside_is_deterministic() {
    let set = ExistentialSet::deterministic(&[
        vec![0.0, 0.0],
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
    ])
    .unwrap();
    let k = quant_tukey(&set, 0.25, 0.25, 0.1, 0, &QuantConfig::default()).unwrap();
    assert!(k.points.is_empty());
    assert_eq!(k.meta.lambda, Some(0.0));
    for u in dirs(8) {
        let wk = width(&k.anchors, &u);
        let wp = width(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]], &u);
        assert!(wk >= wp - 1e-9 && wk <= 1.25 * wp + 1e-9);
    }
}

#[test]
fn tukey_ring_band() {
    let set = ring(14, 0.5);
    let k = quant_tukey(&set, 0.25, 0.25, 0.05, 4, &QuantConfig::default()).unwrap();
    let flat = UncertainSet::from(set).flat();
    let rep = band_check(&Enumerated(&flat), &k, 0.25, 0.25, &dirs(16), &t_grid(2.2, 10));
    assert!(rep.pass_fraction >= 0.99, "{}", rep.pass_fraction);
}

#[test]
fn fast_region_is_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4000;
    let set = ExistentialSet::from_pairs(
        (0..n)
            .map(|_| {
                let r: f64 = rng.gen::<f64>().sqrt();
                let t: f64 = rng.gen_range(0.0..TAU);
                (vec![r * t.cos(), r * t.sin()], 0.5)
            })
            .collect(),
    )
    .unwrap();
    let r = tukey_region_fast(&set, 0.25, 0.25, 1, &FastTukeyConfig::default()).unwrap();
    assert_eq!(r.method, RegionMethod::Fast, "{:?}", r.warnings);
    let pts: Vec<[f64; 2]> = set.points().iter().map(|w| [w.coords[0], w.coords[1]]).collect();
    let lam = vec![2f64.ln(); n];
    for v in &r.h_vertices {
        assert!(tukey_depth_brute(&pts, &lam, [v[0], v[1]]) >= r.gamma - 1e-9);
    }
    assert!(r.rounds.iter().all(|s| s.halved));
    let bound = FastTukeyConfig::default().c_p3 * r.gamma / 0.5;
    assert!(r.outside_weight <= bound);
}

#[test]
fn fast_collinear_input_falls_back() {
    let set = ExistentialSet::from_pairs((0..20).map(|i| (vec![i as f64, 2.0 * i as f64], 0.6)).collect())
        .unwrap();
    let r = tukey_region_fast(&set, 0.25, 0.25, 1, &FastTukeyConfig::default()).unwrap();
    assert_eq!(r.method, RegionMethod::FastFallback);
}

#[test]
fn subset_examples() {
    let det = ExistentialSet::deterministic(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let k = quant_subset(&det, 0.2, 0.2, 1.0).unwrap();
    assert_eq!(k.points.len(), 3);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let set = ExistentialSet::from_pairs(
        (0..12)
            .map(|_| {
                let r: f64 = rng.gen::<f64>().sqrt();
                let t: f64 = rng.gen_range(0.0..TAU);
                (vec![r * t.cos(), r * t.sin()], rng.gen_range(0.5..1.0))
            })
            .collect(),
    )
    .unwrap();
    let k = quant_subset(&set, 0.2, 0.2, 0.5).unwrap();
    let flat = UncertainSet::from(set.clone()).flat();
    let rep = band_check(&Enumerated(&flat), &k, 0.2, 0.2, &dirs(32), &t_grid(2.0, 10));
    assert!(rep.pass_fraction >= 0.99);
    let low = ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 0.2), (vec![1.0, 0.0], 0.9)]).unwrap();
    assert_eq!(quant_subset(&low, 0.2, 0.2, 0.5).unwrap_err().code(), "expkernel.precondition");
}

#[test]
fn cdf_examples() {
    let m = MixtureKernel {
        dim: 2,
        members: vec![
            MixtureMember {
                points: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                count: 1,
            },
            MixtureMember {
                points: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                count: 1,
            },
        ],
        total: 2,
        meta: QuantMeta::new(Method::Simple, 0.1, 0.1),
    };
    let q = QuantKernel::Mixture(m);
    let c = cdf(&q, &[1.0, 0.0], &[0.5, 1.0]);
    assert_eq!(c.values, vec![0.0, 1.0]);
    assert_eq!(c.method, "counting");
    let set: UncertainSet = two_points().into();
    assert_eq!(set_cdf(&set, &[1.0, 0.0], &[0.5]).values, vec![0.75]);
}

#[test]
fn cdf_is_monotone_for_every_form() {
    let cfg = QuantConfig::default();
    let ts = t_grid(2.5, 30);
    for method in [Method::Simple, Method::Poisson, Method::Tukey, Method::Subset] {
        let p = if method == Method::Poisson { 0.3 } else { 0.6 };
        let us: UncertainSet = ring(12, p).into();
        let k = build(&us, method, 0.25, 0.25, 0.1, 3, &cfg).unwrap();
        for u in dirs(6) {
            let c = k.width_cdf(&u, &ts);
            assert!(c.windows(2).all(|w| w[0] <= w[1] + 1e-12));
            assert!(c.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
        }
    }
}

#[test]
fn auto_switches_on_lambda() {
    let cfg = QuantConfig::default();
    assert_eq!(auto_method(&ring(6, 0.3).into(), 0.25, &cfg), Method::Poisson);
    assert_eq!(auto_method(&ring(14, 0.5).into(), 0.25, &cfg), Method::Tukey);
    let k = build(&ring(6, 0.3).into(), Method::Auto, 0.25, 0.25, 0.1, 0, &cfg).unwrap();
    assert_eq!(k.meta().method, Method::Poisson);
}

#[test]
fn kernel_json_round_trip() {
    let set: UncertainSet = ring(14, 0.5).into();
    let cfg = QuantConfig::default();
    for method in [Method::Simple, Method::Tukey] {
        let k = build(&set, method, 0.25, 0.25, 0.1, 3, &cfg).unwrap();
        let back = QuantKernel::from_json(&k.to_json()).unwrap();
        assert_eq!(back, k);
    }
}

#[test]
fn poissonization_zero_event_identity() {
    let set = ring(9, 0.37);
    let lam = tukey::weights(&set.points().iter().map(|w| w.p).collect::<Vec<_>>());
    let sum: f64 = lam[..4].iter().sum();
    let direct: f64 = set.points()[..4].iter().map(|w| 1.0 - w.p).product();
    assert!(((-sum).exp() - direct).abs() < 1e-15);
}
