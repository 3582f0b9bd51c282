//! Direction nets: finite sets of unit vectors with a guaranteed Euclidean
//! covering radius, closed under negation.

use std::collections::HashSet;
use std::f64::consts::PI;

use super::Direction;

/// A net of unit directions in ℝ^d: every unit vector lies within
/// Euclidean distance `delta` of some member, and −u is a member whenever
/// u is.
///
/// In the plane the net is an even number (at least ⌈2π/δ⌉) of equally
/// spaced angles. For d ≥ 3 it is the radial projection of a regular grid
/// on the faces of [−1,1]^d whose spacing keeps the on-face covering
/// radius at δ; radial projection outside the unit ball is 1-Lipschitz, so
/// the projected grid covers the sphere at the same radius.
pub fn direction_net(d: usize, delta: f64) -> Vec<Direction> {
    assert!(d >= 1, "dimension must be positive");
    assert!(delta > 0.0, "delta must be positive");
    match d {
        1 => vec![
            Direction::new(vec![1.0]).unwrap(),
            Direction::new(vec![-1.0]).unwrap(),
        ],
        2 => {
            let needed = (PI / (2.0 * (delta / 2.0).min(1.0).asin())).ceil() as usize;
            let mut k = needed.max((2.0 * PI / delta).ceil() as usize).max(4);
            if k % 2 == 1 {
                k += 1;
            }
            (0..k)
                .map(|i| Direction::from_angle(2.0 * PI * i as f64 / k as f64))
                .collect()
        }
        _ => {
            let h = 2.0 * delta / ((d - 1) as f64).sqrt();
            let m = (2.0 / h).ceil() as usize + 1;
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            let mut out = Vec::new();
            let steps = m - 1;
            for axis in 0..d {
                for sign in [1.0, -1.0] {
                    let mut idx = vec![0usize; d - 1];
                    loop {
                        let mut y = Vec::with_capacity(d);
                        let mut key = Vec::with_capacity(d);
                        let mut it = idx.iter();
                        for k in 0..d {
                            if k == axis {
                                y.push(sign);
                                key.push(if sign > 0.0 { steps as i64 } else { -(steps as i64) });
                            } else {
                                let j = *it.next().unwrap();
                                let g = 2 * j as i64 - steps as i64;
                                y.push(g as f64 / steps as f64);
                                key.push(g);
                            }
                        }
                        if seen.insert(key) {
                            out.push(Direction::new(y).unwrap());
                        }
                        let mut c = 0;
                        loop {
                            if c == d - 1 {
                                break;
                            }
                            idx[c] += 1;
                            if idx[c] < m {
                                break;
                            }
                            idx[c] = 0;
                            c += 1;
                        }
                        if c == d - 1 {
                            break;
                        }
                    }
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dot, norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn covering_radius(net: &[Direction], d: usize, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = rand_distr::StandardNormal;
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(normal)).collect();
            let n = norm(&v);
            let v: Vec<f64> = v.iter().map(|x| x / n).collect();
            let best = net
                .iter()
                .map(|u| dot(u, &v))
                .fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max((2.0 - 2.0 * best).max(0.0).sqrt());
        }
        worst
    }

    fn closed_under_negation(net: &[Direction]) -> bool {
        net.iter().all(|u| {
            net.iter()
                .any(|w| u.iter().zip(w.iter()).all(|(a, b)| (a + b).abs() < 1e-12))
        })
    }

    #[test]
    fn planar_net_size_and_symmetry() {
        let net = direction_net(2, 0.1);
        assert!(net.len() >= 63);
        assert!(closed_under_negation(&net));
    }

    #[test]
    fn planar_net_covers() {
        let net = direction_net(2, 0.1);
        assert!(covering_radius(&net, 2, 1_000_000, 3) <= 0.1);
    }

    #[test]
    fn spatial_net_size_and_covering() {
        let delta = 0.2;
        let net = direction_net(3, delta);
        assert!(net.len() as f64 <= 40.0 / (delta * delta), "size {}", net.len());
        assert!(closed_under_negation(&net));
        assert!(covering_radius(&net, 3, 100_000, 5) <= delta);
    }
}
