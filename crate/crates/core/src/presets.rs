//! Seeded instance generators.

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, LocationalPoint, WeightedPoint};

const MODULE: &str = "presets";

/// Lower end of the probability range when neither p nor β is given.
pub const DEFAULT_PMIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Uniform in the unit disk (ball for d = 3).
    UniformDisk,
    /// Evenly spaced on the unit circle; random on the unit sphere for d = 3.
    Circle,
    /// Gaussian clusters (σ = 0.03) around centres drawn in the unit disk.
    Clustered,
    /// ⌈n/2⌉ points at the origin and ⌊n/2⌋ at (1,0,…), each with p = 1/n.
    NegativeLemma,
    /// Locational points on a grid, each with three nearby locations.
    LocationalGrid,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::UniformDisk,
        Preset::Circle,
        Preset::Clustered,
        Preset::NegativeLemma,
        Preset::LocationalGrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::UniformDisk => "uniform-disk",
            Preset::Circle => "circle",
            Preset::Clustered => "clustered",
            Preset::NegativeLemma => "negative-lemma",
            Preset::LocationalGrid => "locational-grid",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::validation(MODULE, vec![format!("unknown preset '{s}'")]))
    }
}

/// Generator parameters. `p` fixes every probability; otherwise each is
/// uniform in [β, 1] (β defaults to [`DEFAULT_PMIN`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresetParams {
    pub n: usize,
    pub d: usize,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub seed: u64,
}

impl PresetParams {
    pub fn new(n: usize, d: usize, seed: u64) -> Self {
        PresetParams {
            n,
            d,
            p: None,
            beta: None,
            seed,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    fn check(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(2..=3).contains(&self.d) {
            bad.push(format!("presets support d = 2 or 3, got {}", self.d));
        }
        if self.n == 0 {
            bad.push("n must be positive".to_string());
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                bad.push(format!("p must lie in (0, 1], got {p}"));
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b <= 1.0) {
                bad.push(format!("beta must lie in (0, 1], got {b}"));
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::validation(MODULE, bad))
        }
    }

    fn prob(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self.p {
            Some(p) => p,
            None => {
                let lo = self.beta.unwrap_or(DEFAULT_PMIN);
                if lo >= 1.0 {
                    1.0
                } else {
                    rng.gen_range(lo..=1.0)
                }
            }
        }
    }
}

fn in_ball(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

fn on_sphere(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Generates a validated-shape instance; the same parameters always give
/// the same instance.
pub fn generate(preset: Preset, params: &PresetParams) -> Result<Instance> {
    params.check()?;
    let PresetParams { n, d, .. } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let existential = |points: Vec<WeightedPoint>| Instance::Existential {
        dimension: d,
        points,
        epsilon: None,
    };
    let inst = match preset {
        Preset::UniformDisk => {
            let pts = (0..n)
                .map(|_| {
                    let c = in_ball(&mut rng, d);
                    WeightedPoint::new(c, params.prob(&mut rng))
                })
                .collect();
            existential(pts)
        }
        Preset::Circle => {
            let pts = (0..n)
                .map(|i| {
                    let c = if d == 2 {
                        let t = TAU * i as f64 / n as f64;
                        vec![t.cos(), t.sin()]
                    } else {
                        on_sphere(&mut rng, d)
                    };
                    WeightedPoint::new(c, params.prob(&mut rng))
                })
                .collect();
            existential(pts)
        }
        Preset::Clustered => {
            let k = ((n as f64).sqrt() / 4.0).round().clamp(1.0, 12.0) as usize;
            let centres: Vec<Vec<f64>> = (0..k).map(|_| in_ball(&mut rng, d)).collect();
            let noise = Normal::new(0.0, 0.03).expect("valid normal");
            let pts = (0..n)
                .map(|i| {
                    let c = centres[i % k].iter().map(|x| x + noise.sample(&mut rng)).collect();
                    WeightedPoint::new(c, params.prob(&mut rng))
                })
                .collect();
            existential(pts)
        }
        Preset::NegativeLemma => {
            let p = params.p.unwrap_or(1.0 / n as f64);
            let pts = (0..n)
                .map(|i| {
                    let mut c = vec![0.0; d];
                    if i >= n.div_ceil(2) {
                        c[0] = 1.0;
                    }
                    WeightedPoint::new(c, p)
                })
                .collect();
            existential(pts)
        }
        Preset::LocationalGrid => {
            let side = (n as f64).sqrt().ceil() as usize;
            let cell = 1.0 / side as f64;
            let points = (0..n)
                .map(|i| {
                    let mut node = vec![(i % side) as f64 * cell, (i / side % side) as f64 * cell];
                    if d == 3 {
                        node.push((i / (side * side)) as f64 * cell);
                    }
                    let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.2..1.0)).collect();
                    let mass = params.p.unwrap_or(1.0);
                    let total: f64 = raw.iter().sum();
                    let locations = raw
                        .iter()
                        .map(|w| {
                            let c = node.iter().map(|x| x + rng.gen_range(-0.4..0.4) * cell).collect();
                            WeightedPoint::new(c, mass * w / total)
                        })
                        .collect();
                    LocationalPoint { locations }
                })
                .collect();
            Instance::Locational {
                dimension: d,
                points,
                epsilon: None,
            }
        }
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UncertainSet;

    #[test]
    fn every_preset_is_valid_and_reproducible() {
        for preset in Preset::ALL {
            for d in [2, 3] {
                let params = PresetParams::new(40, d, 9);
                let a = generate(preset, &params).unwrap();
                assert_eq!(a, generate(preset, &params).unwrap());
                let set = a.into_set().unwrap();
                assert_eq!(set.len(), 40);
                assert_eq!(set.dimension(), d);
                assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
            }
        }
    }

    #[test]
    fn negative_lemma_layout() {
        let set = generate(Preset::NegativeLemma, &PresetParams::new(10, 2, 0))
            .unwrap()
            .into_set()
            .unwrap();
        let UncertainSet::Existential(s) = set else { panic!() };
        assert_eq!(s.points().iter().filter(|p| p.coords == vec![0.0, 0.0]).count(), 5);
        assert_eq!(s.points().iter().filter(|p| p.coords == vec![1.0, 0.0]).count(), 5);
        assert!(s.points().iter().all(|p| p.p == 0.1));
    }

    #[test]
    fn deterministic_ring() {
        let set = generate(Preset::Circle, &PresetParams::new(100, 2, 0).with_p(1.0))
            .unwrap()
            .into_set()
            .unwrap();
        assert_eq!(set.beta(), Some(1.0));
        assert!(set
            .all_locations()
            .iter()
            .all(|v| ((v[0] * v[0] + v[1] * v[1]).sqrt() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn beta_bounds_probabilities() {
        let set = generate(Preset::UniformDisk, &PresetParams::new(200, 2, 3).with_beta(0.5))
            .unwrap()
            .into_set()
            .unwrap();
        assert!(set.beta().unwrap() >= 0.5);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(generate(Preset::Circle, &PresetParams::new(10, 4, 0)).is_err());
        assert!(generate(Preset::Circle, &PresetParams::new(0, 2, 0)).is_err());
        assert!(generate(Preset::Circle, &PresetParams::new(5, 2, 0).with_p(1.5)).is_err());
        assert!("nope".parse::<Preset>().is_err());
    }
}
