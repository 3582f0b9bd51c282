//! Uncertain point sets under the existential and locational models,
//! validation, realization sampling and the JSON instance format.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULE: &str = "model";

/// Slack allowed above 1 for the total probability of one locational point.
pub const LOCATIONAL_SUM_SLACK: f64 = 1e-12;

/// A point with an existence (or location) probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub coords: Vec<f64>,
    pub p: f64,
}

impl WeightedPoint {
    pub fn new(coords: Vec<f64>, p: f64) -> Self {
        WeightedPoint { coords, p }
    }
}

/// One locational point: a discrete distribution over locations. The
/// probabilities may sum to less than one, in which case the point is
/// absent with the remaining probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocationalPoint {
    pub locations: Vec<WeightedPoint>,
}

/// Raw instance as stored on disk. Deserializing does not validate; call
/// [`Instance::into_set`] or [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Instance {
    Existential {
        dimension: usize,
        points: Vec<WeightedPoint>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
    Locational {
        dimension: usize,
        points: Vec<LocationalPoint>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon: Option<f64>,
    },
}

impl Instance {
    /// Parses an instance from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::validation(MODULE, vec![format!("malformed instance JSON: {e}")]))
    }

    /// Serializes with shortest round-trip float formatting.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances always serialize")
    }

    /// Validates and converts into a checked set.
    pub fn into_set(self) -> Result<UncertainSet> {
        let report = validate(&self);
        if !report.valid {
            return Err(Error::validation(MODULE, report.violations));
        }
        Ok(match self {
            Instance::Existential {
                dimension, points, ..
            } => UncertainSet::Existential(ExistentialSet { dimension, points }),
            Instance::Locational {
                dimension, points, ..
            } => UncertainSet::Locational(LocationalSet { dimension, points }),
        })
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self {
            Instance::Existential { epsilon, .. } | Instance::Locational { epsilon, .. } => *epsilon,
        }
    }
}

/// Result of [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<String>,
    pub dimension: usize,
    /// Minimum probability over all points (existential) or locations
    /// (locational); `None` for an empty instance.
    pub beta: Option<f64>,
    /// Pairs of (point, location) references with identical coordinates.
    /// Duplicates are legal; they are reported because the locational angular
    /// structure refuses locations shared by two different points.
    pub duplicate_locations: Vec<((usize, usize), (usize, usize))>,
}

fn check_point(
    coords: &[f64],
    p: f64,
    dimension: usize,
    label: &str,
    violations: &mut Vec<String>,
) {
    if coords.len() != dimension {
        violations.push(format!(
            "{label}: dimension mismatch ({} coordinates, expected {dimension})",
            coords.len()
        ));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        violations.push(format!("{label}: coordinates must be finite"));
    }
    if !(p > 0.0 && p <= 1.0) {
        violations.push(format!("{label}: probability must be in (0,1], got {p}"));
    }
}

fn coord_key(coords: &[f64]) -> Vec<u64> {
    // -0.0 and 0.0 describe the same location.
    coords.iter().map(|c| (c + 0.0).to_bits()).collect()
}

/// Checks dimension consistency, probability bounds and finiteness, and
/// reports β and duplicate locations.
pub fn validate(instance: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut beta: Option<f64> = None;
    let mut seen: HashMap<Vec<u64>, (usize, usize)> = HashMap::new();
    let mut duplicates = Vec::new();
    let dimension = match instance {
        Instance::Existential { dimension, .. } | Instance::Locational { dimension, .. } => {
            *dimension
        }
    };
    if dimension == 0 {
        violations.push("dimension must be a positive integer".to_string());
    }
    let mut note = |coords: &[f64], at: (usize, usize)| {
        if coords.len() == dimension && coords.iter().all(|c| c.is_finite()) {
            let key = coord_key(coords);
            if let Some(first) = seen.get(&key) {
                duplicates.push((*first, at));
            } else {
                seen.insert(key, at);
            }
        }
    };
    match instance {
        Instance::Existential { points, .. } => {
            for (i, pt) in points.iter().enumerate() {
                check_point(&pt.coords, pt.p, dimension, &format!("point {i}"), &mut violations);
                beta = Some(beta.map_or(pt.p, |b: f64| b.min(pt.p)));
                note(&pt.coords, (i, 0));
            }
        }
        Instance::Locational { points, .. } => {
            for (i, pt) in points.iter().enumerate() {
                if pt.locations.is_empty() {
                    violations.push(format!("point {i}: needs at least one location"));
                }
                let mut total = 0.0;
                for (j, loc) in pt.locations.iter().enumerate() {
                    check_point(
                        &loc.coords,
                        loc.p,
                        dimension,
                        &format!("point {i} location {j}"),
                        &mut violations,
                    );
                    total += loc.p;
                    beta = Some(beta.map_or(loc.p, |b: f64| b.min(loc.p)));
                    note(&loc.coords, (i, j));
                }
                if total > 1.0 + LOCATIONAL_SUM_SLACK {
                    violations.push(format!(
                        "point {i}: location probabilities sum to {total} > 1"
                    ));
                }
            }
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
        dimension,
        beta,
        duplicate_locations: duplicates,
    }
}

/// Points that are present independently with their own probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistentialSet {
    dimension: usize,
    points: Vec<WeightedPoint>,
}

impl ExistentialSet {
    /// Builds a validated set.
    pub fn new(dimension: usize, points: Vec<WeightedPoint>) -> Result<Self> {
        match (Instance::Existential {
            dimension,
            points,
            epsilon: None,
        })
        .into_set()?
        {
            UncertainSet::Existential(s) => Ok(s),
            UncertainSet::Locational(_) => unreachable!(),
        }
    }

    /// Convenience constructor from `(coords, p)` pairs; the dimension is
    /// taken from the first point (2 if empty).
    pub fn from_pairs(pairs: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dimension = pairs.first().map_or(2, |(c, _)| c.len());
        Self::new(
            dimension,
            pairs
                .into_iter()
                .map(|(coords, p)| WeightedPoint { coords, p })
                .collect(),
        )
    }

    /// Deterministic set (every probability equal to one).
    pub fn deterministic(points: &[Vec<f64>]) -> Result<Self> {
        Self::from_pairs(points.iter().map(|c| (c.clone(), 1.0)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-instance made of the given indices (probabilities unchanged).
    pub fn subset(&self, indices: &[usize]) -> ExistentialSet {
        ExistentialSet {
            dimension: self.dimension,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    /// Minimum probability, `None` for the empty set.
    pub fn beta(&self) -> Option<f64> {
        self.points.iter().map(|p| p.p).reduce(f64::min)
    }
}

/// Points whose location is drawn from a discrete distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocationalSet {
    dimension: usize,
    points: Vec<LocationalPoint>,
}

impl LocationalSet {
    /// Builds a validated set.
    pub fn new(dimension: usize, points: Vec<LocationalPoint>) -> Result<Self> {
        match (Instance::Locational {
            dimension,
            points,
            epsilon: None,
        })
        .into_set()?
        {
            UncertainSet::Locational(s) => Ok(s),
            UncertainSet::Existential(_) => unreachable!(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[LocationalPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total number of locations m.
    pub fn location_count(&self) -> usize {
        self.points.iter().map(|p| p.locations.len()).sum()
    }
}

/// Either uncertainty model.
#[derive(Clone, Debug, PartialEq)]
pub enum UncertainSet {
    Existential(ExistentialSet),
    Locational(LocationalSet),
}

impl From<ExistentialSet> for UncertainSet {
    fn from(s: ExistentialSet) -> Self {
        UncertainSet::Existential(s)
    }
}

impl From<LocationalSet> for UncertainSet {
    fn from(s: LocationalSet) -> Self {
        UncertainSet::Locational(s)
    }
}

impl UncertainSet {
    pub fn dimension(&self) -> usize {
        match self {
            UncertainSet::Existential(s) => s.dimension,
            UncertainSet::Locational(s) => s.dimension,
        }
    }

    /// Number of uncertain points n.
    pub fn len(&self) -> usize {
        match self {
            UncertainSet::Existential(s) => s.len(),
            UncertainSet::Locational(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Minimum probability over points or locations.
    pub fn beta(&self) -> Option<f64> {
        self.flat().p.iter().copied().reduce(f64::min)
    }

    /// Bits needed to enumerate every realization: n for the existential
    /// model, Σ⌈log₂(|locations|+1)⌉ for the locational model.
    pub fn realization_bits(&self) -> u32 {
        match self {
            UncertainSet::Existential(s) => s.len() as u32,
            UncertainSet::Locational(s) => s
                .points
                .iter()
                .map(|p| {
                    let k = p.locations.len() as u64 + 1;
                    64 - (k - 1).leading_zeros()
                })
                .sum(),
        }
    }

    /// Converts back to the on-disk form.
    pub fn to_instance(&self) -> Instance {
        match self {
            UncertainSet::Existential(s) => Instance::Existential {
                dimension: s.dimension,
                points: s.points.clone(),
                epsilon: None,
            },
            UncertainSet::Locational(s) => Instance::Locational {
                dimension: s.dimension,
                points: s.points.clone(),
                epsilon: None,
            },
        }
    }

    /// Flattened location list used by the numerical engines.
    pub fn flat(&self) -> FlatSet {
        FlatSet::from_set(self)
    }

    /// Every input location (existential points count as locations).
    pub fn all_locations(&self) -> Vec<Vec<f64>> {
        let flat = self.flat();
        (0..flat.len()).map(|i| flat.coords(i).to_vec()).collect()
    }

    /// Draws one realization.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Realization {
        let mut present = Vec::new();
        let mut sources = Vec::new();
        match self {
            UncertainSet::Existential(s) => {
                for (i, pt) in s.points.iter().enumerate() {
                    if pt.p >= 1.0 || rng.gen::<f64>() < pt.p {
                        present.push(pt.coords.clone());
                        sources.push((i, 0));
                    }
                }
            }
            UncertainSet::Locational(s) => {
                for (i, pt) in s.points.iter().enumerate() {
                    let x: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (j, loc) in pt.locations.iter().enumerate() {
                        acc += loc.p;
                        if x < acc {
                            present.push(loc.coords.clone());
                            sources.push((i, j));
                            break;
                        }
                    }
                }
            }
        }
        Realization { present, sources }
    }
}

/// Draws one realization, deterministically for a given seed.
pub fn sample_realization(set: &UncertainSet, seed: u64) -> Realization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    set.sample_with(&mut rng)
}

/// One random outcome of an uncertain set.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    /// Coordinates of the present points.
    pub present: Vec<Vec<f64>>,
    /// `(point, location)` index of each present point in the input.
    pub sources: Vec<(usize, usize)>,
}

/// Poissonization weights λ_v = −ln(1−p_v).
#[derive(Clone, Debug, PartialEq)]
pub struct Lambda {
    pub per_point: Vec<f64>,
    pub total: f64,
}

/// Computes λ_v for every point; fails when some p_v = 1.
pub fn lambda_of(set: &ExistentialSet) -> Result<Lambda> {
    let mut per_point = Vec::with_capacity(set.len());
    for (i, pt) in set.points.iter().enumerate() {
        if pt.p >= 1.0 {
            return Err(Error::precondition(
                MODULE,
                format!("Poissonization undefined at p=1 (point {i})"),
            ));
        }
        per_point.push(-(-pt.p).ln_1p());
    }
    let total = per_point.iter().sum();
    Ok(Lambda { per_point, total })
}

/// Flat location list: every location with its probability and owning
/// point. Existential points are single-location owners whose absence
/// probability is 1 − p.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatSet {
    pub dim: usize,
    /// Row-major coordinates, `dim` values per location.
    pub xs: Vec<f64>,
    pub p: Vec<f64>,
    pub owner: Vec<usize>,
    /// Probability that each owner is absent from a realization.
    pub absent: Vec<f64>,
    /// Location indices of every owner.
    pub members: Vec<Vec<usize>>,
}

impl FlatSet {
    pub fn from_set(set: &UncertainSet) -> Self {
        let dim = set.dimension();
        let mut xs = Vec::new();
        let mut p = Vec::new();
        let mut owner = Vec::new();
        let mut absent = Vec::new();
        let mut members = Vec::new();
        match set {
            UncertainSet::Existential(s) => {
                for (i, pt) in s.points.iter().enumerate() {
                    xs.extend_from_slice(&pt.coords);
                    p.push(pt.p);
                    owner.push(i);
                    absent.push(1.0 - pt.p);
                    members.push(vec![i]);
                }
            }
            UncertainSet::Locational(s) => {
                for (i, pt) in s.points.iter().enumerate() {
                    let mut mine = Vec::new();
                    let mut total = 0.0;
                    for loc in &pt.locations {
                        mine.push(p.len());
                        xs.extend_from_slice(&loc.coords);
                        p.push(loc.p);
                        owner.push(i);
                        total += loc.p;
                    }
                    absent.push((1.0 - total).max(0.0));
                    members.push(mine);
                }
            }
        }
        FlatSet {
            dim,
            xs,
            p,
            owner,
            absent,
            members,
        }
    }

    /// Independent points with given probabilities (an existential set).
    pub fn independent(dim: usize, points: &[Vec<f64>], probs: &[f64]) -> Self {
        let n = points.len();
        FlatSet {
            dim,
            xs: points.iter().flat_map(|c| c.iter().copied()).collect(),
            p: probs.to_vec(),
            owner: (0..n).collect(),
            absent: probs.iter().map(|q| 1.0 - q).collect(),
            members: (0..n).map(|i| vec![i]).collect(),
        }
    }

    /// Number of locations m.
    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Number of owners n.
    pub fn owners(&self) -> usize {
        self.members.len()
    }

    pub fn coords(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    /// True when every owner has exactly one location.
    pub fn is_existential(&self) -> bool {
        self.members.iter().all(|m| m.len() == 1)
    }

    /// Probability that no location at all is realized.
    pub fn empty_probability(&self) -> f64 {
        self.absent.iter().product()
    }

    /// Realization bit count in the sense of [`UncertainSet::realization_bits`].
    pub fn realization_bits(&self) -> u32 {
        self.members
            .iter()
            .map(|m| {
                let k = m.len() as u64 + 1;
                64 - (k - 1).leading_zeros()
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> ExistentialSet {
        ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 0.5), (vec![1.0, 0.0], 0.5)]).unwrap()
    }

    #[test]
    fn validate_reports_beta() {
        let report = validate(&two_points().into_inst());
        assert!(report.valid);
        assert_eq!(report.beta, Some(0.5));
    }

    impl ExistentialSet {
        fn into_inst(self) -> Instance {
            UncertainSet::from(self).to_instance()
        }
    }

    #[test]
    fn zero_probability_rejected() {
        let err = ExistentialSet::from_pairs(vec![(vec![0.0, 0.0], 0.0)]).unwrap_err();
        assert!(err.to_string().contains("probability must be in (0,1]"));
        assert_eq!(err.code(), "model.validation");
    }

    #[test]
    fn mixed_dimensions_rejected() {
        let err = ExistentialSet::new(
            2,
            vec![
                WeightedPoint::new(vec![0.0, 0.0], 0.5),
                WeightedPoint::new(vec![0.0, 0.0, 1.0], 0.5),
            ],
        )
        .unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"));
    }

    #[test]
    fn every_violation_is_listed() {
        let inst = Instance::Existential {
            dimension: 2,
            points: vec![
                WeightedPoint::new(vec![0.0], 1.5),
                WeightedPoint::new(vec![0.0, f64::NAN], 0.5),
            ],
            epsilon: None,
        };
        let report = validate(&inst);
        assert!(!report.valid);
        assert_eq!(report.violations.len(), 3);
    }

    #[test]
    fn locational_sum_above_one_rejected() {
        let err = LocationalSet::new(
            1,
            vec![LocationalPoint {
                locations: vec![
                    WeightedPoint::new(vec![0.0], 0.7),
                    WeightedPoint::new(vec![1.0], 0.4),
                ],
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("sum to"));
    }

    #[test]
    fn locational_sum_below_one_allowed() {
        let set = LocationalSet::new(
            1,
            vec![LocationalPoint {
                locations: vec![WeightedPoint::new(vec![0.0], 0.3)],
            }],
        )
        .unwrap();
        let flat = UncertainSet::from(set).flat();
        assert!((flat.absent[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn duplicates_reported() {
        let inst = Instance::Existential {
            dimension: 1,
            points: vec![
                WeightedPoint::new(vec![0.0], 0.5),
                WeightedPoint::new(vec![-0.0], 0.5),
            ],
            epsilon: None,
        };
        assert_eq!(validate(&inst).duplicate_locations, vec![((0, 0), (1, 0))]);
    }

    #[test]
    fn lambda_values() {
        let single =
            ExistentialSet::from_pairs(vec![(vec![0.0], 1.0 - (-1.0f64).exp())]).unwrap();
        assert!((lambda_of(&single).unwrap().total - 1.0).abs() < 1e-14);
        let lam = lambda_of(&two_points()).unwrap();
        assert!((lam.total - 2.0 * 2f64.ln()).abs() < 1e-14);
        let certain = ExistentialSet::from_pairs(vec![(vec![0.0], 1.0)]).unwrap();
        assert!(lambda_of(&certain).is_err());
    }

    #[test]
    fn certain_points_always_present() {
        let set: UncertainSet = ExistentialSet::deterministic(&[vec![0.0, 1.0], vec![2.0, 3.0]])
            .unwrap()
            .into();
        for seed in 0..50 {
            assert_eq!(sample_realization(&set, seed).present.len(), 2);
        }
    }

    #[test]
    fn full_locational_mass_gives_exactly_one_location() {
        let set: UncertainSet = LocationalSet::new(
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
        for seed in 0..200 {
            assert_eq!(sample_realization(&set, seed).present.len(), 1);
        }
    }

    #[test]
    fn inclusion_frequency_matches_probability() {
        let set: UncertainSet = two_points().into();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 100_000;
        let mut counts = [0usize; 2];
        for _ in 0..trials {
            for (i, _) in set.sample_with(&mut rng).sources {
                counts[i] += 1;
            }
        }
        for c in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
        }
    }

    #[test]
    fn realization_bits_count() {
        let set: UncertainSet = LocationalSet::new(
            1,
            vec![
                LocationalPoint {
                    locations: vec![WeightedPoint::new(vec![0.0], 0.5)],
                },
                LocationalPoint {
                    locations: vec![
                        WeightedPoint::new(vec![1.0], 0.2),
                        WeightedPoint::new(vec![2.0], 0.2),
                        WeightedPoint::new(vec![3.0], 0.2),
                    ],
                },
            ],
        )
        .unwrap()
        .into();
        assert_eq!(set.realization_bits(), 1 + 2);
    }

    #[test]
    fn json_rejects_non_numbers() {
        let text = r#"{"model":"existential","dimension":1,"points":[{"coords":[NaN],"p":0.5}]}"#;
        assert!(Instance::from_json(text).is_err());
        let text = r#"{"model":"existential","dimension":1,"points":[{"coords":[1e400],"p":0.5}]}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn json_layout() {
        let json = two_points().into_inst().to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["model"], "existential");
        assert_eq!(value["dimension"], 2);
        assert_eq!(value["points"][1]["coords"][0], 1.0);
        assert!(value.get("epsilon").is_none());
    }
}
