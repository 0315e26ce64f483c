//! Imbalanced mixed-type datasets with planted informative features and
//! controlled per-feature missingness.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::seed::{self, Stream};

const NOISE_CATEGORIES: usize = 3;

/// Per-feature missing rates, either explicit or a linear ramp over the
/// feature index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MissingProfile {
    PerFeature { rates: Vec<f64> },
    Ramp { min_rate: f64, max_rate: f64 },
}

impl MissingProfile {
    pub fn none() -> Self {
        MissingProfile::Ramp {
            min_rate: 0.0,
            max_rate: 0.0,
        }
    }

    pub fn rates(&self, n_features: usize) -> Vec<f64> {
        match self {
            MissingProfile::PerFeature { rates } => rates.clone(),
            MissingProfile::Ramp { min_rate, max_rate } => (0..n_features)
                .map(|j| {
                    if n_features <= 1 {
                        *min_rate
                    } else {
                        min_rate + (max_rate - min_rate) * j as f64 / (n_features - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// How missing rates are matched to features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingMode {
    /// Rates follow the feature index; roles are placed at random indices.
    #[default]
    Mcar,
    /// Informative features receive rates spread over the upper half of the
    /// profile, so they are missing more often than noise on average.
    InformativeCorrelated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_informative: usize,
    pub n_noise_numerical: usize,
    pub n_noise_categorical: usize,
    /// Class-mean separation of informative features, in noise SD units.
    pub effect_size: f64,
    pub missing: MissingProfile,
    pub missing_mode: MissingMode,
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_pos: 60,
            n_neg: 540,
            n_informative: 20,
            n_noise_numerical: 150,
            n_noise_categorical: 30,
            effect_size: 1.5,
            missing: MissingProfile::Ramp {
                min_rate: 0.0,
                max_rate: 0.5,
            },
            missing_mode: MissingMode::Mcar,
            label_noise: 0.0,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn n_features(&self) -> usize {
        self.n_informative + self.n_noise_numerical + self.n_noise_categorical
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_pos == 0 {
            return bad("n_pos must be at least 1".into());
        }
        if self.n_neg < self.n_pos {
            return bad(format!("n_neg ({}) must be >= n_pos ({})", self.n_neg, self.n_pos));
        }
        if self.n_features() == 0 {
            return bad("at least one feature is required".into());
        }
        if !self.effect_size.is_finite() {
            return bad("effect_size must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.label_noise) {
            return bad(format!("label_noise {} outside [0, 1]", self.label_noise));
        }
        let rates = self.missing.rates(self.n_features());
        if rates.len() != self.n_features() {
            return bad(format!(
                "{} missing rates for {} features",
                rates.len(),
                self.n_features()
            ));
        }
        if let Some(r) = rates.iter().find(|r| !(0.0..1.0).contains(*r)) {
            return bad(format!("missing rate {r} outside [0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Ascending column indices of the planted informative features.
    pub informative_features: Vec<usize>,
    pub true_missing_rates: Vec<f64>,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Role {
    Informative { sign: f64 },
    NoiseNumerical,
    NoiseCategorical,
}

pub fn generate(spec: &SyntheticSpec) -> Result<(Dataset, GroundTruth)> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed, Stream::Synthetic, &[]);
    let f = spec.n_features();
    let n = spec.n_pos + spec.n_neg;

    let mut roles: Vec<Role> = Vec::with_capacity(f);
    for _ in 0..spec.n_informative {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        roles.push(Role::Informative { sign });
    }
    roles.extend(std::iter::repeat_n(Role::NoiseNumerical, spec.n_noise_numerical));
    roles.extend(std::iter::repeat_n(Role::NoiseCategorical, spec.n_noise_categorical));
    roles.shuffle(&mut rng);

    let profile = spec.missing.rates(f);
    let rates = match spec.missing_mode {
        MissingMode::Mcar => profile,
        MissingMode::InformativeCorrelated => {
            // Informative features take evenly spaced slots in the upper half
            // of the descending profile; the rest fill the remaining slots.
            let mut sorted = profile;
            sorted.sort_by(|a, b| b.total_cmp(a));
            let n_inf = spec.n_informative;
            let upper = f.div_ceil(2).max(n_inf);
            let mut taken = vec![false; f];
            let mut rates = vec![0.0; f];
            // Slots go to features in shuffled order so that the column index
            // (which breaks exact split ties in trees) is unrelated to the rate.
            let mut order: Vec<usize> = (0..f).collect();
            order.shuffle(&mut rng);
            let (informative, rest): (Vec<usize>, Vec<usize>) = order
                .into_iter()
                .partition(|&j| matches!(roles[j], Role::Informative { .. }));
            for (i, &j) in informative.iter().enumerate() {
                let slot = i * upper / n_inf;
                taken[slot] = true;
                rates[j] = sorted[slot];
            }
            let free = (0..f).filter(|&s| !taken[s]);
            for (&j, slot) in rest.iter().zip(free) {
                rates[j] = sorted[slot];
            }
            rates
        }
    };

    let mut truth: Vec<u8> = (0..n).map(|i| u8::from(i < spec.n_pos)).collect();
    truth.shuffle(&mut rng);

    let mut cells = vec![None; n * f];
    for (j, role) in roles.iter().enumerate() {
        for (i, &y) in truth.iter().enumerate() {
            let v = match role {
                Role::Informative { sign } => {
                    let z: f64 = rng.sample(StandardNormal);
                    z + sign * spec.effect_size * f64::from(y)
                }
                Role::NoiseNumerical => rng.sample(StandardNormal),
                Role::NoiseCategorical => rng.gen_range(0..NOISE_CATEGORIES) as f64,
            };
            if !rng.gen_bool(rates[j]) {
                cells[i * f + j] = Some(v);
            }
        }
    }
    let outcome: Vec<u8> = truth
        .iter()
        .map(|&y| if rng.gen_bool(spec.label_noise) { 1 - y } else { y })
        .collect();

    let names: Vec<String> = (0..f).map(|j| format!("x{j:04}")).collect();
    let columns = roles
        .iter()
        .zip(&names)
        .map(|(role, name)| match role {
            Role::NoiseCategorical => Column::categorical(name.clone(), (0..NOISE_CATEGORIES).map(|c| format!("c{c}"))),
            _ => Column::numerical(name.clone()),
        })
        .collect();
    let dataset = Dataset::new(columns, cells, outcome, "outcome")?;
    let informative_features = (0..f)
        .filter(|&j| matches!(roles[j], Role::Informative { .. }))
        .collect();
    Ok((
        dataset,
        GroundTruth {
            informative_features,
            true_missing_rates: rates,
            feature_names: names,
        },
    ))
}
