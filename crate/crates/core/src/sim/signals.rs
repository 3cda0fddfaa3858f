//! Reference trajectories and disturbance sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Last step of the composite reference; later steps hold this value.
pub const COMPOSITE_END: i64 = 700;
/// Last step of the sinusoid branch.
pub const COMPOSITE_SWITCH: i64 = 350;

/// Two-channel sinusoid mix up to step 350, then a ±0.5 square wave with
/// period 100 and opposite signs on the two channels.
pub fn composite_reference(k: i64) -> Result<[f64; 2]> {
    if !(1..=COMPOSITE_END).contains(&k) {
        return Err(Error::OutOfRange {
            index: k,
            lo: 1,
            hi: COMPOSITE_END,
        });
    }
    let t = k as f64;
    if k <= COMPOSITE_SWITCH {
        return Ok([
            0.2 * (t / 20.0).sin() - 0.2 * (t / 10.0).sin() - 0.2 * (t / 5.0).cos() + 0.2 * (t / 2.0).cos(),
            -0.2 * (t / 15.0).cos() - 0.2 * (t / 25.0).sin() + 0.2 * (t / 5.0).sin() + 0.2 * (t / 3.0).cos(),
        ]);
    }
    // f64::round rounds halves away from zero; (k+1)/50 is never a half here
    let sign = if ((t + 1.0) / 50.0).round() as i64 % 2 == 0 { 1.0 } else { -1.0 };
    Ok([0.5 * sign, -0.5 * sign])
}

/// `w(k+1)` as a function of `k`.
pub fn sinusoid_disturbance(k: i64) -> [f64; 2] {
    let t = k as f64;
    [
        0.2 * (t / 10.0).sin() + 0.1 * (t / 30.0).cos(),
        0.1 * (t / 20.0).sin() + 0.2 * (t / 15.0).cos(),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// `y*(k) = k` on every channel.
    UnitRamp,
    /// The two-channel sinusoid/square-wave profile.
    Composite,
    Constant { value: Vec<f64> },
    /// `values[k−1]` per step, the last row held afterwards.
    Table { values: Vec<Vec<f64>> },
}

impl ReferenceSpec {
    pub fn validate(&self, my: usize) -> Result<()> {
        match self {
            ReferenceSpec::UnitRamp => Ok(()),
            ReferenceSpec::Composite if my == 2 => Ok(()),
            ReferenceSpec::Composite => Err(Error::InvalidConfig(format!(
                "the composite reference has two channels, the plant has {my} outputs"
            ))),
            ReferenceSpec::Constant { value } if value.len() == my => Ok(()),
            ReferenceSpec::Constant { value } => Err(Error::InvalidConfig(format!(
                "constant reference has {} channels, expected {my}",
                value.len()
            ))),
            ReferenceSpec::Table { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidConfig("reference table is empty".into()));
                }
                match values.iter().position(|r| r.len() != my) {
                    Some(i) => Err(Error::InvalidConfig(format!(
                        "reference table row {} has {} channels, expected {my}",
                        i + 1,
                        values[i].len()
                    ))),
                    None => Ok(()),
                }
            }
        }
    }

    /// `y*(k)`. Steps beyond the end of a finite profile hold its last value
    /// and steps before the first hold the first.
    pub fn at(&self, k: i64, my: usize) -> Vec<f64> {
        match self {
            ReferenceSpec::UnitRamp => vec![k as f64; my],
            ReferenceSpec::Composite => composite_reference(k.clamp(1, COMPOSITE_END))
                .expect("clamped")
                .to_vec(),
            ReferenceSpec::Constant { value } => value.clone(),
            ReferenceSpec::Table { values } => {
                let i = (k.max(1) as usize - 1).min(values.len() - 1);
                values[i].clone()
            }
        }
    }
}

fn default_noise_scale() -> Vec<f64> {
    vec![0.3, 0.2]
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    #[default]
    None,
    /// Deterministic two-channel sinusoids.
    Sinusoid,
    /// Independent uniform `[0, 1)` draws scaled per channel.
    UniformNoise {
        #[serde(default = "default_noise_scale")]
        scale: Vec<f64>,
    },
}

impl DisturbanceSpec {
    pub fn validate(&self, my: usize) -> Result<()> {
        match self {
            DisturbanceSpec::Sinusoid if my != 2 => Err(Error::InvalidConfig(format!(
                "the sinusoid disturbance has two channels, the plant has {my} outputs"
            ))),
            DisturbanceSpec::UniformNoise { scale } if scale.len() != my => Err(Error::InvalidConfig(format!(
                "noise scale has {} entries, expected {my}",
                scale.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// `w(0)…w(len−1)` drawn once, so previews and the plant see the same values.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSequence {
    values: Vec<Vec<f64>>,
}

impl DisturbanceSequence {
    /// Noise samples are drawn from ChaCha8 seeded with `seed`, in step order
    /// starting at `w(1)`, channel by channel; `w(0) = 0`.
    pub fn generate(spec: &DisturbanceSpec, my: usize, len: usize, seed: u64) -> Self {
        let values = match spec {
            DisturbanceSpec::None => vec![vec![0.0; my]; len],
            DisturbanceSpec::Sinusoid => (0..len as i64).map(|k| sinusoid_disturbance(k - 1).to_vec()).collect(),
            DisturbanceSpec::UniformNoise { scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut v = vec![vec![0.0; my]];
                for _ in 1..len {
                    v.push(scale.iter().map(|s| s * rng.gen::<f64>()).collect());
                }
                v.truncate(len);
                v
            }
        };
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `w(k)`; zero outside the generated range.
    pub fn at(&self, k: i64) -> Vec<f64> {
        let my = self.values.first().map_or(0, Vec::len);
        usize::try_from(k)
            .ok()
            .and_then(|i| self.values.get(i))
            .cloned()
            .unwrap_or_else(|| vec![0.0; my])
    }

    /// `w(k) − w(k−1)`.
    pub fn increment(&self, k: i64) -> Vec<f64> {
        self.at(k).iter().zip(self.at(k - 1)).map(|(a, b)| a - b).collect()
    }

    /// `[Δw(k+1); …; Δw(k+n)]`.
    pub fn preview(&self, k: i64, n: usize) -> Vec<f64> {
        (1..=n as i64).flat_map(|i| self.increment(k + i)).collect()
    }
}
