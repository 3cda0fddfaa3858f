//! Serializable experiment description.

use serde::{Deserialize, Serialize};

use super::plants::{Example1, LinearArx, SquareCubic};
use super::signals::{DisturbanceSpec, ReferenceSpec};
use crate::control::{ConstraintSet, ControllerConfig};
use crate::edlm::PlantModel;
use crate::error::{Error, Result};
use crate::numeric::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlantSpec {
    Example1,
    Example2,
    /// Same plant as `example2`; kept separate so scenario files name the
    /// experiment they belong to.
    Example3,
    Example4,
    /// Linear ARX; `a[i]` multiplies `y(k−i)`, `b[j]` multiplies `u(k−j)`,
    /// each given as a list of rows.
    Custom { a: Vec<Vec<Vec<f64>>>, b: Vec<Vec<Vec<f64>>> },
}

impl PlantSpec {
    pub fn build(&self) -> Result<Box<dyn PlantModel>> {
        Ok(match self {
            PlantSpec::Example1 => Box::new(Example1),
            PlantSpec::Example2 | PlantSpec::Example3 => Box::new(SquareCubic::example2()),
            PlantSpec::Example4 => Box::new(SquareCubic::example4()),
            PlantSpec::Custom { a, b } => {
                let to_m = |rows: &Vec<Vec<f64>>| -> Result<Matrix> {
                    let cols = rows.first().map_or(0, Vec::len);
                    if rows.iter().any(|r| r.len() != cols) {
                        return Err(Error::InvalidConfig("ragged ARX matrix".into()));
                    }
                    Ok(Matrix::from_rows(rows))
                };
                Box::new(LinearArx::new(
                    a.iter().map(to_m).collect::<Result<_>>()?,
                    b.iter().map(to_m).collect::<Result<_>>()?,
                )?)
            }
        })
    }
}

/// Which summaries to compute after a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSpec {
    /// Inclusive step window for the steady tracking error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(usize, usize)>,
    /// RMS error is taken over steps `k > rms_after`.
    #[serde(default)]
    pub rms_after: usize,
    /// Compare `e(k)` with `−Δw(k) − Δw(k−1)` for `k > ed_after`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ed_after: Option<usize>,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub plant: PlantSpec,
    pub controller: ControllerConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintSet>,
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub disturbance: DisturbanceSpec,
    pub steps: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Value of every `y(k)`, `k ≤ 1`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_y: Option<Vec<f64>>,
    /// Value of every `u(k)`, `k ≤ 0`; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_u: Option<Vec<f64>>,
    #[serde(default)]
    pub metrics: MetricsSpec,
}

impl Scenario {
    pub fn new(plant: PlantSpec, controller: ControllerConfig, reference: ReferenceSpec, steps: usize) -> Self {
        Self {
            name: None,
            plant,
            controller,
            constraints: None,
            reference,
            disturbance: DisturbanceSpec::None,
            steps,
            seed: default_seed(),
            init_y: None,
            init_u: None,
            metrics: MetricsSpec::default(),
        }
    }

    pub fn initial_output(&self, my: usize) -> Vec<f64> {
        self.init_y.clone().unwrap_or_else(|| vec![0.0; my])
    }

    pub fn initial_input(&self, mu: usize) -> Vec<f64> {
        self.init_u.clone().unwrap_or_else(|| vec![0.0; mu])
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self, plant: &dyn PlantModel) -> Result<()> {
        let (my, mu) = (plant.output_dim(), plant.input_dim());
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        self.controller.validate(my, plant.pseudo_orders())?;
        self.reference.validate(my)?;
        self.disturbance.validate(my)?;
        if self.initial_output(my).len() != my || self.initial_input(mu).len() != mu {
            return Err(Error::InvalidConfig(format!(
                "init_y needs {my} entries and init_u needs {mu}"
            )));
        }
        match (&self.constraints, self.controller.mode.constrained()) {
            (Some(c), _) => c.validate(mu)?,
            (None, true) => {
                return Err(Error::InvalidConfig("constrained mode requires a constraint set".into()))
            }
            _ => {}
        }
        if let Some((lo, hi)) = self.metrics.window {
            if lo == 0 || lo > hi || hi > self.steps {
                return Err(Error::WindowOutOfRange { lo, hi, len: self.steps });
            }
        }
        Ok(())
    }
}
