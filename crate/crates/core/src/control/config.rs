use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlMode {
    #[serde(rename = "uiMPC")]
    Unconstrained,
    #[serde(rename = "ciMPC")]
    Constrained,
    #[serde(rename = "uiMPC+D")]
    UnconstrainedCompensated,
    #[serde(rename = "ciMPC+D")]
    ConstrainedCompensated,
}

impl ControlMode {
    pub fn constrained(self) -> bool {
        matches!(self, ControlMode::Constrained | ControlMode::ConstrainedCompensated)
    }

    /// Uses a disturbance preview `ΔŴ(k+1)`.
    pub fn compensated(self) -> bool {
        matches!(
            self,
            ControlMode::UnconstrainedCompensated | ControlMode::ConstrainedCompensated
        )
    }
}

/// How PJMs along the horizon are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PjmMode {
    /// `φ(k+i) = φ(k)`.
    #[default]
    Frozen,
    /// Re-linearize along the predicted trajectory until `ΔU` settles.
    FixedPoint,
}

fn default_mode() -> ControlMode {
    ControlMode::Unconstrained
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerConfig {
    pub horizon: usize,
    #[serde(default)]
    pub lambda: f64,
    /// Diagonal of `Q`, length `N·M_y`; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default = "default_mode")]
    pub mode: ControlMode,
    #[serde(default)]
    pub pjm_mode: PjmMode,
    /// Extra diagonal term `ε` added to the normal matrix.
    #[serde(default)]
    pub ridge: f64,
    /// Pseudo orders; when given they must equal `n_y + 1`, `n_u + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lu: Option<usize>,
}

impl ControllerConfig {
    pub fn new(horizon: usize, lambda: f64) -> Self {
        Self {
            horizon,
            lambda,
            q: None,
            mode: ControlMode::Unconstrained,
            pjm_mode: PjmMode::Frozen,
            ridge: 0.0,
            ly: None,
            lu: None,
        }
    }

    pub fn with_q(mut self, q: Vec<f64>) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_mode(mut self, mode: ControlMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_pjm_mode(mut self, pjm_mode: PjmMode) -> Self {
        self.pjm_mode = pjm_mode;
        self
    }

    pub fn with_ridge(mut self, ridge: f64) -> Self {
        self.ridge = ridge;
        self
    }

    /// `λ + ε`, the diagonal actually added to `Φ̃ᵀQΦ̃`.
    pub fn effective_lambda(&self) -> f64 {
        self.lambda + self.ridge
    }

    /// Diagonal of `Q` for `M_y` outputs.
    pub fn q_diag(&self, my: usize) -> Result<Vec<f64>> {
        let len = self.horizon * my;
        match &self.q {
            None => Ok(vec![1.0; len]),
            Some(q) if q.len() == len => Ok(q.clone()),
            Some(q) => Err(Error::InvalidConfig(format!(
                "q has {} entries, expected horizon·outputs = {len}",
                q.len()
            ))),
        }
    }

    pub fn validate(&self, my: usize, orders: (usize, usize)) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::InvalidConfig(format!("ridge must be finite and >= 0, got {}", self.ridge)));
        }
        if self.q_diag(my)?.iter().any(|&w| !(w >= 0.0 && w.is_finite())) {
            return Err(Error::InvalidConfig("q weights must be finite and >= 0".into()));
        }
        for (given, want, name) in [(self.ly, orders.0, "ly"), (self.lu, orders.1, "lu")] {
            if let Some(v) = given {
                if v != want {
                    return Err(Error::InvalidConfig(format!(
                        "{name} = {v} but the plant's pseudo order is {want}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Box bounds on absolute inputs `u(k+i)` and an optional horizon energy cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSet {
    /// Per-channel lower bound; `null` for unbounded.
    pub u_min: Vec<Option<f64>>,
    pub u_max: Vec<Option<f64>>,
    /// Bound on `Σ_j Σ_i u_j²(k+i)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_cap: Option<f64>,
}

impl ConstraintSet {
    pub fn boxed(u_min: Vec<Option<f64>>, u_max: Vec<Option<f64>>) -> Self {
        Self {
            u_min,
            u_max,
            energy_cap: None,
        }
    }

    pub fn with_energy_cap(mut self, cap: f64) -> Self {
        self.energy_cap = Some(cap);
        self
    }

    pub fn lo(&self, j: usize) -> f64 {
        self.u_min.get(j).copied().flatten().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn hi(&self, j: usize) -> f64 {
        self.u_max.get(j).copied().flatten().unwrap_or(f64::INFINITY)
    }

    pub fn validate(&self, mu: usize) -> Result<()> {
        if self.u_min.len() != mu || self.u_max.len() != mu {
            return Err(Error::InvalidConfig(format!(
                "constraint bounds need {mu} entries (got u_min {}, u_max {})",
                self.u_min.len(),
                self.u_max.len()
            )));
        }
        for j in 0..mu {
            if self.lo(j) > self.hi(j) {
                return Err(Error::InvalidConfig(format!("u_min > u_max on channel {}", j + 1)));
            }
        }
        if let Some(cap) = self.energy_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidConfig(format!("energy_cap must be > 0, got {cap}")));
            }
        }
        Ok(())
    }

    /// Largest violation of the constraints by stacked absolute inputs.
    pub fn violation(&self, u_stack: &[f64], mu: usize) -> f64 {
        let mut worst = 0.0f64;
        for (i, &v) in u_stack.iter().enumerate() {
            let j = i % mu;
            worst = worst.max(self.lo(j) - v).max(v - self.hi(j));
        }
        if let Some(cap) = self.energy_cap {
            let e: f64 = u_stack.iter().map(|v| v * v).sum();
            worst = worst.max(e - cap);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for (m, s) in [
            (ControlMode::Unconstrained, "\"uiMPC\""),
            (ControlMode::Constrained, "\"ciMPC\""),
            (ControlMode::UnconstrainedCompensated, "\"uiMPC+D\""),
            (ControlMode::ConstrainedCompensated, "\"ciMPC+D\""),
        ] {
            assert_eq!(serde_json::to_string(&m).unwrap(), s);
            assert_eq!(serde_json::from_str::<ControlMode>(s).unwrap(), m);
        }
    }

    #[test]
    fn defaults_from_minimal_json() {
        let cfg: ControllerConfig = serde_json::from_str(r#"{"horizon": 4}"#).unwrap();
        assert_eq!(cfg, ControllerConfig::new(4, 0.0));
        assert_eq!(cfg.q_diag(2).unwrap(), vec![1.0; 8]);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ControllerConfig>(r#"{"horizon": 4, "lamda": 1}"#).is_err());
    }

    #[test]
    fn validation() {
        assert!(ControllerConfig::new(0, 0.0).validate(1, (2, 5)).is_err());
        assert!(ControllerConfig::new(2, -1.0).validate(1, (2, 5)).is_err());
        assert!(ControllerConfig::new(2, 0.0).with_q(vec![1.0]).validate(1, (2, 5)).is_err());
        let mut c = ControllerConfig::new(2, 0.0);
        c.ly = Some(3);
        assert!(c.validate(1, (2, 5)).is_err());
        c.ly = Some(2);
        assert!(c.validate(1, (2, 5)).is_ok());
    }

    #[test]
    fn null_bound_is_unbounded() {
        let c: ConstraintSet =
            serde_json::from_str(r#"{"u_min": [-5, null], "u_max": [0.6, null], "energy_cap": 10}"#).unwrap();
        assert_eq!(c.lo(0), -5.0);
        assert_eq!(c.hi(1), f64::INFINITY);
        assert!(c.validate(2).is_ok());
        assert_eq!(c.violation(&[0.7, 100.0], 2), (0.7f64 - 0.6).max(0.49 + 1e4 - 10.0));
    }
}
