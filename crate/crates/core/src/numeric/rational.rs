use serde::{Deserialize, Serialize};

use super::{poly_roots_with, Tolerances, ZPolyMatrix, ZPolynomial};
use crate::error::{Error, Result};

/// Input signal shape for final-value limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    Step,
    Ramp,
}

impl InputKind {
    /// Number of `(1 − z⁻¹)` factors left in the denominator after the
    /// final-value multiplication.
    fn delta_order(self) -> usize {
        match self {
            InputKind::Step => 0,
            InputKind::Ramp => 1,
        }
    }
}

/// `num(z⁻¹) / den(z⁻¹)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZRational {
    pub num: ZPolynomial,
    pub den: ZPolynomial,
}

impl ZRational {
    pub fn new(num: ZPolynomial, den: ZPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateZeroPolynomial);
        }
        Ok(Self { num, den })
    }

    /// Removes pure delays shared by numerator and denominator.
    pub fn strip_common_delay(&self) -> Self {
        let lead = |p: &ZPolynomial| p.coeffs().iter().position(|&c| c != 0.0);
        let k = match (lead(&self.num), lead(&self.den)) {
            (Some(a), Some(b)) => a.min(b),
            (None, Some(b)) => b,
            _ => 0,
        };
        let drop = |p: &ZPolynomial| ZPolynomial::new(p.coeffs().get(k..).unwrap_or(&[]).to_vec()).normalized();
        Self {
            num: drop(&self.num),
            den: drop(&self.den),
        }
    }

    /// First `n` samples of the impulse response.
    pub fn impulse(&self, n: usize) -> Vec<f64> {
        let r = self.strip_common_delay();
        r.num.impulse_over(&r.den, n)
    }
}

fn near_zero_at_one(p: &ZPolynomial, tol: &Tolerances, scale: f64) -> bool {
    p.at_one().abs() <= tol.remainder * p.abs_sum().max(scale).max(f64::MIN_POSITIVE)
}

/// `lim_{z→1} (1 − z⁻¹)·G(z⁻¹)·X(z⁻¹)` for a unit step or unit ramp input.
pub fn final_value(g: &ZRational, input: InputKind) -> Result<f64> {
    final_value_with(g, input, &Tolerances::default())
}

pub fn final_value_with(g: &ZRational, input: InputKind, tol: &Tolerances) -> Result<f64> {
    final_value_on_scale(g, input, tol, 0.0)
}

/// As [`final_value_with`], but the numerator counts as vanishing at `z = 1`
/// relative to `max(Σ|num|, scale)`. Use when the numerator is computed on
/// the same scale as a larger denominator and inherits its roundoff.
pub fn final_value_on_scale(g: &ZRational, input: InputKind, tol: &Tolerances, scale: f64) -> Result<f64> {
    if g.num.trimmed(tol.coeff_trim).is_zero() {
        return Ok(0.0);
    }
    let g = g.strip_common_delay();
    let mut num = g.num.clone();
    let mut den = g.den.clone();
    for _ in 0..input.delta_order() {
        den = &den * &ZPolynomial::delta();
    }
    // cancel (1 − z⁻¹) factors while both sides vanish at z = 1
    while near_zero_at_one(&den, tol, 0.0) && near_zero_at_one(&num, tol, scale) && !den.is_zero() {
        let (qn, _) = num.div_delta();
        let (qd, _) = den.div_delta();
        num = qn.normalized();
        den = qd.normalized();
        if num.trimmed(tol.coeff_trim).is_zero() {
            return Ok(0.0);
        }
    }
    if near_zero_at_one(&den, tol, 0.0) {
        return Err(Error::DivergentLimit);
    }
    check_poles(&den, tol)?;
    Ok(num.at_one() / den.at_one())
}

/// Fails with `UnstablePole` if any pole lies outside the unit circle.
pub fn check_poles(den: &ZPolynomial, tol: &Tolerances) -> Result<()> {
    let den = den.trimmed(tol.coeff_trim);
    if den.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    let worst = poly_roots_with(&den, tol)?
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    if worst > 1.0 + tol.unit_circle {
        return Err(Error::UnstablePole { modulus: worst });
    }
    Ok(())
}

/// Matrix transfer `num(z⁻¹) / den(z⁻¹)` with a scalar common denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    pub num: ZPolyMatrix,
    pub den: ZPolynomial,
}

impl RationalMatrix {
    pub fn entry(&self, i: usize, j: usize) -> ZRational {
        ZRational {
            num: self.num.entry(i, j).clone(),
            den: self.den.clone(),
        }
    }

    /// Largest coefficient of `num·d − target·den` over all entries, scaled
    /// by the coefficient magnitudes; zero iff `self == target / d`.
    pub fn mismatch(&self, target: &ZPolyMatrix, d: &ZPolynomial) -> f64 {
        let mut worst = 0.0f64;
        let scale = self.den.max_abs().max(1e-300);
        for i in 0..self.num.rows() {
            for j in 0..self.num.cols() {
                let lhs = self.num.entry(i, j) * d;
                let rhs = target.entry(i, j) * &self.den;
                worst = worst.max((&lhs - &rhs).max_abs() / scale);
            }
        }
        worst
    }

    pub fn is_zero(&self, rel: f64) -> bool {
        let scale = self.den.max_abs();
        (0..self.num.rows())
            .flat_map(|i| (0..self.num.cols()).map(move |j| (i, j)))
            .all(|(i, j)| self.num.entry(i, j).max_abs() <= rel * scale)
    }

    /// Steady-state values per entry.
    pub fn final_values(&self, input: InputKind) -> Result<Vec<Vec<f64>>> {
        (0..self.num.rows())
            .map(|i| {
                (0..self.num.cols())
                    .map(|j| final_value(&self.entry(i, j), input))
                    .collect()
            })
            .collect()
    }
}
