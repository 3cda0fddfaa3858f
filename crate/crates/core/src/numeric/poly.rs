use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Polynomial in the backward shift `z⁻¹`: `c₀ + c₁z⁻¹ + … + c_m z⁻ᵐ`.
#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZPolynomial {
    coeffs: Vec<f64>,
}

impl ZPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// `c·z^{-power}`.
    pub fn monomial(c: f64, power: usize) -> Self {
        let mut coeffs = vec![0.0; power + 1];
        coeffs[power] = c;
        Self { coeffs }
    }

    /// The difference operator `Δ = 1 − z⁻¹`.
    pub fn delta() -> Self {
        Self::new(vec![1.0, -1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Number of stored coefficients (may include trailing zeros).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    /// Strips trailing zero coefficients.
    pub fn normalized(&self) -> Self {
        let end = self.degree().map_or(0, |d| d + 1);
        Self::new(self.coeffs[..end].to_vec())
    }

    /// Zeroes coefficients below `rel · max|c|`, then normalizes.
    pub fn trimmed(&self, rel: f64) -> Self {
        let scale = self.max_abs();
        let cut = rel * scale;
        Self::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= cut { 0.0 } else { c })
                .collect(),
        )
        .normalized()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn abs_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Multiplies by `z^{-s}`.
    pub fn shift(&self, s: usize) -> Self {
        let mut coeffs = vec![0.0; s];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// Evaluates at a real value of `z⁻¹`.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Evaluates at a complex value of `z⁻¹`.
    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value at `z = 1`, i.e. the coefficient sum.
    pub fn at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// Synthetic division by `Δ = 1 − z⁻¹`: returns `(q, r)` with `p = Δ·q + r`.
    pub fn div_delta(&self) -> (ZPolynomial, f64) {
        let n = self.coeffs.len();
        if n == 0 {
            return (ZPolynomial::zero(), 0.0);
        }
        // q_i = -(p_{i+1} + … + p_m), r = p(1)
        let mut q = vec![0.0; n - 1];
        let mut tail = 0.0;
        for i in (0..n - 1).rev() {
            tail += self.coeffs[i + 1];
            q[i] = -tail;
        }
        (ZPolynomial::new(q), tail + self.coeffs[0])
    }

    /// Impulse response of `self / den` (den(0) ≠ 0), first `n` samples.
    pub fn impulse_over(&self, den: &ZPolynomial, n: usize) -> Vec<f64> {
        let d0 = den.coeff(0);
        let mut h = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..=k.min(den.len().saturating_sub(1)) {
                acc -= den.coeff(j) * h[k - j];
            }
            h[k] = acc / d0;
        }
        h
    }
}

/// Coefficient convolution.
pub fn poly_mul(p: &ZPolynomial, q: &ZPolynomial) -> ZPolynomial {
    if p.is_empty() || q.is_empty() {
        return ZPolynomial::zero();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.coeffs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (j, &b) in q.coeffs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    ZPolynomial::new(out)
}

fn combine(p: &ZPolynomial, q: &ZPolynomial, sign: f64) -> ZPolynomial {
    let n = p.len().max(q.len());
    ZPolynomial::new((0..n).map(|i| p.coeff(i) + sign * q.coeff(i)).collect())
}

impl Add for &ZPolynomial {
    type Output = ZPolynomial;
    fn add(self, rhs: &ZPolynomial) -> ZPolynomial {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &ZPolynomial {
    type Output = ZPolynomial;
    fn sub(self, rhs: &ZPolynomial) -> ZPolynomial {
        combine(self, rhs, -1.0)
    }
}

impl Mul for &ZPolynomial {
    type Output = ZPolynomial;
    fn mul(self, rhs: &ZPolynomial) -> ZPolynomial {
        poly_mul(self, rhs)
    }
}

impl Neg for &ZPolynomial {
    type Output = ZPolynomial;
    fn neg(self) -> ZPolynomial {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ZPolynomial {
            type Output = ZPolynomial;
            fn $m(self, rhs: ZPolynomial) -> ZPolynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ZPolynomial> for ZPolynomial {
            type Output = ZPolynomial;
            fn $m(self, rhs: &ZPolynomial) -> ZPolynomial {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for ZPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZPoly{:?}", self.coeffs)
    }
}

impl fmt::Display for ZPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            } else if c < 0.0 {
                write!(f, "-")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c.abs())?,
                1 => write!(f, "{}z^-1", c.abs())?,
                _ => write!(f, "{}z^-{}", c.abs(), i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[f64]) -> ZPolynomial {
        ZPolynomial::new(c.to_vec())
    }

    #[test]
    fn difference_of_squares() {
        let prod = &p(&[1.0, -1.0]) * &p(&[1.0, 1.0]);
        assert_eq!(prod.normalized(), p(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn multiply_by_one() {
        let a = p(&[0.3, -2.0, 5.0]);
        assert_eq!(&a * &ZPolynomial::one(), a);
    }

    #[test]
    fn hand_convolution_with_delta() {
        let prod = &p(&[1.0, 0.0, -0.8]) * &ZPolynomial::delta();
        assert_eq!(prod, p(&[1.0, -1.0, -0.8, 0.8]));
    }

    #[test]
    fn degree_and_normalization() {
        let a = p(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(a.degree(), Some(1));
        assert_eq!(a.normalized().len(), 2);
        assert_eq!(ZPolynomial::zero().degree(), None);
        assert_eq!(p(&[0.0, 0.0]).degree(), None);
    }

    #[test]
    fn synthetic_division_by_delta() {
        // (1 - z^-1)(2 + 3z^-1) + 0.5
        let num = &(&ZPolynomial::delta() * &p(&[2.0, 3.0])) + &ZPolynomial::constant(0.5);
        let (q, r) = num.div_delta();
        assert!((r - 0.5).abs() < 1e-15);
        assert_eq!(q.normalized(), p(&[2.0, 3.0]));
    }

    #[test]
    fn impulse_of_first_order() {
        let h = ZPolynomial::one().impulse_over(&p(&[1.0, -0.5]), 4);
        assert_eq!(h, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[1.0, -0.5, 0.0, 2.0]).to_string(), "1 - 0.5z^-1 + 2z^-3");
    }

    proptest! {
        #[test]
        fn product_evaluates_as_product(a in prop::collection::vec(-3.0f64..3.0, 1..6),
                                        b in prop::collection::vec(-3.0f64..3.0, 1..6),
                                        x in -1.5f64..1.5) {
            let pa = ZPolynomial::new(a);
            let pb = ZPolynomial::new(b);
            let lhs = (&pa * &pb).eval(x);
            let rhs = pa.eval(x) * pb.eval(x);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
        }

        #[test]
        fn div_delta_reconstructs(c in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let poly = ZPolynomial::new(c);
            let (q, r) = poly.div_delta();
            let back = &(&ZPolynomial::delta() * &q) + &ZPolynomial::constant(r);
            for i in 0..poly.len() {
                prop_assert!((back.coeff(i) - poly.coeff(i)).abs() < 1e-12);
            }
        }
    }
}
