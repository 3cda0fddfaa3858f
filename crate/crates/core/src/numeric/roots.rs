use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{Tolerances, ZPolynomial};
use crate::error::{Error, Result};

/// Roots in the z-plane of `z^m · p(z⁻¹)`, i.e. the poles/zeros associated
/// with a polynomial in the backward shift.
///
/// Leading zero coefficients (pure delays) and trailing zeros do not
/// contribute roots. A nonzero constant has no roots.
pub fn poly_roots(p: &ZPolynomial) -> Result<Vec<Complex64>> {
    poly_roots_with(p, &Tolerances::default())
}

pub fn poly_roots_with(p: &ZPolynomial, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let Some(deg) = p.degree() else {
        return Err(Error::DegenerateZeroPolynomial);
    };
    let lead = p.coeffs().iter().position(|&c| c != 0.0).unwrap_or(0);
    // z-polynomial coefficients, highest power first
    let zc: Vec<f64> = p.coeffs()[lead..=deg].to_vec();
    let m = zc.len() - 1;
    if m == 0 {
        return Ok(Vec::new());
    }
    let c0 = zc[0];
    let mut companion = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        companion[(0, j)] = -zc[j + 1] / c0;
    }
    for i in 1..m {
        companion[(i, i - 1)] = 1.0;
    }
    let eigen = Schur::try_new(companion, f64::EPSILON, tol.root_max_iter * m.max(1))
        .map(|s| s.complex_eigenvalues())
        .ok_or_else(|| {
            Error::UnsupportedConfiguration("companion eigenvalue iteration did not converge".into())
        })?;
    Ok(eigen.iter().map(|&r| polish(&zc, r, tol)).collect())
}

/// Evaluates `Σ zc[i] z^{m-i}` and its derivative at `z`.
fn horner(zc: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for &c in zc {
        df = df * z + f;
        f = f * z + c;
    }
    (f, df)
}

fn polish(zc: &[f64], mut r: Complex64, tol: &Tolerances) -> Complex64 {
    let (mut f, _) = horner(zc, r);
    for _ in 0..50 {
        let (_, df) = horner(zc, r);
        if df.norm() == 0.0 || f.norm() == 0.0 {
            break;
        }
        let step = f / df;
        let cand = r - step;
        let (fc, _) = horner(zc, cand);
        if fc.norm() >= f.norm() {
            break;
        }
        r = cand;
        f = fc;
        if step.norm() <= tol.root * (1.0 + r.norm()) {
            break;
        }
    }
    r
}

/// Residual `|z^m p(1/z)|` at a root, scaled by the coefficient magnitude.
pub fn root_residual(p: &ZPolynomial, root: Complex64) -> f64 {
    let deg = p.degree().unwrap_or(0);
    let lead = p.coeffs().iter().position(|&c| c != 0.0).unwrap_or(0);
    let zc = &p.coeffs()[lead..=deg];
    let (f, _) = horner(zc, root);
    let m = zc.len().saturating_sub(1) as i32;
    let scale: f64 = zc.iter().map(|c| c.abs()).sum::<f64>() * root.norm().max(1.0).powi(m);
    f.norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|c| c.re).collect()
    }

    #[test]
    fn plus_minus_one() {
        let r = sorted_re(poly_roots(&ZPolynomial::new(vec![1.0, 0.0, -1.0])).unwrap());
        assert!((r[0] + 1.0).abs() < 1e-12 && (r[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_point_eight() {
        let r = sorted_re(poly_roots(&ZPolynomial::new(vec![1.0, 0.0, -0.8])).unwrap());
        let s = 0.8f64.sqrt();
        assert!((r[0] + s).abs() < 1e-12 && (r[1] - s).abs() < 1e-12);
    }

    #[test]
    fn quadratic_formula_oracle() {
        let (b, c) = (-1.5f64, 0.56f64);
        let disc = (b * b - 4.0 * c).sqrt();
        let expect = [(-b - disc) / 2.0, (-b + disc) / 2.0];
        let r = sorted_re(poly_roots(&ZPolynomial::new(vec![1.0, b, c])).unwrap());
        assert!((r[0] - expect[0]).abs() < 1e-12, "{r:?}");
        assert!((r[1] - expect[1]).abs() < 1e-12, "{r:?}");
        assert!((expect[0] - 0.7).abs() < 1e-12 && (expect[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(
            poly_roots(&ZPolynomial::new(vec![0.0, 0.0])),
            Err(Error::DegenerateZeroPolynomial)
        );
    }

    #[test]
    fn delays_and_constants_have_no_extra_roots() {
        assert!(poly_roots(&ZPolynomial::constant(3.0)).unwrap().is_empty());
        let r = poly_roots(&ZPolynomial::new(vec![0.0, 0.0, 1.0, -0.5])).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn double_root_on_the_unit_circle() {
        let p = &ZPolynomial::delta() * &ZPolynomial::delta();
        let r = poly_roots(&p).unwrap();
        for z in r {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-7);
        }
    }

    proptest! {
        #[test]
        fn roots_reconstruct_monic(coeffs in prop::collection::vec(-2.0f64..2.0, 2..9)) {
            let mut c = coeffs;
            c[0] = if c[0].abs() < 0.2 { 1.0 } else { c[0] };
            let p = ZPolynomial::new(c.clone());
            prop_assume!(p.coeffs().last().copied().unwrap_or(0.0) != 0.0);
            let roots = poly_roots(&p).unwrap();
            for &r in &roots {
                prop_assert!(root_residual(&p, r) <= 1e-8, "residual {}", root_residual(&p, r));
            }
            // rebuild Π(1 - r z⁻¹) and compare with the monic polynomial
            let mut prod = vec![Complex64::new(1.0, 0.0)];
            for &r in &roots {
                let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
                for (i, &a) in prod.iter().enumerate() {
                    next[i] += a;
                    next[i + 1] -= a * r;
                }
                prod = next;
            }
            let scale = c.iter().map(|x| (x / c[0]).abs()).fold(1.0, f64::max);
            for (i, &target) in c.iter().enumerate() {
                let got = prod[i];
                prop_assert!((got.re - target / c[0]).abs() <= 1e-6 * scale, "coef {i}: {got} vs {}", target / c[0]);
                prop_assert!(got.im.abs() <= 1e-6 * scale);
            }
        }
    }
}
