use std::f64::consts::PI;

use num_complex::Complex64;

use super::complex_det;
use super::{Matrix, ZPolynomial};
use crate::error::{Error, Result};

/// Rectangular grid of `z⁻¹` polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ZPolynomial>,
}

impl ZPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![ZPolynomial::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar_identity(n, ZPolynomial::one())
    }

    /// `p·I`.
    pub fn scalar_identity(n: usize, p: ZPolynomial) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = p.clone();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<ZPolynomial>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Self { rows, cols, entries }
    }

    /// Lifts a constant matrix.
    pub fn from_matrix(m: &Matrix) -> Self {
        Self::from_coefficients(std::slice::from_ref(m))
    }

    /// `Σ_i coeffs[i]·z^{-i}` for equally sized constant matrices.
    pub fn from_coefficients(coeffs: &[Matrix]) -> Self {
        let rows = coeffs.first().map_or(0, Matrix::rows);
        let cols = coeffs.first().map_or(0, Matrix::cols);
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = ZPolynomial::new(coeffs.iter().map(|m| m[(i, j)]).collect());
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &ZPolynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn map(&self, f: impl Fn(&ZPolynomial) -> ZPolynomial) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale_poly(&self, p: &ZPolynomial) -> Self {
        self.map(|e| e * p)
    }

    pub fn shift(&self, s: usize) -> Self {
        self.map(|e| e.shift(s))
    }

    pub fn add(&self, rhs: &ZPolyMatrix) -> Result<Self> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::dims("polynomial matrix add", self.rows * self.cols, rhs.rows * rhs.cols));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, rhs: &ZPolyMatrix) -> Result<Self> {
        self.add(&rhs.map(|e| -e))
    }

    pub fn mul(&self, rhs: &ZPolyMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims("polynomial matrix product", self.cols, rhs.rows));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = ZPolynomial::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.entry(i, k) * rhs.entry(k, j));
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Copies `block` into position `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &ZPolyMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block.entry(i, j).clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self.entry(r0 + i, c0 + j).clone();
            }
        }
        out
    }

    pub fn eval(&self, x: f64) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.entry(i, j).eval(x);
            }
        }
        m
    }

    fn eval_complex(&self, x: Complex64) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.eval_complex(x)).collect()
    }

    /// Upper bound on the degree of the determinant: sum of row-wise maxima.
    fn det_degree_bound(&self) -> usize {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter_map(|j| self.entry(i, j).degree())
                    .max()
                    .unwrap_or(0)
            })
            .sum()
    }

    pub fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let mut entries = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in (0..self.rows).filter(|&i| i != skip_row) {
            for j in (0..self.cols).filter(|&j| j != skip_col) {
                entries.push(self.entry(i, j).clone());
            }
        }
        Self::from_entries(self.rows - 1, self.cols - 1, entries)
    }

    /// Adjugate (transposed cofactor matrix).
    pub fn adjugate(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::dims("adjugate (square)", self.rows, self.cols));
        }
        let n = self.rows;
        if n == 1 {
            return Ok(Self::identity(1));
        }
        let mut adj = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                adj[(j, i)] = polymat_det(&self.minor(i, j))?.scale(sign);
            }
        }
        Ok(adj)
    }
}

impl std::ops::Index<(usize, usize)> for ZPolyMatrix {
    type Output = ZPolynomial;
    fn index(&self, (i, j): (usize, usize)) -> &ZPolynomial {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZPolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ZPolynomial {
        &mut self.entries[i * self.cols + j]
    }
}

/// Determinant of a square polynomial matrix.
///
/// The matrix is sampled at `n = deg_bound + 1` points `z⁻¹ = e^{2πik/n}`;
/// the scalar determinants are interpolated back to coefficients by an
/// inverse DFT, which is perfectly conditioned on the unit circle.
pub fn polymat_det(m: &ZPolyMatrix) -> Result<ZPolynomial> {
    if m.rows != m.cols {
        return Err(Error::dims("polymat_det (square)", m.rows, m.cols));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(ZPolynomial::one());
    }
    if n == 1 {
        return Ok(m.entry(0, 0).clone());
    }
    let npts = m.det_degree_bound() + 1;
    let samples: Vec<Complex64> = (0..npts)
        .map(|k| {
            let x = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / npts as f64);
            complex_det(n, m.eval_complex(x))
        })
        .collect();
    let scale = samples.iter().fold(0.0f64, |a, s| a.max(s.norm()));
    let coeffs: Vec<f64> = (0..npts)
        .map(|j| {
            let acc: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(k, s)| s * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / npts as f64))
                .sum();
            let c = acc.re / npts as f64;
            // interpolation noise of exact zeros
            if c.abs() <= 1e-14 * scale {
                0.0
            } else {
                c
            }
        })
        .collect();
    Ok(ZPolynomial::new(coeffs).normalized())
}
