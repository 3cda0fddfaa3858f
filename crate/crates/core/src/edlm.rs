//! Equivalent dynamic linearization: history windows, increment regressors
//! and the pseudo Jacobi matrix (PJM).

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::numeric::{Matrix, ZPolyMatrix, ZPolynomial};

/// A discrete-time plant `y(k+1) = f(y(k..k-n_y), u(k..k-n_u)) + w(k+1)`.
pub trait PlantModel: Send + Sync {
    fn output_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    /// `n_y`: oldest output lag used by `f`.
    fn order_y(&self) -> usize;
    /// `n_u`: oldest input lag used by `f`.
    fn order_u(&self) -> usize;

    /// `(L_y, L_u) = (n_y + 1, n_u + 1)`.
    fn pseudo_orders(&self) -> (usize, usize) {
        (self.order_y() + 1, self.order_u() + 1)
    }

    /// Noise-free `f`, with `h.y(0) = y(k)` and `h.u(0) = u(k)`.
    fn eval(&self, h: &HistoryWindow) -> Result<Vec<f64>>;

    /// `f(...) + w(k+1)`.
    fn step(&self, h: &HistoryWindow, w_next: &[f64]) -> Result<Vec<f64>> {
        check_len("plant disturbance", self.output_dim(), w_next.len())?;
        let mut y = self.eval(h)?;
        for (a, b) in y.iter_mut().zip(w_next) {
            *a += b;
        }
        Ok(y)
    }

    /// Closed-form PJM making the EDLM exact, when the plant has one.
    fn exact_pjm(&self, _h: &HistoryWindow) -> Option<Result<Pjm>> {
        None
    }
}

/// Output and input histories, newest first: `y[i] = y(k-i)`, `u[j] = u(k-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow {
    y: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
}

impl HistoryWindow {
    pub fn new(y: Vec<Vec<f64>>, u: Vec<Vec<f64>>) -> Result<Self> {
        let my = y.first().map_or(0, Vec::len);
        let mu = u.first().map_or(0, Vec::len);
        for v in &y {
            check_len("output history entry", my, v.len())?;
        }
        for v in &u {
            check_len("input history entry", mu, v.len())?;
        }
        Ok(Self { y, u })
    }

    /// Window filled with constant histories.
    pub fn constant(y0: &[f64], u0: &[f64], depth_y: usize, depth_u: usize) -> Self {
        Self {
            y: vec![y0.to_vec(); depth_y],
            u: vec![u0.to_vec(); depth_u],
        }
    }

    pub fn depth_y(&self) -> usize {
        self.y.len()
    }

    pub fn depth_u(&self) -> usize {
        self.u.len()
    }

    pub fn output_dim(&self) -> usize {
        self.y.first().map_or(0, Vec::len)
    }

    pub fn input_dim(&self) -> usize {
        self.u.first().map_or(0, Vec::len)
    }

    /// `y(k - lag)`.
    pub fn y(&self, lag: usize) -> &[f64] {
        &self.y[lag]
    }

    /// `u(k - lag)`.
    pub fn u(&self, lag: usize) -> &[f64] {
        &self.u[lag]
    }

    pub fn require(&self, what: &'static str, depth_y: usize, depth_u: usize) -> Result<()> {
        if self.y.len() < depth_y {
            return Err(Error::InsufficientHistory {
                what,
                needed: depth_y,
                available: self.y.len(),
            });
        }
        if self.u.len() < depth_u {
            return Err(Error::InsufficientHistory {
                what,
                needed: depth_u,
                available: self.u.len(),
            });
        }
        Ok(())
    }

    /// Shifts a new newest output in, dropping the oldest.
    pub fn push_output(&mut self, y: Vec<f64>) {
        self.y.pop();
        self.y.insert(0, y);
    }

    /// Shifts a new newest input in, dropping the oldest.
    pub fn push_input(&mut self, u: Vec<f64>) {
        self.u.pop();
        self.u.insert(0, u);
    }

    /// Overwrites `u(k)`.
    pub fn set_current_input(&mut self, u: Vec<f64>) {
        self.u[0] = u;
    }

    /// The window one step earlier (newest entries dropped).
    pub fn shifted_back(&self) -> Self {
        Self {
            y: self.y[1..].to_vec(),
            u: self.u[1..].to_vec(),
        }
    }

    /// Same histories with `y(k - lag)[c]` offset by `dv`.
    fn perturbed_y(&self, lag: usize, c: usize, dv: f64) -> Self {
        let mut h = self.clone();
        h.y[lag][c] += dv;
        h
    }

    fn perturbed_u(&self, lag: usize, c: usize, dv: f64) -> Self {
        let mut h = self.clone();
        h.u[lag][c] += dv;
        h
    }
}

/// `ΔH(k)`: stacked `Δy(k)…Δy(k-L_y+1)` and `Δu(k)…Δu(k-L_u+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRegressor {
    pub dy: Vec<f64>,
    pub du: Vec<f64>,
}

impl DeltaRegressor {
    pub fn len(&self) -> usize {
        self.dy.len() + self.du.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stacked(&self) -> Vec<f64> {
        let mut v = self.dy.clone();
        v.extend_from_slice(&self.du);
        v
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn delta_regressor(h: &HistoryWindow, ly: usize, lu: usize) -> Result<DeltaRegressor> {
    h.require("delta regressor", ly + 1, lu + 1)?;
    let dy = (0..ly).flat_map(|i| diff(h.y(i), h.y(i + 1))).collect();
    let du = (0..lu).flat_map(|j| diff(h.u(j), h.u(j + 1))).collect();
    Ok(DeltaRegressor { dy, du })
}

/// Pseudo Jacobi matrix: `Φ_1..Φ_{L_y}` (`M_y×M_y`) then `Φ_{L_y+1}..Φ_{L_y+L_u}` (`M_y×M_u`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pjm {
    ly: usize,
    lu: usize,
    my: usize,
    mu: usize,
    blocks: Vec<Vec<f64>>,
}

impl Pjm {
    pub fn new(ly: usize, lu: usize, blocks: Vec<Matrix>) -> Result<Self> {
        check_len("PJM block count", ly + lu, blocks.len())?;
        if ly == 0 || lu == 0 {
            return Err(Error::InvalidConfig("pseudo orders must be at least 1".into()));
        }
        let my = blocks[0].rows();
        let mu = blocks[ly].cols();
        for (i, b) in blocks.iter().enumerate() {
            check_len("PJM block rows", my, b.rows())?;
            check_len("PJM block cols", if i < ly { my } else { mu }, b.cols())?;
        }
        Ok(Self {
            ly,
            lu,
            my,
            mu,
            blocks: blocks.into_iter().map(Matrix::into_vec).collect(),
        })
    }

    pub fn zeros(ly: usize, lu: usize, my: usize, mu: usize) -> Self {
        let mut blocks = vec![vec![0.0; my * my]; ly];
        blocks.extend(vec![vec![0.0; my * mu]; lu]);
        Self { ly, lu, my, mu, blocks }
    }

    /// Scalar PG vector `(φ_1, …, φ_{L_y+L_u})`.
    pub fn siso(ly: usize, phi: &[f64]) -> Result<Self> {
        if phi.len() <= ly {
            return Err(Error::dims("PG vector length", ly + 1, phi.len()));
        }
        let blocks = phi.iter().map(|&v| Matrix::from_row_major(1, 1, vec![v])).collect();
        Self::new(ly, phi.len() - ly, blocks)
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn lu(&self) -> usize {
        self.lu
    }

    pub fn output_dim(&self) -> usize {
        self.my
    }

    pub fn input_dim(&self) -> usize {
        self.mu
    }

    pub fn is_siso(&self) -> bool {
        self.my == 1 && self.mu == 1
    }

    /// Block `Φ_{idx+1}` (zero-based over all `L_y + L_u` blocks).
    pub fn block(&self, idx: usize) -> Matrix {
        let cols = if idx < self.ly { self.my } else { self.mu };
        Matrix::from_row_major(self.my, cols, self.blocks[idx].clone())
    }

    pub fn set_block(&mut self, idx: usize, m: &Matrix) -> Result<()> {
        let cols = if idx < self.ly { self.my } else { self.mu };
        check_len("PJM block rows", self.my, m.rows())?;
        check_len("PJM block cols", cols, m.cols())?;
        self.blocks[idx] = m.as_slice().to_vec();
        Ok(())
    }

    /// `Φ_{i+1}`, coefficient of `Δy(k-i)`.
    pub fn y_block(&self, i: usize) -> Matrix {
        self.block(i)
    }

    /// `Φ_{L_y+j+1}`, coefficient of `Δu(k-j)`.
    pub fn u_block(&self, j: usize) -> Matrix {
        self.block(self.ly + j)
    }

    /// All entries in block order, row-major within each block.
    pub fn flat(&self) -> Vec<f64> {
        self.blocks.concat()
    }

    /// `φ_Lᵀ` as an `M_y × (L_y M_y + L_u M_u)` matrix.
    pub fn row_matrix(&self) -> Matrix {
        let ncol = self.ly * self.my + self.lu * self.mu;
        let mut m = Matrix::zeros(self.my, ncol);
        let mut c0 = 0;
        for idx in 0..self.ly + self.lu {
            let b = self.block(idx);
            m.set_block(0, c0, &b);
            c0 += b.cols();
        }
        m
    }

    /// `φ_Ly(z⁻¹) = Φ_1 + Φ_2 z⁻¹ + …`.
    pub fn phi_ly(&self) -> ZPolyMatrix {
        ZPolyMatrix::from_coefficients(&(0..self.ly).map(|i| self.y_block(i)).collect::<Vec<_>>())
    }

    /// `φ_Lu(z⁻¹) = Φ_{L_y+1} + Φ_{L_y+2} z⁻¹ + …`.
    pub fn phi_lu(&self) -> ZPolyMatrix {
        ZPolyMatrix::from_coefficients(&(0..self.lu).map(|j| self.u_block(j)).collect::<Vec<_>>())
    }

    /// Scalar versions for the SISO loop.
    pub fn phi_ly_scalar(&self) -> Result<ZPolynomial> {
        if !self.is_siso() {
            return Err(Error::NotSiso);
        }
        Ok(self.phi_ly().entry(0, 0).clone())
    }

    pub fn phi_lu_scalar(&self) -> Result<ZPolynomial> {
        if !self.is_siso() {
            return Err(Error::NotSiso);
        }
        Ok(self.phi_lu().entry(0, 0).clone())
    }

    /// Index of the first nonzero input block; the dead time is this plus one.
    pub fn first_input_lag(&self) -> Option<usize> {
        (0..self.lu).find(|&j| self.blocks[self.ly + j].iter().any(|&v| v != 0.0))
    }

    /// `rank Φ_{L_y+1} = M_y`, checked by attempting an LU factorization of
    /// `Φ_{L_y+1} Φ_{L_y+1}ᵀ`.
    pub fn leading_input_rank_full(&self) -> bool {
        let b = self.u_block(0);
        if b.max_abs() == 0.0 {
            return false;
        }
        let gram = b.matmul(&b.transpose()).expect("square gram");
        crate::numeric::Lu::factor(&gram).is_ok()
    }
}

/// `φ_Lᵀ(k)ΔH(k) + Δw(k+1)`.
pub fn edlm_step(pjm: &Pjm, reg: &DeltaRegressor, dw_next: Option<&[f64]>) -> Result<Vec<f64>> {
    check_len("regressor output part", pjm.ly * pjm.my, reg.dy.len())?;
    check_len("regressor input part", pjm.lu * pjm.mu, reg.du.len())?;
    let mut out = pjm.row_matrix().mul_vec(&reg.stacked())?;
    if let Some(dw) = dw_next {
        check_len("disturbance increment", pjm.my, dw.len())?;
        for (o, d) in out.iter_mut().zip(dw) {
            *o += d;
        }
    }
    Ok(out)
}

pub fn pjm_exact(plant: &dyn PlantModel, h: &HistoryWindow) -> Result<Pjm> {
    plant.exact_pjm(h).unwrap_or(Err(Error::MissingExactForm))
}

/// Forward-difference estimate of each partial derivative of `f` with step
/// `probe`. Exact for plants that are affine in their histories; otherwise
/// approximate.
pub fn pjm_secant(plant: &dyn PlantModel, h: &HistoryWindow, probe: f64) -> Result<Pjm> {
    if !(probe > 0.0) {
        return Err(Error::InvalidConfig(format!("secant probe must be positive, got {probe}")));
    }
    let (ly, lu) = plant.pseudo_orders();
    let (my, mu) = (plant.output_dim(), plant.input_dim());
    h.require("secant PJM", ly, lu)?;
    let base = plant.eval(h)?;
    let mut pjm = Pjm::zeros(ly, lu, my, mu);
    for i in 0..ly {
        let mut b = Matrix::zeros(my, my);
        for c in 0..my {
            let f = plant.eval(&h.perturbed_y(i, c, probe))?;
            for r in 0..my {
                b[(r, c)] = (f[r] - base[r]) / probe;
            }
        }
        pjm.set_block(i, &b)?;
    }
    for j in 0..lu {
        let mut b = Matrix::zeros(my, mu);
        for c in 0..mu {
            let f = plant.eval(&h.perturbed_u(j, c, probe))?;
            for r in 0..my {
                b[(r, c)] = (f[r] - base[r]) / probe;
            }
        }
        pjm.set_block(ly + j, &b)?;
    }
    Ok(pjm)
}

/// Exact PJM when available, secant estimate otherwise.
pub fn pjm_for(plant: &dyn PlantModel, h: &HistoryWindow) -> Result<Pjm> {
    match plant.exact_pjm(h) {
        Some(r) => r,
        None => pjm_secant(plant, h, 1e-6),
    }
}

/// Exact coefficient `c` in `Δ(v²) = c·Δv`, with `old = v(t-1)`, `d = Δv(t)`.
pub fn square_increment(old: f64, d: f64) -> f64 {
    2.0 * old + d
}

/// Exact coefficient `c` in `Δ(v³) = c·Δv`.
pub fn cube_increment(old: f64, d: f64) -> f64 {
    3.0 * old * old + 3.0 * old * d + d * d
}
