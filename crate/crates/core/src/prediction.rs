//! Lifted companion form of the EDLM and the N-step prediction matrices.

use crate::edlm::{DeltaRegressor, HistoryWindow, Pjm};
use crate::error::{check_len, Error, Result};
use crate::numeric::Matrix;

/// `Δx(k+1) = AΔx(k) + BΔu(k) + TΔw(k+1)`, `Δy(k+1) = CΔx(k+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedModel {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub t: Matrix,
    pub ly: usize,
    pub lu: usize,
    pub my: usize,
    pub mu: usize,
}

impl LiftedModel {
    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }
}

/// `Δx(k) = [Δy(k)…Δy(k-L_y+1); Δu(k-1)…Δu(k-L_u)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState(pub Vec<f64>);

impl LiftedState {
    /// Reads `Δx(k)` from a window whose `u(0)` slot holds `u(k)` (possibly
    /// tentative); only `u(1)` and older enter the state.
    pub fn from_window(h: &HistoryWindow, ly: usize, lu: usize) -> Result<Self> {
        h.require("lifted state", ly + 1, lu + 2)?;
        let mut v = Vec::new();
        for i in 0..ly {
            v.extend(h.y(i).iter().zip(h.y(i + 1)).map(|(a, b)| a - b));
        }
        for j in 1..=lu {
            v.extend(h.u(j).iter().zip(h.u(j + 1)).map(|(a, b)| a - b));
        }
        Ok(Self(v))
    }

    /// Regressor `ΔH(k)` for a given `Δu(k)`.
    pub fn regressor(&self, du_now: &[f64], ly: usize, lu: usize, my: usize) -> DeltaRegressor {
        let dy = self.0[..ly * my].to_vec();
        let mut du = du_now.to_vec();
        du.extend_from_slice(&self.0[ly * my..ly * my + (lu - 1) * du_now.len()]);
        DeltaRegressor { dy, du }
    }
}

pub fn lift(pjm: &Pjm) -> LiftedModel {
    let (ly, lu, my, mu) = (pjm.ly(), pjm.lu(), pjm.output_dim(), pjm.input_dim());
    let uoff = ly * my;
    let n = uoff + lu * mu;
    let mut a = Matrix::zeros(n, n);
    for i in 0..ly {
        a.set_block(0, i * my, &pjm.y_block(i));
    }
    for m in 0..lu - 1 {
        a.set_block(0, uoff + m * mu, &pjm.u_block(m + 1));
    }
    for i in 1..ly {
        a.set_block(i * my, (i - 1) * my, &Matrix::identity(my));
    }
    for m in 1..lu {
        a.set_block(uoff + m * mu, uoff + (m - 1) * mu, &Matrix::identity(mu));
    }
    let mut b = Matrix::zeros(n, mu);
    b.set_block(0, 0, &pjm.u_block(0));
    b.set_block(uoff, 0, &Matrix::identity(mu));
    let mut t = Matrix::zeros(n, my);
    t.set_block(0, 0, &Matrix::identity(my));
    LiftedModel {
        a,
        b,
        c: t.transpose(),
        t,
        ly,
        lu,
        my,
        mu,
    }
}

pub fn propagate(model: &LiftedModel, dx: &LiftedState, du: &[f64], dw: &[f64]) -> Result<LiftedState> {
    check_len("propagate input increment", model.mu, du.len())?;
    check_len("propagate disturbance increment", model.my, dw.len())?;
    let mut x = model.a.mul_vec(&dx.0)?;
    for (xi, v) in x.iter_mut().zip(model.b.mul_vec(du)?) {
        *xi += v;
    }
    for (xi, v) in x.iter_mut().zip(model.t.mul_vec(dw)?) {
        *xi += v;
    }
    Ok(LiftedState(x))
}

/// Prediction matrices over the horizon `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonMatrices {
    pub n: usize,
    pub my: usize,
    pub mu: usize,
    pub ly: usize,
    pub lu: usize,
    pub psi: Matrix,
    pub psi_t: Matrix,
    pub phi: Matrix,
    pub phi_t: Matrix,
    pub phi_w: Matrix,
    pub phi_w_t: Matrix,
    /// `N` stacked `M_y` identities.
    pub e: Matrix,
    /// Block lower-triangular matrix of identities.
    pub a_n: Matrix,
}

/// Block prefix sums over row blocks of height `my` (same as `A_N·m`).
fn accumulate(m: &Matrix, my: usize) -> Matrix {
    let mut out = m.clone();
    let nb = m.rows() / my;
    for j in 1..nb {
        for r in 0..my {
            for c in 0..m.cols() {
                out[(j * my + r, c)] += out[((j - 1) * my + r, c)];
            }
        }
    }
    out
}

/// Builds Ψ, Φ, Φ_w for lifted models `seq[i]` valid at time `k+i`.
pub fn horizon(seq: &[LiftedModel]) -> Result<HorizonMatrices> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1".into()));
    }
    let m0 = &seq[0];
    let (my, mu, nx) = (m0.my, m0.mu, m0.state_dim());
    for m in seq {
        check_len("horizon state dimension", nx, m.state_dim())?;
    }
    let mut psi = Matrix::zeros(n * my, nx);
    let mut prod = m0.a.clone();
    for j in 0..n {
        if j > 0 {
            prod = seq[j].a.matmul(&prod)?;
        }
        psi.set_block(j * my, 0, &m0.c.matmul(&prod)?);
    }
    let mut phi = Matrix::zeros(n * my, n * mu);
    let mut phi_w = Matrix::zeros(n * my, n * my);
    for i in 0..n {
        let mut xb = seq[i].b.clone();
        let mut xw = seq[i].t.clone();
        for j in i..n {
            if j > i {
                xb = seq[j].a.matmul(&xb)?;
                xw = seq[j].a.matmul(&xw)?;
            }
            phi.set_block(j * my, i * mu, &m0.c.matmul(&xb)?);
            phi_w.set_block(j * my, i * my, &m0.c.matmul(&xw)?);
        }
    }
    let mut e = Matrix::zeros(n * my, my);
    let mut a_n = Matrix::zeros(n * my, n * my);
    for j in 0..n {
        e.set_block(j * my, 0, &Matrix::identity(my));
        for i in 0..=j {
            a_n.set_block(j * my, i * my, &Matrix::identity(my));
        }
    }
    Ok(HorizonMatrices {
        n,
        my,
        mu,
        ly: m0.ly,
        lu: m0.lu,
        psi_t: accumulate(&psi, my),
        phi_t: accumulate(&phi, my),
        phi_w_t: accumulate(&phi_w, my),
        psi,
        phi,
        phi_w,
        e,
        a_n,
    })
}

/// Horizon with the PJM frozen at its current value.
pub fn horizon_frozen(pjm: &Pjm, n: usize) -> Result<HorizonMatrices> {
    horizon(&vec![lift(pjm); n])
}

impl HorizonMatrices {
    pub fn state_dim(&self) -> usize {
        self.psi.cols()
    }

    /// `E·y(k) + Ψ̃Δx + Φ̃_wΔŴ`.
    pub fn free_response(&self, y_now: &[f64], dx: &LiftedState, dw_hat: Option<&[f64]>) -> Result<Vec<f64>> {
        check_len("free response output", self.my, y_now.len())?;
        let mut out = self.e.mul_vec(y_now)?;
        for (o, v) in out.iter_mut().zip(self.psi_t.mul_vec(&dx.0)?) {
            *o += v;
        }
        if let Some(dw) = dw_hat {
            for (o, v) in out.iter_mut().zip(self.phi_w_t.mul_vec(dw)?) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// Free response plus `Φ̃ΔU`.
    pub fn predict(&self, free: &[f64], du: &[f64]) -> Result<Vec<f64>> {
        let forced = self.phi_t.mul_vec(du)?;
        Ok(free.iter().zip(forced).map(|(a, b)| a + b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edlm::edlm_step;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pjm(rng: &mut ChaCha8Rng, ly: usize, lu: usize, my: usize, mu: usize) -> Pjm {
        let mut p = Pjm::zeros(ly, lu, my, mu);
        for idx in 0..ly + lu {
            let cols = if idx < ly { my } else { mu };
            let m = Matrix::from_row_major(my, cols, (0..my * cols).map(|_| rng.gen_range(-1.0..1.0)).collect());
            p.set_block(idx, &m).unwrap();
        }
        p
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn siso_layout() {
        let m = lift(&Pjm::siso(1, &[0.4, 2.0]).unwrap());
        assert_eq!(m.a, Matrix::from_rows(&[vec![0.4, 0.0], vec![0.0, 0.0]]));
        assert_eq!(m.b, Matrix::column(&[2.0, 1.0]));
        assert_eq!(m.c, Matrix::from_rows(&[vec![1.0, 0.0]]));
    }

    #[test]
    fn zero_pjm_has_only_shifts() {
        let m = lift(&Pjm::zeros(2, 3, 1, 1));
        assert_eq!(m.c.matmul(&m.b).unwrap().max_abs(), 0.0);
        assert_eq!(m.a.as_slice().iter().sum::<f64>(), 1.0 + 2.0);
        assert_eq!(m.c.matmul(&m.t).unwrap(), Matrix::identity(1));
    }

    #[test]
    fn mimo_layout_places_second_output_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_pjm(&mut rng, 2, 4, 2, 2);
        let m = lift(&p);
        assert_eq!(m.a.rows(), 2 * 2 + 4 * 2);
        assert_eq!(m.a.block(0, 2, 2, 2), p.y_block(1));
        assert_eq!(m.a.block(0, 4, 2, 2), p.u_block(1));
        assert_eq!(m.a.block(0, 10, 2, 2).max_abs(), 0.0);
        assert_eq!(m.b.block(4, 0, 2, 2), Matrix::identity(2));
    }

    #[test]
    fn single_step_horizon() {
        let p = Pjm::siso(1, &[0.4, 2.0]).unwrap();
        let m = lift(&p);
        let hm = horizon_frozen(&p, 1).unwrap();
        assert_eq!(hm.psi, m.c.matmul(&m.a).unwrap());
        assert_eq!(hm.phi, m.c.matmul(&m.b).unwrap());
        assert_eq!(hm.phi_w, Matrix::identity(1));
    }

    #[test]
    fn two_step_hand_product() {
        let p = Pjm::siso(1, &[0.4, 2.0]).unwrap();
        let m = lift(&p);
        let hm = horizon_frozen(&p, 2).unwrap();
        let b = m.c.matmul(&m.b).unwrap()[(0, 0)];
        let cab = m.c.matmul(&m.a).unwrap().matmul(&m.b).unwrap()[(0, 0)];
        assert_eq!(hm.phi, Matrix::from_rows(&[vec![b, 0.0], vec![cab, b]]));
        assert_eq!(hm.phi_t, Matrix::from_rows(&[vec![b, 0.0], vec![cab + b, b]]));
    }

    #[test]
    fn accumulated_psi_second_row() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let seq: Vec<_> = (0..2).map(|_| lift(&random_pjm(&mut rng, 2, 2, 1, 1))).collect();
        let hm = horizon(&seq).unwrap();
        let ca = seq[0].c.matmul(&seq[0].a).unwrap();
        let caa = seq[0].c.matmul(&seq[1].a.matmul(&seq[0].a).unwrap()).unwrap();
        let row = caa.add(&ca).unwrap();
        for c in 0..row.cols() {
            assert!((hm.psi_t[(1, c)] - row[(0, c)]).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_hold_free_response() {
        let p = Pjm::siso(2, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let hm = horizon_frozen(&p, 3).unwrap();
        let free = hm.free_response(&[1.5], &LiftedState(vec![0.0; 2 + 2]), None).unwrap();
        assert_eq!(free, vec![1.5; 3]);
    }

    #[test]
    fn propagate_matches_edlm_and_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_pjm(&mut rng, 3, 3, 2, 2);
        let m = lift(&p);
        let dx = LiftedState(rand_vec(&mut rng, m.state_dim()));
        let du = rand_vec(&mut rng, 2);
        let dw = rand_vec(&mut rng, 2);
        let next = propagate(&m, &dx, &du, &dw).unwrap();
        let step = edlm_step(&p, &dx.regressor(&du, 3, 3, 2), Some(&dw)).unwrap();
        for r in 0..2 {
            assert!((next.0[r] - step[r]).abs() < 1e-14);
        }
        assert_eq!(&next.0[2..6], &dx.0[0..4]);
        assert_eq!(&next.0[6..8], &du[..]);
        assert_eq!(&next.0[8..12], &dx.0[6..10]);
        let zero = propagate(&m, &LiftedState(vec![0.0; 12]), &[0.0; 2], &[0.0; 2]).unwrap();
        assert!(zero.0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frozen_phi_is_block_toeplitz() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hm = horizon_frozen(&random_pjm(&mut rng, 2, 3, 2, 2), 5).unwrap();
        for j in 1..5 {
            for i in 1..=j {
                assert_eq!(hm.phi.block(j * 2, i * 2, 2, 2), hm.phi.block((j - 1) * 2, (i - 1) * 2, 2, 2));
            }
        }
    }

    proptest! {
        #[test]
        fn tilde_matrices_equal_a_n_products(seed in 0u64..1000, n in 1usize..=8, my in 1usize..=2, mu in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq: Vec<_> = (0..n).map(|_| lift(&random_pjm(&mut rng, 2, 3, my, mu))).collect();
            let hm = horizon(&seq).unwrap();
            for (tilde, raw) in [(&hm.psi_t, &hm.psi), (&hm.phi_t, &hm.phi), (&hm.phi_w_t, &hm.phi_w)] {
                let prod = hm.a_n.matmul(raw).unwrap();
                prop_assert!(prod.sub(tilde).unwrap().max_abs() <= 1e-12 * (1.0 + prod.max_abs()));
            }
            for j in 0..n {
                for i in j + 1..n {
                    prop_assert_eq!(hm.phi.block(j * my, i * mu, my, mu).max_abs(), 0.0);
                }
            }
        }

        #[test]
        fn matrix_prediction_equals_recursion(seed in 0u64..1000, n in 1usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (ly, lu, my, mu) = (2, 3, 2, 2);
            let seq: Vec<_> = (0..n).map(|_| lift(&random_pjm(&mut rng, ly, lu, my, mu))).collect();
            let hm = horizon(&seq).unwrap();
            let y0 = rand_vec(&mut rng, my);
            let dx0 = LiftedState(rand_vec(&mut rng, hm.state_dim()));
            let du = rand_vec(&mut rng, n * mu);
            let dw = rand_vec(&mut rng, n * my);
            let free = hm.free_response(&y0, &dx0, Some(&dw)).unwrap();
            let pred = hm.predict(&free, &du).unwrap();
            let mut dx = dx0;
            let mut y = y0;
            for i in 0..n {
                dx = propagate(&seq[i], &dx, &du[i * mu..(i + 1) * mu], &dw[i * my..(i + 1) * my]).unwrap();
                for r in 0..my {
                    y[r] += dx.0[r];
                    prop_assert!((y[r] - pred[i * my + r]).abs() <= 1e-12 * (1.0 + y[r].abs()));
                }
            }
        }
    }
}
