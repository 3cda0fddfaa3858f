//! Cost, explicit gain, constrained solve and the receding-horizon loop body.

mod config;
pub mod qp;

pub use config::{ConstraintSet, ControlMode, ControllerConfig, PjmMode};
pub use qp::{BoxBall, PgSettings, PgSolution};

use crate::edlm::{delta_regressor, edlm_step, pjm_for, HistoryWindow, PlantModel};
use crate::error::{check_len, Error, Result};
use crate::numeric::{Lu, Matrix};
use crate::prediction::{horizon, lift, HorizonMatrices, LiftedModel, LiftedState};

/// One solved horizon problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlStep {
    /// `ΔU_N(k)`.
    pub du: Vec<f64>,
    pub u_prev: Vec<f64>,
    /// `u(k) = u(k-1) + gᵀΔU_N(k)`.
    pub u_applied: Vec<f64>,
    /// `Y_N(k+1)` under `du`.
    pub predicted_y: Vec<f64>,
    pub cost: f64,
    /// Linear solves plus projected-gradient iterations.
    pub solver_iters: usize,
    /// Constraint violation of the planned inputs, when constraints apply.
    pub planned_violation: Option<f64>,
}

/// `(Y*−Y)ᵀQ(Y*−Y) + λ·ΔUᵀΔU`.
pub fn cost(cfg: &ControllerConfig, ystar: &[f64], ypred: &[f64], du: &[f64]) -> Result<f64> {
    check_len("cost prediction", ystar.len(), ypred.len())?;
    if !ystar.len().is_multiple_of(cfg.horizon) {
        return Err(Error::dims("cost reference", cfg.horizon, ystar.len()));
    }
    let q = cfg.q_diag(ystar.len() / cfg.horizon)?;
    let tracking: f64 = ystar
        .iter()
        .zip(ypred)
        .zip(&q)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum();
    Ok(tracking + cfg.lambda * du.iter().map(|v| v * v).sum::<f64>())
}

fn weighted_normal(hm: &HorizonMatrices, cfg: &ControllerConfig) -> Result<(Matrix, Matrix)> {
    let q = cfg.q_diag(hm.my)?;
    let mut qphi = hm.phi_t.clone();
    for (r, w) in q.iter().enumerate() {
        for c in 0..qphi.cols() {
            qphi[(r, c)] *= w;
        }
    }
    let ptq = qphi.transpose();
    let mut normal = ptq.matmul(&hm.phi_t)?;
    for i in 0..normal.rows() {
        normal[(i, i)] += cfg.effective_lambda();
    }
    Ok((normal, ptq))
}

/// `P(k) = [Φ̃ᵀQΦ̃ + λ]⁻¹Φ̃ᵀQ`.
pub fn gain(hm: &HorizonMatrices, cfg: &ControllerConfig) -> Result<Matrix> {
    let (normal, ptq) = weighted_normal(hm, cfg)?;
    let lu = Lu::factor(&normal).map_err(|e| Error::SingularNormalMatrix { cause: Box::new(e) })?;
    lu.solve_matrix(&ptq)
}

fn finish(
    hm: &HorizonMatrices,
    cfg: &ControllerConfig,
    ystar: &[f64],
    free: &[f64],
    du: Vec<f64>,
    u_prev: &[f64],
    solver_iters: usize,
) -> Result<ControlStep> {
    let predicted_y = hm.predict(free, &du)?;
    let cost = cost(cfg, ystar, &predicted_y, &du)?;
    let u_applied = u_prev.iter().zip(&du).map(|(a, b)| a + b).collect();
    Ok(ControlStep {
        du,
        u_prev: u_prev.to_vec(),
        u_applied,
        predicted_y,
        cost,
        solver_iters,
        planned_violation: None,
    })
}

/// Closed-form minimizer `ΔU = P[Y* − Ey − Ψ̃Δx − Φ̃_wΔŴ]`.
pub fn unconstrained_step(
    hm: &HorizonMatrices,
    cfg: &ControllerConfig,
    ystar: &[f64],
    y_now: &[f64],
    dx: &LiftedState,
    u_prev: &[f64],
    dw_hat: Option<&[f64]>,
) -> Result<ControlStep> {
    check_len("reference stack", hm.n * hm.my, ystar.len())?;
    check_len("previous input", hm.mu, u_prev.len())?;
    let free = hm.free_response(y_now, dx, dw_hat)?;
    let resid: Vec<f64> = ystar.iter().zip(&free).map(|(a, b)| a - b).collect();
    let du = gain(hm, cfg)?.mul_vec(&resid)?;
    finish(hm, cfg, ystar, &free, du, u_prev, 1)
}

/// Absolute inputs `u(k+i) = u(k-1) + Σ_{l≤i} Δu(k+l)`.
pub fn cumulative_inputs(u_prev: &[f64], du: &[f64]) -> Vec<f64> {
    let mu = u_prev.len();
    let mut acc = u_prev.to_vec();
    let mut out = Vec::with_capacity(du.len());
    for chunk in du.chunks(mu) {
        for (a, d) in acc.iter_mut().zip(chunk) {
            *a += d;
        }
        out.extend_from_slice(&acc);
    }
    out
}

fn constraint_box(cset: &ConstraintSet, n: usize, mu: usize) -> BoxBall {
    BoxBall {
        lo: (0..n * mu).map(|i| cset.lo(i % mu)).collect(),
        hi: (0..n * mu).map(|i| cset.hi(i % mu)).collect(),
        cap: cset.energy_cap,
    }
}

/// Minimizes the cost over inputs satisfying `cset` on the whole horizon.
///
/// Optimizes directly over the absolute inputs `U`, where the feasible set
/// is box ∩ ball, with `ΔU = DU − [u(k−1); 0; …]`.
#[allow(clippy::too_many_arguments)]
pub fn constrained_step(
    hm: &HorizonMatrices,
    cfg: &ControllerConfig,
    cset: &ConstraintSet,
    ystar: &[f64],
    y_now: &[f64],
    dx: &LiftedState,
    u_prev: &[f64],
    dw_hat: Option<&[f64]>,
    settings: PgSettings,
) -> Result<ControlStep> {
    let (n, mu) = (hm.n, hm.mu);
    cset.validate(mu)?;
    let set = constraint_box(cset, n, mu);
    set.check_feasible()?;
    let mut step = unconstrained_step(hm, cfg, ystar, y_now, dx, u_prev, dw_hat)?;
    let u_free = cumulative_inputs(u_prev, &step.du);
    if set.violation(&u_free) <= 0.0 {
        step.planned_violation = Some(set.violation(&u_free).max(0.0));
        return Ok(step);
    }

    let free = hm.free_response(y_now, dx, dw_hat)?;
    let resid: Vec<f64> = ystar.iter().zip(&free).map(|(a, b)| a - b).collect();
    let (normal, ptq) = weighted_normal(hm, cfg)?;
    let h0 = normal.scale(2.0);
    let g0: Vec<f64> = ptq.mul_vec(&resid)?.iter().map(|v| -2.0 * v).collect();
    let nu = n * mu;
    let mut d = Matrix::identity(nu);
    for i in mu..nu {
        d[(i, i - mu)] = -1.0;
    }
    let mut c = vec![0.0; nu];
    c[..mu].copy_from_slice(u_prev);
    let h = d.transpose().matmul(&h0)?.matmul(&d)?;
    let h0c = h0.mul_vec(&c)?;
    let shifted: Vec<f64> = g0.iter().zip(&h0c).map(|(a, b)| a - b).collect();
    let g = d.tr_mul_vec(&shifted)?;

    let sol = qp::projected_gradient(&h, &g, &set, &u_free, settings)?;
    let mut du = d.mul_vec(&sol.x)?;
    for (v, cv) in du.iter_mut().zip(&c) {
        *v -= cv;
    }
    let mut out = finish(hm, cfg, ystar, &free, du, u_prev, 1 + sol.iterations)?;
    out.planned_violation = Some(set.violation(&sol.x).max(0.0));
    Ok(out)
}

/// `u(k) = u(k−1) + gᵀΔU_N(k)`.
pub fn receding_horizon_apply(step: &ControlStep) -> Vec<f64> {
    step.u_prev.iter().zip(&step.du).map(|(a, b)| a + b).collect()
}

/// A controller decision at time `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub step: ControlStep,
    /// Horizon problems solved (1 for frozen PJMs).
    pub refinements: usize,
}

/// Receding-horizon controller for one plant.
#[derive(Debug, Clone)]
pub struct MpcController {
    pub cfg: ControllerConfig,
    pub constraints: Option<ConstraintSet>,
    pub settings: PgSettings,
}

const FIXED_POINT_TOL: f64 = 1e-8;
const FIXED_POINT_MAX: usize = 10;

impl MpcController {
    pub fn new(cfg: ControllerConfig, constraints: Option<ConstraintSet>) -> Self {
        Self {
            cfg,
            constraints,
            settings: PgSettings::default(),
        }
    }

    fn solve(
        &self,
        hm: &HorizonMatrices,
        ystar: &[f64],
        y_now: &[f64],
        dx: &LiftedState,
        u_prev: &[f64],
        dw: Option<&[f64]>,
    ) -> Result<ControlStep> {
        match (&self.constraints, self.cfg.mode.constrained()) {
            (Some(cset), true) => constrained_step(hm, &self.cfg, cset, ystar, y_now, dx, u_prev, dw, self.settings),
            (None, true) => Err(Error::InvalidConfig("constrained mode requires a constraint set".into())),
            _ => unconstrained_step(hm, &self.cfg, ystar, y_now, dx, u_prev, dw),
        }
    }

    /// Lifted models along the trajectory predicted by the EDLM under `du`.
    pub fn rollout(
        &self,
        plant: &dyn PlantModel,
        window: &HistoryWindow,
        du: &[f64],
        dw: Option<&[f64]>,
    ) -> Result<Vec<LiftedModel>> {
        let (ly, lu) = plant.pseudo_orders();
        let (my, mu) = (plant.output_dim(), plant.input_dim());
        let mut w = window.clone();
        let mut u = window.u(1).to_vec();
        let mut seq = Vec::with_capacity(self.cfg.horizon);
        for i in 0..self.cfg.horizon {
            for (a, d) in u.iter_mut().zip(&du[i * mu..(i + 1) * mu]) {
                *a += d;
            }
            w.set_current_input(u.clone());
            let pjm = pjm_for(plant, &w)?;
            let reg = delta_regressor(&w, ly, lu)?;
            let dy = edlm_step(&pjm, &reg, dw.map(|d| &d[i * my..(i + 1) * my]))?;
            seq.push(lift(&pjm));
            let y_next = w.y(0).iter().zip(&dy).map(|(a, b)| a + b).collect();
            w.push_output(y_next);
            w.push_input(u.clone());
        }
        Ok(seq)
    }

    /// Decides `u(k)`. `window.y(0) = y(k)`, `window.u(1) = u(k−1)`; the
    /// `u(0)` slot is overwritten with the tentative `u(k) = u(k−1)`.
    pub fn decide(
        &self,
        plant: &dyn PlantModel,
        window: &HistoryWindow,
        ystar: &[f64],
        dw_preview: Option<&[f64]>,
    ) -> Result<Decision> {
        let (ly, lu) = plant.pseudo_orders();
        let (my, mu) = (plant.output_dim(), plant.input_dim());
        self.cfg.validate(my, (ly, lu))?;
        let n = self.cfg.horizon;
        check_len("reference stack", n * my, ystar.len())?;
        if let Some(dw) = dw_preview {
            check_len("disturbance preview", n * my, dw.len())?;
        }
        let mut w = window.clone();
        let u_prev = w.u(1).to_vec();
        w.set_current_input(u_prev.clone());
        let dx = LiftedState::from_window(&w, ly, lu)?;
        let y_now = w.y(0).to_vec();

        match self.cfg.pjm_mode {
            PjmMode::Frozen => {
                let pjm = pjm_for(plant, &w)?;
                let hm = horizon(&vec![lift(&pjm); n])?;
                let step = self.solve(&hm, ystar, &y_now, &dx, &u_prev, dw_preview)?;
                Ok(Decision { step, refinements: 1 })
            }
            PjmMode::FixedPoint => {
                let mut du = vec![0.0; n * mu];
                let mut iters = 0;
                let mut refinements = 0;
                loop {
                    let seq = self.rollout(plant, &w, &du, dw_preview)?;
                    let hm = horizon(&seq)?;
                    let mut step = self.solve(&hm, ystar, &y_now, &dx, &u_prev, dw_preview)?;
                    refinements += 1;
                    iters += step.solver_iters;
                    let change = step.du.iter().zip(&du).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    du.clone_from(&step.du);
                    if change < FIXED_POINT_TOL || refinements >= FIXED_POINT_MAX {
                        step.solver_iters = iters;
                        return Ok(Decision { step, refinements });
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edlm::Pjm;
    use crate::prediction::horizon_frozen;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, my: usize, mu: usize) -> (HorizonMatrices, Vec<f64>, Vec<f64>, LiftedState) {
        let (ly, lu) = (2, 2);
        let mut p = Pjm::zeros(ly, lu, my, mu);
        for idx in 0..ly + lu {
            let cols = if idx < ly { my } else { mu };
            let mut m = Matrix::zeros(my, cols);
            for r in 0..my {
                for c in 0..cols {
                    m[(r, c)] = rng.gen_range(-1.0..1.0);
                }
            }
            if idx == ly {
                for r in 0..my.min(mu) {
                    m[(r, r)] += 2.0;
                }
            }
            p.set_block(idx, &m).unwrap();
        }
        let hm = horizon_frozen(&p, n).unwrap();
        let ystar = (0..n * my).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y = (0..my).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dx = LiftedState((0..hm.state_dim()).map(|_| rng.gen_range(-0.5..0.5)).collect());
        (hm, ystar, y, dx)
    }

    #[test]
    fn cost_examples() {
        let cfg = ControllerConfig::new(2, 0.0);
        assert_eq!(cost(&cfg, &[1.0, 2.0], &[1.0, 2.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(cost(&cfg, &[1.0, -1.0], &[0.0, 0.0], &[0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn cost_matches_scalar_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..2.0)).collect();
        let cfg = ControllerConfig::new(3, 0.7).with_q(q.clone());
        let a: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let du: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut want = 0.0;
        for i in 0..6 {
            want += q[i] * (a[i] - b[i]).powi(2);
        }
        for v in &du {
            want += 0.7 * v * v;
        }
        assert!((cost(&cfg, &a, &b, &du).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn scalar_gain() {
        let hm = horizon_frozen(&Pjm::siso(1, &[0.0, 2.0]).unwrap(), 1).unwrap();
        let p = gain(&hm, &ControllerConfig::new(1, 0.0)).unwrap();
        assert!((p[(0, 0)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singular_normal_matrix_suggests_ridge() {
        // dead time 2 with N = 1: Φ̃ = 0
        let hm = horizon_frozen(&Pjm::siso(1, &[0.5, 0.0, 1.0]).unwrap(), 1).unwrap();
        let err = gain(&hm, &ControllerConfig::new(1, 0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularNormalMatrix { .. }));
        let msg = err.to_string();
        assert!(msg.contains("ridge") && msg.contains("lambda"), "{msg}");
        assert!(gain(&hm, &ControllerConfig::new(1, 0.0).with_ridge(1e-9)).is_ok());
    }

    #[test]
    fn gain_shrinks_with_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (hm, ..) = random_instance(&mut rng, 3, 1, 1);
        let norms: Vec<f64> = [1e2, 1e4, 1e6]
            .iter()
            .map(|&l| gain(&hm, &ControllerConfig::new(3, l)).unwrap().frobenius())
            .collect();
        assert!(norms[0] > norms[1] && norms[1] > norms[2]);
    }

    #[test]
    fn gain_residual() {
        let p = Pjm::siso(2, &[0.0, 0.8, 0.0, 0.0, 0.0, 1.0, 0.5]).unwrap();
        let hm = horizon_frozen(&p, 4).unwrap();
        let pm = gain(&hm, &ControllerConfig::new(4, 1.0)).unwrap();
        let mut normal = hm.phi_t.transpose().matmul(&hm.phi_t).unwrap();
        for i in 0..4 {
            normal[(i, i)] += 1.0;
        }
        let lhs = normal.matmul(&pm).unwrap();
        assert!(lhs.sub(&hm.phi_t.transpose()).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn reference_on_free_response_keeps_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (hm, _, y, dx) = random_instance(&mut rng, 3, 2, 2);
        let free = hm.free_response(&y, &dx, None).unwrap();
        let s = unconstrained_step(&hm, &ControllerConfig::new(3, 0.5), &free, &y, &dx, &[0.3, -0.1], None).unwrap();
        assert!(s.du.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(receding_horizon_apply(&s), vec![0.3, -0.1]);
    }

    #[test]
    fn one_step_closed_form() {
        let (p1, p2) = (0.6, 1.7);
        let hm = horizon_frozen(&Pjm::siso(1, &[p1, p2]).unwrap(), 1).unwrap();
        let (y, dy, ystar) = (0.4, 0.25, 1.3);
        let dx = LiftedState(vec![dy, 0.0]);
        let s = unconstrained_step(&hm, &ControllerConfig::new(1, 0.0), &[ystar], &[y], &dx, &[0.0], None).unwrap();
        assert!((s.du[0] - (ystar - y - p1 * dy) / p2).abs() < 1e-13);
    }

    #[test]
    fn receding_horizon_additivity() {
        let s = ControlStep {
            du: vec![0.1, -0.2, 5.0, 5.0],
            u_prev: vec![1.0, 1.0],
            u_applied: vec![1.1, 0.8],
            predicted_y: vec![],
            cost: 0.0,
            solver_iters: 0,
            planned_violation: None,
        };
        assert_eq!(receding_horizon_apply(&s), vec![1.1, 0.8]);
    }

    #[test]
    fn inactive_constraints_match_unconstrained() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (hm, ystar, y, dx) = random_instance(&mut rng, 3, 2, 2);
        let cfg = ControllerConfig::new(3, 0.2);
        let cs = ConstraintSet::boxed(vec![Some(-1e3); 2], vec![Some(1e3); 2]).with_energy_cap(1e9);
        let a = unconstrained_step(&hm, &cfg, &ystar, &y, &dx, &[0.0, 0.0], None).unwrap();
        let b = constrained_step(&hm, &cfg, &cs, &ystar, &y, &dx, &[0.0, 0.0], None, PgSettings::default()).unwrap();
        for (x, z) in a.du.iter().zip(&b.du) {
            assert!((x - z).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_search_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5 {
            let (hm, ystar, y, dx) = random_instance(&mut rng, 2, 1, 1);
            let cfg = ControllerConfig::new(2, 0.1);
            let cs = ConstraintSet::boxed(vec![Some(-0.3)], vec![Some(0.25)]).with_energy_cap(0.1);
            let u_prev = [0.05];
            let s = constrained_step(&hm, &cfg, &cs, &ystar, &y, &dx, &u_prev, None, PgSettings::default()).unwrap();
            let free = hm.free_response(&y, &dx, None).unwrap();
            let mut best = (f64::INFINITY, [0.0, 0.0]);
            let steps = 600;
            for i in 0..=steps {
                let u0 = -0.3 + 0.55 * i as f64 / steps as f64;
                if u0 * u0 > 0.1 {
                    continue;
                }
                // grid column clipped to the disc, with its exact end points
                let r = (0.1 - u0 * u0).sqrt();
                let (a, b) = ((-0.3f64).max(-r), 0.25f64.min(r));
                let candidates = (0..=steps).map(|j| -0.3 + 0.55 * j as f64 / steps as f64).chain([a, b]);
                for u1 in candidates.filter(|&v| v >= a && v <= b) {
                    let du = [u0 - u_prev[0], u1 - u0];
                    let j_val = cost(&cfg, &ystar, &hm.predict(&free, &du).unwrap(), &du).unwrap();
                    if j_val < best.0 {
                        best = (j_val, [u0, u1]);
                    }
                }
            }
            let u = cumulative_inputs(&u_prev, &s.du);
            assert!((u[0] - best.1[0]).abs() < 2e-3 && (u[1] - best.1[1]).abs() < 2e-3, "{u:?} vs {:?}", best.1);
            assert!(s.cost <= best.0 + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn stationarity_and_perturbation_probe(seed in 0u64..500, n in 1usize..=4, my in 1usize..=2, mu in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (hm, ystar, y, dx) = random_instance(&mut rng, n, my, mu);
            let cfg = ControllerConfig::new(n, rng.gen_range(0.01..2.0));
            let s = unconstrained_step(&hm, &cfg, &ystar, &y, &dx, &vec![0.0; mu], None).unwrap();
            // 2Φ̃ᵀQ(Y − Y*) + 2λΔU = 0
            let err: Vec<f64> = s.predicted_y.iter().zip(&ystar).map(|(a, b)| a - b).collect();
            let g = hm.phi_t.tr_mul_vec(&err).unwrap();
            for (gi, di) in g.iter().zip(&s.du) {
                prop_assert!((2.0 * gi + 2.0 * cfg.lambda * di).abs() < 1e-8);
            }
            let free = hm.free_response(&y, &dx, None).unwrap();
            for _ in 0..20 {
                let pert: Vec<f64> = s.du.iter().map(|v| v + rng.gen_range(-0.1..0.1)).collect();
                let jp = cost(&cfg, &ystar, &hm.predict(&free, &pert).unwrap(), &pert).unwrap();
                prop_assert!(s.cost <= jp + 1e-12);
            }
        }

        #[test]
        fn lambda_damps_increments(seed in 0u64..500, l1 in 0.0f64..3.0, extra in 0.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (hm, ystar, y, dx) = random_instance(&mut rng, 3, 2, 2);
            let norm = |l: f64| {
                let s = unconstrained_step(&hm, &ControllerConfig::new(3, l), &ystar, &y, &dx, &[0.0, 0.0], None).unwrap();
                s.du.iter().map(|v| v * v).sum::<f64>().sqrt()
            };
            prop_assert!(norm(l1 + extra) <= norm(l1) + 1e-10);
        }

        #[test]
        fn constrained_steps_are_feasible(seed in 0u64..300, cap in 0.05f64..2.0, hi in 0.0f64..0.8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (hm, ystar, y, dx) = random_instance(&mut rng, 3, 2, 2);
            let cfg = ControllerConfig::new(3, 0.05);
            let cs = ConstraintSet::boxed(vec![Some(-5.0), None], vec![Some(hi), None]).with_energy_cap(cap);
            let s = constrained_step(&hm, &cfg, &cs, &ystar, &y, &dx, &[0.1, -0.1], None, PgSettings::default()).unwrap();
            let u = cumulative_inputs(&[0.1, -0.1], &s.du);
            prop_assert!(cs.violation(&u, 2) <= 1e-8);
            prop_assert_eq!(s.u_applied.clone(), receding_horizon_apply(&s));
        }
    }
}
