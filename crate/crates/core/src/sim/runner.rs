//! The receding-horizon loop.

use super::scenario::Scenario;
use super::signals::DisturbanceSequence;
use super::trace::{Trace, TraceRow};
use crate::control::MpcController;
use crate::edlm::{pjm_for, HistoryWindow, PlantModel};
use crate::error::{Error, Result};

/// Abort once any output exceeds this magnitude.
pub const DIVERGENCE_GUARD: f64 = 1e6;

/// Runs `scenario` from step 1 with constant initial histories.
///
/// At step `k` the controller sees `y(k)` and `u(k−1)`, the plant is stepped
/// with the applied `u(k)` and the true `w(k+1)`, and the row for `k` logs
/// `y(k)`, `y*(k)`, `u(k)` and `w(k)`.
pub fn run_closed_loop(scenario: &Scenario) -> Result<Trace> {
    let plant = scenario.plant.build()?;
    run_with_plant(scenario, plant.as_ref())
}

/// As [`run_closed_loop`] with an explicit plant; `scenario.plant` is
/// ignored.
pub fn run_with_plant(scenario: &Scenario, plant: &dyn PlantModel) -> Result<Trace> {
    scenario.validate(plant)?;
    let (my, mu) = (plant.output_dim(), plant.input_dim());
    let (ly, lu) = plant.pseudo_orders();
    let cfg = &scenario.controller;
    let n = cfg.horizon;
    let ctrl = MpcController::new(cfg.clone(), scenario.constraints.clone());
    let init_y = scenario.initial_output(my);
    let init_u = scenario.initial_input(mu);
    let dist = DisturbanceSequence::generate(&scenario.disturbance, my, scenario.steps + n + 2, scenario.seed);

    let mut window = HistoryWindow::constant(&init_y, &init_u, ly + 1, lu + 2);
    let mut u_last = init_u.clone();
    let mut rows = Vec::with_capacity(scenario.steps);
    for k in 1..=scenario.steps {
        let ki = k as i64;
        window.push_input(u_last.clone());
        let ystar_stack: Vec<f64> = (1..=n as i64).flat_map(|i| scenario.reference.at(ki + i, my)).collect();
        let preview = cfg.mode.compensated().then(|| dist.preview(ki, n));
        let decision = ctrl.decide(plant, &window, &ystar_stack, preview.as_deref())?;
        let step = decision.step;
        window.set_current_input(step.u_applied.clone());
        let pjm = pjm_for(plant, &window)?;

        let y = window.y(0).to_vec();
        let ystar = scenario.reference.at(ki, my);
        let e = ystar.iter().zip(&y).map(|(a, b)| a - b).collect();
        rows.push(TraceRow {
            k,
            e,
            y,
            ystar,
            u: step.u_applied.clone(),
            w: dist.at(ki),
            du: step.du[..mu].to_vec(),
            cost: step.cost,
            iters: step.solver_iters,
            refinements: decision.refinements,
            pjm: pjm.flat(),
            planned_violation: step.planned_violation,
        });

        let y_next = plant.step(&window, &dist.at(ki + 1))?;
        let magnitude = y_next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(magnitude <= DIVERGENCE_GUARD) {
            return Err(Error::Diverged { step: k, magnitude });
        }
        window.push_output(y_next);
        u_last = step.u_applied;
    }
    Ok(Trace {
        pjm_mode: cfg.pjm_mode,
        outputs: my,
        inputs: mu,
        init_y,
        init_u,
        rows,
    })
}

/// Independent runs, data-parallel when the `parallel` feature is on.
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<Trace>> {
    crate::par::map(scenarios, run_closed_loop)
}
