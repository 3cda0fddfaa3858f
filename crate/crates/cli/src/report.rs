use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use edlm_mpc::analysis::{
    char_poly_analysis1, char_poly_analysis2, stability_check, steady_state_error, AnalysisForm, StabilityReport,
    SteadyStateReport,
};
use edlm_mpc::control::PjmMode;
use edlm_mpc::edlm::{pjm_for, HistoryWindow, PlantModel};
use edlm_mpc::numeric::InputKind;
use edlm_mpc::prediction::horizon_frozen;
use edlm_mpc::sim::{metrics, Metrics, ReferenceSpec, Scenario, Trace};

/// One closed-loop analysis form, or why it is not available.
#[derive(Debug, Serialize)]
pub struct FormReport {
    pub form: AnalysisForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub steady_state: Vec<SteadyStateReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    /// The PJM is evaluated once at the constant initial histories and held.
    pub operating_point: &'static str,
    pub forms: Vec<FormReport>,
}

/// A named tolerance check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            expected: format!("<= {limit:e}"),
            observed,
            pass: observed <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, observed: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            expected: format!(">= {limit:e}"),
            observed,
            pass: observed >= limit,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub pjm_mode: PjmMode,
    pub steps_run: usize,
    /// Mean tracking error over the metrics window, per output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steady_error: Option<Vec<f64>>,
    pub metrics: Metrics,
    pub analysis: AnalysisReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
}

fn kinds_for(reference: &ReferenceSpec) -> Vec<InputKind> {
    match reference {
        ReferenceSpec::UnitRamp => vec![InputKind::Ramp],
        ReferenceSpec::Constant { .. } => vec![InputKind::Step],
        _ => vec![InputKind::Step, InputKind::Ramp],
    }
}

fn form_report(form: AnalysisForm, scenario: &Scenario, plant: &dyn PlantModel, kinds: &[InputKind]) -> Result<FormReport> {
    let (ly, lu) = plant.pseudo_orders();
    let window = HistoryWindow::constant(
        &scenario.initial_output(plant.output_dim()),
        &scenario.initial_input(plant.input_dim()),
        ly + 1,
        lu + 2,
    );
    let pjm = pjm_for(plant, &window)?;
    let cfg = &scenario.controller;
    let hm = horizon_frozen(&pjm, cfg.horizon)?;
    let built = match form {
        AnalysisForm::Analysis1 => char_poly_analysis1(&pjm, &hm, cfg),
        AnalysisForm::Analysis2 => char_poly_analysis2(&pjm, &hm, cfg),
    };
    let mut report = FormReport {
        form,
        stability: None,
        steady_state: Vec::new(),
        notes: Vec::new(),
    };
    let model = match built {
        Ok(m) => m,
        Err(e) => {
            report.notes.push(e.to_string());
            return Ok(report);
        }
    };
    report.stability = Some(stability_check(&model)?);
    for &kind in kinds {
        match steady_state_error(&model, kind) {
            Ok(s) => report.steady_state.push(s),
            Err(e) => report.notes.push(format!("{kind:?} steady state: {e}")),
        }
    }
    Ok(report)
}

/// Both analysis forms at the scenario's initial operating point.
pub fn analyze(scenario: &Scenario, all_kinds: bool) -> Result<AnalysisReport> {
    let plant = scenario.plant.build()?;
    scenario.validate(plant.as_ref())?;
    let kinds = if all_kinds {
        vec![InputKind::Step, InputKind::Ramp]
    } else {
        kinds_for(&scenario.reference)
    };
    let forms = [AnalysisForm::Analysis1, AnalysisForm::Analysis2]
        .into_iter()
        .map(|f| form_report(f, scenario, plant.as_ref(), &kinds))
        .collect::<Result<_>>()?;
    Ok(AnalysisReport {
        operating_point: "initial",
        forms,
    })
}

pub fn run_report(scenario: &Scenario, trace: &Trace) -> Result<RunReport> {
    let m = metrics(trace, &scenario.metrics, scenario.constraints.as_ref())?;
    Ok(RunReport {
        scenario: scenario.clone(),
        pjm_mode: trace.pjm_mode,
        steps_run: trace.len(),
        steady_error: m.steady.as_ref().map(|s| s.value.clone()),
        metrics: m,
        analysis: analyze(scenario, false)?,
        checks: Vec::new(),
    })
}

/// Writes `trace.csv` and `report.json` into `dir`.
pub fn write_outputs(dir: &Path, trace: &Trace, report: &RunReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join("trace.csv");
    let file = fs::File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    trace
        .write_csv(std::io::BufWriter::new(file))
        .with_context(|| format!("writing {}", csv_path.display()))?;
    let json_path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(&json_path, text).with_context(|| format!("writing {}", json_path.display()))?;
    Ok(())
}
