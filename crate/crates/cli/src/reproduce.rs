use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Result};
use clap::ValueEnum;

use edlm_mpc::par;
use edlm_mpc::sim::{run_closed_loop, Scenario, Trace};

use crate::fixtures;
use crate::report::{run_report, write_outputs, Check, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Table1,
    Example1,
    Example2,
    Example3,
    Example4,
}

struct Outcome {
    scenario: Scenario,
    trace: Trace,
    seconds: f64,
}

fn name_of(s: &Scenario) -> String {
    s.name.clone().unwrap_or_else(|| "scenario".into())
}

/// Runs every scenario (concurrently with the `parallel` feature of the core).
fn run_all(scenarios: Vec<Scenario>) -> Result<Vec<Outcome>> {
    par::map(&scenarios, |s| {
        let t0 = Instant::now();
        run_closed_loop(s).map(|t| (t, t0.elapsed().as_secs_f64()))
    })
    .into_iter()
    .zip(scenarios)
    .map(|(r, scenario)| {
        let (trace, seconds) = r.map_err(|e| anyhow!("{}: {e}", name_of(&scenario)))?;
        Ok(Outcome {
            scenario,
            trace,
            seconds,
        })
    })
    .collect()
}

fn finish(out: &Path, o: &Outcome, checks: Vec<Check>) -> Result<RunReport> {
    let mut report = run_report(&o.scenario, &o.trace)?;
    report.checks = checks;
    write_outputs(&out.join(name_of(&o.scenario)), &o.trace, &report)?;
    Ok(report)
}

fn print_checks(name: &str, checks: &[Check]) {
    for c in checks {
        println!(
            "  {} {name}: {} = {:.6e} (expected {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.expected
        );
    }
}

fn ramp_cases(out: &Path, q_last: bool) -> Result<Vec<Check>> {
    let mut scenarios = fixtures::example1()?;
    if q_last {
        for s in &mut scenarios {
            s.controller.q = Some(vec![0.0, 0.0, 0.0, 1.0]);
            s.name = s.name.take().map(|n| format!("{n}_q_last"));
        }
    }
    let outcomes = run_all(scenarios)?;
    println!("{:>6}  {:>20}  {:>20}  {:>20}", "lambda", "e(200) = … = e(700)", "2λ/15", "analysis");
    let mut all = Vec::new();
    for o in &outcomes {
        let lambda = o.scenario.controller.lambda;
        let target = 2.0 * lambda / 15.0;
        let (lo, hi) = o.scenario.metrics.window.unwrap_or((200, 700));
        let dev = (lo..=hi)
            .map(|k| o.trace.row(k).map_or(f64::INFINITY, |r| (r.e[0] - target).abs()))
            .fold(0.0, f64::max);
        let mut report = run_report(&o.scenario, &o.trace)?;
        let analytic = report
            .analysis
            .forms
            .first()
            .and_then(|f| f.steady_state.first())
            .map_or(f64::NAN, |s| s.limit_error[0]);
        let simulated = report.steady_error.as_ref().map_or(f64::NAN, |v| v[0]);
        println!("{lambda:>6}  {simulated:>20.15}  {target:>20.15}  {analytic:>20.15}");
        report.checks = vec![
            Check::at_most("max |e(k) - 2λ/15| over the window", dev, 1e-6),
            Check::at_most("|analytic - 2λ/15|", (analytic - target).abs(), 1e-9),
            Check::at_most("|analytic - simulated|", (analytic - simulated).abs(), 1e-6),
            Check::at_most("runtime seconds", o.seconds, 5.0),
        ];
        write_outputs(&out.join(name_of(&o.scenario)), &o.trace, &report)?;
        all.push((name_of(&o.scenario), report.checks));
    }
    let mut flat = Vec::new();
    for (name, checks) in all {
        print_checks(&name, &checks);
        flat.extend(checks);
    }
    Ok(flat)
}

fn example2(out: &Path) -> Result<Vec<Check>> {
    let outcomes = run_all(vec![
        fixtures::parse("example2_uimpc.json", fixtures::EXAMPLE2_UIMPC)?,
        fixtures::parse("example2_cimpc.json", fixtures::EXAMPLE2_CIMPC)?,
    ])?;
    let mut flat = Vec::new();
    for o in &outcomes {
        let base = run_report(&o.scenario, &o.trace)?;
        let mut checks = vec![Check::at_most(
            "max |e| over the run",
            o.trace.rows.iter().flat_map(|r| r.e.iter().map(|v| v.abs())).fold(0.0, f64::max),
            edlm_mpc::sim::DIVERGENCE_GUARD,
        )];
        if o.scenario.controller.mode.constrained() {
            checks.push(Check::at_most(
                "max constraint violation",
                base.metrics.max_constraint_violation,
                1e-8,
            ));
        }
        println!(
            "{}: RMS e (k > {}) = {:?}",
            name_of(&o.scenario),
            base.metrics.rms_after,
            base.metrics.rms_error
        );
        finish(out, o, checks.clone())?;
        print_checks(&name_of(&o.scenario), &checks);
        flat.extend(checks);
    }
    Ok(flat)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn example3(out: &Path) -> Result<Vec<Check>> {
    let outcomes = run_all(vec![
        fixtures::parse("example3_uimpc_d.json", fixtures::EXAMPLE3_UIMPC_D)?,
        fixtures::parse("example3_uimpc.json", fixtures::EXAMPLE3_UIMPC)?,
        fixtures::parse("example3_cimpc_d.json", fixtures::EXAMPLE3_CIMPC_D)?,
    ])?;
    let reports = outcomes
        .iter()
        .map(|o| run_report(&o.scenario, &o.trace))
        .collect::<Result<Vec<_>>>()?;
    let with = norm(&reports[0].metrics.rms_error);
    let without = norm(&reports[1].metrics.rms_error);
    println!("RMS e (k > 100): with preview {with:.3e}, without {without:.3e}");
    let per_run = [
        vec![Check::at_least("RMS ratio without/with preview", without / with, 100.0)],
        Vec::new(),
        vec![Check::at_most(
            "max constraint violation",
            reports[2].metrics.max_constraint_violation,
            1e-8,
        )],
    ];
    let mut flat = Vec::new();
    for (o, checks) in outcomes.iter().zip(per_run) {
        finish(out, o, checks.clone())?;
        print_checks(&name_of(&o.scenario), &checks);
        flat.extend(checks);
    }
    Ok(flat)
}

fn example4(out: &Path) -> Result<Vec<Check>> {
    let outcomes = run_all(vec![fixtures::parse("example4.json", fixtures::EXAMPLE4)?])?;
    let o = &outcomes[0];
    let base = run_report(&o.scenario, &o.trace)?;
    let ed = base
        .metrics
        .ed_comparison
        .as_ref()
        .ok_or_else(|| anyhow!("example4 fixture lacks ed_after"))?;
    println!(
        "median |e_i(k) - e_d,i(k)| for k > {}: {:?} (max {:?})",
        ed.after, ed.median, ed.max
    );
    let checks: Vec<Check> = ed
        .median
        .iter()
        .enumerate()
        .map(|(i, &m)| Check::at_most(format!("median |e{0} - e_d{0}|", i + 1), m, 1e-6))
        .collect();
    finish(out, o, checks.clone())?;
    print_checks(&name_of(&o.scenario), &checks);
    Ok(checks)
}

/// Runs `target`; `Ok(false)` when a tolerance check failed.
pub fn reproduce(target: Target, out: &Path, q_last: bool) -> Result<bool> {
    let checks = match target {
        Target::Table1 => ramp_cases(out, false)?,
        Target::Example1 => ramp_cases(out, q_last)?,
        Target::Example2 => example2(out)?,
        Target::Example3 => example3(out)?,
        Target::Example4 => example4(out)?,
    };
    Ok(checks.iter().all(|c| c.pass))
}
