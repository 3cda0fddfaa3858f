//! Summary statistics of a trace.

use serde::{Deserialize, Serialize};

use super::scenario::MetricsSpec;
use super::trace::Trace;
use crate::control::ConstraintSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyWindow {
    pub k_lo: usize,
    pub k_hi: usize,
    /// Mean error per channel over the window.
    pub value: Vec<f64>,
    /// `max − min` per channel over the window.
    pub spread: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdComparison {
    pub after: usize,
    /// Median of `|e_i(k) − e_d,i(k)|` per channel.
    pub median: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady: Option<SteadyWindow>,
    pub rms_after: usize,
    pub rms_error: Vec<f64>,
    pub max_constraint_violation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ed_comparison: Option<EdComparison>,
}

fn check_window(t: &Trace, lo: usize, hi: usize) -> Result<()> {
    if lo == 0 || lo > hi || hi > t.len() {
        return Err(Error::WindowOutOfRange { lo, hi, len: t.len() });
    }
    Ok(())
}

pub fn steady_window(t: &Trace, k_lo: usize, k_hi: usize) -> Result<SteadyWindow> {
    check_window(t, k_lo, k_hi)?;
    let rows = &t.rows[k_lo - 1..k_hi];
    let count = rows.len() as f64;
    let mut value = Vec::with_capacity(t.outputs);
    let mut spread = Vec::with_capacity(t.outputs);
    for c in 0..t.outputs {
        let (lo, hi, sum) = rows.iter().map(|r| r.e[c]).fold(
            (f64::INFINITY, f64::NEG_INFINITY, 0.0),
            |(lo, hi, s), v| (lo.min(v), hi.max(v), s + v),
        );
        value.push(sum / count);
        spread.push(hi - lo);
    }
    Ok(SteadyWindow {
        k_lo,
        k_hi,
        value,
        spread,
    })
}

/// RMS tracking error per channel over `k > after`.
pub fn rms_error(t: &Trace, after: usize) -> Result<Vec<f64>> {
    check_window(t, after + 1, t.len())?;
    let rows = &t.rows[after..];
    Ok((0..t.outputs)
        .map(|c| (rows.iter().map(|r| r.e[c] * r.e[c]).sum::<f64>() / rows.len() as f64).sqrt())
        .collect())
}

/// Worst violation of the box by applied inputs or of any constraint by the
/// planned inputs; zero when nothing is violated.
pub fn max_constraint_violation(t: &Trace, c: Option<&ConstraintSet>) -> f64 {
    let mut worst = 0.0f64;
    for r in &t.rows {
        worst = worst.max(r.planned_violation.unwrap_or(0.0));
        if let Some(c) = c {
            for (j, &u) in r.u.iter().enumerate() {
                worst = worst.max(c.lo(j) - u).max(u - c.hi(j));
            }
        }
    }
    worst
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `e(k)` against `e_d(k) = −Δw(k) − Δw(k−1)` for `k > after`.
pub fn ed_comparison(t: &Trace, after: usize) -> Result<EdComparison> {
    let after = after.max(2);
    check_window(t, after + 1, t.len())?;
    let mut dev = vec![Vec::new(); t.outputs];
    for k in after + 1..=t.len() {
        let (now, back2) = (&t.rows[k - 1], &t.rows[k - 3]);
        for (c, d) in dev.iter_mut().enumerate() {
            let ed = -(now.w[c] - back2.w[c]);
            d.push((now.e[c] - ed).abs());
        }
    }
    Ok(EdComparison {
        after,
        max: dev.iter().map(|d| d.iter().copied().fold(0.0, f64::max)).collect(),
        median: dev.into_iter().map(median).collect(),
    })
}

pub fn metrics(t: &Trace, spec: &MetricsSpec, constraints: Option<&ConstraintSet>) -> Result<Metrics> {
    Ok(Metrics {
        steady: spec.window.map(|(lo, hi)| steady_window(t, lo, hi)).transpose()?,
        rms_after: spec.rms_after,
        rms_error: rms_error(t, spec.rms_after)?,
        max_constraint_violation: max_constraint_violation(t, constraints),
        ed_comparison: spec.ed_after.map(|a| ed_comparison(t, a)).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::PjmMode;
    use crate::sim::trace::TraceRow;

    fn trace(e: &[f64], w: &[f64]) -> Trace {
        Trace {
            pjm_mode: PjmMode::Frozen,
            outputs: 1,
            inputs: 1,
            init_y: vec![0.0],
            init_u: vec![0.0],
            rows: e
                .iter()
                .zip(w)
                .enumerate()
                .map(|(i, (&e, &w))| TraceRow {
                    k: i + 1,
                    y: vec![0.0],
                    ystar: vec![e],
                    u: vec![0.0],
                    w: vec![w],
                    e: vec![e],
                    du: vec![0.0],
                    cost: 0.0,
                    iters: 0,
                    refinements: 1,
                    pjm: vec![],
                    planned_violation: None,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_window() {
        let t = trace(&[5.0, 0.25, 0.25, 0.25], &[0.0; 4]);
        let s = steady_window(&t, 2, 4).unwrap();
        assert_eq!(s.value, vec![0.25]);
        assert_eq!(s.spread, vec![0.0]);
        assert!(matches!(steady_window(&t, 2, 5), Err(Error::WindowOutOfRange { .. })));
        assert!(steady_window(&t, 0, 2).is_err());
    }

    #[test]
    fn rms_and_median() {
        let t = trace(&[9.0, 3.0, -3.0], &[0.0; 3]);
        assert_eq!(rms_error(&t, 1).unwrap(), vec![3.0]);
        assert_eq!(median(vec![3.0, 1.0, 2.0, 10.0]), 2.5);
    }

    #[test]
    fn ed_identity_on_matching_trace() {
        let w = [0.1, 0.4, 0.2, 0.7, 0.3, 0.9];
        let e: Vec<f64> = (0..6).map(|i| if i >= 2 { -(w[i] - w[i - 2]) } else { 0.0 }).collect();
        let c = ed_comparison(&trace(&e, &w), 2).unwrap();
        assert_eq!(c.max, vec![0.0]);
    }
}
