//! Per-step records of a closed-loop run and their CSV form.

use std::io;

use serde::{Deserialize, Serialize};

use crate::control::PjmMode;
use crate::edlm::HistoryWindow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub y: Vec<f64>,
    pub ystar: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    /// `y*(k) − y(k)`.
    pub e: Vec<f64>,
    /// Applied `Δu(k)`.
    pub du: Vec<f64>,
    pub cost: f64,
    pub iters: usize,
    pub refinements: usize,
    /// PJM at time `k` under the applied input, flattened block by block.
    pub pjm: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planned_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub pjm_mode: PjmMode,
    pub outputs: usize,
    pub inputs: usize,
    pub init_y: Vec<f64>,
    pub init_u: Vec<f64>,
    pub rows: Vec<TraceRow>,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

impl Trace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Row of step `k` (steps start at 1).
    pub fn row(&self, k: usize) -> Option<&TraceRow> {
        k.checked_sub(1).and_then(|i| self.rows.get(i))
    }

    fn y_at(&self, k: i64) -> Vec<f64> {
        if k < 1 {
            return self.init_y.clone();
        }
        self.rows[k as usize - 1].y.clone()
    }

    fn u_at(&self, k: i64) -> Vec<f64> {
        if k < 1 {
            return self.init_u.clone();
        }
        self.rows[k as usize - 1].u.clone()
    }

    /// History window at step `k` with `u(k)` set to the applied input.
    pub fn window_at(&self, k: usize, depth_y: usize, depth_u: usize) -> Result<HistoryWindow> {
        if k == 0 || k > self.rows.len() {
            return Err(Error::WindowOutOfRange {
                lo: k,
                hi: k,
                len: self.rows.len(),
            });
        }
        let k = k as i64;
        HistoryWindow::new(
            (0..depth_y as i64).map(|i| self.y_at(k - i)).collect(),
            (0..depth_u as i64).map(|j| self.u_at(k - j)).collect(),
        )
    }

    pub fn csv_header(&self) -> Vec<String> {
        let mut h = vec!["k".to_string()];
        for (name, n) in [("y", self.outputs), ("ystar", self.outputs), ("u", self.inputs), ("w", self.outputs), ("e", self.outputs)] {
            h.extend((1..=n).map(|i| format!("{name}{i}")));
        }
        h.push("cost".into());
        h.push("iters".into());
        h
    }

    /// Writes one row per step; reals carry 17 significant digits.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.csv_header())?;
        for r in &self.rows {
            let mut rec = vec![r.k.to_string()];
            for v in [&r.y, &r.ystar, &r.u, &r.w, &r.e] {
                rec.extend(v.iter().map(|x| fmt(*x)));
            }
            rec.push(fmt(r.cost));
            rec.push(r.iters.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}
