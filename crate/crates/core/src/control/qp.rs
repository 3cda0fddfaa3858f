//! Projected gradient for convex quadratics over a box intersected with a
//! centred ball.

use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// `{x : lo ≤ x ≤ hi, ‖x‖² ≤ cap}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxBall {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cap: Option<f64>,
}

fn clamp_scaled(y: &[f64], s: f64, lo: &[f64], hi: &[f64]) -> Vec<f64> {
    y.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&v, (&l, &h))| (v * s).clamp(l, h))
        .collect()
}

fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

impl BoxBall {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for ((&v, &l), &h) in x.iter().zip(&self.lo).zip(&self.hi) {
            worst = worst.max(l - v).max(v - h);
        }
        if let Some(cap) = self.cap {
            worst = worst.max(sq_norm(x) - cap);
        }
        worst
    }

    /// Nonempty iff the box point closest to the origin lies in the ball.
    pub fn check_feasible(&self) -> Result<()> {
        if let Some(cap) = self.cap {
            let c = clamp_scaled(&vec![0.0; self.dim()], 1.0, &self.lo, &self.hi);
            let e = sq_norm(&c);
            if e > cap {
                return Err(Error::InfeasibleConstraints(format!(
                    "smallest input energy allowed by the box is {e:.6e}, above the cap {cap:.6e}"
                )));
            }
        }
        Ok(())
    }

    /// Euclidean projection.
    ///
    /// With the ball active the minimizer is `clamp(y/(1+μ))` for the
    /// multiplier `μ ≥ 0` that puts it on the sphere; `μ` is found by
    /// bisection, keeping the feasible end of the bracket.
    pub fn project(&self, y: &[f64]) -> Vec<f64> {
        let x = clamp_scaled(y, 1.0, &self.lo, &self.hi);
        let Some(cap) = self.cap else { return x };
        if sq_norm(&x) <= cap {
            return x;
        }
        let at = |mu: f64| clamp_scaled(y, 1.0 / (1.0 + mu), &self.lo, &self.hi);
        let (mut a, mut b) = (0.0f64, 1.0f64);
        while sq_norm(&at(b)) > cap {
            a = b;
            b *= 2.0;
            if b > 1e300 {
                return clamp_scaled(y, 0.0, &self.lo, &self.hi);
            }
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sq_norm(&at(m)) > cap {
                a = m;
            } else {
                b = m;
            }
        }
        at(b)
    }

    /// Dykstra's alternating projections between the box and the ball.
    pub fn project_dykstra(&self, y: &[f64], iterations: usize) -> Vec<f64> {
        let n = y.len();
        let mut x = y.to_vec();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for _ in 0..iterations {
            let v: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
            let b = clamp_scaled(&v, 1.0, &self.lo, &self.hi);
            p = v.iter().zip(&b).map(|(a, c)| a - c).collect();
            let w: Vec<f64> = b.iter().zip(&q).map(|(a, c)| a + c).collect();
            let next = match self.cap {
                Some(cap) if sq_norm(&w) > cap => {
                    let s = (cap / sq_norm(&w)).sqrt();
                    w.iter().map(|v| v * s).collect()
                }
                _ => w.clone(),
            };
            q = w.iter().zip(&next).map(|(a, c)| a - c).collect();
            x = next;
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgSettings {
    /// Stop when `‖x_{t+1} − x_t‖_∞` falls below this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PgSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
}

fn objective(h: &Matrix, g: &[f64], x: &[f64]) -> Result<f64> {
    let hx = h.mul_vec(x)?;
    Ok(x.iter().zip(&hx).map(|(a, b)| 0.5 * a * b).sum::<f64>() + x.iter().zip(g).map(|(a, b)| a * b).sum::<f64>())
}

/// Minimizes `½xᵀHx + gᵀx` over `set` with accelerated projected gradient
/// (step `1/L`, `L` the Gershgorin bound of `H`) and objective restarts.
pub fn projected_gradient(
    h: &Matrix,
    g: &[f64],
    set: &BoxBall,
    x0: &[f64],
    settings: PgSettings,
) -> Result<PgSolution> {
    set.check_feasible()?;
    let lip = h.gershgorin_bound().max(f64::MIN_POSITIVE);
    let grad = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(h.mul_vec(x)?.into_iter().zip(g).map(|(a, b)| a + b).collect())
    };
    let pg_step = |y: &[f64]| -> Result<Vec<f64>> {
        let gy = grad(y)?;
        let trial: Vec<f64> = y.iter().zip(&gy).map(|(a, b)| a - b / lip).collect();
        Ok(set.project(&trial))
    };
    let mut x = set.project(x0);
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut fx = objective(h, g, &x)?;
    for it in 1..=settings.max_iter {
        let next = pg_step(&y)?;
        let fnext = objective(h, g, &next)?;
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if fnext > fx {
            // restart momentum from the last accepted point
            t = 1.0;
            y = x.clone();
            if change < settings.tol {
                return Ok(PgSolution {
                    gradient_norm: gradient_mapping_norm(&x, &pg_step(&x)?, lip),
                    x,
                    iterations: it,
                });
            }
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = next;
        fx = fnext;
        t = t_next;
        if change < settings.tol {
            return Ok(PgSolution {
                gradient_norm: gradient_mapping_norm(&x, &pg_step(&x)?, lip),
                x,
                iterations: it,
            });
        }
    }
    let gradient_norm = gradient_mapping_norm(&x, &pg_step(&x)?, lip);
    Err(Error::NotConverged {
        iterations: settings.max_iter,
        gradient_norm,
        last_iterate: x,
    })
}

fn gradient_mapping_norm(x: &[f64], stepped: &[f64], lip: f64) -> f64 {
    lip * x.iter().zip(stepped).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}
