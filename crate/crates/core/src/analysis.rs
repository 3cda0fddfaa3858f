//! Closed-loop analysis at a frozen operating point: characteristic
//! polynomials, stability, steady-state error and disturbance transfers.
//!
//! Signals are taken at `k+1`: every transfer maps `y*(k+1)` or `w(k+1)` to
//! `y(k+1)`. Reference and preview stacks contain advances `z^j`, `j < N`;
//! all of them are delayed by `z^{-(N-1)}` so that only powers of `z⁻¹`
//! appear, and the denominator carries the same delay.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{gain, ControllerConfig};
use crate::edlm::Pjm;
use crate::error::{check_len, Error, Result};
use crate::numeric::{
    final_value_on_scale, poly_roots, polymat_det, InputKind, Matrix, RationalMatrix, Tolerances, ZPolyMatrix, ZPolynomial,
    ZRational,
};
use crate::prediction::HorizonMatrices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisForm {
    /// From the explicit gain applied to the free response.
    Analysis1,
    /// From the stationarity condition `λΔU = Φ̃ᵀQ(Y* − Y)`.
    Analysis2,
}

/// `M(z⁻¹)·v = In(z⁻¹)·x`, solved as `v = adj(M)·In / det M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopModel {
    pub form: AnalysisForm,
    pub outputs: usize,
    /// Square operator acting on the closed-loop unknowns.
    pub char_matrix: ZPolyMatrix,
    /// `det M`; the scalar characteristic polynomial for SISO loops.
    pub char_poly: ZPolynomial,
    /// `char_poly` with the delay of the advance normalization.
    pub denominator: ZPolynomial,
    /// `y* → y` numerator over `denominator`.
    pub ref_numerator: ZPolyMatrix,
    /// `w → y` numerator without preview.
    pub dist_numerator: ZPolyMatrix,
    /// `w → y` numerator with the exact preview `ΔŴ = ΔW`.
    pub dist_numerator_compensated: ZPolyMatrix,
    /// `rank Φ_{L_y+1} = M_y`.
    pub rank_full: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Roots in the z-plane, `[re, im]`.
    pub roots: Vec<Complex64>,
    pub max_modulus: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateReport {
    pub input_kind: InputKind,
    /// `lim e_i(k)` per output when every reference channel gets the input.
    pub limit_error: Vec<f64>,
}

/// Margin inside the unit circle required for `stable`.
pub const STABILITY_MARGIN: f64 = 1e-9;

fn neg(m: &ZPolyMatrix) -> ZPolyMatrix {
    m.map(|p| p.scale(-1.0))
}

/// `Σ_j X_j z^{-(s-j)}` for column blocks `X_j` of width `w`: the advance
/// stack `[1, z, …, z^s]` after the common delay `z^{-s}`.
fn delayed_advance(x: &Matrix, w: usize, s: usize) -> ZPolyMatrix {
    let coeffs: Vec<Matrix> = (0..=s).map(|i| x.block(0, (s - i) * w, x.rows(), w)).collect();
    ZPolyMatrix::from_coefficients(&coeffs)
}

fn det_and_adjugate(m: &ZPolyMatrix) -> Result<(ZPolynomial, ZPolyMatrix)> {
    match m.rows() {
        1 => Ok((m.entry(0, 0).clone(), ZPolyMatrix::identity(1))),
        2 => {
            let (a, b, c, d) = (m.entry(0, 0), m.entry(0, 1), m.entry(1, 0), m.entry(1, 1));
            let det = &(a * d) - &(b * c);
            let adj = ZPolyMatrix::from_entries(2, 2, vec![d.clone(), -b, -c, a.clone()]);
            Ok((det.normalized(), adj))
        }
        _ => Ok((polymat_det(m)?, m.adjugate()?)),
    }
}

fn check_shapes(pjm: &Pjm, hm: &HorizonMatrices, cfg: &ControllerConfig) -> Result<()> {
    check_len("analysis outputs", pjm.output_dim(), hm.my)?;
    check_len("analysis inputs", pjm.input_dim(), hm.mu)?;
    check_len("analysis horizon", cfg.horizon, hm.n)?;
    check_len("analysis output order", pjm.ly(), hm.ly)?;
    check_len("analysis input order", pjm.lu(), hm.lu)
}

struct Inputs {
    reference: ZPolyMatrix,
    disturbance: ZPolyMatrix,
    disturbance_compensated: ZPolyMatrix,
}

fn assemble(
    form: AnalysisForm,
    pjm: &Pjm,
    m: ZPolyMatrix,
    inputs: Inputs,
    output_delay: usize,
) -> Result<ClosedLoopModel> {
    let my = pjm.output_dim();
    let (det, adj) = det_and_adjugate(&m)?;
    if det.is_zero() {
        return Err(Error::DegenerateZeroPolynomial);
    }
    let top = adj.block(0, 0, my, m.cols());
    Ok(ClosedLoopModel {
        form,
        outputs: my,
        ref_numerator: top.mul(&inputs.reference)?,
        dist_numerator: top.mul(&inputs.disturbance)?,
        dist_numerator_compensated: top.mul(&inputs.disturbance_compensated)?,
        denominator: det.shift(output_delay),
        char_poly: det,
        char_matrix: m,
        rank_full: pjm.leading_input_rank_full(),
    })
}

/// Closed loop of the explicit law `Δu(k) = gᵀP(Y* − E·y − Ψ̃Δx − Φ̃_wΔŴ)`.
///
/// The unknowns are `[y(k+1); Δu(k)]`. With `p = gᵀP`, `a = pΨ̃_y·T_y` and
/// `b` from `pΨ̃_u·T_u = z⁻¹b`,
///
/// ```text
/// M = [ (I − z⁻¹φ_Ly)Δ      −φ_Lu     ]
///     [ z⁻¹(aΔ + pE)      I + z⁻¹b   ]
/// ```
///
/// For SISO loops `det M` is the scalar `T(z⁻¹)`.
pub fn char_poly_analysis1(pjm: &Pjm, hm: &HorizonMatrices, cfg: &ControllerConfig) -> Result<ClosedLoopModel> {
    check_shapes(pjm, hm, cfg)?;
    let (my, mu, n, ly, lu) = (hm.my, hm.mu, hm.n, hm.ly, hm.lu);
    let s = n - 1;
    let p = gain(hm, cfg)?.block(0, 0, mu, n * my);
    let pe = p.matmul(&hm.e)?;
    let ppsi = p.matmul(&hm.psi_t)?;
    let a = ZPolyMatrix::from_coefficients(&(0..ly).map(|i| ppsi.block(0, i * my, mu, my)).collect::<Vec<_>>());
    let b = ZPolyMatrix::from_coefficients(
        &(0..lu).map(|j| ppsi.block(0, ly * my + j * mu, mu, mu)).collect::<Vec<_>>(),
    );
    let delta = ZPolynomial::delta();

    let mut m = ZPolyMatrix::zeros(my + mu, my + mu);
    m.set_block(0, 0, &ZPolyMatrix::identity(my).sub(&pjm.phi_ly().shift(1))?.scale_poly(&delta));
    m.set_block(0, my, &neg(&pjm.phi_lu()));
    m.set_block(my, 0, &a.scale_poly(&delta).add(&ZPolyMatrix::from_matrix(&pe))?.shift(1));
    m.set_block(my, my, &ZPolyMatrix::identity(mu).add(&b.shift(1))?);

    let mut reference = ZPolyMatrix::zeros(my + mu, my);
    reference.set_block(my, 0, &delayed_advance(&p, my, s));
    let mut disturbance = ZPolyMatrix::zeros(my + mu, my);
    disturbance.set_block(0, 0, &ZPolyMatrix::scalar_identity(my, delta.shift(s)));
    let mut disturbance_compensated = disturbance.clone();
    let preview = delayed_advance(&p.matmul(&hm.phi_w_t)?, my, s).scale_poly(&delta);
    disturbance_compensated.set_block(my, 0, &neg(&preview));

    assemble(
        AnalysisForm::Analysis1,
        pjm,
        m,
        Inputs {
            reference,
            disturbance,
            disturbance_compensated,
        },
        s,
    )
}

/// Closed loop from `λΔu(k) = gᵀΦ̃ᵀQ(Y* − Y + Φ̃_wΔW − Φ̃_wΔŴ)` with the
/// predicted outputs replaced by measured ones:
///
/// ```text
/// T₁ = λΔ(I − z⁻¹φ_Ly) + φ_Lu·gᵀΦ̃ᵀQ·H
/// ```
///
/// The replacement is exact only when the horizon equals the dead time, so
/// other horizons are refused.
pub fn char_poly_analysis2(pjm: &Pjm, hm: &HorizonMatrices, cfg: &ControllerConfig) -> Result<ClosedLoopModel> {
    check_shapes(pjm, hm, cfg)?;
    let (my, mu, n) = (hm.my, hm.mu, hm.n);
    let dead_time = pjm.first_input_lag().map(|j| j + 1);
    if dead_time != Some(n) {
        return Err(Error::UnsupportedConfiguration(format!(
            "the stationarity form needs the horizon to equal the dead time (horizon {n}, dead time {})",
            dead_time.map_or_else(|| "undefined".to_string(), |d| d.to_string())
        )));
    }
    let s = n - 1;
    let q = cfg.q_diag(my)?;
    let mut gtq = Matrix::zeros(mu, n * my);
    for r in 0..mu {
        for c in 0..n * my {
            gtq[(r, c)] = hm.phi_t[(c, r)] * q[c];
        }
    }
    let delta = ZPolynomial::delta();
    let lam = cfg.effective_lambda();
    let phi_lu = pjm.phi_lu();
    let reference = phi_lu.mul(&delayed_advance(&gtq, my, s))?;
    let m = ZPolyMatrix::identity(my)
        .sub(&pjm.phi_ly().shift(1))?
        .scale_poly(&delta.scale(lam).shift(s))
        .add(&reference)?;
    let disturbance_compensated = ZPolyMatrix::scalar_identity(my, delta.scale(lam).shift(s));
    let leak = phi_lu
        .mul(&delayed_advance(&gtq.matmul(&hm.phi_w_t)?, my, s))?
        .scale_poly(&delta);
    let disturbance = disturbance_compensated.add(&leak)?;
    assemble(
        AnalysisForm::Analysis2,
        pjm,
        m,
        Inputs {
            reference,
            disturbance,
            disturbance_compensated,
        },
        0,
    )
}

pub fn stability_check(m: &ClosedLoopModel) -> Result<StabilityReport> {
    let tol = Tolerances::default();
    let p = m.char_poly.trimmed(tol.coeff_trim);
    if p.is_zero() {
        return Err(Error::DegenerateZeroPolynomial);
    }
    let roots = poly_roots(&p)?;
    let max_modulus = roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    Ok(StabilityReport {
        stable: max_modulus < 1.0 - STABILITY_MARGIN,
        roots,
        max_modulus,
    })
}

/// `y* → y`.
pub fn reference_transfer(m: &ClosedLoopModel) -> RationalMatrix {
    RationalMatrix {
        num: m.ref_numerator.clone(),
        den: m.denominator.clone(),
    }
}

/// `y* → e = y* − y`.
pub fn error_transfer(m: &ClosedLoopModel) -> Result<RationalMatrix> {
    let unity = ZPolyMatrix::scalar_identity(m.outputs, m.denominator.clone());
    Ok(RationalMatrix {
        num: unity.sub(&m.ref_numerator)?,
        den: m.denominator.clone(),
    })
}

/// Limit of the tracking error when every reference channel follows the
/// same unit step or unit ramp.
pub fn steady_state_error(m: &ClosedLoopModel, input_kind: InputKind) -> Result<SteadyStateReport> {
    let report = stability_check(m)?;
    if !report.stable {
        return Err(Error::UnstablePole {
            modulus: report.max_modulus,
        });
    }
    let e = error_transfer(m)?;
    let limit_error = (0..m.outputs)
        .map(|i| {
            let num = (0..m.outputs).fold(ZPolynomial::zero(), |acc, j| &acc + e.num.entry(i, j));
            // numerator and denominator share roundoff from the same expansion
            let scale = e.den.abs_sum();
            final_value_on_scale(&ZRational::new(num, e.den.clone())?, input_kind, &Tolerances::default(), scale)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SteadyStateReport {
        input_kind,
        limit_error,
    })
}

/// `w → y`, with or without the exact disturbance preview.
pub fn disturbance_transfer(m: &ClosedLoopModel, compensated: bool) -> RationalMatrix {
    RationalMatrix {
        num: if compensated {
            m.dist_numerator_compensated.clone()
        } else {
            m.dist_numerator.clone()
        },
        den: m.denominator.clone(),
    }
}

/// Re-expresses a `w → y` transfer as `Δw → y`.
pub fn per_increment(g: &RationalMatrix) -> RationalMatrix {
    RationalMatrix {
        num: g.num.clone(),
        den: &g.den * &ZPolynomial::delta(),
    }
}
