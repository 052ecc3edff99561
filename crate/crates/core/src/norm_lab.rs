//! Operator-norm estimation for the discretized `L_beta`.

use crate::error::{LerayError, Result};
use crate::model_surface::ModelParams;
use crate::spectral::fields::random_band_limited;
use crate::spectral::{hs_norm_m, FourierField, GridSpec, SliceOp, SpectralLeray};
use crate::tolerances::{DEFAULT_SEED, POWER_ITERATION_MAX, POWER_ITERATION_TOL};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// How a [`NormEstimate`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    PowerIteration,
    HsFormula,
    ExtremalProbe,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// `||L^* L v - lambda v||` for the final unit vector `v`, relative to `lambda`.
    pub residual: f64,
    pub converged: bool,
    pub grid: GridSpec,
    pub method: NormMethod,
    pub seed: u64,
}

/// `(1 - beta^2)^{-1/4}`.
pub fn exact_norm(beta: f64) -> Result<f64> {
    ModelParams::new(beta)?;
    Ok((1.0 - beta * beta).powf(-0.25))
}

/// `2 / sqrt(1 - beta^2)`.
pub fn crude_bound(beta: f64) -> Result<f64> {
    ModelParams::new(beta)?;
    Ok(2.0 / (1.0 - beta * beta).sqrt())
}

/// `(1 - beta_max^2)^{-1/4}` for the supremum of pointwise `beta` values.
pub fn conjecture_formula(beta_max: f64) -> Result<f64> {
    exact_norm(beta_max)
}

/// Power-iteration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, max_iters: POWER_ITERATION_MAX, tol: POWER_ITERATION_TOL }
    }
}

/// Largest singular value of the discretized boundary operator by power
/// iteration on `L^* L`, started from a seeded random band-limited field.
///
/// The iteration runs in `(xi_r, xi_s, t)` space, where the partial
/// transform is unitary and both `L` and its grid adjoint act slice by slice.
pub fn power_iteration_norm(beta: f64, grid: GridSpec, cfg: PowerIteration) -> Result<NormEstimate> {
    let op = SpectralLeray::new(beta, grid)?;
    power_iteration_with(&op, cfg)
}

/// [`power_iteration_norm`] reusing a prebuilt operator.
pub fn power_iteration_with(op: &SpectralLeray, cfg: PowerIteration) -> Result<NormEstimate> {
    if cfg.max_iters == 0 {
        return Err(LerayError::Validation("max_iters must be positive".into()));
    }
    let grid = *op.grid();
    let start = random_band_limited(grid, cfg.seed, 0.9);
    let mut v = op.to_fourier(&start)?;
    normalize(&mut v)?;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        iterations += 1;
        let lv = op.apply_fourier(&v, SliceOp::Leray { eps: 0.0 })?;
        let w = op.apply_fourier(&lv, SliceOp::Adjoint { eps: 0.0 })?;
        lambda = v.inner(&w).re;
        residual = w.sub(&v.scale(C64::new(lambda, 0.0))).norm() / lambda.abs().max(f64::MIN_POSITIVE);
        if residual <= cfg.tol {
            break;
        }
        v = w;
        normalize(&mut v)?;
    }
    Ok(NormEstimate {
        value: lambda.max(0.0).sqrt(),
        iterations,
        residual,
        converged: residual <= cfg.tol,
        grid,
        method: NormMethod::PowerIteration,
        seed: cfg.seed,
    })
}

fn normalize(v: &mut FourierField) -> Result<()> {
    let n = v.norm();
    if n == 0.0 {
        return Err(LerayError::Validation(
            "iteration vector vanished: the start field has no content on retained slices".into(),
        ));
    }
    *v = v.scale(C64::new(1.0 / n, 0.0));
    Ok(())
}

/// Hilbert-Schmidt norm of the slice operator, as a [`NormEstimate`].
pub fn hs_estimate(beta: f64, grid: GridSpec) -> Result<NormEstimate> {
    ModelParams::new(beta)?;
    Ok(NormEstimate {
        value: hs_norm_m(beta),
        iterations: 0,
        residual: 0.0,
        converged: true,
        grid,
        method: NormMethod::HsFormula,
        seed: 0,
    })
}

/// Gaussian bump `phi(xi_r, xi_s)` in the frequency plane, cut off at
/// [`Bump::CUTOFF`] widths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub width: [f64; 2],
}

impl Default for Bump {
    /// Centred at `xi_s = -1/(2 pi)`, narrow enough in `xi_s` that the cutoff
    /// stays inside `xi_s < 0`.
    fn default() -> Self {
        Self { center: [0.0, -1.0 / (2.0 * std::f64::consts::PI)], width: [0.1, 0.035] }
    }
}

impl Bump {
    pub const CUTOFF: f64 = 4.0;

    pub fn new(center: [f64; 2], width: [f64; 2]) -> Result<Self> {
        if !(width[0] > 0.0 && width[1] > 0.0) {
            return Err(LerayError::Validation("bump widths must be positive".into()));
        }
        if center[1] + Self::CUTOFF * width[1] >= 0.0 {
            return Err(LerayError::Validation(format!(
                "bump must be supported in xi_s < 0: center {} + {} * width {} >= 0",
                center[1],
                Self::CUTOFF,
                width[1]
            )));
        }
        Ok(Self { center, width })
    }

    pub fn eval(&self, xi_r: f64, xi_s: f64) -> f64 {
        let a = (xi_r - self.center[0]) / self.width[0];
        let b = (xi_s - self.center[1]) / self.width[1];
        if a.abs() > Self::CUTOFF || b.abs() > Self::CUTOFF {
            0.0
        } else {
            (-0.5 * (a * a + b * b)).exp()
        }
    }
}

/// `||L f|| / ||f||` for the extremal family member with bump `bump`.
pub fn extremal_probe(beta: f64, bump: Bump, grid: GridSpec) -> Result<f64> {
    let op = SpectralLeray::new(beta, grid)?;
    extremal_probe_with(&op, bump)
}

pub fn extremal_probe_with(op: &SpectralLeray, bump: Bump) -> Result<f64> {
    let bump = Bump::new(bump.center, bump.width)?;
    let f = op.extremal_function(|a, b| C64::new(bump.eval(a, b), 0.0))?;
    Ok(op.apply_boundary(&f)?.norm() / f.norm())
}

/// One CSV row of a norm sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beta: f64,
    pub exact: f64,
    pub crude: f64,
    pub power_iter: f64,
    pub extremal: f64,
    pub grid_id: String,
    pub residual: f64,
}

/// Evaluates all norm quantities at one `beta`.
pub fn sweep_row(beta: f64, grid: GridSpec, cfg: PowerIteration, bump: Bump) -> Result<SweepRow> {
    let op = SpectralLeray::new(beta, grid)?;
    let est = power_iteration_with(&op, cfg)?;
    Ok(SweepRow {
        beta,
        exact: exact_norm(beta)?,
        crude: crude_bound(beta)?,
        power_iter: est.value,
        extremal: extremal_probe_with(&op, bump)?,
        grid_id: grid.id(),
        residual: est.residual,
    })
}
