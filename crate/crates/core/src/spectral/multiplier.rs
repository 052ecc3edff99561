//! The Gaussian multiplier pair `m0`, `m1` and the rank-one slice operator
//! `M g = m0 * int m1 g dt`.
//!
//! For `xi_s < 0`, with centre `c = -xi_r / (4 xi_s)`:
//! `m0(t) = 2 sqrt(2) sqrt(-xi_s) / sqrt(1+beta) * exp(4 pi xi_s (t - c)^2)` and
//! `m1(t) = exp(4 pi (1-beta)/(1+beta) xi_s (t - c)^2)`; both vanish for `xi_s >= 0`.

use super::grid::{AxisSpec, C64};
use crate::sum::{sum_c64, sum_f64};
use crate::tolerances::{RESOLVED_MIN_SIGMA_OVER_H, RESOLVED_TAIL_SIGMAS};
use std::f64::consts::{PI, SQRT_2};

/// Deliberate defects used to check that the verification suite catches them.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Flips the sign of the centre shift inside `m1`.
    M1CenterSign,
}

fn center(xi_r: f64, xi_s: f64) -> f64 {
    -xi_r / (4.0 * xi_s)
}

pub fn multiplier_m0(beta: f64, xi_r: f64, xi_s: f64, t: f64) -> f64 {
    if xi_s >= 0.0 {
        return 0.0;
    }
    let d = t - center(xi_r, xi_s);
    2.0 * SQRT_2 * (-xi_s).sqrt() / (1.0 + beta).sqrt() * (4.0 * PI * xi_s * d * d).exp()
}

pub fn multiplier_m1(beta: f64, xi_r: f64, xi_s: f64, t: f64) -> f64 {
    if xi_s >= 0.0 {
        return 0.0;
    }
    let d = t - center(xi_r, xi_s);
    (4.0 * PI * (1.0 - beta) / (1.0 + beta) * xi_s * d * d).exp()
}

/// `||m0||_2^2 = 2 sqrt(2) sqrt(-xi_s) / (1+beta)`.
pub fn m0_norm_sqr(beta: f64, xi_s: f64) -> f64 {
    if xi_s >= 0.0 {
        return 0.0;
    }
    2.0 * SQRT_2 * (-xi_s).sqrt() / (1.0 + beta)
}

/// `||m1||_2^2 = sqrt((1+beta)/(1-beta)) / (2 sqrt(2) sqrt(-xi_s))`.
pub fn m1_norm_sqr(beta: f64, xi_s: f64) -> f64 {
    if xi_s >= 0.0 {
        return 0.0;
    }
    ((1.0 + beta) / (1.0 - beta)).sqrt() / (2.0 * SQRT_2 * (-xi_s).sqrt())
}

/// Closed form of the Hilbert-Schmidt norm of the slice operator, `(1-beta^2)^{-1/4}`.
pub fn hs_norm_closed_form(beta: f64) -> f64 {
    (1.0 - beta * beta).powf(-0.25)
}

/// The multiplier pair for a fixed `beta`, optionally carrying a test defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplierPair {
    beta: f64,
    mutation: Option<Mutation>,
}

impl MultiplierPair {
    pub fn new(beta: f64) -> Self {
        Self { beta, mutation: None }
    }

    #[doc(hidden)]
    pub fn with_mutation(beta: f64, mutation: Mutation) -> Self {
        Self { beta, mutation: Some(mutation) }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn m0(&self, xi_r: f64, xi_s: f64, t: f64) -> f64 {
        multiplier_m0(self.beta, xi_r, xi_s, t)
    }

    pub fn m1(&self, xi_r: f64, xi_s: f64, t: f64) -> f64 {
        match self.mutation {
            Some(Mutation::M1CenterSign) => multiplier_m1(self.beta, -xi_r, xi_s, t),
            None => multiplier_m1(self.beta, xi_r, xi_s, t),
        }
    }

    /// Whether the t-grid resolves the multiplier Gaussians of this slice.
    ///
    /// A slice is resolved when the widest Gaussian (`m1^2`) fits in the
    /// window with [`RESOLVED_TAIL_SIGMAS`] standard deviations to spare and
    /// the narrowest (`m0^2`) has at least [`RESOLVED_MIN_SIGMA_OVER_H`]
    /// samples per standard deviation. Only the true multipliers enter, so a
    /// mutated pair is judged on the same slices as the correct one.
    pub fn slice_resolved(&self, xi_r: f64, xi_s: f64, t_axis: &AxisSpec) -> bool {
        if xi_s >= 0.0 {
            return false;
        }
        let b = self.beta;
        let sigma0 = 1.0 / (16.0 * PI * -xi_s).sqrt();
        let sigma1 = sigma0 * ((1.0 + b) / (1.0 - b)).sqrt();
        let h = t_axis.spacing();
        let lo = -t_axis.half_width;
        let hi = t_axis.half_width - h;
        let c = center(xi_r, xi_s);
        sigma0 >= RESOLVED_MIN_SIGMA_OVER_H * h
            && c - RESOLVED_TAIL_SIGMAS * sigma1 >= lo
            && c + RESOLVED_TAIL_SIGMAS * sigma1 <= hi
    }
}

/// `M g = m0 * <g, m1>` on the uniform t-grid of `t_axis`; zero for `xi_s >= 0`.
pub fn apply_m(beta: f64, xi_r: f64, xi_s: f64, g: &[C64], t_axis: &AxisSpec) -> Vec<C64> {
    let ts = t_axis.coords();
    assert_eq!(g.len(), ts.len(), "sample count does not match the t-axis");
    if xi_s >= 0.0 {
        return vec![C64::new(0.0, 0.0); g.len()];
    }
    let terms: Vec<C64> = ts.iter().zip(g).map(|(&t, &v)| v * multiplier_m1(beta, xi_r, xi_s, t)).collect();
    let coef = sum_c64(&terms) * t_axis.spacing();
    ts.iter().map(|&t| coef * multiplier_m0(beta, xi_r, xi_s, t)).collect()
}

/// `||m0||_2 ||m1||_2` at one slice, by trapezoid quadrature on a window
/// sized to the Gaussians so that sampling and truncation errors are far
/// below 1e-14.
pub fn hs_norm_m_at(beta: f64, xi_r: f64, xi_s: f64) -> f64 {
    assert!(xi_s < 0.0, "the slice operator vanishes for xi_s >= 0");
    let sigma0 = 1.0 / (16.0 * PI * -xi_s).sqrt();
    let sigma1 = sigma0 * ((1.0 + beta) / (1.0 - beta)).sqrt();
    let h = sigma0 / 4.0;
    let half = 14.0 * sigma1;
    let n = (2.0 * half / h).ceil() as usize + 1;
    let c = center(xi_r, xi_s);
    let ts: Vec<f64> = (0..n).map(|j| c - half + j as f64 * h).collect();
    let q0: Vec<f64> = ts.iter().map(|&t| multiplier_m0(beta, xi_r, xi_s, t).powi(2)).collect();
    let q1: Vec<f64> = ts.iter().map(|&t| multiplier_m1(beta, xi_r, xi_s, t).powi(2)).collect();
    (sum_f64(&q0) * h).sqrt() * (sum_f64(&q1) * h).sqrt()
}

/// Reference slice used by [`hs_norm_m`].
pub const HS_REFERENCE_SLICE: (f64, f64) = (0.37, -0.61);

/// Quadrature value of the Hilbert-Schmidt norm of the slice operator.
pub fn hs_norm_m(beta: f64) -> f64 {
    hs_norm_m_at(beta, HS_REFERENCE_SLICE.0, HS_REFERENCE_SLICE.1)
}
