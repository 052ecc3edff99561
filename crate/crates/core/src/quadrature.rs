//! Direct numerical integration of the Leray kernel on `S_beta`.
//!
//! Against the measure `sigma = dx1 dy1 dx2` the kernel with evaluation
//! point on the shell `S_beta^eps` is
//! `l(z, zeta) = pi^{-2} (2A + eps - i (s_z - s_zeta))^{-2}` with
//! `A = (1+beta)/2 dr^2 + (1-beta)/2 dt^2 + i dr (t_z + t_zeta + beta dt)`,
//! differences taken as `z - zeta` in group coordinates.

use crate::error::{LerayError, Result};
use crate::model_surface::{affine_to_rst, affine_to_rst_shell, defining_function, AffinePoint, ModelParams, Shell, SurfacePoint, C64};
use crate::sum::{par_sum_map, sum_c64};
use crate::tolerances::{DEFAULT_QUAD_NODES, DEFAULT_QUAD_RADIUS};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Gauss-Legendre panel order used by the composite rule.
pub const GL_PANEL_ORDER: usize = 8;

/// One-dimensional rule family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Composite Gauss-Legendre of order [`GL_PANEL_ORDER`] on panels graded
    /// quadratically towards the centre of the interval.
    GaussLegendre,
    /// Uniform trapezoid rule including both endpoints.
    Trapezoid,
}

/// Tensor-product rule on the box `prod_a [-radius_a, radius_a]` in `(r, s, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radius: [f64; 3],
    pub nodes: [usize; 3],
    pub scheme: Scheme,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::new(DEFAULT_QUAD_RADIUS, DEFAULT_QUAD_NODES, Scheme::GaussLegendre).expect("default rule is valid")
    }
}

impl QuadratureSpec {
    pub fn new(radius: [f64; 3], nodes: [usize; 3], scheme: Scheme) -> Result<Self> {
        for (r, n) in radius.iter().zip(&nodes) {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(LerayError::Validation(format!("quadrature radius must be > 0, got {r}")));
            }
            if *n < 8 {
                return Err(LerayError::Validation(format!("quadrature needs >= 8 nodes per axis, got {n}")));
            }
            if scheme == Scheme::GaussLegendre && n % GL_PANEL_ORDER != 0 {
                return Err(LerayError::Validation(format!(
                    "Gauss-Legendre node count must be a multiple of {GL_PANEL_ORDER}, got {n}"
                )));
            }
        }
        Ok(Self { radius, nodes, scheme })
    }

    pub fn cube(radius: f64, nodes: usize, scheme: Scheme) -> Result<Self> {
        Self::new([radius; 3], [nodes; 3], scheme)
    }

    pub fn rule(&self, axis: usize) -> Rule1d {
        match self.scheme {
            Scheme::GaussLegendre => Rule1d::graded_gauss_legendre(self.radius[axis], self.nodes[axis] / GL_PANEL_ORDER),
            Scheme::Trapezoid => Rule1d::trapezoid(self.radius[axis], self.nodes[axis]),
        }
    }
}

/// Nodes and weights of a one-dimensional rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

impl Rule1d {
    pub fn trapezoid(radius: f64, n: usize) -> Self {
        let h = 2.0 * radius / (n - 1) as f64;
        let nodes = (0..n).map(|j| -radius + j as f64 * h).collect();
        let weights = (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h }).collect();
        Self { nodes, weights }
    }

    /// `panels` Gauss-Legendre panels whose breakpoints are `radius u |u|`
    /// for `u` uniform in `[-1, 1]`.
    pub fn graded_gauss_legendre(radius: f64, panels: usize) -> Self {
        let (x, w) = gauss_legendre(GL_PANEL_ORDER);
        let brk = |k: usize| {
            let u = -1.0 + 2.0 * k as f64 / panels as f64;
            radius * u * u.abs()
        };
        let mut nodes = Vec::with_capacity(panels * GL_PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * GL_PANEL_ORDER);
        for k in 0..panels {
            let (a, b) = (brk(k), brk(k + 1));
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).collect();
        crate::sum::sum_f64(&terms)
    }
}

/// Model and shell height of the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub model: ModelParams,
    eps: f64,
}

impl KernelParams {
    pub fn new(model: ModelParams, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(LerayError::Domain(format!("shell height must be >= 0, got {eps}")));
        }
        Ok(Self { model, eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// `C(z, zeta)` for two points of `S_beta`, `zeta = x + i y`, `z = u + i v`:
/// `(1+beta)/2 (u1-x1)^2 + (1-beta)/2 (v1-y1)^2 + i((1+beta) x1 (y1-v1) - (1-beta) y1 (x1-u1))`.
pub fn kernel_c(p: &ModelParams, z: &AffinePoint, zeta: &AffinePoint) -> Result<C64> {
    affine_to_rst(p, z)?;
    affine_to_rst(p, zeta)?;
    let b = p.beta();
    let (u1, v1) = (z[0].re, z[0].im);
    let (x1, y1) = (zeta[0].re, zeta[0].im);
    Ok(C64::new(
        0.5 * (1.0 + b) * (u1 - x1).powi(2) + 0.5 * (1.0 - b) * (v1 - y1).powi(2),
        (1.0 + b) * x1 * (y1 - v1) - (1.0 - b) * y1 * (x1 - u1),
    ))
}

/// `A` of the group-coordinate kernel.
pub fn kernel_a(p: &ModelParams, gz: &SurfacePoint, gzeta: &SurfacePoint) -> C64 {
    let b = p.beta();
    let dr = gz.r - gzeta.r;
    let dt = gz.t - gzeta.t;
    C64::new(
        0.5 * (1.0 + b) * dr * dr + 0.5 * (1.0 - b) * dt * dt,
        dr * (gz.t + gzeta.t + b * dt),
    )
}

/// Kernel of `L_beta` against `sigma`, with `gz` read on the shell of height `eps`.
pub fn leray_kernel(k: &KernelParams, gz: &SurfacePoint, gzeta: &SurfacePoint) -> Result<C64> {
    let a = kernel_a(&k.model, gz, gzeta);
    let bracket = 2.0 * a + k.eps - C64::new(0.0, gz.s - gzeta.s);
    if bracket.re <= 0.0 {
        return Err(LerayError::Singular(
            "eps = 0 with coincident (r, t): the kernel is only defined as a principal value".into(),
        ));
    }
    Ok(bracket.powi(-2) / (PI * PI))
}

/// The same kernel from affine coordinates:
/// `(4 pi^2)^{-1} [(conj zeta1 + beta zeta1)(zeta1 - z1) + (i/2)(zeta2 - z2)]^{-2}`.
pub fn leray_kernel_affine(p: &ModelParams, z: &AffinePoint, zeta: &AffinePoint) -> Result<C64> {
    affine_to_rst(p, zeta)?;
    if defining_function(p, z) > p.tolerance() {
        return Err(LerayError::Domain("evaluation point lies outside the closed domain".into()));
    }
    let b = p.beta();
    let d = (zeta[0].conj() + b * zeta[0]) * (zeta[0] - z[0]) + C64::new(0.0, 0.5) * (zeta[1] - z[1]);
    if d.norm() == 0.0 {
        return Err(LerayError::Singular("denominator vanishes".into()));
    }
    Ok(d.powi(-2) / (4.0 * PI * PI))
}

/// Closed form `int |l((0, i eps), .)|^2 sigma = 1 / (4 pi^2 eps^2 sqrt(1-beta^2))`.
pub fn kernel_l2_closed_form(beta: f64, eps: f64) -> f64 {
    1.0 / (4.0 * PI * PI * eps * eps * (1.0 - beta * beta).sqrt())
}

/// Exact `int_{x0}^{x1} (a^2 + x^2)^{-2} dx`.
fn lorentzian_sq_integral(a: f64, x0: f64, x1: f64) -> f64 {
    let prim = |x: f64| x / (2.0 * a * a * (a * a + x * x)) + (x / a).atan() / (2.0 * a.powi(3));
    prim(x1) - prim(x0)
}

/// Fraction of `int |l((0, i eps), .)|^2 sigma` lying outside the box
/// `|r| <= radius[0], |s| <= radius[1], |t| <= radius[2]`.
///
/// At fixed `(r, t)` the integrand is `pi^{-4} (a^2 + (s - c)^2)^{-2}` with
/// `a = (1+beta) r^2 + (1-beta) t^2 + eps` and `c = 2(1-beta) r t`, whose
/// s-integral over `[-R_s, R_s]` is closed-form. The remaining `(r, t)`
/// integral is done with a fine graded rule, so the result is the truncation
/// loss up to that 2-D rule's error, which is far below the loss itself.
pub fn kernel_l2_truncation_loss(beta: f64, eps: f64, radius: [f64; 3]) -> f64 {
    let rr = Rule1d::graded_gauss_legendre(radius[0], 128);
    let rt = Rule1d::graded_gauss_legendre(radius[2], 128);
    let n = rt.nodes.len();
    let kept = crate::sum::par_sum_map_f64(rr.nodes.len() * n, |m| {
        let (i, k) = (m / n, m % n);
        let (r, t) = (rr.nodes[i], rt.nodes[k]);
        let a = (1.0 + beta) * r * r + (1.0 - beta) * t * t + eps;
        let c = 2.0 * (1.0 - beta) * r * t;
        rr.weights[i] * rt.weights[k] * lorentzian_sq_integral(a, -radius[1] - c, radius[1] - c)
    });
    let total = PI * PI / (4.0 * eps * eps * (1.0 - beta * beta).sqrt());
    1.0 - kept / total
}

/// Tensor-product quadrature of `F(r, s, t)` with a deterministic reduction.
pub fn integrate_box<F>(q: &QuadratureSpec, f: F) -> C64
where
    F: Fn(f64, f64, f64) -> C64 + Sync,
{
    let (rr, rs, rt) = (q.rule(0), q.rule(1), q.rule(2));
    let ns = rs.nodes.len();
    par_sum_map(rr.nodes.len() * ns, |m| {
        let (i, j) = (m / ns, m % ns);
        let (r, s) = (rr.nodes[i], rs.nodes[j]);
        let terms: Vec<C64> = rt.nodes.iter().zip(&rt.weights).map(|(&t, &w)| f(r, s, t) * w).collect();
        sum_c64(&terms) * (rr.weights[i] * rs.weights[j])
    })
}

/// Quadrature value of `int |l((0, i eps), zeta)|^2 sigma(zeta)`.
pub fn kernel_l2_norm(k: &KernelParams, q: &QuadratureSpec) -> Result<f64> {
    if k.eps <= 0.0 {
        return Err(LerayError::Domain("the kernel L2 norm needs eps > 0".into()));
    }
    let b = k.model.beta();
    let eps = k.eps;
    let v = integrate_box(q, |r, s, t| {
        let re = (1.0 + b) * r * r + (1.0 - b) * t * t + eps;
        let im = s - 2.0 * (1.0 - b) * r * t;
        C64::new((re * re + im * im).powi(-2), 0.0)
    });
    Ok(v.re / PI.powi(4))
}

/// `L_beta f(z)` at an interior point by direct quadrature over the box of
/// `q`, with `f` supplied as a function of group coordinates.
pub fn leray_apply_interior<F>(p: &ModelParams, f: F, z: &AffinePoint, q: &QuadratureSpec) -> Result<C64>
where
    F: Fn(f64, f64, f64) -> C64 + Sync,
{
    let eps = -defining_function(p, z);
    if !(eps > 0.0) {
        return Err(LerayError::Domain(format!(
            "evaluation point must lie strictly inside the domain (height {eps:e})"
        )));
    }
    let gz = affine_to_rst_shell(p, z, Shell::new(eps)?)?;
    let k = KernelParams::new(*p, eps)?;
    let v = integrate_box(q, |r, s, t| {
        let gzeta = SurfacePoint::new(r, s, t);
        let a = kernel_a(&k.model, &gz, &gzeta);
        let bracket = 2.0 * a + eps - C64::new(0.0, gz.s - s);
        f(r, s, t) * bracket.powi(-2)
    });
    Ok(v / (PI * PI))
}
