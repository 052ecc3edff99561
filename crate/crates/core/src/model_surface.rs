//! Geometry of the model hypersurfaces
//! `S_beta = { Im z2 = |z1|^2 + beta Re(z1^2) }`, their vertical shells and the
//! affine automorphisms `phi_(c,s)`.
//!
//! Group coordinates `(r, s, t)` are canonical; affine coordinates are derived.

use crate::error::{LerayError, Result};
use crate::tolerances::SURFACE_TOL;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// A point of C^2 in affine coordinates `(z1, z2)`.
pub type AffinePoint = [C64; 2];

const I: C64 = C64::new(0.0, 1.0);

/// Shape parameter of `S_beta` together with the surface-membership tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    beta: f64,
    tolerance: f64,
}

impl ModelParams {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_tolerance(beta, SURFACE_TOL)
    }

    pub fn with_tolerance(beta: f64, tolerance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(LerayError::BetaOutOfRange(beta));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(LerayError::Validation(format!(
                "surface tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self { beta, tolerance })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// Group coordinates of a point of `S_beta` (or of a shell).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl SurfacePoint {
    pub const ORIGIN: SurfacePoint = SurfacePoint { r: 0.0, s: 0.0, t: 0.0 };

    pub fn new(r: f64, s: f64, t: f64) -> Self {
        Self { r, s, t }
    }
}

/// Parameters `(c, s)` of the automorphism `phi_(c,s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismParams {
    pub c: C64,
    pub s: f64,
}

impl AutomorphismParams {
    pub const IDENTITY: AutomorphismParams = AutomorphismParams { c: C64::new(0.0, 0.0), s: 0.0 };

    pub fn new(c: C64, s: f64) -> Self {
        Self { c, s }
    }
}

/// Vertical translate `S_beta^eps = S_beta + (0, i eps)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    eps: f64,
}

impl Shell {
    pub const SURFACE: Shell = Shell { eps: 0.0 };

    pub fn new(eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(LerayError::Domain(format!("shell height must be >= 0, got {eps}")));
        }
        Ok(Self { eps })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Non-isotropic dilation `delta_alpha(z1, z2) = (sqrt(alpha) z1, alpha z2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilationParams {
    alpha: f64,
}

impl DilationParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LerayError::Validation(format!("dilation factor must be > 0, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `rho(z) = |z1|^2 + beta Re(z1^2) - Im z2`; negative on the domain.
pub fn defining_function(p: &ModelParams, z: &AffinePoint) -> f64 {
    z[0].norm_sqr() + p.beta * (z[0] * z[0]).re - z[1].im
}

/// Height of `z` above `S_beta`, i.e. the `eps` of the shell through `z`.
pub fn shell_height(p: &ModelParams, z: &AffinePoint) -> f64 {
    -defining_function(p, z)
}

pub fn rst_to_affine(p: &ModelParams, g: &SurfacePoint) -> AffinePoint {
    rst_to_affine_shell(p, g, Shell::SURFACE)
}

/// `(r, s, t) -> (r + i t, s - 2(1+beta) r t + i[(1+beta) r^2 + (1-beta) t^2 + eps])`.
pub fn rst_to_affine_shell(p: &ModelParams, g: &SurfacePoint, shell: Shell) -> AffinePoint {
    let b = p.beta;
    let z1 = C64::new(g.r, g.t);
    let z2 = C64::new(
        g.s - 2.0 * (1.0 + b) * g.r * g.t,
        (1.0 + b) * g.r * g.r + (1.0 - b) * g.t * g.t + shell.eps,
    );
    [z1, z2]
}

pub fn affine_to_rst(p: &ModelParams, z: &AffinePoint) -> Result<SurfacePoint> {
    affine_to_rst_shell(p, z, Shell::SURFACE)
}

/// Inverse of [`rst_to_affine_shell`]; rejects points off the shell.
pub fn affine_to_rst_shell(p: &ModelParams, z: &AffinePoint, shell: Shell) -> Result<SurfacePoint> {
    let residual = (shell_height(p, z) - shell.eps).abs();
    if !(residual <= p.tolerance) {
        return Err(LerayError::SurfaceMembership { residual, tolerance: p.tolerance });
    }
    let r = z[0].re;
    let t = z[0].im;
    Ok(SurfacePoint { r, s: z[1].re + 2.0 * (1.0 + p.beta) * r * t, t })
}

/// `gamma(t) = (i t, i (1 - beta) t^2)`.
pub fn gamma(p: &ModelParams, t: f64) -> AffinePoint {
    [C64::new(0.0, t), C64::new(0.0, (1.0 - p.beta) * t * t)]
}

/// `phi_(c,s)(z) = (z1 + c, z2 + 2i(conj c + beta c) z1 + i(|c|^2 + beta Re c^2) + s)`.
pub fn apply_automorphism(p: &ModelParams, a: &AutomorphismParams, z: &AffinePoint) -> AffinePoint {
    let c = a.c;
    let lin = 2.0 * I * (c.conj() + p.beta * c) * z[0];
    let shift = I * (c.norm_sqr() + p.beta * (c * c).re) + a.s;
    [z[0] + c, z[1] + lin + shift]
}

/// Parameters of `phi_a1 o phi_a2`.
pub fn compose(p: &ModelParams, a1: &AutomorphismParams, a2: &AutomorphismParams) -> AutomorphismParams {
    let cross = ((a1.c.conj() + p.beta * a1.c) * a2.c).im;
    AutomorphismParams { c: a1.c + a2.c, s: a1.s + a2.s - 2.0 * cross }
}

/// Two-sided group inverse: `(-c, -s - 2 beta Im(c^2))`.
pub fn inverse(p: &ModelParams, a: &AutomorphismParams) -> AutomorphismParams {
    AutomorphismParams { c: -a.c, s: -a.s - 2.0 * p.beta * (a.c * a.c).im }
}

/// The automorphism sending `z` to `(0, i eps)` with `eps = -rho(z)`.
pub fn normalizing_automorphism(p: &ModelParams, z: &AffinePoint) -> Result<AutomorphismParams> {
    let rho = defining_function(p, z);
    if rho > p.tolerance {
        return Err(LerayError::Domain(format!(
            "point lies outside the closed domain (defining function {rho:e})"
        )));
    }
    Ok(AutomorphismParams {
        c: -z[0],
        s: -z[1].re - 2.0 * p.beta * (z[0] * z[0]).im,
    })
}

/// The same normalizing automorphism written in group coordinates.
pub fn normalizing_automorphism_rst(g: &SurfacePoint, beta: f64) -> AutomorphismParams {
    AutomorphismParams {
        c: C64::new(-g.r, -g.t),
        s: -g.s + 2.0 * (1.0 - beta) * g.r * g.t,
    }
}

pub fn dilate(d: &DilationParams, z: &AffinePoint) -> AffinePoint {
    [z[0] * d.alpha.sqrt(), z[1] * d.alpha]
}
