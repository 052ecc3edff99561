//! Evaluation contracts for real hypersurfaces `{rho = 0}` in `C^2` and
//! their pointwise jets.

use crate::error::{LerayError, Result};
use crate::model_surface::{AffinePoint, C64};
use serde::{Deserialize, Serialize};

/// Second Wirtinger partials: `holo[j][k] = rho_{zeta_j zeta_k}` and
/// `mixed[j][k] = rho_{zeta_j conj(zeta_k)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondPartials {
    pub holo: [[C64; 2]; 2],
    pub mixed: [[C64; 2]; 2],
}

/// Pointwise access to a real defining function. Implementations are called
/// concurrently and must be `Sync`.
pub trait DefiningFunction: Sync {
    fn rho(&self, z: &AffinePoint) -> f64;

    /// `(rho_{zeta_1}, rho_{zeta_2})`.
    fn gradient(&self, z: &AffinePoint) -> [C64; 2];

    fn second_partials(&self, _z: &AffinePoint) -> Option<SecondPartials> {
        None
    }
}

/// Real coordinates `(x1, y1, x2, y2)` of a point.
pub fn real_coords(z: &AffinePoint) -> [f64; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

pub fn from_real_coords(u: [f64; 4]) -> AffinePoint {
    [C64::new(u[0], u[1]), C64::new(u[2], u[3])]
}

/// Real gradient `(rho_x1, rho_y1, rho_x2, rho_y2)` from Wirtinger partials.
pub fn real_gradient(d: &[C64; 2]) -> [f64; 4] {
    [2.0 * d[0].re, -2.0 * d[0].im, 2.0 * d[1].re, -2.0 * d[1].im]
}

/// Wirtinger partials from a real gradient and Hessian in `(x1, y1, x2, y2)`.
pub fn wirtinger_from_real(grad: &[f64; 4], hess: &[[f64; 4]; 4]) -> ([C64; 2], SecondPartials) {
    let d = [
        C64::new(0.5 * grad[0], -0.5 * grad[1]),
        C64::new(0.5 * grad[2], -0.5 * grad[3]),
    ];
    let mut holo = [[C64::new(0.0, 0.0); 2]; 2];
    let mut mixed = holo;
    for j in 0..2 {
        for k in 0..2 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            holo[j][k] = 0.25 * C64::new(hess[xj][xk] - hess[yj][yk], -hess[xj][yk] - hess[yj][xk]);
            mixed[j][k] = 0.25 * C64::new(hess[xj][xk] + hess[yj][yk], hess[xj][yk] - hess[yj][xk]);
        }
    }
    (d, SecondPartials { holo, mixed })
}

/// `S_beta`: `rho = |z1|^2 + beta Re(z1^2) - Im z2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSurface {
    pub beta: f64,
}

impl DefiningFunction for ModelSurface {
    fn rho(&self, z: &AffinePoint) -> f64 {
        z[0].norm_sqr() + self.beta * (z[0] * z[0]).re - z[1].im
    }

    fn gradient(&self, z: &AffinePoint) -> [C64; 2] {
        [z[0].conj() + self.beta * z[0], C64::new(0.0, 0.5)]
    }

    fn second_partials(&self, _z: &AffinePoint) -> Option<SecondPartials> {
        let o = C64::new(0.0, 0.0);
        Some(SecondPartials {
            holo: [[C64::new(self.beta, 0.0), o], [o, o]],
            mixed: [[C64::new(1.0, 0.0), o], [o, o]],
        })
    }
}

/// Unit sphere `|z1|^2 + |z2|^2 - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Sphere;

impl DefiningFunction for Sphere {
    fn rho(&self, z: &AffinePoint) -> f64 {
        z[0].norm_sqr() + z[1].norm_sqr() - 1.0
    }

    fn gradient(&self, z: &AffinePoint) -> [C64; 2] {
        [z[0].conj(), z[1].conj()]
    }

    fn second_partials(&self, _z: &AffinePoint) -> Option<SecondPartials> {
        let (o, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Some(SecondPartials { holo: [[o, o], [o, o]], mixed: [[one, o], [o, one]] })
    }
}

/// Graph `y2 = 1/2 u^T P u + g^T u` over `u = (x1, y1, x2)` with `P`
/// symmetric positive definite, so the domain above it is strongly convex.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadricGraph {
    pub hessian: [[f64; 3]; 3],
    pub linear: [f64; 3],
}

impl QuadricGraph {
    pub fn new(hessian: [[f64; 3]; 3], linear: [f64; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..3 {
                if (hessian[i][j] - hessian[j][i]).abs() > 1e-14 * (1.0 + hessian[i][j].abs()) {
                    return Err(LerayError::Validation("quadric Hessian must be symmetric".into()));
                }
            }
        }
        let h = &hessian;
        let m1 = h[0][0];
        let m2 = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let m3 = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
            + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
        if !(m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
            return Err(LerayError::Validation("quadric Hessian must be positive definite".into()));
        }
        Ok(Self { hessian, linear })
    }

    /// Random instance with `P = A A^T + 0.5 I`, entries of `A` and `g` in `[-1, 1]`.
    pub fn random<R: rand::Rng>(rng: &mut R) -> Self {
        let a: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0)));
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = (0..3).map(|k| a[i][k] * a[j][k]).sum::<f64>() + if i == j { 0.5 } else { 0.0 };
            }
        }
        let g = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        Self::new(p, g).expect("construction is positive definite")
    }

    pub fn height(&self, u: [f64; 3]) -> f64 {
        let mut v = 0.0;
        for i in 0..3 {
            v += self.linear[i] * u[i];
            for j in 0..3 {
                v += 0.5 * self.hessian[i][j] * u[i] * u[j];
            }
        }
        v
    }

    pub fn lift(&self, x1: f64, y1: f64, x2: f64) -> AffinePoint {
        [C64::new(x1, y1), C64::new(x2, self.height([x1, y1, x2]))]
    }

    fn real_jet(&self, z: &AffinePoint) -> ([f64; 4], [[f64; 4]; 4]) {
        let u = [z[0].re, z[0].im, z[1].re];
        let mut grad = [0.0, 0.0, 0.0, -1.0];
        let mut hess = [[0.0; 4]; 4];
        for i in 0..3 {
            grad[i] = self.linear[i] + (0..3).map(|j| self.hessian[i][j] * u[j]).sum::<f64>();
            for j in 0..3 {
                hess[i][j] = self.hessian[i][j];
            }
        }
        (grad, hess)
    }
}

impl DefiningFunction for QuadricGraph {
    fn rho(&self, z: &AffinePoint) -> f64 {
        self.height([z[0].re, z[0].im, z[1].re]) - z[1].im
    }

    fn gradient(&self, z: &AffinePoint) -> [C64; 2] {
        let (g, h) = self.real_jet(z);
        wirtinger_from_real(&g, &h).0
    }

    fn second_partials(&self, z: &AffinePoint) -> Option<SecondPartials> {
        let (g, h) = self.real_jet(z);
        Some(wirtinger_from_real(&g, &h).1)
    }
}

/// First (and optionally second) partials of `rho` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceJet {
    pub point: AffinePoint,
    pub d: [C64; 2],
    pub second: Option<SecondPartials>,
}

impl SurfaceJet {
    pub fn new(point: AffinePoint, d: [C64; 2], second: Option<SecondPartials>) -> Result<Self> {
        if d[0].norm() == 0.0 && d[1].norm() == 0.0 {
            return Err(LerayError::Validation("defining function has vanishing gradient".into()));
        }
        Ok(Self { point, d, second })
    }

    /// Jet of `surface` at `point`, which must satisfy `|rho| <= tol * (1 + |grad rho|)`.
    pub fn at<S: DefiningFunction + ?Sized>(surface: &S, point: AffinePoint, tol: f64) -> Result<Self> {
        let d = surface.gradient(&point);
        let r = surface.rho(&point);
        let scale = tol * (1.0 + 2.0 * (d[0].norm_sqr() + d[1].norm_sqr()).sqrt());
        if r.abs() > scale {
            return Err(LerayError::SurfaceMembership { residual: r.abs(), tolerance: scale });
        }
        Self::new(point, d, surface.second_partials(&point))
    }

    /// Coefficients of the tangent field `L = mu1 d/dzeta1 + mu2 d/dzeta2`.
    pub fn mu(&self) -> [C64; 2] {
        [self.d[1], -self.d[0]]
    }

    /// `det [[0, rho_{z1bar}, rho_{z2bar}], [rho_{z1}, rho_{11bar}, rho_{12bar}], [rho_{z2}, rho_{21bar}, rho_{22bar}]]`.
    /// Real, and negative exactly when the surface is strongly pseudoconvex at the point.
    pub fn bordered_hessian_det(&self) -> Result<f64> {
        let s = self.second.ok_or_else(|| LerayError::Validation("jet lacks second partials".into()))?;
        let (d, m) = (self.d, s.mixed);
        let det = -d[0].conj() * (d[0] * m[1][1] - m[0][1] * d[1]) + d[1].conj() * (d[0] * m[1][0] - m[0][0] * d[1]);
        Ok(det.re)
    }
}
