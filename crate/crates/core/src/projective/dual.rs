//! Dual coordinates, the form `nu_M`, and the dual CR structure.

use super::matrix::ProjMatrix;
use super::surface::{from_real_coords, real_coords, real_gradient, DefiningFunction, SurfaceJet};
use crate::error::{LerayError, Result};
use crate::model_surface::{AffinePoint, C64};
use crate::tolerances::{FD_STEP, REGULARITY_REL_TOL};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `(w1, w2)` attached to a surface point through a matrix `M`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCoords {
    pub w1: C64,
    pub w2: C64,
}

impl DualCoords {
    pub fn as_pair(&self) -> AffinePoint {
        [self.w1, self.w2]
    }
}

/// Regularity verdict with the determinant that decided it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    pub det: C64,
    pub threshold: f64,
}

/// `nu_M = phase * density * dx1 dy1 dx2` in a graph chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuDecomposition {
    pub density: f64,
    pub phase: C64,
}

impl NuDecomposition {
    pub fn coefficient(&self) -> C64 {
        self.phase * self.density
    }
}

/// Which matrix produced an `eta` value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EtaSource {
    M2,
    M3,
    Custom,
}

/// `eta` with `L_dual = conj(L) - conj(eta) L` and `conj(L_dual) = L - eta conj(L)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaValue {
    pub eta: C64,
    pub source: EtaSource,
}

/// A graph chart: one real coordinate of `(x1, y1, x2, y2)` is solved for
/// and the remaining three, in order, parametrize the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// Parameters `(x1, y1, x2)`.
    SolveY2,
    /// Parameters `(x1, y1, y2)`.
    SolveX2,
}

impl Chart {
    fn solved(self) -> usize {
        match self {
            Chart::SolveY2 => 3,
            Chart::SolveX2 => 2,
        }
    }

    fn params(self) -> [usize; 3] {
        match self {
            Chart::SolveY2 => [0, 1, 2],
            Chart::SolveX2 => [0, 1, 3],
        }
    }
}

/// `Phi_M(z, w) = (1, w1, w2) M (1, z1, z2)^T`.
pub fn phi_m(m: &ProjMatrix, z: &AffinePoint, w: &AffinePoint) -> C64 {
    let row = m.left_mul([ONE, w[0], w[1]]);
    row[0] + row[1] * z[0] + row[2] * z[1]
}

fn system(m: &ProjMatrix, z: &AffinePoint, mu: &[C64; 2]) -> ([[C64; 2]; 2], [C64; 2]) {
    let a = [
        [m.m11() * z[0] + m.m12() * z[1] + m.b1(), m.m21() * z[0] + m.m22() * z[1] + m.b2()],
        [m.m11() * mu[0] + m.m12() * mu[1], m.m21() * mu[0] + m.m22() * mu[1]],
    ];
    let b = [-m.c1() - m.a1() * z[0] - m.a2() * z[1], -m.a1() * mu[0] - m.a2() * mu[1]];
    (a, b)
}

fn det2(a: &[[C64; 2]; 2]) -> C64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn solve2(a: &[[C64; 2]; 2], b: &[C64; 2]) -> [C64; 2] {
    let d = det2(a);
    [(b[0] * a[1][1] - a[0][1] * b[1]) / d, (a[0][0] * b[1] - a[1][0] * b[0]) / d]
}

/// Regularity of the 2x2 tangency system, judged relative to the size of its terms.
pub fn is_m_regular(m: &ProjMatrix, jet: &SurfaceJet) -> Regularity {
    let z = &jet.point;
    let mu = jet.mu();
    let (a, _) = system(m, z, &mu);
    let col_mu = (m.m11().norm() + m.m21().norm()) * mu[0].norm() + (m.m12().norm() + m.m22().norm()) * mu[1].norm();
    let col_z = (m.m11().norm() + m.m21().norm()) * z[0].norm()
        + (m.m12().norm() + m.m22().norm()) * z[1].norm()
        + m.b1().norm()
        + m.b2().norm();
    let threshold = REGULARITY_REL_TOL * col_mu * col_z;
    let det = det2(&a);
    Regularity { regular: det.norm() > threshold && col_mu * col_z > 0.0, det, threshold }
}

/// `(w1, w2)` such that the complex tangent line at the jet's point is `{Phi_M(., w) = 0}`.
pub fn dual_coords(m: &ProjMatrix, jet: &SurfaceJet) -> Result<DualCoords> {
    let reg = is_m_regular(m, jet);
    if !reg.regular {
        return Err(LerayError::SingularSystem { det: reg.det.norm(), threshold: reg.threshold });
    }
    let (a, b) = system(m, &jet.point, &jet.mu());
    let w = solve2(&a, &b);
    Ok(DualCoords { w1: w[0], w2: w[1] })
}

/// Closed form for `M2`: `w1 = (i/2) rho_1 / rho_2`, `w2 = (zeta1 rho_1 + zeta2 rho_2) / rho_2`.
pub fn dual_coords_m2_closed_form(jet: &SurfaceJet) -> Result<DualCoords> {
    let [r1, r2] = jet.d;
    if r2.norm() <= REGULARITY_REL_TOL * r1.norm() || r2.norm() == 0.0 {
        return Err(LerayError::SingularSystem { det: r2.norm(), threshold: REGULARITY_REL_TOL * r1.norm() });
    }
    let z = jet.point;
    Ok(DualCoords { w1: 0.5 * I * r1 / r2, w2: (z[0] * r1 + z[1] * r2) / r2 })
}

/// `Upsilon = M (M')^{-1}`.
pub fn upsilon(m: &ProjMatrix, m_prime: &ProjMatrix) -> ProjMatrix {
    m.mul(&m_prime.inverse())
}

/// `(1, w) Upsilon_0`, the reciprocal of the normalization `kappa`.
pub fn upsilon_denominator(m: &ProjMatrix, m_prime: &ProjMatrix, w: &DualCoords) -> C64 {
    upsilon(m, m_prime).left_mul([ONE, w.w1, w.w2])[0]
}

/// Maps `M`-coordinates to `M'`-coordinates by the fractional-linear action of `Upsilon`.
pub fn transform_dual_coords(m: &ProjMatrix, m_prime: &ProjMatrix, w: &DualCoords) -> Result<DualCoords> {
    let ups = upsilon(m, m_prime);
    let row = ups.left_mul([ONE, w.w1, w.w2]);
    let scale = ups.frobenius() * (1.0 + w.w1.norm() + w.w2.norm());
    if row[0].norm() <= 1e-14 * scale {
        return Err(LerayError::ProjectiveInfinity(row[0].norm()));
    }
    Ok(DualCoords { w1: row[1] / row[0], w2: row[2] / row[0] })
}

/// A first-order derivation on functions of `(zeta, conj(zeta))`, given by its
/// action on the coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivation {
    pub dz: [C64; 2],
    pub dzbar: [C64; 2],
}

impl Derivation {
    /// Directional derivative along a real tangent vector with complex components `v`.
    pub fn real(v: [C64; 2]) -> Self {
        Self { dz: v, dzbar: [v[0].conj(), v[1].conj()] }
    }

    /// `L = mu1 d/dzeta1 + mu2 d/dzeta2`.
    pub fn l(jet: &SurfaceJet) -> Self {
        Self { dz: jet.mu(), dzbar: [ZERO; 2] }
    }

    /// `conj(L)`.
    pub fn l_bar(jet: &SurfaceJet) -> Self {
        let mu = jet.mu();
        Self { dz: [ZERO; 2], dzbar: [mu[0].conj(), mu[1].conj()] }
    }
}

/// Derivative of `(w1, w2)` along `v`, by differentiating the tangency system.
pub fn dual_coords_derivative(m: &ProjMatrix, jet: &SurfaceJet, v: &Derivation) -> Result<[C64; 2]> {
    let s = jet.second.ok_or_else(|| LerayError::Validation("jet lacks second partials".into()))?;
    let w = dual_coords(m, jet)?;
    let dd: [C64; 2] = std::array::from_fn(|j| (0..2).map(|k| s.holo[j][k] * v.dz[k] + s.mixed[j][k] * v.dzbar[k]).sum());
    let dmu = [dd[1], -dd[0]];
    let (a, _) = system(m, &jet.point, &jet.mu());
    let da = [
        [m.m11() * v.dz[0] + m.m12() * v.dz[1], m.m21() * v.dz[0] + m.m22() * v.dz[1]],
        [m.m11() * dmu[0] + m.m12() * dmu[1], m.m21() * dmu[0] + m.m22() * dmu[1]],
    ];
    let db = [-m.a1() * v.dz[0] - m.a2() * v.dz[1], -m.a1() * dmu[0] - m.a2() * dmu[1]];
    let rhs = [
        db[0] - da[0][0] * w.w1 - da[0][1] * w.w2,
        db[1] - da[1][0] * w.w1 - da[1][1] * w.w2,
    ];
    Ok(solve2(&a, &rhs))
}

/// Real tangent vectors `d/du_a` of a graph chart, as complex pairs `(dzeta1, dzeta2)`.
pub fn chart_frame(jet: &SurfaceJet, chart: Chart) -> Result<[[C64; 2]; 3]> {
    let g = real_gradient(&jet.d);
    let k = chart.solved();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if g[k].abs() <= 1e-10 * norm {
        return Err(LerayError::Chart(format!("{chart:?} is degenerate: rho has no component along the solved coordinate")));
    }
    Ok(chart.params().map(|p| {
        let mut e = [0.0; 4];
        e[p] = 1.0;
        e[k] = -g[p] / g[k];
        [C64::new(e[0], e[1]), C64::new(e[2], e[3])]
    }))
}

fn det3(m: [[C64; 3]; 3]) -> C64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Coefficients `(alpha1, alpha2)` with `nu_M = (alpha1 dw1 + alpha2 dw2) ^ dzeta1 ^ dzeta2`.
fn nu_alphas(m: &ProjMatrix, w: &DualCoords) -> [C64; 2] {
    let c = 1.0 / (2.0 * PI * I).powi(2);
    let det = m.block_det();
    [
        c * (m.m11() * m.a2() - m.m12() * m.a1() + det * w.w2),
        c * (m.m21() * m.a2() - m.m22() * m.a1() - det * w.w1),
    ]
}

fn nu_from_derivatives(m: &ProjMatrix, w: &DualCoords, frame: &[[C64; 2]; 3], dw: &[[C64; 2]; 3]) -> C64 {
    let al = nu_alphas(m, w);
    let theta: [C64; 3] = std::array::from_fn(|a| al[0] * dw[a][0] + al[1] * dw[a][1]);
    det3([theta, [frame[0][0], frame[1][0], frame[2][0]], [frame[0][1], frame[1][1], frame[2][1]]])
}

fn decompose(c: C64) -> Result<NuDecomposition> {
    let density = c.norm();
    if !(density > 0.0) || !density.is_finite() {
        return Err(LerayError::Singular(format!("nu_M vanishes or is not finite (|nu| = {density:e})")));
    }
    Ok(NuDecomposition { density, phase: c / density })
}

/// `nu_M` at the jet in `chart`, using the jet's second partials.
pub fn nu_form(m: &ProjMatrix, jet: &SurfaceJet, chart: Chart) -> Result<NuDecomposition> {
    let w = dual_coords(m, jet)?;
    let frame = chart_frame(jet, chart)?;
    let mut dw = [[ZERO; 2]; 3];
    for (a, e) in frame.iter().enumerate() {
        dw[a] = dual_coords_derivative(m, jet, &Derivation::real(*e))?;
    }
    decompose(nu_from_derivatives(m, &w, &frame, &dw))
}

/// Moves from `base` by `du` in the chart parameters and solves for the
/// remaining coordinate with Newton's method.
pub fn chart_point<S: DefiningFunction + ?Sized>(surface: &S, base: &AffinePoint, chart: Chart, du: [f64; 3]) -> Result<AffinePoint> {
    let mut u = real_coords(base);
    for (p, d) in chart.params().iter().zip(du) {
        u[*p] += d;
    }
    let k = chart.solved();
    for _ in 0..50 {
        let z = from_real_coords(u);
        let r = surface.rho(&z);
        let g = real_gradient(&surface.gradient(&z))[k];
        if g == 0.0 {
            return Err(LerayError::Chart("chart degenerates along the step".into()));
        }
        let step = r / g;
        u[k] -= step;
        if step.abs() <= 1e-15 * (1.0 + u[k].abs()) {
            return Ok(from_real_coords(u));
        }
    }
    let z = from_real_coords(u);
    if surface.rho(&z).abs() < 1e-12 {
        Ok(z)
    } else {
        Err(LerayError::Chart("Newton projection onto the surface did not converge".into()))
    }
}

/// Central differences of `f` along the chart parameters, with step [`FD_STEP`].
fn chart_gradient<S, F>(surface: &S, point: &AffinePoint, chart: Chart, f: F) -> Result<[C64; 3]>
where
    S: DefiningFunction + ?Sized,
    F: Fn(&AffinePoint) -> Result<C64>,
{
    let mut out = [ZERO; 3];
    for (a, o) in out.iter_mut().enumerate() {
        let mut du = [0.0; 3];
        du[a] = FD_STEP;
        let p = chart_point(surface, point, chart, du)?;
        du[a] = -FD_STEP;
        let q = chart_point(surface, point, chart, du)?;
        *o = (f(&p)? - f(&q)?) / (2.0 * FD_STEP);
    }
    Ok(out)
}

/// Components of `L` and `conj(L)` on the chart basis `d/du_a`.
fn chart_components_of_l(jet: &SurfaceJet, chart: Chart) -> ([C64; 3], [C64; 3]) {
    let mu = jet.mu();
    let on_coords = [0.5 * mu[0], -0.5 * I * mu[0], 0.5 * mu[1], -0.5 * I * mu[1]];
    let l = chart.params().map(|p| on_coords[p]);
    (l, l.map(|c| c.conj()))
}

/// [`nu_form`] with the derivatives of `w` taken by central differences on the surface.
pub fn nu_form_fd<S: DefiningFunction + ?Sized>(m: &ProjMatrix, surface: &S, point: &AffinePoint, chart: Chart) -> Result<NuDecomposition> {
    let jet = SurfaceJet::new(*point, surface.gradient(point), None)?;
    let w = dual_coords(m, &jet)?;
    let frame = chart_frame(&jet, chart)?;
    let coord = |j: usize| {
        move |z: &AffinePoint| -> Result<C64> {
            let jz = SurfaceJet::new(*z, surface.gradient(z), None)?;
            let w = dual_coords(m, &jz)?;
            Ok(if j == 0 { w.w1 } else { w.w2 })
        }
    };
    let d1 = chart_gradient(surface, point, chart, coord(0))?;
    let d2 = chart_gradient(surface, point, chart, coord(1))?;
    let dw: [[C64; 2]; 3] = std::array::from_fn(|a| [d1[a], d2[a]]);
    decompose(nu_from_derivatives(m, &w, &frame, &dw))
}

/// `eta = L w / conj(L) w` for the component of `w_M` with the larger `|conj(L) w|`.
pub fn eta_via(m: &ProjMatrix, jet: &SurfaceJet) -> Result<C64> {
    let lw = dual_coords_derivative(m, jet, &Derivation::l(jet))?;
    let lbw = dual_coords_derivative(m, jet, &Derivation::l_bar(jet))?;
    let j = if lbw[0].norm() >= lbw[1].norm() { 0 } else { 1 };
    let scale = jet.mu()[0].norm() + jet.mu()[1].norm();
    if lbw[j].norm() <= 1e-12 * scale * (1.0 + lw[j].norm()) {
        return Err(LerayError::Chart("conj(L) annihilates both dual coordinates".into()));
    }
    Ok(lw[j] / lbw[j])
}

/// `eta` through the `M2` chart, falling back to `M3`.
pub fn eta(jet: &SurfaceJet) -> Result<EtaValue> {
    match eta_via(&ProjMatrix::m2(), jet) {
        Ok(e) => Ok(EtaValue { eta: e, source: EtaSource::M2 }),
        Err(first) => eta_via(&ProjMatrix::m3(), jet)
            .map(|e| EtaValue { eta: e, source: EtaSource::M3 })
            .map_err(|second| LerayError::Chart(format!("neither M2 nor M3 chart is usable: {first}; {second}"))),
    }
}

fn l_and_lbar_fd<S, F>(surface: &S, point: &AffinePoint, chart: Chart, f: F) -> Result<(C64, C64)>
where
    S: DefiningFunction + ?Sized,
    F: Fn(&AffinePoint) -> Result<C64>,
{
    let jet = SurfaceJet::new(*point, surface.gradient(point), None)?;
    let grad = chart_gradient(surface, point, chart, f)?;
    let (l, lb) = chart_components_of_l(&jet, chart);
    let apply = |c: [C64; 3]| (0..3).map(|a| c[a] * grad[a]).sum::<C64>();
    Ok((apply(l), apply(lb)))
}

/// `eta` from finite-difference derivatives of `w_{M2}` (falling back to `M3`).
pub fn eta_fd<S: DefiningFunction + ?Sized>(surface: &S, point: &AffinePoint, chart: Chart) -> Result<EtaValue> {
    for (m, source) in [(ProjMatrix::m2(), EtaSource::M2), (ProjMatrix::m3(), EtaSource::M3)] {
        let mut best: Option<(C64, C64)> = None;
        for j in 0..2 {
            let f = |z: &AffinePoint| -> Result<C64> {
                let w = dual_coords(&m, &SurfaceJet::new(*z, surface.gradient(z), None)?)?;
                Ok(if j == 0 { w.w1 } else { w.w2 })
            };
            if let Ok((l, lb)) = l_and_lbar_fd(surface, point, chart, f) {
                if best.map_or(true, |(_, b)| lb.norm() > b.norm()) {
                    best = Some((l, lb));
                }
            }
        }
        if let Some((l, lb)) = best {
            if lb.norm() > 1e-8 {
                return Ok(EtaValue { eta: l / lb, source });
            }
        }
    }
    Err(LerayError::Chart("neither M2 nor M3 chart is usable".into()))
}

/// `conj(L_dual) f = L f - eta conj(L) f` at `point`, by central differences in `chart`.
pub fn dual_cr_residual<S, F>(f: F, surface: &S, point: &AffinePoint, chart: Chart) -> Result<C64>
where
    S: DefiningFunction + ?Sized,
    F: Fn(&AffinePoint) -> C64,
{
    let e = match surface.second_partials(point) {
        Some(_) => eta(&SurfaceJet::new(*point, surface.gradient(point), surface.second_partials(point))?)?,
        None => eta_fd(surface, point, chart)?,
    };
    let (l, lb) = l_and_lbar_fd(surface, point, chart, |z| Ok(f(z)))?;
    Ok(l - e.eta * lb)
}

/// `g_z(zeta) = Phi_M(z, w_M(zeta))^{-2}`.
pub fn eval_g_z(m: &ProjMatrix, z: &AffinePoint, jet: &SurfaceJet) -> Result<C64> {
    let w = dual_coords(m, jet)?;
    let p = phi_m(m, z, &w.as_pair());
    if p.norm() == 0.0 {
        return Err(LerayError::Singular("pairing vanishes: z lies on the complex tangent line".into()));
    }
    Ok(p.powi(-2))
}

/// `h_w(zeta) = Phi_M(zeta, w)^{-2}`.
pub fn eval_h_w(m: &ProjMatrix, w: &AffinePoint, zeta: &AffinePoint) -> Result<C64> {
    let p = phi_m(m, zeta, w);
    if p.norm() == 0.0 {
        return Err(LerayError::Singular("pairing vanishes".into()));
    }
    Ok(p.powi(-2))
}

/// The image of `S_beta` under `w_{M2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualSurfaceBeta {
    beta: f64,
}

impl DualSurfaceBeta {
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(LerayError::BetaOutOfRange(beta));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `w_{M2}(zeta) = (conj(zeta1) + beta zeta1, conj(zeta2) - i beta zeta1^2 + i beta conj(zeta1)^2)`.
    pub fn forward(&self, z: &AffinePoint) -> AffinePoint {
        let b = self.beta;
        let z1b = z[0].conj();
        [z1b + b * z[0], z[1].conj() - I * b * z[0] * z[0] + I * b * z1b * z1b]
    }

    pub fn inverse(&self, w: &AffinePoint) -> AffinePoint {
        let b = self.beta;
        let z1 = (w[0].conj() - b * w[0]) / (1.0 - b * b);
        [z1, w[1] + 2.0 * I * w[0] * z1]
    }

    /// `(1 - beta^2) Im w2 + |w1|^2 - beta Re(w1^2)`, zero on the dual surface.
    pub fn defining(&self, w: &AffinePoint) -> f64 {
        let b = self.beta;
        (1.0 - b * b) * w[1].im + w[0].norm_sqr() - b * (w[0] * w[0]).re
    }

    /// `(w1, w2) -> (i w1 / sqrt(1 - beta^2), -w2)`, onto `S_beta`.
    pub fn to_model(&self, w: &AffinePoint) -> AffinePoint {
        [I * w[0] / (1.0 - self.beta * self.beta).sqrt(), -w[1]]
    }
}

#[cfg(test)]
mod tests {
    use super::super::surface::{ModelSurface, QuadricGraph, Sphere};
    use super::*;
    use crate::model_surface::{defining_function, rst_to_affine, ModelParams, SurfacePoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn model_jet(beta: f64, g: SurfacePoint) -> SurfaceJet {
        let z = rst_to_affine(&ModelParams::new(beta).unwrap(), &g);
        SurfaceJet::at(&ModelSurface { beta }, z, 1e-9).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng) -> ProjMatrix {
        loop {
            let rows: [[C64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
            if let Ok(m) = ProjMatrix::from_rows(rows) {
                return m;
            }
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_m(&ProjMatrix::m1(), &[ZERO; 2], &[ZERO; 2]), -ONE);
        let v = phi_m(&ProjMatrix::m2(), &[ZERO, c(0.3, 0.8)], &[ZERO, c(-1.0, 0.2)]);
        assert!((v - I * (c(0.3, 0.8) - c(-1.0, 0.2))).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_matrix(&mut rng);
        let z1 = [c(0.1, 0.2), c(-0.3, 0.5)];
        let z2 = [c(1.1, -0.2), c(0.4, 0.0)];
        let w = [c(0.7, 0.1), c(-0.2, -0.9)];
        let a = c(0.3, -1.2);
        let lin = phi_m(&m, &[z1[0] + a * z2[0], z1[1] + a * z2[1]], &w) - phi_m(&m, &z1, &w) - a * phi_m(&m, &z2, &w);
        let wt = phi_m(&m, &[ZERO; 2], &w);
        assert!((lin + a * wt).norm() < 1e-13);
    }

    #[test]
    fn regularity_examples() {
        let jet = model_jet(0.5, SurfacePoint::new(0.3, 1.0, -0.2));
        assert!(is_m_regular(&ProjMatrix::m2(), &jet).regular);
        let sphere = SurfaceJet::at(&Sphere, [ONE, ZERO], 1e-12).unwrap();
        assert!(is_m_regular(&ProjMatrix::m1(), &sphere).regular);
        let vertical = SurfaceJet::new([ONE, ZERO], [ONE, ZERO], None).unwrap();
        let r = is_m_regular(&ProjMatrix::m2(), &vertical);
        assert!(!r.regular && r.det.norm() == 0.0);
        assert!(matches!(dual_coords(&ProjMatrix::m2(), &vertical), Err(LerayError::SingularSystem { .. })));
    }

    #[test]
    fn dual_coords_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let (a, b) = (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::PI));
            let z = [c(b.cos(), 0.0) * C64::from_polar(1.0, a), C64::from_polar(b.sin(), 0.7 * a)];
            let jet = SurfaceJet::at(&Sphere, z, 1e-12).unwrap();
            let w = dual_coords(&ProjMatrix::m1(), &jet).unwrap();
            assert!((w.w1 - z[0].conj()).norm() < 1e-12 && (w.w2 - z[1].conj()).norm() < 1e-12);
        }
        for beta in [0.0, 0.5, 0.9] {
            let z = [ONE, c(0.0, 1.0 + beta)];
            let jet = SurfaceJet::at(&ModelSurface { beta }, z, 1e-12).unwrap();
            let w = dual_coords(&ProjMatrix::m2(), &jet).unwrap();
            assert!((w.w1 - c(1.0 + beta, 0.0)).norm() < 1e-14);
            assert!((w.w2 - c(0.0, -(1.0 + beta))).norm() < 1e-14);
        }
    }

    #[test]
    fn tangency_residuals_on_random_quadrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q = QuadricGraph::random(&mut rng);
            let p = q.lift(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let jet = SurfaceJet::at(&q, p, 1e-9).unwrap();
            for m in [ProjMatrix::m2(), random_matrix(&mut rng)] {
                let Ok(w) = dual_coords(&m, &jet) else { continue };
                let mu = jet.mu();
                let shifted = [p[0] + mu[0], p[1] + mu[1]];
                assert!(phi_m(&m, &p, &w.as_pair()).norm() < 1e-10);
                assert!(phi_m(&m, &shifted, &w.as_pair()).norm() < 1e-10);
            }
            let a = dual_coords(&ProjMatrix::m2(), &jet).unwrap();
            let b = dual_coords_m2_closed_form(&jet).unwrap();
            assert!((a.w1 - b.w1).norm() < 1e-12 * (1.0 + a.w1.norm()));
            assert!((a.w2 - b.w2).norm() < 1e-12 * (1.0 + a.w2.norm()));
        }
    }

    #[test]
    fn model_dual_coords_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let beta = rng.gen_range(0.0..0.95);
            let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let jet = model_jet(beta, g);
            let z = jet.point;
            let w = dual_coords(&ProjMatrix::m2(), &jet).unwrap();
            let w1 = z[0].conj() + beta * z[0];
            let w2 = -2.0 * I * z[0] * w1 + z[1];
            assert!((w.w1 - w1).norm() < 1e-13 * (1.0 + w1.norm()));
            assert!((w.w2 - w2).norm() < 1e-13 * (1.0 + w2.norm()));
            let ds = DualSurfaceBeta::new(beta).unwrap();
            let f = ds.forward(&z);
            assert!((f[0] - w1).norm() < 1e-13 && (f[1] - w2).norm() < 1e-12 * (1.0 + w2.norm()));
        }
    }

    #[test]
    fn upsilon_identity_cocycle_and_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = DualCoords { w1: c(0.3, -0.7), w2: c(1.2, 0.4) };
        let m = random_matrix(&mut rng);
        let same = transform_dual_coords(&m, &m, &w).unwrap();
        assert!((same.w1 - w.w1).norm() < 1e-12 && (same.w2 - w.w2).norm() < 1e-12);
        for _ in 0..50 {
            let (a, b, cc) = (random_matrix(&mut rng), random_matrix(&mut rng), random_matrix(&mut rng));
            let w = DualCoords { w1: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), w2: c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) };
            let (Ok(ab), Ok(ac)) = (transform_dual_coords(&a, &b, &w), transform_dual_coords(&a, &cc, &w)) else { continue };
            let Ok(abc) = transform_dual_coords(&b, &cc, &ab) else { continue };
            let tol = 1e-9 * (1.0 + ac.w1.norm() + ac.w2.norm());
            assert!((abc.w1 - ac.w1).norm() < tol && (abc.w2 - ac.w2).norm() < tol);
        }
        let beta = 0.4;
        for _ in 0..50 {
            let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let jet = model_jet(beta, g);
            let w2 = dual_coords(&ProjMatrix::m2(), &jet).unwrap();
            let Ok(direct) = dual_coords(&ProjMatrix::m1(), &jet) else { continue };
            let t = transform_dual_coords(&ProjMatrix::m2(), &ProjMatrix::m1(), &w2).unwrap();
            assert!((t.w1 - direct.w1).norm() < 1e-10 * (1.0 + t.w1.norm()));
            assert!((t.w2 - direct.w2).norm() < 1e-10 * (1.0 + t.w2.norm()));
            let ups = upsilon(&ProjMatrix::m2(), &ProjMatrix::m1());
            let row = ups.left_mul([ONE, w2.w1, w2.w2]);
            let kappa = 1.0 / upsilon_denominator(&ProjMatrix::m2(), &ProjMatrix::m1(), &w2);
            assert!((kappa * row[0] - ONE).norm() < 1e-12);
        }
        let sing = ProjMatrix::from_rows([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]]).unwrap();
        let m = ProjMatrix::from_rows([[ZERO, ONE, ZERO], [ONE, ZERO, ZERO], [ZERO, ZERO, ONE]]).unwrap();
        let at_infinity = DualCoords { w1: ZERO, w2: c(3.0, 0.0) };
        assert!(matches!(transform_dual_coords(&m, &sing, &at_infinity), Err(LerayError::ProjectiveInfinity(_))));
    }

    #[test]
    fn nu_on_the_model_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let beta = rng.gen_range(0.0..0.95);
            let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let nu = nu_form(&ProjMatrix::m2(), &model_jet(beta, g), Chart::SolveY2).unwrap();
            assert!((nu.density - 1.0 / (PI * PI)).abs() < 1e-14);
            assert!((nu.phase - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn nu_matches_bordered_hessian_and_is_positive_on_quadrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let q = QuadricGraph::random(&mut rng);
            let jet = SurfaceJet::at(&q, q.lift(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 1e-9).unwrap();
            let nu = nu_form(&ProjMatrix::m2(), &jet, Chart::SolveY2).unwrap();
            let det = jet.bordered_hessian_det().unwrap();
            let rho_y2 = real_gradient(&jet.d)[3];
            let expect = -det / (PI * PI * jet.d[1] * jet.d[1] * rho_y2);
            assert!((nu.coefficient() - expect).norm() < 1e-12 * expect.norm());
            assert!(nu.density > 0.0 && det < 0.0);
        }
    }

    #[test]
    fn nu_transformation_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut checked = 0;
        for _ in 0..100 {
            let q = QuadricGraph::random(&mut rng);
            let jet = SurfaceJet::at(&q, q.lift(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 1e-9).unwrap();
            let (m, mp) = (random_matrix(&mut rng), random_matrix(&mut rng));
            let (Ok(a), Ok(b), Ok(w)) = (nu_form(&m, &jet, Chart::SolveY2), nu_form(&mp, &jet, Chart::SolveY2), dual_coords(&m, &jet)) else { continue };
            let factor = upsilon_denominator(&m, &mp, &w).powi(2);
            let lhs = a.coefficient();
            let rhs = factor * b.coefficient();
            assert!((lhs - rhs).norm() < 1e-10 * lhs.norm(), "{lhs} vs {rhs}");
            checked += 1;
        }
        assert!(checked > 80);
    }

    #[test]
    fn nu_fd_agrees_with_analytic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = QuadricGraph::random(&mut rng);
        let p = q.lift(0.2, -0.4, 0.3);
        let jet = SurfaceJet::at(&q, p, 1e-9).unwrap();
        for m in [ProjMatrix::m2(), ProjMatrix::m1(), random_matrix(&mut rng)] {
            let a = nu_form(&m, &jet, Chart::SolveY2).unwrap().coefficient();
            let b = nu_form_fd(&m, &q, &p, Chart::SolveY2).unwrap().coefficient();
            assert!((a - b).norm() < 1e-7 * a.norm());
        }
    }

    #[test]
    fn chart_errors() {
        let jet = model_jet(0.3, SurfacePoint::new(0.0, 0.0, 0.0));
        assert!(matches!(chart_frame(&jet, Chart::SolveX2), Err(LerayError::Chart(_))));
        assert!(chart_frame(&jet, Chart::SolveY2).is_ok());
        let no_second = SurfaceJet::new(jet.point, jet.d, None).unwrap();
        assert!(nu_form(&ProjMatrix::m2(), &no_second, Chart::SolveY2).is_err());
    }

    #[test]
    fn eta_on_the_model_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let beta = rng.gen_range(0.0..0.95);
            let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let jet = model_jet(beta, g);
            let lw = dual_coords_derivative(&ProjMatrix::m2(), &jet, &Derivation::l(&jet)).unwrap();
            let lbw = dual_coords_derivative(&ProjMatrix::m2(), &jet, &Derivation::l_bar(&jet)).unwrap();
            assert!((lw[0] - c(0.0, 0.5 * beta)).norm() < 1e-14);
            assert!((lbw[0] - c(0.0, -0.5)).norm() < 1e-14);
            let e = eta(&jet).unwrap();
            assert_eq!(e.source, EtaSource::M2);
            assert!((e.eta - c(-beta, 0.0)).norm() < 1e-13);
            let ef = eta_fd(&ModelSurface { beta }, &jet.point, Chart::SolveY2).unwrap();
            assert!((ef.eta - e.eta).norm() < 1e-7);
        }
        let jet = model_jet(0.0, SurfacePoint::new(0.4, 0.1, 0.9));
        assert!(eta(&jet).unwrap().eta.norm() < 1e-15);
    }

    #[test]
    fn eta_is_chart_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let q = QuadricGraph::random(&mut rng);
            let jet = SurfaceJet::at(&q, q.lift(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 1e-9).unwrap();
            let e2 = eta_via(&ProjMatrix::m2(), &jet).unwrap();
            for m in [ProjMatrix::m3(), ProjMatrix::m1(), random_matrix(&mut rng)] {
                if let Ok(e) = eta_via(&m, &jet) {
                    assert!((e - e2).norm() < 1e-8 * (1.0 + e2.norm()), "{e} vs {e2}");
                }
            }
        }
    }

    #[test]
    fn dual_cr_residuals_vanish_for_dual_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let beta = rng.gen_range(0.0..0.9);
            let s = ModelSurface { beta };
            let g = SurfacePoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let p = rst_to_affine(&ModelParams::new(beta).unwrap(), &g);
            let ds = DualSurfaceBeta::new(beta).unwrap();
            let r1 = dual_cr_residual(|z| ds.forward(z)[0], &s, &p, Chart::SolveY2).unwrap();
            let r2 = dual_cr_residual(|z| ds.forward(z)[1], &s, &p, Chart::SolveY2).unwrap();
            assert!(r1.norm() < 1e-8 && r2.norm() < 1e-8, "{r1} {r2}");
            let conj = dual_cr_residual(|z| z[0].conj(), &s, &p, Chart::SolveY2).unwrap();
            if beta > 0.1 {
                assert!(conj.norm() > 1e-3);
            }
        }
        let q = QuadricGraph::random(&mut rng);
        let p = q.lift(0.1, 0.2, -0.3);
        for m in [ProjMatrix::m2(), ProjMatrix::m1()] {
            for j in 0..2 {
                let f = |z: &AffinePoint| {
                    let w = dual_coords(&m, &SurfaceJet::new(*z, q.gradient(z), None).unwrap()).unwrap();
                    if j == 0 { w.w1 } else { w.w2 }
                };
                assert!(dual_cr_residual(f, &q, &p, Chart::SolveY2).unwrap().norm() < 1e-7);
            }
        }
    }

    #[test]
    fn dual_surface_beta_maps() {
        for beta in [0.0, 0.3, 0.7] {
            let ds = DualSurfaceBeta::new(beta).unwrap();
            assert_eq!(ds.forward(&[ZERO, ZERO]), [ZERO, ZERO]);
            let w = ds.forward(&[ONE, c(0.0, 1.0 + beta)]);
            assert!((w[0] - c(1.0 + beta, 0.0)).norm() < 1e-15 && (w[1] - c(0.0, -(1.0 + beta))).norm() < 1e-15);
            assert!(ds.defining(&w).abs() < 1e-14);
            let p = ModelParams::new(beta).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            for _ in 0..50 {
                let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let z = rst_to_affine(&p, &g);
                let w = ds.forward(&z);
                let back = ds.inverse(&w);
                assert!((back[0] - z[0]).norm() < 1e-12 && (back[1] - z[1]).norm() < 1e-12);
                assert!(ds.defining(&w).abs() < 1e-12);
                assert!(defining_function(&p, &ds.to_model(&w)).abs() < 1e-12);
            }
        }
        assert!(DualSurfaceBeta::new(1.0).is_err());
    }

    #[test]
    fn kernel_families() {
        let eps = 0.7;
        let jet = model_jet(0.4, SurfacePoint::ORIGIN);
        let g = eval_g_z(&ProjMatrix::m2(), &[ZERO, c(0.0, eps)], &jet).unwrap();
        assert!((g - c(1.0 / (eps * eps), 0.0)).norm() < 1e-14);
        assert!(eval_g_z(&ProjMatrix::m2(), &jet.point, &jet).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = ModelParams::new(0.4).unwrap();
        for _ in 0..200 {
            let g = SurfacePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let z = [c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), ZERO];
            let z = [z[0], c(rng.gen_range(-2.0..2.0), z[0].norm_sqr() + 0.4 * (z[0] * z[0]).re + rng.gen_range(0.01..2.0))];
            assert!(defining_function(&p, &z) < 0.0);
            assert!(eval_g_z(&ProjMatrix::m2(), &z, &model_jet(0.4, g)).unwrap().norm().is_finite());
        }
        let w = [c(0.5, 0.1), c(0.2, -0.3)];
        let zeta = [c(1.0, 0.0), c(0.0, 1.0)];
        let h = eval_h_w(&ProjMatrix::m1(), &w, &zeta).unwrap();
        assert!((h - (-ONE + w[0] * zeta[0] + w[1] * zeta[1]).powi(-2)).norm() < 1e-14);
    }
}
