//! Grid form of the change of variables behind the dual Leray transform.
//!
//! With `w = w_{M2}(zeta)` and the linear map `T(w1, w2) = (i w1 / sqrt(1-beta^2), -w2)`
//! taking the dual hypersurface back onto `S_beta`, the composite `Psi = T o w`
//! reads `Psi(r, s, t) = (q t, -s + 4 r t, r / q)` in group coordinates, with
//! `q = sqrt((1-beta)/(1+beta))`. `Psi` is an involution and preserves `sigma`.

use super::fourier::{Direction, LineFt};
use super::grid::{Field3, GridSpec, C64};
use crate::error::{LerayError, Result};
use crate::model_surface::SurfacePoint;
use rayon::prelude::*;
use std::f64::consts::PI;

pub fn psi_scale(beta: f64) -> f64 {
    ((1.0 - beta) / (1.0 + beta)).sqrt()
}

pub fn psi(beta: f64, g: &SurfacePoint) -> SurfacePoint {
    let q = psi_scale(beta);
    SurfacePoint { r: q * g.t, s: -g.s + 4.0 * g.r * g.t, t: g.r / q }
}

/// Grid onto which `Psi` maps the nodes of `grid`: r and t are exchanged
/// and rescaled so that `(r, t) -> (q t, r / q)` is a permutation of nodes.
pub fn dual_grid(grid: &GridSpec, beta: f64) -> Result<GridSpec> {
    let q = psi_scale(beta);
    GridSpec::new(
        [q * grid.t.half_width, grid.s.half_width, grid.r.half_width / q],
        [grid.t.count, grid.s.count, grid.r.count],
    )
}

/// `(Psi^* u)(r, s, t) = u(q t, -s + 4 r t, r / q)` sampled on `target`.
///
/// The r/t part is an exact index exchange. The s part reflects and shifts
/// each line by `4 r t`, done as a phase ramp on the half-offset frequency
/// grid, which is the trigonometric interpolant of the line. Content moved
/// past the ends of the s-window wraps around with a sign flip.
pub fn pullback_psi(u: &Field3, beta: f64, target: &GridSpec) -> Result<Field3> {
    let src = u.grid();
    let expected = dual_grid(src, beta)?;
    if !expected.same_shape(target) {
        return Err(LerayError::Shape(format!(
            "grid {} is not the Psi-image of {}",
            target.id(),
            src.id()
        )));
    }
    let [nr, ns, nt] = target.counts();
    let plan = LineFt::new(target.s);
    let xs = target.s.freqs();
    let (rs, ts) = (target.r.coords(), target.t.coords());
    let scratch_len = plan.scratch_len();
    let zero = C64::new(0.0, 0.0);
    let lines: Vec<Vec<C64>> = (0..nr * nt)
        .into_par_iter()
        .map_init(
            || (vec![zero; ns], vec![zero; scratch_len]),
            |(buf, scratch), m| {
                let (i, k) = (m / nt, m % nt);
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = u.get(k, j, i);
                }
                plan.process(buf, Direction::Inverse, scratch);
                let shift = 4.0 * rs[i] * ts[k];
                let mut line: Vec<C64> = (0..ns)
                    .map(|j| buf[ns - 1 - j] * C64::from_polar(1.0, 2.0 * PI * shift * xs[j]))
                    .collect();
                plan.process(&mut line, Direction::Forward, scratch);
                line
            },
        )
        .collect();
    let mut out = Field3::zeros(*target);
    out.data_mut().par_chunks_mut(ns * nt).enumerate().for_each(|(i, block)| {
        for j in 0..ns {
            for k in 0..nt {
                block[j * nt + k] = lines[i * nt + k][j];
            }
        }
    });
    Ok(out)
}
