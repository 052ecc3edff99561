//! Test fields with known structure: Gaussian wave packets with closed-form
//! values, and seeded random band-limited fields.

use super::fourier::{transform_axis, Direction, LineFt};
use super::grid::{Axis, Field3, GridSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::Range;

/// `A exp(-sum_a (x_a - c_a)^2 / (2 w_a^2)) exp(-2 pi i (k_r r + k_s s))`.
///
/// With the `F^{-1}` convention the partial transform is concentrated near
/// `(xi_r, xi_s) = (k_r, k_s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub center: [f64; 3],
    pub width: [f64; 3],
    pub carrier: [f64; 2],
    pub amplitude: C64,
}

impl GaussianPacket {
    pub fn eval(&self, r: f64, s: f64, t: f64) -> C64 {
        let x = [r, s, t];
        let mut q = 0.0;
        for a in 0..3 {
            let d = (x[a] - self.center[a]) / self.width[a];
            q += d * d;
        }
        let phase = -2.0 * PI * (self.carrier[0] * r + self.carrier[1] * s);
        self.amplitude * C64::from_polar((-0.5 * q).exp(), phase)
    }

    pub fn sample(&self, grid: GridSpec) -> Field3 {
        Field3::from_fn(grid, |r, s, t| self.eval(r, s, t))
    }
}

/// Seeded random field whose `(xi_r, xi_s, xi_t)` content is confined to the
/// central `band` fraction of each frequency axis. Normalized to unit norm.
pub fn random_band_limited(grid: GridSpec, seed: u64, band: f64) -> Field3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = |axis: &super::grid::AxisSpec| band * 0.5 / axis.spacing();
    let (lr, ls, lt) = (limit(&grid.r), limit(&grid.s), limit(&grid.t));
    let (xr, xs, xt) = (grid.r.freqs(), grid.s.freqs(), grid.t.freqs());
    let mut data = vec![C64::new(0.0, 0.0); grid.len()];
    for (n, v) in data.iter_mut().enumerate() {
        let (i, j, k) = grid.unindex(n);
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if xr[i].abs() <= lr && xs[j].abs() <= ls && xt[k].abs() <= lt {
            *v = C64::new(re, im);
        }
    }
    transform_axis(&mut data, &grid, Axis::T, Direction::Forward, &LineFt::new(grid.t));
    transform_axis(&mut data, &grid, Axis::R, Direction::Forward, &LineFt::new(grid.r));
    transform_axis(&mut data, &grid, Axis::S, Direction::Forward, &LineFt::new(grid.s));
    let f = Field3::from_data(grid, data).expect("finite samples");
    let norm = f.norm();
    f.scale(C64::new(1.0 / norm, 0.0))
}

/// Seeded random superposition of `count` Gaussian packets. Each `xi_s`
/// carrier is drawn from `xi_s`; the `xi_r` carrier from `[-0.3, 0.3)`.
pub fn random_packets(seed: u64, count: usize, xi_s: Range<f64>) -> Vec<GaussianPacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GaussianPacket {
            center: [rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)],
            width: [rng.gen_range(0.6..1.0), rng.gen_range(4.0..5.0), rng.gen_range(0.6..1.0)],
            carrier: [rng.gen_range(-0.3..0.3), rng.gen_range(xi_s.clone())],
            amplitude: C64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI)),
        })
        .collect()
}

/// Samples a sum of packets on `grid`.
pub fn sample_packets(packets: &[GaussianPacket], grid: GridSpec) -> Field3 {
    Field3::from_fn(grid, |r, s, t| packets.iter().map(|p| p.eval(r, s, t)).sum())
}
