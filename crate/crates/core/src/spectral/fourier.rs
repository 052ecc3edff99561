//! Continuous Fourier transforms approximated by phase-corrected DFTs.
//!
//! Conventions: `F h(xi) = int h(x) e^{-2 pi i x xi} dx` and
//! `F^{-1} h(xi) = int h(x) e^{+2 pi i x xi} dx`. The pipeline maps physical
//! samples to frequency samples with `F^{-1}` and back with `F`.
//!
//! On the centered grid `x_j = (j - N/2) h`, `xi_k = (k - N/2 + delta) / (N h)`
//! the phase factorizes as
//! `e^{2 pi i x_j xi_k} = e^{2 pi i jk/N} a_j b_k` with
//! `a_j = (-1)^j e^{2 pi i j delta / N}` and `b_k = (-1)^k e^{i pi (N/2 - delta)}`,
//! so both directions are a pre-twiddle, an unnormalized FFT and a post-twiddle.
//! With the weights `h` and `1/(N h)` the pair is exactly inverse and unitary.

use super::grid::{Axis, AxisSpec, Field3, FourierField, GridSpec, C64};
use crate::error::{LerayError, Result};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Direction of a continuous transform in the sign convention above.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `e^{+2 pi i x xi}`: physical samples to frequency samples.
    Inverse,
    /// `e^{-2 pi i x xi}`: frequency samples back to physical samples.
    Forward,
}

/// Cached plan for the continuous transform along one axis.
#[derive(Clone)]
pub struct LineFt {
    axis: AxisSpec,
    pre: Vec<C64>,
    post: Vec<C64>,
    plus: Arc<dyn Fft<f64>>,
    minus: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LineFt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LineFt").field("axis", &self.axis).finish()
    }
}

impl LineFt {
    pub fn new(axis: AxisSpec) -> Self {
        let n = axis.count;
        let delta = axis.freq_offset;
        let sign = |j: usize| if j % 2 == 0 { 1.0 } else { -1.0 };
        let pre = (0..n)
            .map(|j| C64::from_polar(sign(j), 2.0 * PI * j as f64 * delta / n as f64))
            .collect();
        let post_phase = PI * ((n / 2) as f64 - delta);
        let post = (0..n).map(|k| C64::from_polar(sign(k), post_phase)).collect();
        let mut planner = FftPlanner::new();
        Self {
            axis,
            pre,
            post,
            plus: planner.plan_fft_inverse(n),
            minus: planner.plan_fft_forward(n),
        }
    }

    pub fn axis(&self) -> &AxisSpec {
        &self.axis
    }

    pub fn len(&self) -> usize {
        self.axis.count
    }

    pub fn is_empty(&self) -> bool {
        self.axis.count == 0
    }

    pub fn scratch_len(&self) -> usize {
        self.plus.get_inplace_scratch_len().max(self.minus.get_inplace_scratch_len())
    }

    /// In-place transform of one line of samples.
    pub fn process(&self, buf: &mut [C64], dir: Direction, scratch: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.axis.count);
        match dir {
            Direction::Inverse => {
                let h = self.axis.spacing();
                buf.iter_mut().zip(&self.pre).for_each(|(x, a)| *x *= a);
                self.plus.process_with_scratch(buf, scratch);
                buf.iter_mut().zip(&self.post).for_each(|(x, b)| *x *= b * h);
            }
            Direction::Forward => {
                let dxi = self.axis.freq_spacing();
                buf.iter_mut().zip(&self.post).for_each(|(x, b)| *x *= b.conj());
                self.minus.process_with_scratch(buf, scratch);
                buf.iter_mut().zip(&self.pre).for_each(|(x, a)| *x *= a.conj() * dxi);
            }
        }
    }

    /// Allocating convenience wrapper around [`LineFt::process`].
    pub fn transform(&self, samples: &[C64], dir: Direction) -> Vec<C64> {
        let mut buf = samples.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len()];
        self.process(&mut buf, dir, &mut scratch);
        buf
    }
}

/// Continuous transform of every line of `data` along `axis`, in place.
///
/// Lines are independent, so the result does not depend on the thread count.
pub fn transform_axis(data: &mut [C64], grid: &GridSpec, axis: Axis, dir: Direction, plan: &LineFt) {
    let [nr, ns, nt] = grid.counts();
    assert_eq!(data.len(), grid.len());
    assert_eq!(plan.len(), grid.axis(axis).count);
    let scratch_len = plan.scratch_len();
    let zero = C64::new(0.0, 0.0);
    match axis {
        Axis::T => data.par_chunks_mut(nt).for_each_init(
            || vec![zero; scratch_len],
            |scratch, line| plan.process(line, dir, scratch),
        ),
        Axis::S => data.par_chunks_mut(ns * nt).for_each_init(
            || (vec![zero; ns], vec![zero; scratch_len]),
            |(line, scratch), block| {
                for k in 0..nt {
                    for j in 0..ns {
                        line[j] = block[j * nt + k];
                    }
                    plan.process(line, dir, scratch);
                    for j in 0..ns {
                        block[j * nt + k] = line[j];
                    }
                }
            },
        ),
        Axis::R => {
            let stride = ns * nt;
            let src: &[C64] = data;
            let lines: Vec<Vec<C64>> = (0..stride)
                .into_par_iter()
                .map_init(
                    || vec![zero; scratch_len],
                    |scratch, m| {
                        let mut line: Vec<C64> = (0..nr).map(|i| src[i * stride + m]).collect();
                        plan.process(&mut line, dir, scratch);
                        line
                    },
                )
                .collect();
            data.par_chunks_mut(stride).enumerate().for_each(|(i, block)| {
                for (m, v) in block.iter_mut().enumerate() {
                    *v = lines[m][i];
                }
            });
        }
    }
}

/// Continuous transform of a physical field along one axis.
///
/// The result is returned as raw samples because a single-axis transform
/// leaves the field in a mixed domain.
pub fn ft_1d(axis: Axis, dir: Direction, grid: &GridSpec, data: &[C64]) -> Result<Vec<C64>> {
    if data.len() != grid.len() {
        return Err(LerayError::Shape(format!(
            "field has {} samples but the grid holds {}",
            data.len(),
            grid.len()
        )));
    }
    let plan = LineFt::new(*grid.axis(axis));
    let mut out = data.to_vec();
    transform_axis(&mut out, grid, axis, dir, &plan);
    Ok(out)
}

/// Plans for the two transformed axes of the pipeline.
#[derive(Clone, Debug)]
pub struct PartialTransform {
    r: LineFt,
    s: LineFt,
}

impl PartialTransform {
    pub fn new(grid: &GridSpec) -> Self {
        Self { r: LineFt::new(grid.r), s: LineFt::new(grid.s) }
    }

    /// `F_r^{-1} F_s^{-1} f`: inverse transform in s, then in r.
    pub fn to_fourier(&self, f: &Field3) -> FourierField {
        let grid = *f.grid();
        let mut data = f.data().to_vec();
        transform_axis(&mut data, &grid, Axis::S, Direction::Inverse, &self.s);
        transform_axis(&mut data, &grid, Axis::R, Direction::Inverse, &self.r);
        FourierField::from_data(grid, data).expect("shape preserved")
    }

    /// `F_s F_r g`: forward transform in r, then in s.
    pub fn to_physical(&self, g: &FourierField) -> Field3 {
        let grid = *g.grid();
        let mut data = g.data().to_vec();
        transform_axis(&mut data, &grid, Axis::R, Direction::Forward, &self.r);
        transform_axis(&mut data, &grid, Axis::S, Direction::Forward, &self.s);
        Field3::from_data(grid, data).expect("shape preserved")
    }

    pub fn line(&self, axis: Axis) -> &LineFt {
        match axis {
            Axis::R => &self.r,
            Axis::S => &self.s,
            Axis::T => panic!("the pipeline never transforms along t"),
        }
    }
}
