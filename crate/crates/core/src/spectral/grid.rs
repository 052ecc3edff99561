use crate::error::{LerayError, Result};
use crate::sum::par_sum_map_f64;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// One of the three group-coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    R,
    S,
    T,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::R => 0,
            Axis::S => 1,
            Axis::T => 2,
        }
    }
}

/// Uniform centered sampling of `[-R, R)` with `N` points.
///
/// Samples sit at `x_j = (j - N/2) h` with `h = 2R/N`; the dual frequencies
/// are `xi_k = (k - N/2 + offset) / (2R)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub half_width: f64,
    pub count: usize,
    pub freq_offset: f64,
}

impl AxisSpec {
    pub fn new(half_width: f64, count: usize, freq_offset: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(LerayError::Shape(format!("axis half-width must be > 0, got {half_width}")));
        }
        if count < 16 || count % 2 != 0 {
            return Err(LerayError::Shape(format!("axis count must be even and >= 16, got {count}")));
        }
        Ok(Self { half_width, count, freq_offset })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.count as f64
    }

    pub fn freq_spacing(&self) -> f64 {
        0.5 / self.half_width
    }

    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.count / 2) as f64) * self.spacing()
    }

    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - (self.count / 2) as f64 + self.freq_offset) * self.freq_spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.count).map(|j| self.coord(j)).collect()
    }

    pub fn freqs(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.freq(k)).collect()
    }
}

/// Truncated `(r, s, t)` sampling grid.
///
/// The s-frequency axis carries a half-sample offset, so `xi_s = 0` is never
/// sampled and the negative and positive halves have equal size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r: AxisSpec,
    pub s: AxisSpec,
    pub t: AxisSpec,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::new([8.0, 32.0, 8.0], [128, 128, 128]).expect("default grid is valid")
    }
}

impl GridSpec {
    /// Extents and counts in `(r, s, t)` order.
    pub fn new(half_widths: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        Ok(Self {
            r: AxisSpec::new(half_widths[0], counts[0], 0.0)?,
            s: AxisSpec::new(half_widths[1], counts[1], 0.5)?,
            t: AxisSpec::new(half_widths[2], counts[2], 0.0)?,
        })
    }

    pub fn axis(&self, a: Axis) -> &AxisSpec {
        match a {
            Axis::R => &self.r,
            Axis::S => &self.s,
            Axis::T => &self.t,
        }
    }

    pub fn half_widths(&self) -> [f64; 3] {
        [self.r.half_width, self.s.half_width, self.t.half_width]
    }

    pub fn counts(&self) -> [usize; 3] {
        [self.r.count, self.s.count, self.t.count]
    }

    pub fn len(&self) -> usize {
        self.r.count * self.s.count * self.t.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.s.count + j) * self.t.count + k
    }

    /// Inverse of [`GridSpec::index`].
    pub fn unindex(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.t.count;
        let rest = idx / self.t.count;
        (rest / self.s.count, rest % self.s.count, k)
    }

    /// Volume element of the Riemann sum in physical space.
    pub fn cell_volume(&self) -> f64 {
        self.r.spacing() * self.s.spacing() * self.t.spacing()
    }

    /// Volume element in `(xi_r, xi_s, t)` space.
    pub fn fourier_cell_volume(&self) -> f64 {
        self.r.freq_spacing() * self.s.freq_spacing() * self.t.spacing()
    }

    /// Same grid with the s-axis sample count doubled at fixed spacing.
    pub fn doubled_s(&self) -> Self {
        let mut g = *self;
        g.s.half_width *= 2.0;
        g.s.count *= 2;
        g
    }

    /// Short identifier used in CSV output.
    pub fn id(&self) -> String {
        format!(
            "r{}x{}_s{}x{}_t{}x{}",
            self.r.half_width, self.r.count, self.s.half_width, self.s.count, self.t.half_width, self.t.count
        )
    }

    pub fn same_shape(&self, other: &GridSpec) -> bool {
        self.counts() == other.counts()
            && self
                .half_widths()
                .iter()
                .zip(other.half_widths())
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
    }
}

macro_rules! field_common {
    ($ty:ident, $vol:ident) => {
        impl $ty {
            pub fn zeros(grid: GridSpec) -> Self {
                Self { grid, data: vec![C64::new(0.0, 0.0); grid.len()] }
            }

            pub fn from_data(grid: GridSpec, data: Vec<C64>) -> Result<Self> {
                if data.len() != grid.len() {
                    return Err(LerayError::Shape(format!(
                        "expected {} samples, got {}",
                        grid.len(),
                        data.len()
                    )));
                }
                if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(LerayError::Validation("field contains non-finite samples".into()));
                }
                Ok(Self { grid, data })
            }

            pub fn grid(&self) -> &GridSpec {
                &self.grid
            }

            pub fn data(&self) -> &[C64] {
                &self.data
            }

            pub fn data_mut(&mut self) -> &mut [C64] {
                &mut self.data
            }

            pub fn into_data(self) -> Vec<C64> {
                self.data
            }

            pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
                self.data[self.grid.index(i, j, k)]
            }

            pub fn norm_sqr(&self) -> f64 {
                let d = &self.data;
                par_sum_map_f64(d.len(), |n| d[n].norm_sqr()) * self.grid.$vol()
            }

            pub fn norm(&self) -> f64 {
                self.norm_sqr().sqrt()
            }

            /// Sesquilinear inner product, conjugate-linear in the second slot.
            pub fn inner(&self, other: &Self) -> C64 {
                assert!(self.grid.same_shape(&other.grid), "grid mismatch");
                let (a, b) = (&self.data, &other.data);
                crate::sum::par_sum_map(a.len(), |n| a[n] * b[n].conj()) * self.grid.$vol()
            }

            /// Bilinear pairing without conjugation.
            pub fn pairing(&self, other: &Self) -> C64 {
                assert!(self.grid.same_shape(&other.grid), "grid mismatch");
                let (a, b) = (&self.data, &other.data);
                crate::sum::par_sum_map(a.len(), |n| a[n] * b[n]) * self.grid.$vol()
            }

            pub fn sub(&self, other: &Self) -> Self {
                assert!(self.grid.same_shape(&other.grid), "grid mismatch");
                let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a - b).collect();
                Self { grid: self.grid, data }
            }

            pub fn add(&self, other: &Self) -> Self {
                assert!(self.grid.same_shape(&other.grid), "grid mismatch");
                let data = self.data.par_iter().zip(&other.data).map(|(a, b)| a + b).collect();
                Self { grid: self.grid, data }
            }

            pub fn scale(&self, c: C64) -> Self {
                Self { grid: self.grid, data: self.data.par_iter().map(|z| z * c).collect() }
            }

            pub fn conj(&self) -> Self {
                Self { grid: self.grid, data: self.data.par_iter().map(|z| z.conj()).collect() }
            }

            pub fn max_abs(&self) -> f64 {
                self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
            }

            /// `||self - other|| / ||other||`.
            /// `||self - other|| / ||other||`, or 0 when both vanish.
            pub fn rel_diff(&self, other: &Self) -> f64 {
                let d = self.sub(other).norm();
                if d == 0.0 {
                    0.0
                } else {
                    d / other.norm()
                }
            }
        }
    };
}

/// Complex samples of a function on `S_beta` over the `(r, s, t)` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field3 {
    grid: GridSpec,
    data: Vec<C64>,
}

/// Partially transformed samples over `(xi_r, xi_s, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    grid: GridSpec,
    data: Vec<C64>,
}

field_common!(Field3, cell_volume);
field_common!(FourierField, fourier_cell_volume);

impl Field3 {
    /// Samples `f(r, s, t)` at every grid node.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> C64 + Sync,
    {
        let (rs, ss, ts) = (grid.r.coords(), grid.s.coords(), grid.t.coords());
        let data = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let (i, j, k) = grid.unindex(n);
                f(rs[i], ss[j], ts[k])
            })
            .collect();
        Self { grid, data }
    }
}

impl FourierField {
    /// Samples `g(xi_r, xi_s, t)` at every node of the partially transformed grid.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> C64 + Sync,
    {
        let (xr, xs, ts) = (grid.r.freqs(), grid.s.freqs(), grid.t.coords());
        let data = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let (i, j, k) = grid.unindex(n);
                f(xr[i], xs[j], ts[k])
            })
            .collect();
        Self { grid, data }
    }
}
