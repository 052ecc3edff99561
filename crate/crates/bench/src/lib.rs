//! Shared fixtures for the criterion benchmarks under `benches/`.

use leray::quadrature::{QuadratureSpec, Scheme};
use leray::spectral::fields::random_band_limited;
use leray::{Complex64, Field3, GridSpec, KernelParams, ModelParams, Result, SpectralLeray};

/// Operator and a random input on an `n^3` grid with the default extents.
pub fn pipeline_fixture(beta: f64, n: usize) -> Result<(SpectralLeray, Field3)> {
    let grid = GridSpec::new([8.0, 32.0, 8.0], [n, n, n])?;
    Ok((SpectralLeray::new(beta, grid)?, random_band_limited(grid, 1, 0.9)))
}

/// Kernel parameters and a cube rule of `nodes` points per axis.
pub fn kernel_fixture(beta: f64, eps: f64, radius: f64, nodes: usize) -> Result<(KernelParams, QuadratureSpec)> {
    Ok((KernelParams::new(ModelParams::new(beta)?, eps)?, QuadratureSpec::cube(radius, nodes, Scheme::GaussLegendre)?))
}

/// Smooth test integrand for interior evaluation.
pub fn gaussian(r: f64, s: f64, t: f64) -> Complex64 {
    Complex64::new(-(r * r + t * t) - 0.1 * s * s, 0.0).exp()
}
