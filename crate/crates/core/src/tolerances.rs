//! Numerical thresholds shared by the library, the verification suite and the CLI.
//!
//! Each constant is a contract value; tests compare against these names
//! rather than literals so the thresholds live in one place.

/// Absolute tolerance on the defining function for surface membership.
pub const SURFACE_TOL: f64 = 1e-9;

/// Relative threshold on the dual-coordinate determinant.
///
/// The determinant is compared against this factor times the product of the
/// column norms of the 2x2 system, which makes the test scale-covariant.
pub const REGULARITY_REL_TOL: f64 = 1e-12;

/// Relative residual after projecting onto the discretized W space.
pub const W_MEMBERSHIP_TOL: f64 = 1e-6;

/// Central finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Relative threshold below which a Fourier-space pairing counts as zero.
pub const PAIRING_ZERO_TOL: f64 = 1e-14;

/// Number of standard deviations of the widest multiplier Gaussian that must
/// fit inside the t-window for a frequency slice to count as resolved.
///
/// The Gaussian mass outside 7 sigma is below 3e-12.
pub const RESOLVED_TAIL_SIGMAS: f64 = 7.0;

/// Minimum ratio sigma/h_t for the narrowest multiplier Gaussian.
///
/// Trapezoid aliasing error for a sampled Gaussian is 2 exp(-2 pi^2 (sigma/h)^2),
/// which is below 1e-10 at this ratio.
pub const RESOLVED_MIN_SIGMA_OVER_H: f64 = 1.1;

/// Default seed for randomized start vectors and test fields.
pub const DEFAULT_SEED: u64 = 0x5eed_1e7a;

/// Default truncation half-widths `(r, s, t)` for the quadrature oracle.
/// The s-window is wider because the kernel is sheared along s by `2(1-beta) r t`.
pub const DEFAULT_QUAD_RADIUS: [f64; 3] = [30.0, 120.0, 30.0];

/// Default quadrature node counts `(r, s, t)`.
pub const DEFAULT_QUAD_NODES: [usize; 3] = [128, 256, 128];

/// Default convergence threshold for power iteration (relative residual).
pub const POWER_ITERATION_TOL: f64 = 1e-9;

/// Default cap on power iterations.
pub const POWER_ITERATION_MAX: usize = 50;
