//! Fourier factorization of the Leray transform on `S_beta`.

pub mod dual;
pub mod fields;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod multiplier;
pub mod operator;

pub use fourier::{ft_1d, Direction, LineFt, PartialTransform};
pub use grid::{Axis, AxisSpec, Field3, FourierField, GridSpec};
pub use multiplier::{apply_m, hs_norm_closed_form, hs_norm_m, hs_norm_m_at, multiplier_m0, multiplier_m1, MultiplierPair};
pub use operator::{apply_dual_leray, apply_leray_boundary, apply_leray_shell, SliceOp, SpectralLeray};
