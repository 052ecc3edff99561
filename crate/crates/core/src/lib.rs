//! Leray transform on the model hypersurfaces
//! `S_beta = { Im z2 = |z1|^2 + beta Re(z1^2) }` in C^2.
//!
//! * [`model_surface`]: geometry, group coordinates, automorphisms.
//! * [`quadrature`]: direct kernel integration, the ground-truth oracle.
//! * [`spectral`]: the Fourier-factorized operator and its projections.
//! * [`projective`]: dual coordinates, the form `nu_M` and the dual CR structure.
//! * [`norm_lab`]: operator-norm estimation.

pub mod error;
pub mod model_surface;
pub mod norm_lab;
pub mod projective;
pub mod quadrature;
pub mod spectral;
pub mod sum;
pub mod tolerances;
pub mod verify;

pub use error::{LerayError, Result};
pub use model_surface::{AffinePoint, AutomorphismParams, DilationParams, ModelParams, Shell, SurfacePoint};
pub use num_complex::Complex64;
pub use projective::{DualCoords, EtaValue, NuDecomposition, ProjMatrix, SurfaceJet};
pub use quadrature::{KernelParams, QuadratureSpec, Scheme};
pub use spectral::{Field3, FourierField, GridSpec, SpectralLeray};
