//! Projective dual coordinates and the dual CR structure of strongly
//! C-convex hypersurfaces in `C^2`.

pub mod dual;
pub mod matrix;
pub mod surface;

pub use dual::{
    chart_frame, chart_point, dual_coords, dual_coords_derivative, dual_coords_m2_closed_form, dual_cr_residual, eta, eta_fd,
    eta_via, eval_g_z, eval_h_w, is_m_regular, nu_form, nu_form_fd, phi_m, transform_dual_coords, upsilon, upsilon_denominator,
    Chart, Derivation, DualCoords, DualSurfaceBeta, EtaSource, EtaValue, NuDecomposition, Regularity,
};
pub use matrix::{ConditionReport, ProjMatrix};
pub use surface::{DefiningFunction, ModelSurface, QuadricGraph, SecondPartials, Sphere, SurfaceJet};
