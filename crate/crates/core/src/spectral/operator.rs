//! The discretized Leray transform `L = F_s F_r M F_r^{-1} F_s^{-1}` and the
//! operators built from its slice structure.
//!
//! A frequency slice `(xi_r, xi_s)` carries a nonzero operator only when
//! `xi_s < 0` and the t-grid resolves the multiplier Gaussians of that slice
//! (see [`MultiplierPair::slice_resolved`]). On every retained slice the grid
//! reproduces `int m0 m1 = 1` and `||m0|| ||m1|| = (1-beta^2)^{-1/4}` to
//! roundoff, so the discrete operator is an exact projection with the exact
//! norm. Unresolved slices are dropped, which is the same as restricting `L`
//! to fields band-limited to the resolved slices.

use super::dual;
use super::fourier::PartialTransform;
use super::grid::{Field3, FourierField, GridSpec, C64};
use super::multiplier::{MultiplierPair, Mutation};
use crate::error::{LerayError, Result};
use crate::model_surface::ModelParams;
use crate::sum::{sum_c64, sum_f64};
use crate::tolerances::W_MEMBERSHIP_TOL;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Slice-wise operation applied in `(xi_r, xi_s, t)` space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SliceOp {
    /// `g -> e^{2 pi xi_s eps} m0 <g, m1>`; `eps = 0` gives boundary values.
    Leray { eps: f64 },
    /// Grid adjoint of [`SliceOp::Leray`]: `g -> e^{2 pi xi_s eps} m1 <g, m0>`.
    Adjoint { eps: f64 },
    /// Orthogonal projection onto `span{m1}`.
    ProjectW,
    /// Orthogonal projection onto `span{m0}`.
    ProjectH2,
}

#[derive(Clone, Debug)]
struct SliceTable {
    xi_s: f64,
    m0: Vec<f64>,
    m1: Vec<f64>,
    m0_norm_sqr: f64,
    m1_norm_sqr: f64,
}

/// Precomputed discretization of `L_beta` on one grid.
#[derive(Debug)]
pub struct SpectralLeray {
    grid: GridSpec,
    pair: MultiplierPair,
    transform: PartialTransform,
    slots: Vec<Option<usize>>,
    tables: Vec<SliceTable>,
    dual: OnceLock<Box<SpectralLeray>>,
}

impl SpectralLeray {
    pub fn new(beta: f64, grid: GridSpec) -> Result<Self> {
        ModelParams::new(beta)?;
        Ok(Self::build(MultiplierPair::new(beta), grid))
    }

    #[doc(hidden)]
    pub fn with_mutation(beta: f64, grid: GridSpec, mutation: Mutation) -> Result<Self> {
        ModelParams::new(beta)?;
        Ok(Self::build(MultiplierPair::with_mutation(beta, mutation), grid))
    }

    fn build(pair: MultiplierPair, grid: GridSpec) -> Self {
        let [nr, ns, _] = grid.counts();
        let (xr, xs, ts) = (grid.r.freqs(), grid.s.freqs(), grid.t.coords());
        let h = grid.t.spacing();
        let tables: Vec<Option<SliceTable>> = (0..nr * ns)
            .into_par_iter()
            .map(|n| {
                let (a, b) = (xr[n / ns], xs[n % ns]);
                if !pair.slice_resolved(a, b, &grid.t) {
                    return None;
                }
                let m0: Vec<f64> = ts.iter().map(|&t| pair.m0(a, b, t)).collect();
                let m1: Vec<f64> = ts.iter().map(|&t| pair.m1(a, b, t)).collect();
                let sq = |v: &[f64]| sum_f64(&v.iter().map(|x| x * x).collect::<Vec<_>>()) * h;
                Some(SliceTable { xi_s: b, m0_norm_sqr: sq(&m0), m1_norm_sqr: sq(&m1), m0, m1 })
            })
            .collect();
        let mut slots = Vec::with_capacity(tables.len());
        let mut packed = Vec::new();
        for t in tables {
            match t {
                Some(t) => {
                    slots.push(Some(packed.len()));
                    packed.push(t);
                }
                None => slots.push(None),
            }
        }
        Self {
            grid,
            pair,
            transform: PartialTransform::new(&grid),
            slots,
            tables: packed,
            dual: OnceLock::new(),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.pair.beta()
    }

    pub fn multipliers(&self) -> &MultiplierPair {
        &self.pair
    }

    /// Number of retained `(xi_r, xi_s)` slices.
    pub fn retained_slices(&self) -> usize {
        self.tables.len()
    }

    pub fn is_retained(&self, i: usize, j: usize) -> bool {
        self.slots[i * self.grid.s.count + j].is_some()
    }

    fn check(&self, g: &GridSpec) -> Result<()> {
        if self.grid.same_shape(g) {
            Ok(())
        } else {
            Err(LerayError::Shape(format!("field grid {} does not match operator grid {}", g.id(), self.grid.id())))
        }
    }

    pub fn to_fourier(&self, f: &Field3) -> Result<FourierField> {
        self.check(f.grid())?;
        Ok(self.transform.to_fourier(f))
    }

    pub fn to_physical(&self, g: &FourierField) -> Result<Field3> {
        self.check(g.grid())?;
        Ok(self.transform.to_physical(g))
    }

    /// Applies `op` slice by slice; unretained slices map to zero.
    pub fn apply_fourier(&self, g: &FourierField, op: SliceOp) -> Result<FourierField> {
        self.check(g.grid())?;
        let nt = self.grid.t.count;
        let h = self.grid.t.spacing();
        let mut out = FourierField::zeros(self.grid);
        let src = g.data();
        out.data_mut().par_chunks_mut(nt).enumerate().for_each_init(
            || vec![C64::new(0.0, 0.0); nt],
            |terms, (n, line)| {
                let Some(slot) = self.slots[n] else { return };
                let tab = &self.tables[slot];
                let input = &src[n * nt..(n + 1) * nt];
                let (test, range, scale) = match op {
                    SliceOp::Leray { eps } => (&tab.m1, &tab.m0, (2.0 * PI * tab.xi_s * eps).exp()),
                    SliceOp::Adjoint { eps } => (&tab.m0, &tab.m1, (2.0 * PI * tab.xi_s * eps).exp()),
                    SliceOp::ProjectW => (&tab.m1, &tab.m1, 1.0 / tab.m1_norm_sqr),
                    SliceOp::ProjectH2 => (&tab.m0, &tab.m0, 1.0 / tab.m0_norm_sqr),
                };
                for ((term, v), w) in terms.iter_mut().zip(input).zip(test) {
                    *term = v * w;
                }
                let coef = sum_c64(terms) * (h * scale);
                for (o, w) in line.iter_mut().zip(range) {
                    *o = coef * w;
                }
            },
        );
        Ok(out)
    }

    /// Physical-space application of a slice operation.
    pub fn apply(&self, f: &Field3, op: SliceOp) -> Result<Field3> {
        let g = self.to_fourier(f)?;
        let out = self.apply_fourier(&g, op)?;
        self.to_physical(&out)
    }

    /// Boundary values of `L_beta f`.
    pub fn apply_boundary(&self, f: &Field3) -> Result<Field3> {
        self.apply(f, SliceOp::Leray { eps: 0.0 })
    }

    /// Values of `L_beta f` on the shell `S_beta^eps`, sampled at the shell
    /// points with the same group coordinates as the input grid.
    pub fn apply_shell(&self, f: &Field3, eps: f64) -> Result<Field3> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LerayError::Domain(format!("shell height must be > 0, got {eps}")));
        }
        self.apply(f, SliceOp::Leray { eps })
    }

    /// Grid adjoint of [`SpectralLeray::apply_boundary`].
    pub fn apply_adjoint(&self, f: &Field3) -> Result<Field3> {
        self.apply(f, SliceOp::Adjoint { eps: 0.0 })
    }

    /// `P_beta = R_beta`: orthogonal projection onto the discretized `W(S_beta)`.
    pub fn project_w(&self, f: &Field3) -> Result<Field3> {
        self.apply(f, SliceOp::ProjectW)
    }

    /// Orthogonal projection onto the discretized Hardy space.
    pub fn project_h2(&self, f: &Field3) -> Result<Field3> {
        self.apply(f, SliceOp::ProjectH2)
    }

    fn residual(&self, f: &Field3, op: SliceOp) -> Result<f64> {
        let norm = f.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok(f.sub(&self.apply(f, op)?).norm() / norm)
    }

    /// Relative distance of `f` from the discretized `W(S_beta)`.
    pub fn w_residual(&self, f: &Field3) -> Result<f64> {
        self.residual(f, SliceOp::ProjectW)
    }

    /// Relative distance of `f` from the discretized Hardy space.
    pub fn h2_residual(&self, f: &Field3) -> Result<f64> {
        self.residual(f, SliceOp::ProjectH2)
    }

    /// Relative distance from the conjugate of `W`, whose transforms are
    /// `phi(xi) m1_{-xi_r,-xi_s}(t)` supported on `xi_s > 0`.
    pub fn conjugate_dual_residual(&self, f: &Field3) -> Result<f64> {
        self.residual(&f.conj(), SliceOp::ProjectW)
    }

    pub fn in_w(&self, f: &Field3) -> Result<bool> {
        Ok(self.w_residual(f)? <= W_MEMBERSHIP_TOL)
    }

    pub fn in_h2(&self, f: &Field3) -> Result<bool> {
        Ok(self.h2_residual(f)? <= W_MEMBERSHIP_TOL)
    }

    pub fn in_conjugate_dual(&self, f: &Field3) -> Result<bool> {
        Ok(self.conjugate_dual_residual(f)? <= W_MEMBERSHIP_TOL)
    }

    /// `Q_beta` on `W(S_beta)`. The phase of `nu_{M2}` is 1 on `S_beta`, so
    /// `Q` is `L` restricted to `W`.
    pub fn apply_q(&self, f: &Field3) -> Result<Field3> {
        let res = self.w_residual(f)?;
        if res > W_MEMBERSHIP_TOL {
            return Err(LerayError::Validation(format!(
                "field is not in W: projection residual {res:e} exceeds {W_MEMBERSHIP_TOL:e}"
            )));
        }
        self.apply_boundary(f)
    }

    /// The operator on the grid used by [`SpectralLeray::apply_dual`].
    pub fn dual_operator(&self) -> Result<&SpectralLeray> {
        if let Some(d) = self.dual.get() {
            return Ok(d);
        }
        let g = dual::dual_grid(&self.grid, self.beta())?;
        let op = Box::new(Self::build(self.pair, g));
        Ok(self.dual.get_or_init(|| op))
    }

    /// `L_beta^dual g`.
    ///
    /// `g` is pulled back to the dual hypersurface, moved to the linearly
    /// equivalent copy of `S_beta`, transformed there and pulled back. In
    /// group coordinates the composite change of variables is the involution
    /// `Psi(r, s, t) = (q t, -s + 4 r t, r / q)` with `q = sqrt((1-beta)/(1+beta))`,
    /// so the result is `Psi^* L Psi^* g` with `L` discretized on the grid
    /// that `Psi` maps the input grid onto.
    pub fn apply_dual(&self, g: &Field3) -> Result<Field3> {
        self.check(g.grid())?;
        let other = self.dual_operator()?;
        let moved = dual::pullback_psi(g, self.beta(), other.grid())?;
        let transformed = other.apply_boundary(&moved)?;
        dual::pullback_psi(&transformed, self.beta(), &self.grid)
    }

    /// Builds `f` with `F_r^{-1} F_s^{-1} f = phi(xi_r, xi_s) m1(t)` on the
    /// retained slices.
    pub fn extremal_function<F>(&self, phi: F) -> Result<Field3>
    where
        F: Fn(f64, f64) -> C64 + Sync,
    {
        let [nr, ns, nt] = self.grid.counts();
        let (xr, xs) = (self.grid.r.freqs(), self.grid.s.freqs());
        let mut any_negative = false;
        'outer: for a in &xr {
            for b in &xs {
                if *b < 0.0 && phi(*a, *b) != C64::new(0.0, 0.0) {
                    any_negative = true;
                    break 'outer;
                }
            }
        }
        if !any_negative {
            return Err(LerayError::Validation("phi has no support on xi_s < 0".into()));
        }
        let mut g = FourierField::zeros(self.grid);
        g.data_mut().par_chunks_mut(nt).enumerate().for_each(|(n, line)| {
            if let Some(slot) = self.slots[n] {
                let c = phi(xr[n / ns], xs[n % ns]);
                for (o, w) in line.iter_mut().zip(&self.tables[slot].m1) {
                    *o = c * w;
                }
            }
        });
        if g.norm() == 0.0 {
            return Err(LerayError::Validation(format!(
                "phi is supported only on slices the grid does not resolve ({} of {} retained)",
                self.tables.len(),
                nr * ns
            )));
        }
        self.to_physical(&g)
    }
}

/// One-shot boundary application on the grid of `f`.
pub fn apply_leray_boundary(beta: f64, f: &Field3) -> Result<Field3> {
    SpectralLeray::new(beta, *f.grid())?.apply_boundary(f)
}

/// One-shot shell application on the grid of `f`.
pub fn apply_leray_shell(beta: f64, f: &Field3, eps: f64) -> Result<Field3> {
    SpectralLeray::new(beta, *f.grid())?.apply_shell(f, eps)
}

/// One-shot dual application on the grid of `g`.
pub fn apply_dual_leray(beta: f64, g: &Field3) -> Result<Field3> {
    SpectralLeray::new(beta, *g.grid())?.apply_dual(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fields::random_band_limited;

    fn grid() -> GridSpec {
        GridSpec::new([8.0, 32.0, 8.0], [32, 64, 64]).unwrap()
    }

    fn field(seed: u64) -> Field3 {
        random_band_limited(grid(), seed, 0.9)
    }

    #[test]
    fn zero_maps_to_zero() {
        let op = SpectralLeray::new(0.4, grid()).unwrap();
        let z = Field3::zeros(grid());
        assert_eq!(op.apply_boundary(&z).unwrap().max_abs(), 0.0);
        assert_eq!(op.apply_shell(&z, 0.5).unwrap().max_abs(), 0.0);
        assert_eq!(op.apply_dual(&z).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn boundary_operator_is_idempotent_and_bounded() {
        for beta in [0.0, 0.5, 0.75] {
            let op = SpectralLeray::new(beta, grid()).unwrap();
            let bound = (1.0 - beta * beta).powf(-0.25);
            assert!(op.retained_slices() > 0);
            for seed in 0..3 {
                let f = field(seed);
                let lf = op.apply_boundary(&f).unwrap();
                let llf = op.apply_boundary(&lf).unwrap();
                assert!(llf.rel_diff(&lf) <= 1e-8, "beta {beta}: {}", llf.rel_diff(&lf));
                assert!(lf.norm() / f.norm() <= bound + 1e-9);
            }
        }
    }

    #[test]
    fn output_vanishes_on_nonnegative_xi_s() {
        let op = SpectralLeray::new(0.3, grid()).unwrap();
        let out = op.to_fourier(&op.apply_boundary(&field(1)).unwrap()).unwrap();
        let xs = grid().s.freqs();
        let [nr, ns, nt] = grid().counts();
        let floor = 1e-12 * out.max_abs();
        for i in 0..nr {
            for (j, x) in xs.iter().enumerate() {
                if *x >= 0.0 || !op.is_retained(i, j) {
                    for k in 0..nt {
                        assert!(out.get(i, j, k).norm() < floor);
                    }
                }
            }
        }
        assert!(op.retained_slices() > 0 && op.retained_slices() < nr * ns / 2);
    }

    #[test]
    fn pipeline_preserves_plancherel() {
        let op = SpectralLeray::new(0.2, grid()).unwrap();
        let f = field(2);
        let g = op.to_fourier(&f).unwrap();
        assert!((g.norm() / f.norm() - 1.0).abs() < 1e-10);
        assert!(op.to_physical(&g).unwrap().rel_diff(&f) < 1e-12);
    }

    #[test]
    fn grid_adjoint_satisfies_the_inner_product_identity() {
        let op = SpectralLeray::new(0.6, grid()).unwrap();
        let (f, g) = (field(3), field(4));
        let lhs = op.apply_boundary(&f).unwrap().inner(&g);
        let rhs = f.inner(&op.apply_adjoint(&g).unwrap());
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1e-3));
    }

    #[test]
    fn projections_are_orthogonal() {
        let op = SpectralLeray::new(0.5, grid()).unwrap();
        let (f, g) = (field(5), field(6));
        for proj in [SliceOp::ProjectW, SliceOp::ProjectH2] {
            let pf = op.apply(&f, proj).unwrap();
            assert!(op.apply(&pf, proj).unwrap().rel_diff(&pf) < 1e-10);
            let a = pf.inner(&g);
            let b = f.inner(&op.apply(&g, proj).unwrap());
            assert!((a - b).norm() < 1e-10 * a.norm());
        }
        let pf = op.project_w(&f).unwrap();
        assert!(op.in_w(&pf).unwrap());
        assert!(!op.in_w(&f).unwrap());
        assert!(op.in_h2(&op.apply_boundary(&f).unwrap()).unwrap());
    }

    #[test]
    fn positive_frequency_fields_project_to_zero() {
        let op = SpectralLeray::new(0.5, grid()).unwrap();
        let mut g = op.to_fourier(&field(7)).unwrap();
        let xs = grid().s.freqs();
        let [_, ns, nt] = grid().counts();
        for (n, v) in g.data_mut().iter_mut().enumerate() {
            if xs[(n / nt) % ns] < 0.0 {
                *v = C64::new(0.0, 0.0);
            }
        }
        let f = op.to_physical(&g).unwrap();
        assert!(op.project_w(&f).unwrap().norm() < 1e-12 * f.norm());
        assert!(op.apply_boundary(&f).unwrap().norm() < 1e-12 * f.norm());
        let cd = op.project_w(&field(8)).unwrap().conj();
        assert!(op.in_conjugate_dual(&cd).unwrap());
        assert!(!op.in_conjugate_dual(&field(8)).unwrap());
    }

    #[test]
    fn factorization_and_isometry() {
        for beta in [0.0, 0.45, 0.8] {
            let op = SpectralLeray::new(beta, grid()).unwrap();
            let f = field(9);
            let qr = op.apply_q(&op.project_w(&f).unwrap()).unwrap();
            assert!(qr.rel_diff(&op.apply_boundary(&f).unwrap()) <= 1e-8);
            let w = op.extremal_function(|a, b| C64::new((-(a * a) - (b + 0.5).powi(2) * 20.0).exp(), a)).unwrap();
            let ratio = (1.0 - beta * beta).powf(0.25) * op.apply_q(&w).unwrap().norm() / w.norm();
            assert!((ratio - 1.0).abs() <= 1e-6, "beta {beta}: {ratio}");
            assert!(matches!(op.apply_q(&f), Err(LerayError::Validation(_))));
        }
    }

    #[test]
    fn beta_zero_operator_is_self_adjoint_with_unit_norm() {
        let op = SpectralLeray::new(0.0, grid()).unwrap();
        let f = field(10);
        assert!(op.apply_boundary(&f).unwrap().rel_diff(&op.apply_adjoint(&f).unwrap()) < 1e-12);
        let w = op.extremal_function(|_, b| C64::new((-(b + 0.5).powi(2) * 20.0).exp(), 0.0)).unwrap();
        assert!((op.apply_boundary(&w).unwrap().norm() / w.norm() - 1.0).abs() < 1e-10);
        let skew = SpectralLeray::new(0.5, grid()).unwrap();
        assert!(skew.apply_boundary(&f).unwrap().rel_diff(&skew.apply_adjoint(&f).unwrap()) > 1e-3);
    }

    #[test]
    fn shell_values_damp_monotonically() {
        let op = SpectralLeray::new(0.3, grid()).unwrap();
        let f = field(11);
        let mut prev = op.apply_boundary(&f).unwrap().norm();
        for eps in [0.1, 0.5, 1.0, 2.0] {
            let n = op.apply_shell(&f, eps).unwrap().norm();
            assert!(n <= prev);
            prev = n;
        }
        let near = op.apply_shell(&f, 1e-9).unwrap();
        assert!(near.rel_diff(&op.apply_boundary(&f).unwrap()) < 1e-7);
        for eps in [0.0, -1.0, f64::NAN] {
            assert!(matches!(op.apply_shell(&f, eps), Err(LerayError::Domain(_))));
        }
    }

    #[test]
    fn extremal_family_validation_and_scaling() {
        let op = SpectralLeray::new(0.5, grid()).unwrap();
        assert!(op.extremal_function(|_, b| C64::new(if b > 0.0 { 1.0 } else { 0.0 }, 0.0)).is_err());
        let bump = |a: f64, b: f64| C64::new((-(a * a) * 10.0 - (b + 0.4).powi(2) * 30.0).exp(), 0.0);
        let f1 = op.extremal_function(bump).unwrap();
        let f2 = op.extremal_function(|a, b| bump(a, b) * 2.0).unwrap();
        let r1 = op.apply_boundary(&f1).unwrap().norm() / f1.norm();
        let r2 = op.apply_boundary(&f2).unwrap().norm() / f2.norm();
        assert!((r1 - r2).abs() < 1e-12);
        assert!((r1 - 0.75f64.powf(-0.25)).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let op = SpectralLeray::new(0.1, grid()).unwrap();
        let other = Field3::zeros(GridSpec::new([8.0, 32.0, 8.0], [32, 64, 32]).unwrap());
        assert!(matches!(op.apply_boundary(&other), Err(LerayError::Shape(_))));
        assert!(SpectralLeray::new(1.0, grid()).is_err());
    }

    #[test]
    fn one_shot_helpers_match_the_operator() {
        let f = field(12);
        let op = SpectralLeray::new(0.7, grid()).unwrap();
        assert_eq!(apply_leray_boundary(0.7, &f).unwrap(), op.apply_boundary(&f).unwrap());
        assert_eq!(apply_leray_shell(0.7, &f, 0.3).unwrap(), op.apply_shell(&f, 0.3).unwrap());
    }
}
