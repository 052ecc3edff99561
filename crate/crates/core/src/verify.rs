//! Named numerical checks with measured residuals, shared by the command-line
//! `verify` command and the acceptance suite.
//!
//! Every check returns a [`CheckReport`] listing the quantities it measured
//! and the limit each one was held to. A check passes when every metric is
//! within its limit; NaN never passes.

use crate::error::{LerayError, Result};
use crate::model_surface::{
    apply_automorphism, rst_to_affine, rst_to_affine_shell, AffinePoint, AutomorphismParams, ModelParams, Shell, SurfacePoint, C64,
};
use crate::norm_lab::{crude_bound, exact_norm, extremal_probe_with, power_iteration_with, Bump, PowerIteration};
use crate::projective::{
    dual_coords, dual_coords_m2_closed_form, eta_fd, nu_form, transform_dual_coords, upsilon_denominator, Chart, DualCoords,
    DualSurfaceBeta, ModelSurface, ProjMatrix, QuadricGraph, SurfaceJet,
};
use crate::quadrature::{kernel_l2_closed_form, kernel_l2_norm, leray_apply_interior, leray_kernel, leray_kernel_affine, KernelParams, QuadratureSpec, Scheme};
use crate::spectral::fields::{random_band_limited, random_packets, sample_packets, GaussianPacket};
use crate::spectral::multiplier::Mutation;
use crate::spectral::{hs_norm_m, hs_norm_m_at, AxisSpec, Direction, GridSpec, LineFt, SpectralLeray};
use crate::tolerances::DEFAULT_SEED;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::time::Instant;

pub const HS_NORM_TOL: f64 = 1e-8;
pub const HS_SLICE_SPREAD_TOL: f64 = 1e-10;
pub const HS_RUNTIME_LIMIT_S: f64 = 1.0;
pub const POWER_ITERATION_REL_TOL: f64 = 0.02;
pub const EXTREMAL_MIN_RATIO: f64 = 0.98;
pub const CRUDE_BOUND_SLACK: f64 = 1e-9;
pub const IDEMPOTENCE_TOL: f64 = 1e-8;
pub const KERNEL_L2_REL_TOL: f64 = 5e-3;
pub const RESIDUE_SUP_TOL: f64 = 1e-6;
pub const INVARIANCE_REL_TOL: f64 = 1e-12;
pub const CROSS_ORACLE_REL_TOL: f64 = 1e-4;
pub const FACTORIZATION_TOL: f64 = 1e-8;
pub const ISOMETRY_TOL: f64 = 1e-6;
pub const PAIRING_REL_TOL: f64 = 1e-3;
pub const DUAL_IDEMPOTENCE_TOL: f64 = 1e-6;
pub const CLOSED_FORM_DUAL_TOL: f64 = 1e-12;
pub const ETA_FD_TOL: f64 = 1e-8;
pub const NU_LAW_TOL: f64 = 1e-10;
pub const DUAL_SURFACE_TOL: f64 = 1e-12;
pub const SELF_ADJOINT_TOL: f64 = 1e-10;
pub const UNIT_NORM_TOL: f64 = 0.01;

/// Sample count and spacing of the 1-D grid used for the residue transform.
pub const RESIDUE_COUNT: usize = 1 << 22;
pub const RESIDUE_SPACING: f64 = 1.0 / 32.0;
/// `|xi|` range on which the residue transform is compared: the window
/// truncation error grows like `1 / (|xi| X^2)` towards `xi = 0` and aliasing
/// grows towards the Nyquist frequency `1 / (2h)`.
pub const RESIDUE_BAND: [f64; 2] = [1e-4, 8.0];

/// The checks run by `verify`, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    HsNorm,
    OperatorNorm,
    Idempotence,
    KernelL2,
    Residue,
    Invariance,
    CrossOracle,
    Factorization,
    DualPairing,
    DualGeometry,
    BetaZero,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::HsNorm,
        Check::OperatorNorm,
        Check::Idempotence,
        Check::KernelL2,
        Check::Residue,
        Check::Invariance,
        Check::CrossOracle,
        Check::Factorization,
        Check::DualPairing,
        Check::DualGeometry,
        Check::BetaZero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::HsNorm => "hs-norm",
            Check::OperatorNorm => "operator-norm",
            Check::Idempotence => "idempotence",
            Check::KernelL2 => "kernel-l2",
            Check::Residue => "residue",
            Check::Invariance => "invariance",
            Check::CrossOracle => "cross-oracle",
            Check::Factorization => "factorization",
            Check::DualPairing => "dual-pairing",
            Check::DualGeometry => "dual-geometry",
            Check::BetaZero => "beta-zero",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

/// One measured quantity and its limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Metric {
    pub fn at_most(label: &str, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, limit, bound: Bound::AtMost }
    }

    pub fn at_least(label: &str, value: f64, limit: f64) -> Self {
        Self { label: label.into(), value, limit, bound: Bound::AtLeast }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.limit,
            Bound::AtLeast => self.value >= self.limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: Check,
    pub metrics: Vec<Metric>,
    /// Per-case measurements, one line each.
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        !self.metrics.is_empty() && self.metrics.iter().all(Metric::passed)
    }

    pub fn metric(&self, label: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.label == label)
    }
}

/// Parameters shared by the checks.
#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub grid: GridSpec,
    /// `beta` values for every check except the duality pairing and `beta = 0`.
    pub betas: Vec<f64>,
    /// Shell heights for the kernel L2 check.
    pub eps: Vec<f64>,
    /// Shell heights for the quadrature-vs-spectral comparison.
    pub shell_eps: Vec<f64>,
    pub seed: u64,
    /// Random fields per `beta` for idempotence, factorization and the `beta = 0` check.
    pub fields: usize,
    /// Packet fields per `beta` for the quadrature-vs-spectral comparison.
    pub oracle_fields: usize,
    /// `beta` values for the duality pairing. The dual grid has t-spacing
    /// `2 R_r / (q N_r)` with `q = sqrt((1-beta)/(1+beta))`, so at large `beta`
    /// it resolves only small `|xi_s|` and the pairing needs a finer r-axis.
    pub pairing_betas: Vec<f64>,
    /// Range of `|xi_s|` carriers for the pairing fields; `f` uses the
    /// negative range and `g` the positive one.
    pub pairing_band: [f64; 2],
    /// Random `(f, g)` pairs per `beta` for the duality pairing.
    pub pairs: usize,
    /// Random samples for kernel invariance and dual geometry.
    pub samples: usize,
    pub quadrature: QuadratureSpec,
    pub bump: Bump,
    #[doc(hidden)]
    pub mutation: Option<Mutation>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            betas: vec![0.0, 0.25, 0.5, 0.75],
            eps: vec![0.5, 1.0, 2.0],
            shell_eps: vec![0.5, 1.0],
            seed: DEFAULT_SEED,
            fields: 10,
            oracle_fields: 5,
            pairing_betas: vec![0.0, 0.25, 0.5],
            pairing_band: [0.15, 0.25],
            pairs: 3,
            samples: 100,
            quadrature: QuadratureSpec::default(),
            bump: Bump::default(),
            mutation: None,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.pairing_betas.is_empty() {
            return Err(LerayError::Validation("at least one beta is required".into()));
        }
        for &b in self.betas.iter().chain(&self.pairing_betas) {
            ModelParams::new(b)?;
        }
        let [lo, hi] = self.pairing_band;
        if !(lo > 0.0 && hi > lo) {
            return Err(LerayError::Validation(format!("pairing band must satisfy 0 < lo < hi, got [{lo}, {hi}]")));
        }
        for &e in self.eps.iter().chain(&self.shell_eps) {
            if !(e > 0.0 && e.is_finite()) {
                return Err(LerayError::Domain(format!("shell heights must be > 0, got {e}")));
            }
        }
        if self.fields == 0 || self.oracle_fields == 0 || self.pairs == 0 || self.samples == 0 {
            return Err(LerayError::Validation("sample counts must be positive".into()));
        }
        Ok(())
    }

    fn operator(&self, beta: f64) -> Result<SpectralLeray> {
        match self.mutation {
            Some(m) => SpectralLeray::with_mutation(beta, self.grid, m),
            None => SpectralLeray::new(beta, self.grid),
        }
    }
}

/// Runs one check.
pub fn run_check(check: Check, cfg: &VerifyConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut notes = Vec::new();
    let metrics = match check {
        Check::HsNorm => hs_norm(cfg, &mut notes, start)?,
        Check::OperatorNorm => operator_norm(cfg, &mut notes)?,
        Check::Idempotence => idempotence(cfg, &mut notes)?,
        Check::KernelL2 => kernel_l2(cfg, &mut notes)?,
        Check::Residue => residue(&mut notes)?,
        Check::Invariance => invariance(cfg, &mut notes)?,
        Check::CrossOracle => cross_oracle(cfg, &mut notes)?,
        Check::Factorization => factorization(cfg, &mut notes)?,
        Check::DualPairing => dual_pairing(cfg, &mut notes)?,
        Check::DualGeometry => dual_geometry(cfg, &mut notes)?,
        Check::BetaZero => beta_zero(cfg, &mut notes)?,
    };
    Ok(CheckReport { check, metrics, notes, seconds: start.elapsed().as_secs_f64() })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn hs_norm(cfg: &VerifyConfig, notes: &mut Vec<String>, start: Instant) -> Result<Vec<Metric>> {
    let mut err: f64 = 0.0;
    for &b in &cfg.betas {
        let (hs, exact) = (hs_norm_m(b), exact_norm(b)?);
        err = err.max((hs - exact).abs());
        notes.push(format!("beta {b}: hs {hs:.11e} exact {exact:.11e}"));
    }
    let seconds = start.elapsed().as_secs_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut spread: f64 = 0.0;
    for &b in &cfg.betas {
        let vals: Vec<f64> = (0..20).map(|_| hs_norm_m_at(b, rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..-0.05))).collect();
        let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
        spread = spread.max(hi - lo);
    }
    Ok(vec![
        Metric::at_most("max |hs - exact|", err, HS_NORM_TOL),
        Metric::at_most("seconds", seconds, HS_RUNTIME_LIMIT_S),
        Metric::at_most("spread over 20 slices", spread, HS_SLICE_SPREAD_TOL),
    ])
}

fn operator_norm(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let (mut worst_rel, mut min_ratio, mut excess, mut unconverged) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY, 0usize);
    for &b in &cfg.betas {
        let op = cfg.operator(b)?;
        let est = power_iteration_with(&op, PowerIteration { seed: cfg.seed, ..PowerIteration::default() })?;
        let exact = exact_norm(b)?;
        let ratio = extremal_probe_with(&op, cfg.bump)? / exact;
        worst_rel = worst_rel.max((est.value / exact - 1.0).abs());
        min_ratio = min_ratio.min(ratio);
        excess = excess.max(est.value.max(ratio * exact) - crude_bound(b)?);
        unconverged += usize::from(!est.converged);
        notes.push(format!(
            "beta {b}: power {:.11e} ({} iterations, residual {:.11e}) exact {exact:.11e} extremal/exact {ratio:.11e}",
            est.value, est.iterations, est.residual
        ));
    }
    Ok(vec![
        Metric::at_most("max |power/exact - 1|", worst_rel, POWER_ITERATION_REL_TOL),
        Metric::at_least("min extremal/exact", min_ratio, EXTREMAL_MIN_RATIO),
        Metric::at_most("max estimate - crude bound", excess, CRUDE_BOUND_SLACK),
        Metric::at_most("unconverged runs", unconverged as f64, 0.0),
    ])
}

fn idempotence(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let mut worst: f64 = 0.0;
    for &b in &cfg.betas {
        let op = cfg.operator(b)?;
        let mut w: f64 = 0.0;
        for k in 0..cfg.fields {
            let f = random_band_limited(cfg.grid, cfg.seed.wrapping_add(k as u64), 0.9);
            let lf = op.apply_boundary(&f)?;
            w = w.max(op.apply_boundary(&lf)?.rel_diff(&lf));
        }
        notes.push(format!("beta {b}: max ||L(Lf) - Lf|| / ||Lf|| = {w:.11e} over {} fields", cfg.fields));
        worst = worst.max(w);
    }
    Ok(vec![Metric::at_most("max ||L(Lf) - Lf|| / ||Lf||", worst, IDEMPOTENCE_TOL)])
}

fn kernel_l2(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let (mut worst, mut scaling) = (0.0f64, 0.0f64);
    for &b in &cfg.betas {
        let mut reference = None;
        for &e in &cfg.eps {
            let k = KernelParams::new(ModelParams::new(b)?, e)?;
            let v = kernel_l2_norm(&k, &cfg.quadrature)?;
            let c = kernel_l2_closed_form(b, e);
            worst = worst.max((v / c - 1.0).abs());
            notes.push(format!(
                "beta {b} eps {e}: measured {v:.11e} closed form 1/(4 pi^2 eps^2 sqrt(1-beta^2)) = {c:.11e}"
            ));
            match reference {
                None => reference = Some(v * e * e),
                Some(r) => scaling = scaling.max((v * e * e / r - 1.0).abs()),
            }
        }
    }
    Ok(vec![
        Metric::at_most("max |measured/closed - 1|", worst, KERNEL_L2_REL_TOL),
        Metric::at_most("max eps^-2 scaling deviation", scaling, KERNEL_L2_REL_TOL),
    ])
}

fn residue(notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let axis = AxisSpec::new(RESIDUE_COUNT as f64 * RESIDUE_SPACING / 2.0, RESIDUE_COUNT, 0.5)?;
    let plan = LineFt::new(axis);
    let mut worst: f64 = 0.0;
    for c in [C64::new(1.0, 0.0), C64::new(1.0, 1.0), C64::new(0.1, 0.0)] {
        let samples: Vec<C64> = axis.coords().iter().map(|&x| (x + 2.0 * C64::i() * c).powi(-2)).collect();
        let out = plan.transform(&samples, Direction::Inverse);
        let mut sup: f64 = 0.0;
        for (k, v) in out.iter().enumerate() {
            let xi = axis.freq(k);
            if xi.abs() < RESIDUE_BAND[0] || xi.abs() > RESIDUE_BAND[1] {
                continue;
            }
            let expect = if xi < 0.0 { 4.0 * PI * PI * xi * (4.0 * PI * xi * c).exp() } else { C64::new(0.0, 0.0) };
            sup = sup.max((v - expect).norm());
        }
        notes.push(format!("C = {c}: sup error {sup:.11e} on {:e} <= |xi| <= {}", RESIDUE_BAND[0], RESIDUE_BAND[1]));
        worst = worst.max(sup);
    }
    Ok(vec![Metric::at_most("max sup error", worst, RESIDUE_SUP_TOL)])
}

fn invariance(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut worst, mut forms) = (0.0f64, 0.0f64);
    for n in 0..cfg.samples {
        let b = cfg.betas[n % cfg.betas.len()];
        let p = ModelParams::new(b)?;
        let eps = rng.gen_range(0.1..2.0);
        let mut point = || SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let (gz, gzeta) = (point(), point());
        let z = rst_to_affine_shell(&p, &gz, Shell::new(eps)?);
        let zeta = rst_to_affine(&p, &gzeta);
        let a = AutomorphismParams::new(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), rng.gen_range(-5.0..5.0));
        let before = leray_kernel_affine(&p, &z, &zeta)?;
        let after = leray_kernel_affine(&p, &apply_automorphism(&p, &a, &z), &apply_automorphism(&p, &a, &zeta))?;
        worst = worst.max(rel(after, before));
        let group = leray_kernel(&KernelParams::new(p, eps)?, &gz, &gzeta)?;
        forms = forms.max(rel(group, before));
    }
    notes.push(format!("{} random (beta, z, zeta, automorphism) samples", cfg.samples));
    Ok(vec![
        Metric::at_most("max relative change under automorphisms", worst, INVARIANCE_REL_TOL),
        Metric::at_most("max group vs affine kernel difference", forms, INVARIANCE_REL_TOL),
    ])
}

/// Packets whose transforms sit well inside the slices every grid in use
/// resolves, with s-widths that keep them clear of the s-window ends.
fn oracle_packets(seed: u64, count: usize) -> Vec<GaussianPacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| GaussianPacket {
            center: [rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5)],
            width: [rng.gen_range(0.6..0.9), rng.gen_range(5.5..6.5), rng.gen_range(0.6..0.9)],
            carrier: [rng.gen_range(-0.2..0.2), rng.gen_range(-0.35..-0.3)],
            amplitude: C64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI)),
        })
        .collect()
}

fn cross_oracle(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let q = QuadratureSpec::new([5.0, 36.0, 5.0], [64, 256, 64], Scheme::GaussLegendre)?;
    let [nr, ns, nt] = cfg.grid.counts();
    let nodes = [(nr / 2, ns / 2, nt / 2), (nr / 2 - 2, ns / 2 + 2, nt / 2 + 1), (nr / 2 + 2, ns / 2 - 4, nt / 2 - 1)];
    let mut worst: f64 = 0.0;
    for &b in &cfg.betas {
        let p = ModelParams::new(b)?;
        let op = cfg.operator(b)?;
        for k in 0..cfg.oracle_fields {
            let packet = oracle_packets(cfg.seed.wrapping_add(k as u64), 1)[0];
            let f = packet.sample(cfg.grid);
            for &eps in &cfg.shell_eps {
                let out = op.apply_shell(&f, eps)?;
                let mut w: f64 = 0.0;
                for &(i, j, l) in &nodes {
                    let g = SurfacePoint::new(cfg.grid.r.coord(i), cfg.grid.s.coord(j), cfg.grid.t.coord(l));
                    let z = rst_to_affine_shell(&p, &g, Shell::new(eps)?);
                    let quad = leray_apply_interior(&p, |r, s, t| packet.eval(r, s, t), &z, &q)?;
                    w = w.max(rel(out.get(i, j, l), quad));
                }
                notes.push(format!("beta {b} field {k} eps {eps}: max relative difference {w:.11e}"));
                worst = worst.max(w);
            }
        }
    }
    Ok(vec![Metric::at_most("max relative difference", worst, CROSS_ORACLE_REL_TOL)])
}

fn factorization(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let (mut fact, mut iso) = (0.0f64, 0.0f64);
    for &b in &cfg.betas {
        let op = cfg.operator(b)?;
        let scale = (1.0 - b * b).powf(0.25);
        let (mut wf, mut wi) = (0.0f64, 0.0f64);
        for k in 0..cfg.fields {
            let f = random_band_limited(cfg.grid, cfg.seed.wrapping_add(1000 + k as u64), 0.9);
            let w = op.project_w(&f)?;
            let qw = op.apply_q(&w)?;
            wf = wf.max(qw.rel_diff(&op.apply_boundary(&f)?));
            wi = wi.max((scale * qw.norm() / w.norm() - 1.0).abs());
        }
        let e = op.extremal_function(|a, c| C64::new(cfg.bump.eval(a, c), 0.0))?;
        wi = wi.max((scale * op.apply_q(&e)?.norm() / e.norm() - 1.0).abs());
        notes.push(format!("beta {b}: ||QRf - Lf|| / ||Lf|| <= {wf:.11e}, |(1-beta^2)^(1/4) ||Qf|| / ||f|| - 1| <= {wi:.11e}"));
        fact = fact.max(wf);
        iso = iso.max(wi);
    }
    Ok(vec![
        Metric::at_most("max ||Q(Rf) - Lf|| / ||Lf||", fact, FACTORIZATION_TOL),
        Metric::at_most("max isometry defect", iso, ISOMETRY_TOL),
    ])
}

fn dual_pairing(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let (mut worst, mut idem) = (0.0f64, 0.0f64);
    let [lo, hi] = cfg.pairing_band;
    for &b in &cfg.pairing_betas {
        let op = cfg.operator(b)?;
        for k in 0..cfg.pairs {
            let seed = cfg.seed.wrapping_add(2000 + 2 * k as u64);
            let f = sample_packets(&random_packets(seed, 3, -hi..-lo), cfg.grid);
            let g = sample_packets(&random_packets(seed + 1, 3, lo..hi), cfg.grid);
            let lhs = op.apply_boundary(&f)?.pairing(&g);
            let dg = op.apply_dual(&g)?;
            let rhs = f.pairing(&dg);
            let r = rel(rhs, lhs);
            let i = op.apply_dual(&dg)?.rel_diff(&dg);
            notes.push(format!("beta {b} pair {k}: <Lf, g> = {lhs:.11e} <f, L'g> = {rhs:.11e} relative {r:.11e}, dual idempotence {i:.11e}"));
            worst = worst.max(r);
            idem = idem.max(i);
        }
    }
    Ok(vec![
        Metric::at_most("max relative pairing mismatch", worst, PAIRING_REL_TOL),
        Metric::at_most("max ||L'(L'g) - L'g|| / ||L'g||", idem, DUAL_IDEMPOTENCE_TOL),
    ])
}

fn random_matrix(rng: &mut ChaCha8Rng) -> ProjMatrix {
    loop {
        let rows: [[C64; 3]; 3] =
            std::array::from_fn(|_| std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        if let Ok(m) = ProjMatrix::from_rows(rows) {
            if m.condition_report().condition < 30.0 {
                return m;
            }
        }
    }
}

fn dual_geometry(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut closed, mut eta_err, mut law, mut cocycle, mut surf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let diff = |a: &DualCoords, b: &DualCoords| ((a.w1 - b.w1).norm() / (1.0 + b.w1.norm())).max((a.w2 - b.w2).norm() / (1.0 + b.w2.norm()));
    for n in 0..cfg.samples {
        let b = cfg.betas[n % cfg.betas.len()];
        let p = ModelParams::new(b)?;
        let g = SurfacePoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let z = rst_to_affine(&p, &g);
        let surface = ModelSurface { beta: b };
        let jet = SurfaceJet::at(&surface, z, p.tolerance())?;
        closed = closed.max(diff(&dual_coords_m2_closed_form(&jet)?, &dual_coords(&ProjMatrix::m2(), &jet)?));
        eta_err = eta_err.max((eta_fd(&surface, &z, Chart::SolveY2)?.eta - C64::new(-b, 0.0)).norm());

        let ds = DualSurfaceBeta::new(b)?;
        let w = ds.forward(&z);
        let back: AffinePoint = ds.inverse(&w);
        surf = surf
            .max((back[0] - z[0]).norm().max((back[1] - z[1]).norm()))
            .max(ds.defining(&w).abs())
            .max(crate::model_surface::defining_function(&p, &ds.to_model(&w)).abs());

        let quadric = QuadricGraph::random(&mut rng);
        let qjet = SurfaceJet::at(&quadric, quadric.lift(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), 1e-9)?;
        let (m, mp, mpp) = (random_matrix(&mut rng), random_matrix(&mut rng), random_matrix(&mut rng));
        if let (Ok(a), Ok(c), Ok(w)) = (nu_form(&m, &qjet, Chart::SolveY2), nu_form(&mp, &qjet, Chart::SolveY2), dual_coords(&m, &qjet)) {
            let lhs = a.coefficient();
            law = law.max(rel(upsilon_denominator(&m, &mp, &w).powi(2) * c.coefficient(), lhs));
            if let (Ok(ab), Ok(ac)) = (transform_dual_coords(&m, &mp, &w), transform_dual_coords(&m, &mpp, &w)) {
                if let Ok(abc) = transform_dual_coords(&mp, &mpp, &ab) {
                    cocycle = cocycle.max(diff(&abc, &ac));
                }
            }
        }
    }
    notes.push(format!("{} random points on S_beta and on random strongly convex quadrics", cfg.samples));
    Ok(vec![
        Metric::at_most("max closed-form vs solved dual coordinates", closed, CLOSED_FORM_DUAL_TOL),
        Metric::at_most("max |eta_fd + beta|", eta_err, ETA_FD_TOL),
        Metric::at_most("max nu transformation-law residual", law, NU_LAW_TOL),
        Metric::at_most("max cocycle residual", cocycle, NU_LAW_TOL),
        Metric::at_most("max dual-surface round-trip residual", surf, DUAL_SURFACE_TOL),
    ])
}

fn beta_zero(cfg: &VerifyConfig, notes: &mut Vec<String>) -> Result<Vec<Metric>> {
    let op = cfg.operator(0.0)?;
    let (mut asym, mut sym) = (0.0f64, 0.0f64);
    for k in 0..cfg.fields {
        let f = random_band_limited(cfg.grid, cfg.seed.wrapping_add(3000 + 2 * k as u64), 0.9);
        let g = random_band_limited(cfg.grid, cfg.seed.wrapping_add(3001 + 2 * k as u64), 0.9);
        let lf = op.apply_boundary(&f)?;
        asym = asym.max(lf.rel_diff(&op.apply_adjoint(&f)?).max(0.0));
        let a = lf.inner(&g);
        let b = f.inner(&op.apply_boundary(&g)?);
        sym = sym.max(rel(b, a));
    }
    let est = power_iteration_with(&op, PowerIteration { seed: cfg.seed, ..PowerIteration::default() })?;
    notes.push(format!("power iteration norm {:.11e} ({} iterations)", est.value, est.iterations));
    Ok(vec![
        Metric::at_most("max ||Lf - L*f|| / ||Lf||", asym, SELF_ADJOINT_TOL),
        Metric::at_most("max |<Lf, g> - <f, Lg>| / |<Lf, g>|", sym, SELF_ADJOINT_TOL),
        Metric::at_most("|norm - 1|", (est.value - 1.0).abs(), UNIT_NORM_TOL),
    ])
}
