//! `leray`: command-line front end for the Leray transform toolkit.
//!
//! Exit codes: 0 success, 1 a check or regularity test failed, 2 usage or
//! validation error.

mod config;
mod format;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{parse_grid, pick, FileConfig};
use format::{complex, complex_pair, round, sig};
use leray::model_surface::C64;
use leray::norm_lab::{sweep_row, Bump, PowerIteration};
use leray::projective::{dual_coords, eta, eta_fd, is_m_regular, nu_form, Chart, DefiningFunction, ModelSurface, ProjMatrix, Sphere, SurfaceJet};
use leray::quadrature::{kernel_l2_closed_form, kernel_l2_norm, kernel_l2_truncation_loss};
use leray::spectral::io::{load_field, save_field};
use leray::spectral::multiplier::Mutation;
use leray::spectral::SpectralLeray;
use leray::tolerances::{DEFAULT_QUAD_NODES, DEFAULT_QUAD_RADIUS, DEFAULT_SEED, SURFACE_TOL};
use leray::verify::{run_check, Bound, Check, CheckReport, VerifyConfig};
use leray::{AffinePoint, KernelParams, ModelParams, QuadratureSpec, Scheme};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "LERAY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "leray", version, about = "Leray transform on the model hypersurfaces S_beta")]
struct Cli {
    /// JSON file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Norm sweep: exact, crude bound, power iteration and extremal probe.
    Norm(NormArgs),
    /// Run the numerical check suite.
    Verify(VerifyArgs),
    /// Dual coordinates, regularity, nu_M and eta at a surface point.
    Dual(DualArgs),
    /// Kernel L2 norm by quadrature against the closed form.
    KernelNorm(KernelNormArgs),
    /// Apply the boundary, shell or dual operator to a field file.
    Apply(ApplyArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct NormArgs {
    /// Comma-separated beta values in [0, 1).
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// `default`, `doubled-s`, or `Rr,Rs,Rt:Nr,Ns,Nt`.
    #[arg(long)]
    grid: Option<String>,
    /// Seed for the power-iteration start vector.
    #[arg(long)]
    seed: Option<u64>,
    /// Power-iteration step limit.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Power-iteration relative stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[command(flatten)]
    bump: BumpArgs,
    /// Print JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

/// Gaussian bump in the `(xi_r, xi_s)` plane used by the extremal probe.
#[derive(Args, Debug)]
struct BumpArgs {
    /// Bump centre `xi_r,xi_s`; `xi_s` must be negative.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true)]
    bump_center: Option<Vec<f64>>,
    /// Bump widths `xi_r,xi_s`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    bump_width: Option<Vec<f64>>,
}

impl BumpArgs {
    fn resolve(self, file: &FileConfig) -> Result<Bump> {
        let pair = |v: Vec<f64>, flag: &str| <[f64; 2]>::try_from(v).map_err(|v| anyhow!("--{flag} needs two values, got {}", v.len()));
        let defaults = Bump::default();
        let center = match self.bump_center {
            Some(v) => pair(v, "bump-center")?,
            None => file.bump_center.unwrap_or(defaults.center),
        };
        let width = match self.bump_width {
            Some(v) => pair(v, "bump-width")?,
            None => file.bump_width.unwrap_or(defaults.width),
        };
        Ok(Bump::new(center, width)?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Injection {
    M1Sign,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    /// Comma-separated check names; all checks when omitted.
    #[arg(long, value_delimiter = ',')]
    only: Option<Vec<String>>,
    /// Beta values for the spectral checks and the duality pairing.
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Shell heights for the kernel L2 and quadrature-vs-spectral checks.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// `default`, `doubled-s`, or `Rr,Rs,Rt:Nr,Ns,Nt`.
    #[arg(long)]
    grid: Option<String>,
    /// Seed for the random test fields.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    bump: BumpArgs,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
    #[arg(long, hide = true)]
    inject: Option<Injection>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DualArgs {
    /// `sbeta:<beta>` or `sphere`.
    #[arg(long)]
    surface: Option<String>,
    /// `M1`, `M2`, `M3` or a JSON matrix file.
    #[arg(long)]
    matrix: Option<String>,
    /// `x1,y1[,x2]`; the remaining coordinate is solved from the surface equation.
    #[arg(long, value_delimiter = ',')]
    point: Option<Vec<f64>>,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    GaussLegendre,
    Trapezoid,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct KernelNormArgs {
    /// Comma-separated beta values in [0, 1).
    #[arg(long, value_delimiter = ',')]
    beta: Option<Vec<f64>>,
    /// Comma-separated shell heights.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Truncation half-widths `r,s,t`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    radius: Option<Vec<f64>>,
    /// Nodes per axis `r,s,t`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    nodes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Print JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    /// Field file to read.
    #[arg(long)]
    input: PathBuf,
    /// Field file to write.
    #[arg(long)]
    output: PathBuf,
    /// Surface parameter in [0, 1).
    #[arg(long)]
    beta: Option<f64>,
    /// Evaluate on the shell at this height instead of the boundary.
    #[arg(long, conflicts_with = "dual")]
    eps: Option<f64>,
    /// Apply the dual transform.
    #[arg(long)]
    dual: bool,
    /// Print a JSON summary.
    #[arg(long)]
    json: bool,
}

/// A completed run whose outcome is negative: exit code 1.
#[derive(Debug)]
struct Failure(String);

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Failure>().is_some() { 1 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Norm(a) => cmd_norm(a, &file, &mut out),
        Command::Verify(a) => cmd_verify(a, &file, &mut out),
        Command::Dual(a) => cmd_dual(a, &file, &mut out),
        Command::KernelNorm(a) => cmd_kernel_norm(a, &file, &mut out),
        Command::Apply(a) => cmd_apply(a, &file, &mut out),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value.trim().parse().with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
    if n == 0 {
        bail!("{THREADS_ENV} must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    Ok(())
}

fn betas(flag: Option<Vec<f64>>, file: &FileConfig, default: &[f64]) -> Result<Vec<f64>> {
    let v = pick(flag, file.beta.clone().map(|b| b.into_vec())).unwrap_or_else(|| default.to_vec());
    if v.is_empty() {
        bail!("at least one beta is required");
    }
    for &b in &v {
        ModelParams::new(b)?;
    }
    Ok(v)
}

fn grid(flag: Option<String>, file: &FileConfig) -> Result<leray::GridSpec> {
    parse_grid(pick(flag, file.grid.clone()).as_deref().unwrap_or("default"))
}

fn print_json(out: &mut impl Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn cmd_norm(a: NormArgs, file: &FileConfig, out: &mut impl Write) -> Result<()> {
    let betas = betas(a.beta, file, &[0.0, 0.25, 0.5, 0.75])?;
    let grid = grid(a.grid, file)?;
    let defaults = PowerIteration::default();
    let cfg = PowerIteration {
        seed: pick(a.seed, file.seed).unwrap_or(DEFAULT_SEED),
        max_iters: pick(a.max_iters, file.max_iters).unwrap_or(defaults.max_iters),
        tol: pick(a.tol, file.tol).unwrap_or(defaults.tol),
    };
    let bump = a.bump.resolve(file)?;
    let rows = betas.iter().map(|&b| sweep_row(b, grid, cfg, bump)).collect::<leray::Result<Vec<_>>>()?;
    if a.json || file.json == Some(true) {
        let objs: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "beta": round(r.beta),
                    "exact": round(r.exact),
                    "crude": round(r.crude),
                    "power_iter": round(r.power_iter),
                    "extremal": round(r.extremal),
                    "grid_id": r.grid_id,
                    "residual": round(r.residual),
                })
            })
            .collect();
        let v = if objs.len() == 1 { objs.into_iter().next().expect("one row") } else { Value::Array(objs) };
        return print_json(out, &v);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["beta", "exact", "crude", "power_iter", "extremal", "grid_id", "residual"])?;
    for r in &rows {
        w.write_record([sig(r.beta), sig(r.exact), sig(r.crude), sig(r.power_iter), sig(r.extremal), r.grid_id.clone(), sig(r.residual)])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_checks(names: &[String]) -> Result<Vec<Check>> {
    names
        .iter()
        .map(|n| {
            Check::from_name(n.trim()).ok_or_else(|| {
                let known: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                anyhow!("unknown check `{n}`; known checks: {}", known.join(", "))
            })
        })
        .collect()
}

fn report_json(r: &CheckReport) -> Value {
    let metrics: Vec<Value> = r
        .metrics
        .iter()
        .map(|m| {
            json!({
                "label": m.label,
                "value": round(m.value),
                "limit": round(m.limit),
                "bound": m.bound,
                "passed": m.passed(),
            })
        })
        .collect();
    json!({
        "check": r.check,
        "passed": r.passed(),
        "seconds": round(r.seconds),
        "metrics": metrics,
        "notes": r.notes,
    })
}

fn cmd_verify(a: VerifyArgs, file: &FileConfig, out: &mut impl Write) -> Result<()> {
    let checks = match pick(a.only, file.only.clone()) {
        Some(names) => parse_checks(&names)?,
        None => Check::ALL.to_vec(),
    };
    if checks.is_empty() {
        bail!("no checks selected");
    }
    let mut cfg = VerifyConfig { grid: grid(a.grid, file)?, seed: pick(a.seed, file.seed).unwrap_or(DEFAULT_SEED), ..VerifyConfig::default() };
    if a.beta.is_some() || file.beta.is_some() {
        cfg.betas = betas(a.beta, file, &[])?;
        cfg.pairing_betas = cfg.betas.clone();
    }
    if let Some(eps) = pick(a.eps, file.eps.clone().map(|e| e.into_vec())) {
        cfg.eps = eps.clone();
        cfg.shell_eps = eps;
    }
    cfg.bump = a.bump.resolve(file)?;
    cfg.mutation = a.inject.map(|Injection::M1Sign| Mutation::M1CenterSign);
    cfg.validate()?;

    let json_out = a.json || file.json == Some(true);
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for check in checks {
        let r = run_check(check, &cfg)?;
        if !r.passed() {
            failed.push(check.name());
        }
        if !json_out {
            write_report(out, &r)?;
        }
        reports.push(r);
    }
    if json_out {
        print_json(out, &json!({ "passed": failed.is_empty(), "checks": reports.iter().map(report_json).collect::<Vec<_>>() }))?;
    }
    out.flush()?;
    if !failed.is_empty() {
        return Err(Failure(format!("failed checks: {}", failed.join(", "))).into());
    }
    Ok(())
}

fn write_report(out: &mut impl Write, r: &CheckReport) -> Result<()> {
    writeln!(out, "{} {} ({} s)", if r.passed() { "PASS" } else { "FAIL" }, r.check, sig(round_to(r.seconds, 3)))?;
    for m in &r.metrics {
        let op = match m.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        writeln!(out, "  {} = {} ({op} {}){}", m.label, sig(m.value), sig(m.limit), if m.passed() { "" } else { "  FAILED" })?;
    }
    for n in &r.notes {
        writeln!(out, "  . {n}")?;
    }
    Ok(())
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

enum SurfaceChoice {
    Model(f64),
    Sphere,
}

impl SurfaceChoice {
    fn parse(s: &str) -> Result<Self> {
        if s == "sphere" {
            return Ok(Self::Sphere);
        }
        let Some(beta) = s.strip_prefix("sbeta:") else {
            bail!("surface must be `sbeta:<beta>` or `sphere`, got `{s}`");
        };
        let beta: f64 = beta.parse().with_context(|| format!("invalid beta in `{s}`"))?;
        ModelParams::new(beta)?;
        Ok(Self::Model(beta))
    }

    fn describe(&self) -> String {
        match self {
            Self::Model(b) => format!("S_beta, beta = {}", sig(*b)),
            Self::Sphere => "unit sphere".into(),
        }
    }

    /// Completes `(x1, y1[, x2])` to a point of the surface by solving for `y2`.
    fn lift(&self, p: &[f64]) -> Result<AffinePoint> {
        if !(2..=3).contains(&p.len()) {
            bail!("point must be `x1,y1` or `x1,y1,x2`, got {} numbers", p.len());
        }
        let z1 = C64::new(p[0], p[1]);
        let x2 = p.get(2).copied().unwrap_or(0.0);
        let y2 = match self {
            Self::Model(b) => z1.norm_sqr() + b * (z1 * z1).re,
            Self::Sphere => {
                let rest = 1.0 - z1.norm_sqr() - x2 * x2;
                if rest < 0.0 {
                    bail!("no point of the unit sphere has x1 = {}, y1 = {}, x2 = {}", p[0], p[1], x2);
                }
                rest.sqrt()
            }
        };
        Ok([z1, C64::new(x2, y2)])
    }

    fn surface(&self) -> Box<dyn DefiningFunction> {
        match self {
            Self::Model(b) => Box::new(ModelSurface { beta: *b }),
            Self::Sphere => Box::new(Sphere),
        }
    }
}

fn load_matrix(spec: &str) -> Result<(String, ProjMatrix)> {
    if let Some(m) = ProjMatrix::by_name(spec) {
        return Ok((spec.to_uppercase(), m));
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("`{spec}` is neither M1/M2/M3 nor a readable matrix file"))?;
    let m = ProjMatrix::from_json(&text).with_context(|| format!("invalid matrix file {spec}"))?;
    Ok((spec.to_string(), m))
}

fn cmd_dual(a: DualArgs, file: &FileConfig, out: &mut impl Write) -> Result<()> {
    let choice = SurfaceChoice::parse(pick(a.surface, file.surface.clone()).as_deref().unwrap_or("sbeta:0"))?;
    let (name, m) = load_matrix(pick(a.matrix, file.matrix.clone()).as_deref().unwrap_or("M2"))?;
    let point = pick(a.point, file.point.clone()).unwrap_or_else(|| vec![0.0, 0.0]);
    let z = choice.lift(&point)?;
    let surface = choice.surface();
    let jet = SurfaceJet::at(surface.as_ref(), z, SURFACE_TOL)?;
    let reg = is_m_regular(&m, &jet);
    if !reg.regular {
        return Err(Failure(format!(
            "point is not {name}-regular: determinant {} (threshold {})",
            sig(reg.det.norm()),
            sig(reg.threshold)
        ))
        .into());
    }
    let w = dual_coords(&m, &jet)?;
    let nu = nu_form(&m, &jet, Chart::SolveY2);
    let eta_exact = eta(&jet);
    let eta_numeric = eta_fd(surface.as_ref(), &z, Chart::SolveY2);

    if a.json || file.json == Some(true) {
        let v = json!({
            "surface": choice.describe(),
            "matrix": name,
            "point": [complex_pair(z[0]), complex_pair(z[1])],
            "regularity_det": complex_pair(reg.det),
            "regularity_threshold": round(reg.threshold),
            "w1": complex_pair(w.w1),
            "w2": complex_pair(w.w2),
            "nu": match &nu {
                Ok(n) => json!({"density": round(n.density), "phase": complex_pair(n.phase), "coefficient": complex_pair(n.coefficient())}),
                Err(e) => json!({"error": e.to_string()}),
            },
            "eta": match &eta_exact {
                Ok(e) => json!({"value": complex_pair(e.eta), "source": e.source}),
                Err(e) => json!({"error": e.to_string()}),
            },
            "eta_fd": match &eta_numeric {
                Ok(e) => json!({"value": complex_pair(e.eta), "source": e.source}),
                Err(e) => json!({"error": e.to_string()}),
            },
        });
        return print_json(out, &v);
    }
    writeln!(out, "surface: {}", choice.describe())?;
    writeln!(out, "matrix: {name}")?;
    writeln!(out, "point: z1 = {}, z2 = {}", complex(z[0]), complex(z[1]))?;
    writeln!(out, "regularity determinant: {} (threshold {})", complex(reg.det), sig(reg.threshold))?;
    writeln!(out, "w1 = {}", complex(w.w1))?;
    writeln!(out, "w2 = {}", complex(w.w2))?;
    match nu {
        Ok(n) => writeln!(
            out,
            "nu: density = {}, phase = {}, coefficient = {}",
            sig(n.density),
            complex(n.phase),
            complex(n.coefficient())
        )?,
        Err(e) => writeln!(out, "nu: unavailable ({e})")?,
    }
    match eta_exact {
        Ok(e) => writeln!(out, "eta = {} (via {:?})", complex(e.eta), e.source)?,
        Err(e) => writeln!(out, "eta: unavailable ({e})")?,
    }
    match eta_numeric {
        Ok(e) => writeln!(out, "eta (finite differences) = {} (via {:?})", complex(e.eta), e.source)?,
        Err(e) => writeln!(out, "eta (finite differences): unavailable ({e})")?,
    }
    Ok(())
}

fn cmd_kernel_norm(a: KernelNormArgs, file: &FileConfig, out: &mut impl Write) -> Result<()> {
    let betas = betas(a.beta, file, &[0.0])?;
    let eps = pick(a.eps, file.eps.clone().map(|e| e.into_vec())).unwrap_or_else(|| vec![1.0]);
    let radius = match a.radius {
        Some(v) => <[f64; 3]>::try_from(v).map_err(|v| anyhow!("--radius needs three values, got {}", v.len()))?,
        None => file.radius.unwrap_or(DEFAULT_QUAD_RADIUS),
    };
    let nodes = match a.nodes {
        Some(v) => <[usize; 3]>::try_from(v).map_err(|v| anyhow!("--nodes needs three values, got {}", v.len()))?,
        None => file.nodes.unwrap_or(DEFAULT_QUAD_NODES),
    };
    let scheme = match (a.scheme, file.scheme.as_deref()) {
        (Some(SchemeArg::Trapezoid), _) | (None, Some("trapezoid")) => Scheme::Trapezoid,
        (Some(SchemeArg::GaussLegendre), _) | (None, None | Some("gauss-legendre")) => Scheme::GaussLegendre,
        (None, Some(other)) => bail!("unknown quadrature scheme `{other}`"),
    };
    let q = QuadratureSpec::new(radius, nodes, scheme)?;
    let mut rows = Vec::new();
    for &b in &betas {
        for &e in &eps {
            let k = KernelParams::new(ModelParams::new(b)?, e)?;
            let measured = kernel_l2_norm(&k, &q)?;
            let closed = kernel_l2_closed_form(b, e);
            rows.push([b, e, measured, closed, measured / closed - 1.0, kernel_l2_truncation_loss(b, e, radius)]);
        }
    }
    let header = ["beta", "eps", "measured", "closed_form", "relative_error", "truncation_loss"];
    if a.json || file.json == Some(true) {
        let objs: Vec<Value> = rows
            .iter()
            .map(|r| Value::Object(header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(round(*v)))).collect()))
            .collect();
        return print_json(out, &Value::Array(objs));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in &rows {
        w.write_record(r.iter().map(|v| sig(*v)))?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_apply(a: ApplyArgs, file: &FileConfig, out: &mut impl Write) -> Result<()> {
    let beta = match a.beta {
        Some(b) => b,
        None => match &file.beta {
            Some(b) => match b.clone().into_vec().as_slice() {
                [b] => *b,
                _ => bail!("apply takes a single beta"),
            },
            None => bail!("apply needs --beta"),
        },
    };
    let f = load_field(&a.input).with_context(|| format!("loading {}", a.input.display()))?;
    let op = SpectralLeray::new(beta, *f.grid())?;
    let (label, g) = if a.dual {
        ("dual", op.apply_dual(&f)?)
    } else if let Some(eps) = a.eps {
        ("shell", op.apply_shell(&f, eps)?)
    } else {
        ("boundary", op.apply_boundary(&f)?)
    };
    save_field(&a.output, &g).with_context(|| format!("saving {}", a.output.display()))?;
    let summary = json!({
        "operator": label,
        "beta": round(beta),
        "eps": a.eps.map(round),
        "grid_id": f.grid().id(),
        "retained_slices": op.retained_slices(),
        "input_norm": round(f.norm()),
        "output_norm": round(g.norm()),
        "output": a.output.display().to_string(),
    });
    if a.json || file.json == Some(true) {
        return print_json(out, &summary);
    }
    writeln!(out, "operator: {label}")?;
    writeln!(out, "beta: {}", sig(beta))?;
    if let Some(e) = a.eps {
        writeln!(out, "eps: {}", sig(e))?;
    }
    writeln!(out, "grid: {}", f.grid().id())?;
    writeln!(out, "retained slices: {}", op.retained_slices())?;
    writeln!(out, "input norm: {}", sig(f.norm()))?;
    writeln!(out, "output norm: {}", sig(g.norm()))?;
    writeln!(out, "written: {}", a.output.display())?;
    Ok(())
}
