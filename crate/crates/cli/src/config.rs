//! Settings read from a JSON file; command-line flags take precedence.

use anyhow::{bail, Context, Result};
use leray::GridSpec;
use serde::Deserialize;
use std::path::Path;

/// A number or a list of numbers.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub beta: Option<OneOrMany>,
    pub eps: Option<OneOrMany>,
    pub grid: Option<String>,
    pub seed: Option<u64>,
    pub json: Option<bool>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
    pub only: Option<Vec<String>>,
    pub surface: Option<String>,
    pub matrix: Option<String>,
    pub point: Option<Vec<f64>>,
    pub radius: Option<[f64; 3]>,
    pub nodes: Option<[usize; 3]>,
    pub scheme: Option<String>,
    pub bump_center: Option<[f64; 2]>,
    pub bump_width: Option<[f64; 2]>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Picks the flag value when present, else the file value.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

/// `default`, `doubled-s`, or `Rr,Rs,Rt:Nr,Ns,Nt`.
pub fn parse_grid(spec: &str) -> Result<GridSpec> {
    match spec {
        "default" => return Ok(GridSpec::default()),
        "doubled-s" => return Ok(GridSpec::default().doubled_s()),
        _ => {}
    }
    let Some((radii, counts)) = spec.split_once(':') else {
        bail!("grid must be `default`, `doubled-s` or `Rr,Rs,Rt:Nr,Ns,Nt`, got `{spec}`");
    };
    let radii: Vec<f64> = radii.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().context("grid half-widths")?;
    let counts: Vec<usize> = counts.split(',').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().context("grid counts")?;
    let (Ok(radii), Ok(counts)) = (<[f64; 3]>::try_from(radii), <[usize; 3]>::try_from(counts)) else {
        bail!("grid needs three half-widths and three counts, got `{spec}`");
    };
    Ok(GridSpec::new(radii, counts)?)
}
