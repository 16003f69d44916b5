//! Run configuration read from JSON. Every block except `model` has
//! defaults, and `rng_seed` drives every random draw of a run.

use std::path::{Path, PathBuf};

use gl3ff::oracle::{SpinChainSpec, MAX_SITES};
use gl3ff::{Complex64, FFKind, Twist};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub sector: SectorBlock,
    #[serde(default)]
    pub task: TaskBlock,
    #[serde(default)]
    pub rng_seed: u64,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub length: usize,
    /// Omitted: drawn from `rng_seed`.
    #[serde(default)]
    pub xi: Option<Inhomogeneities>,
    #[serde(default = "unit")]
    pub c: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Inhomogeneities {
    /// The string `"homogeneous"`.
    Named(String),
    /// `{"seeded": n}`: drawn from the disk of radius 0.3 with seed `n`.
    Seeded { seeded: u64 },
    Explicit(Vec<Complex64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorBlock {
    #[serde(default)]
    pub a: usize,
    #[serde(default)]
    pub b: usize,
    /// `[κ1, κ2, κ3]`; omitted means untwisted.
    #[serde(default)]
    pub twist: Option<[Complex64; 3]>,
    /// Mode numbers of the logarithmic Bethe equations, length `a + b`.
    #[serde(default)]
    pub modes: Option<Vec<i64>>,
    /// Random starting points tried per sector.
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    /// Upper bound on the number of states kept per sector.
    #[serde(default = "default_max_states")]
    pub max_states: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskBlock {
    #[serde(default = "default_z_grid")]
    pub z_grid: Vec<Complex64>,
    /// `[i, j]` pairs; omitted means all nine.
    #[serde(default)]
    pub kinds: Option<Vec<[usize; 2]>>,
    /// Replaces every record tolerance.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Random draws for the identity suite.
    #[serde(default = "default_draws")]
    pub draws: usize,
    /// `(a, b)` sectors used by `verify` and `identities`; omitted means all
    /// with `b <= a <= min(L, 2)`.
    #[serde(default)]
    pub sectors: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub local_op: Option<LocalOpBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalOpBlock {
    pub site: usize,
    pub alpha: usize,
    pub beta: usize,
    pub z_eval: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn default_seeds() -> usize {
    20
}

fn default_max_states() -> usize {
    4
}

fn default_draws() -> usize {
    50
}

fn default_z_grid() -> Vec<Complex64> {
    vec![Complex64::new(0.35, 0.8), Complex64::new(-0.7, 0.45), Complex64::new(0.9, -0.6)]
}

impl Default for SectorBlock {
    fn default() -> Self {
        SectorBlock { a: 0, b: 0, twist: None, modes: None, seeds: default_seeds(), max_states: default_max_states() }
    }
}

impl Default for TaskBlock {
    fn default() -> Self {
        TaskBlock { z_grid: default_z_grid(), kinds: None, tol: None, draws: default_draws(), sectors: None, local_op: None }
    }
}

impl RunConfig {
    /// A seeded chain of `length` sites with every other block at its default.
    pub fn desk(length: usize, xi_seed: u64) -> Self {
        RunConfig {
            model: ModelBlock { length, xi: Some(Inhomogeneities::Seeded { seeded: xi_seed }), c: unit() },
            sector: SectorBlock::default(),
            task: TaskBlock::default(),
            rng_seed: 0,
            output: OutputBlock::default(),
        }
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let l = self.model.length;
        if l == 0 || l > MAX_SITES {
            return Err(CliError::config(format!("model.length must be in 1..={MAX_SITES}, got {l}")));
        }
        if self.model.c.norm().is_nan() || self.model.c.norm() == 0.0 {
            return Err(CliError::config("model.c must be nonzero"));
        }
        match &self.model.xi {
            Some(Inhomogeneities::Named(n)) if n != "homogeneous" => {
                return Err(CliError::config(format!("model.xi: unknown name {n:?}, expected \"homogeneous\"")));
            }
            Some(Inhomogeneities::Explicit(xs)) if xs.len() != l => {
                return Err(CliError::config(format!("model.xi has {} entries for length {l}", xs.len())));
            }
            _ => {}
        }
        let s = &self.sector;
        check_sector(s.a, s.b, l).map_err(|m| CliError::config(format!("sector: {m}")))?;
        if let Some(m) = &s.modes {
            if m.len() != s.a + s.b {
                return Err(CliError::config(format!("sector.modes has {} entries, expected a + b = {}", m.len(), s.a + s.b)));
            }
        }
        self.twist()?;
        if let Some(kinds) = &self.task.kinds {
            for k in kinds {
                FFKind::new(k[0], k[1]).map_err(|_| CliError::config(format!("task.kinds: T{}{} is not an entry of a 3x3 matrix", k[0], k[1])))?;
            }
        }
        if let Some(t) = self.task.tol {
            if t.is_nan() || t <= 0.0 {
                return Err(CliError::config("task.tol must be positive"));
            }
        }
        if let Some(secs) = &self.task.sectors {
            for p in secs {
                check_sector(p[0], p[1], l).map_err(|m| CliError::config(format!("task.sectors: {m}")))?;
            }
        }
        if let Some(op) = &self.task.local_op {
            check_local_op(op, l)?;
        }
        Ok(())
    }

    pub fn spec(&self) -> CliResult<SpinChainSpec> {
        let l = self.model.length;
        let c = self.model.c;
        let spec = match &self.model.xi {
            None => SpinChainSpec::seeded(l, c, self.rng_seed),
            Some(Inhomogeneities::Named(_)) => SpinChainSpec::homogeneous(l, c),
            Some(Inhomogeneities::Seeded { seeded }) => SpinChainSpec::seeded(l, c, *seeded),
            Some(Inhomogeneities::Explicit(xs)) => SpinChainSpec::new(xs.clone(), c),
        };
        spec.map_err(|e| CliError::config(format!("model: {e}")))
    }

    pub fn twist(&self) -> CliResult<Twist> {
        match self.sector.twist {
            None => Ok(Twist::identity()),
            Some([k1, k2, k3]) => Twist::new(k1, k2, k3).map_err(|e| CliError::config(format!("sector.twist: {e}"))),
        }
    }

    pub fn kinds(&self) -> Vec<FFKind> {
        match &self.task.kinds {
            None => FFKind::all().collect(),
            Some(ks) => ks.iter().map(|k| FFKind::new(k[0], k[1]).expect("validated kind")).collect(),
        }
    }

    pub fn sectors(&self) -> Vec<(usize, usize)> {
        match &self.task.sectors {
            Some(s) => s.iter().map(|p| (p[0], p[1])).collect(),
            None => {
                let top = self.model.length.min(2);
                (0..=top).flat_map(|a| (0..=a).map(move |b| (a, b))).collect()
            }
        }
    }

    /// The configured tolerance if one was given, otherwise `default`.
    pub fn tol(&self, default: f64) -> f64 {
        self.task.tol.unwrap_or(default)
    }
}

pub fn check_sector(a: usize, b: usize, l: usize) -> Result<(), String> {
    if b > a {
        Err(format!("b = {b} exceeds a = {a}"))
    } else if a > l {
        Err(format!("a = {a} exceeds the chain length {l}"))
    } else {
        Ok(())
    }
}

pub fn check_local_op(op: &LocalOpBlock, l: usize) -> CliResult<()> {
    if op.site == 0 || op.site > l {
        return Err(CliError::config(format!("local_op.site must be in 1..={l}, got {}", op.site)));
    }
    if !(1..=3).contains(&op.alpha) || !(1..=3).contains(&op.beta) {
        return Err(CliError::config("local_op.alpha and local_op.beta must be in 1..=3"));
    }
    Ok(())
}
