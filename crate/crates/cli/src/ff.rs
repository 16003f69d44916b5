//! Form-factor tables over the configured z-grid.
//!
//! Values are computed in the twisted model `r_k -> r_k κ_k/κ_2`, where the
//! configured twist's states are on shell; with the identity twist this is
//! the chain itself.

use std::io::Write;
use std::path::Path;

use gl3ff::formfactor::{form_factor_detailed, Branch};
use gl3ff::{BetheState, Error, ModelFunctions, RootConfig, Twist};
use serde::{Deserialize, Serialize};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::report::csv_err;

/// Accepted shapes of a roots file: the output of `solve`, one state, or a
/// bare `{u, v}` pair.
#[derive(Deserialize)]
#[serde(untagged)]
enum RootsFile {
    Solved { states: Vec<BetheState> },
    State(BetheState),
    Roots(RootConfig),
}

/// Loads the `index`-th state of a roots file; `None` is the vacuum.
pub fn load_roots(path: Option<&Path>, index: usize) -> CliResult<RootConfig> {
    let Some(path) = path else { return Ok(RootConfig::vacuum()) };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let parsed: RootsFile =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: not a roots file ({e})", path.display())))?;
    match parsed {
        RootsFile::Solved { states } => {
            let n = states.len();
            states
                .into_iter()
                .nth(index)
                .map(|s| s.roots)
                .ok_or_else(|| CliError::config(format!("{}: state {index} requested, file has {n}", path.display())))
        }
        RootsFile::State(s) if index == 0 => Ok(s.roots),
        RootsFile::Roots(r) if index == 0 => Ok(r),
        _ => Err(CliError::config(format!("{}: holds a single state, index {index} requested", path.display()))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub kind: String,
    pub z_re: f64,
    pub z_im: f64,
    pub f_re: Option<f64>,
    pub f_im: Option<f64>,
    pub branch: Option<Branch>,
    pub condition: Option<f64>,
    pub error: Option<String>,
    #[serde(skip)]
    numerical: bool,
}

#[derive(Debug, Serialize)]
pub struct FfOutput {
    pub command: &'static str,
    pub config: String,
    pub left: RootConfig,
    pub right: RootConfig,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

/// Bethe-equation defect above which a state is reported as off shell.
const ON_SHELL: f64 = 1e-8;

/// One note per state whose Bethe equations fail by more than `1e-8`.
pub fn off_shell_notes(base: &ModelFunctions, twist: &Twist, left: &RootConfig, right: &RootConfig) -> CliResult<Vec<String>> {
    let mut notes = Vec::new();
    for (side, roots) in [("left", left), ("right", right)] {
        let residual = BetheState::from_roots(base, roots.clone(), *twist)?.residual;
        if residual > ON_SHELL {
            notes.push(format!("{side} state is off shell (Bethe residual {residual:e}); values are not form factors"));
        }
    }
    Ok(notes)
}

pub fn run(cfg: &RunConfig, config_digest: String, left: RootConfig, right: RootConfig) -> CliResult<FfOutput> {
    let base = cfg.spec()?.model();
    let twist = cfg.twist()?;
    let model = base.twisted(&twist);
    let notes = off_shell_notes(&base, &twist, &left, &right)?;
    let mut rows = Vec::new();
    for kind in cfg.kinds() {
        for &z in &cfg.task.z_grid {
            let mut row =
                Row { kind: kind.to_string(), z_re: z.re, z_im: z.im, f_re: None, f_im: None, branch: None, condition: None, error: None, numerical: false };
            match form_factor_detailed(&model, kind, &left, &right, z) {
                Ok(ev) => {
                    row.f_re = Some(ev.value.re);
                    row.f_im = Some(ev.value.im);
                    row.branch = Some(ev.branch);
                    row.condition = Some(ev.condition);
                }
                Err(e) => {
                    row.numerical = !matches!(e, Error::SectorMismatch(_));
                    row.error = Some(e.to_string());
                }
            }
            rows.push(row);
        }
    }
    Ok(FfOutput { command: "ff", config: config_digest, left, right, rows, notes })
}

impl FfOutput {
    /// Any row failure other than a sector mismatch is a numerical failure.
    pub fn numerical_failure(&self) -> bool {
        self.rows.iter().any(|r| r.numerical)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["kind", "z_re", "z_im", "f_re", "f_im", "branch", "condition", "error"]).map_err(csv_err)?;
                let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
                for r in &self.rows {
                    w.write_record([
                        r.kind.clone(),
                        format!("{:e}", r.z_re),
                        format!("{:e}", r.z_im),
                        opt(r.f_re),
                        opt(r.f_im),
                        r.branch.map(branch_name).unwrap_or_default().to_string(),
                        opt(r.condition),
                        r.error.clone().unwrap_or_default(),
                    ])
                    .map_err(csv_err)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::OffDiagonal => "off_diagonal",
        Branch::DistinctStates => "distinct_states",
        Branch::SameState => "same_state",
        Branch::Corner => "corner",
    }
}
