//! Evaluation of the local-operator ratio
//! `τ^{m-1}(z|C) / τ^m(z|B) · F^{(β,α)}(z|C;B)`.

use std::io::Write;

use gl3ff::{form_factor, Complex64, Error, FFKind, RootConfig};
use serde::Serialize;

use crate::config::{Format, LocalOpBlock, RunConfig};
use crate::error::CliResult;
use crate::report::csv_err;

pub const CAVEAT: &str = "formula evaluation only: for the homogeneous chain at z = 0 this ratio is the matrix element of \
the elementary unit E_{alpha beta} at site m, but r1 diverges there with these conventions; for inhomogeneous chains and \
other z no agreement with explicit local operators is claimed";

#[derive(Debug, Serialize)]
pub struct LocalOpOutput {
    pub command: &'static str,
    pub config: String,
    pub site: usize,
    pub alpha: usize,
    pub beta: usize,
    pub z_eval: Complex64,
    pub tau_left: Complex64,
    pub tau_right: Complex64,
    pub form_factor: Complex64,
    pub value: Complex64,
    pub caveat: &'static str,
    pub notes: Vec<String>,
}

pub fn run(cfg: &RunConfig, config_digest: String, op: &LocalOpBlock, left: &RootConfig, right: &RootConfig) -> CliResult<LocalOpOutput> {
    let base = cfg.spec()?.model();
    let twist = cfg.twist()?;
    let notes = crate::ff::off_shell_notes(&base, &twist, left, right)?;
    let model = base.twisted(&twist);
    let z = op.z_eval;
    let tau_left = model.tau(z, left)?;
    let tau_right = model.tau(z, right)?;
    for t in [tau_left, tau_right] {
        if t.norm() <= f64::EPSILON * model.c().norm() {
            return Err(Error::ZeroTau(z).into());
        }
    }
    let f = form_factor(&model, FFKind::new(op.beta, op.alpha)?, left, right, z)?;
    let m = op.site as i32;
    let value = tau_left.powi(m - 1) / tau_right.powi(m) * f;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite(value).into());
    }
    Ok(LocalOpOutput {
        command: "local-op",
        config: config_digest,
        site: op.site,
        alpha: op.alpha,
        beta: op.beta,
        z_eval: z,
        tau_left,
        tau_right,
        form_factor: f,
        value,
        caveat: CAVEAT,
        notes,
    })
}

impl LocalOpOutput {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["site", "alpha", "beta", "z_re", "z_im", "value_re", "value_im", "caveat"]).map_err(csv_err)?;
                w.write_record([
                    self.site.to_string(),
                    self.alpha.to_string(),
                    self.beta.to_string(),
                    format!("{:e}", self.z_eval.re),
                    format!("{:e}", self.z_eval.im),
                    format!("{:e}", self.value.re),
                    format!("{:e}", self.value.im),
                    self.caveat.to_string(),
                ])
                .map_err(csv_err)?;
                w.flush()?;
            }
        }
        Ok(())
    }
}
