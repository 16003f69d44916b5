//! Bethe roots for the configured chain and sector.

use std::io::Write;

use gl3ff::solver::{distinct_states, solve_bethe, Seed, SolveRequest};
use gl3ff::{BetheState, Error};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliResult;
use crate::report::csv_err;

#[derive(Debug, Serialize)]
pub struct SolveOutput {
    pub command: &'static str,
    pub config: String,
    pub states: Vec<BetheState>,
}

/// With mode numbers in the config, the single state on that branch;
/// otherwise up to `max_states` distinct states from the seed generator.
pub fn run(cfg: &RunConfig, config_digest: String) -> CliResult<SolveOutput> {
    let model = cfg.spec()?.model();
    let twist = cfg.twist()?;
    let (a, b) = (cfg.sector.a, cfg.sector.b);
    let states = if a + b == 0 {
        vec![BetheState { twist, ..BetheState::vacuum() }]
    } else if let Some(modes) = &cfg.sector.modes {
        let req = SolveRequest {
            seed: Seed::Modes { modes: modes.clone(), rng_seed: cfg.rng_seed, attempts: cfg.sector.seeds },
            a,
            b,
            ..SolveRequest::from_roots(model, gl3ff::RootConfig::vacuum(), twist)
        };
        vec![solve_bethe(&req)?]
    } else {
        let mut found = distinct_states(&model, a, b, &twist, cfg.sector.seeds, cfg.rng_seed);
        found.truncate(cfg.sector.max_states);
        if found.is_empty() {
            return Err(Error::NoConvergence { iterations: 0, residual: f64::INFINITY }.into());
        }
        found
    };
    Ok(SolveOutput { command: "solve", config: config_digest, states })
}

impl SolveOutput {
    pub fn write(&self, format: Format, out: &mut dyn Write) -> CliResult<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)?;
            }
            Format::Csv => {
                // one line per root
                let mut w = csv::Writer::from_writer(out);
                w.write_record(["state", "set", "index", "re", "im", "mode", "residual"]).map_err(csv_err)?;
                for (n, st) in self.states.iter().enumerate() {
                    let roots = st.roots.u.iter().map(|x| ("u", x)).chain(st.roots.v.iter().map(|x| ("v", x)));
                    for (k, (set, x)) in roots.enumerate() {
                        let idx = if set == "u" { k } else { k - st.roots.a() };
                        let mode = st.mode_numbers.get(k).map(|m| m.to_string()).unwrap_or_default();
                        w.write_record([
                            n.to_string(),
                            set.to_string(),
                            idx.to_string(),
                            format!("{:e}", x.re),
                            format!("{:e}", x.im),
                            mode,
                            format!("{:e}", st.residual),
                        ])
                        .map_err(csv_err)?;
                    }
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}
