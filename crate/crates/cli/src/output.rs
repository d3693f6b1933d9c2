use std::io::Write;

use anyhow::{Context, Result};
use rankpres::tolerance::ToleranceSet;
use serde::{Deserialize, Serialize};

use crate::args::{Cli, Format};
use crate::commands::Outcome;

/// Machine-readable wrapper around every result.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub tolerances: ToleranceSet,
    /// Tolerance passed with `--tol`, if any.
    pub tol_override: Option<f64>,
    pub verdict: bool,
    pub result: serde_json::Value,
}

pub fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let text = match (&outcome.text, cli.common.format) {
        (Some(text), Format::Pretty) => format!("{} {}\n{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"), text),
        _ => {
            let env = Envelope {
                tool: "rankpres".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: outcome.command.clone(),
                seed: cli.common.seed,
                tolerances: ToleranceSet::default(),
                tol_override: outcome.tol_override,
                verdict: outcome.verdict,
                result: outcome.result.clone(),
            };
            let mut s = match cli.common.format {
                Format::Json => serde_json::to_string(&env)?,
                Format::Pretty => serde_json::to_string_pretty(&env)?,
            };
            s.push('\n');
            s
        }
    };
    match &cli.common.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}
