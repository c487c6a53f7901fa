use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::GENERATED_BY;

pub mod cpw;
pub mod evolve;
pub mod mix;
pub mod prepare;
pub mod rates;
pub mod scan;

/// Rendered result of a subcommand.
pub struct Output {
    pub content: String,
    /// One-line human summary for stderr.
    pub summary: Option<String>,
    /// Error to report after the content has been written (failed scan cells).
    pub deferred: Option<CliError>,
}

impl Output {
    pub fn new(content: String) -> Self {
        Self {
            content,
            summary: None,
            deferred: None,
        }
    }
}

#[derive(Serialize)]
struct ConfigEcho<'a, S> {
    common: &'a RunConfig,
    command: S,
}

#[derive(Serialize)]
struct Envelope<'a, S, B> {
    generated_by: &'static str,
    config: ConfigEcho<'a, S>,
    #[serde(flatten)]
    body: B,
}

/// JSON document with the version tag and the effective configuration ahead
/// of the command-specific body.
fn envelope<S: Serialize, B: Serialize>(cfg: &RunConfig, command: S, body: B) -> String {
    crate::output::json(&Envelope {
        generated_by: GENERATED_BY,
        config: ConfigEcho {
            common: cfg,
            command,
        },
        body,
    })
}
