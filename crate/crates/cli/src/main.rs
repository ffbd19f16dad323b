//! `cliffweil`: JSON reports for the checks in the `cliffweil` library.
//!
//! Exit codes: 0 when every asserted check passes, 1 for a failed check or
//! unmet hypothesis, 2 for configuration errors, 3 when the enumeration
//! budget is exceeded.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cliffweil::{Error, Settings};
use serde::Serialize;
use serde_json::Value;

use commands::Command;
use config::{ConfigError, RunConfig};

const SCHEMA: &str = "cliffweil-report/1";

#[derive(Parser, Debug)]
#[command(name = "cliffweil", version, about = "Representations of G(Z/p^r) attached to regular orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Serialize)]
struct Report<'a> {
    schema: &'static str,
    command: &'static str,
    ok: bool,
    settings: Option<Settings>,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorReport>,
}

#[derive(Serialize)]
struct ErrorReport {
    kind: &'static str,
    message: String,
}

fn classify(e: &anyhow::Error) -> (u8, &'static str) {
    if e.downcast_ref::<ConfigError>().is_some() {
        return (2, "config");
    }
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_)) => (2, "invalid_parameter"),
        Some(Error::BudgetExceeded { .. }) => (3, "budget_exceeded"),
        Some(Error::Precondition(_)) => (1, "precondition"),
        Some(Error::CheckFailed(_)) => (1, "check_failed"),
        None => (2, "io"),
    }
}

fn resolve(common: &commands::Common) -> anyhow::Result<RunConfig> {
    let base = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    Ok(common.run.clone().over(base))
}

fn emit(report: &Report<'_>, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let name = cli.command.name();

    let cfg = match resolve(common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let settings = cfg.settings();
    let run = settings
        .as_ref()
        .map_err(|e| anyhow::anyhow!(ConfigError(e.to_string())))
        .and_then(|st| cli.command.run(&cfg, st));

    let (code, report) = match run {
        Ok(o) => (
            u8::from(!o.ok),
            Report {
                schema: SCHEMA,
                command: name,
                ok: o.ok,
                settings: settings.ok(),
                config: &cfg,
                result: Some(o.result),
                error: None,
            },
        ),
        Err(e) => {
            let (code, kind) = classify(&e);
            eprintln!("error: {e}");
            (
                code,
                Report {
                    schema: SCHEMA,
                    command: name,
                    ok: false,
                    settings: settings.ok(),
                    config: &cfg,
                    result: None,
                    error: Some(ErrorReport {
                        kind,
                        message: e.to_string(),
                    }),
                },
            )
        }
    };
    if let Err(e) = emit(&report, common.out.as_deref()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
