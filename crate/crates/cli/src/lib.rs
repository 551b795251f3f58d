//! Command-line front end: `check`, `relations`, `fmt` and `serve`.

use std::fs;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use btlint_core::bts::{emit_bts, parse_bts_named};
use btlint_core::decisions::parse_decision_log;
use btlint_core::RelationKind;
use btlint_session::Session;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

/// No failing defects.
pub const EXIT_OK: u8 = 0;
/// Automatic or confirmed defects present.
pub const EXIT_DEFECTS: u8 = 1;
/// Bad input or usage.
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "btlint", version, about = "Find requirement defects in Behavior Tree models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the defect report; exits 1 when automatic or confirmed defects exist.
    Check {
        #[command(flatten)]
        input: Input,
        /// JSON array of analyst decisions to apply.
        #[arg(long)]
        decisions: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print relation candidates.
    Relations {
        #[command(flatten)]
        input: Input,
        /// Only candidates of this kind, e.g. `sub-path`.
        #[arg(long, value_parser = parse_kind)]
        kind: Option<RelationKind>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rewrite `.bts` files in canonical form.
    Fmt {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Report files that would change instead of writing them.
        #[arg(long)]
        check: bool,
    },
    /// Serve a review session on the loopback interface.
    Serve {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 7878)]
        port: u16,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Model files (`.bts`, or `.json` model sets).
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Strategy JSON; the bundled default when absent.
    #[arg(long, env = "BTLINT_STRATEGY")]
    pub strategy: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn parse_kind(s: &str) -> Result<RelationKind, String> {
    s.parse().map_err(|_| {
        let kinds: Vec<_> = RelationKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("expected one of {}", kinds.join(", "))
    })
}

fn warn_models(session: &Session, err: &mut impl Write) -> Result<()> {
    for w in session.model_set().warnings() {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Errors are input or usage problems.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> Result<u8> {
    match cli.command {
        Command::Check { input, decisions, format } => {
            let mut session = Session::from_paths(&input.paths, input.strategy.as_deref())?;
            warn_models(&session, err)?;
            if let Some(path) = decisions {
                let text = fs::read_to_string(&path).with_context(|| format!("{}: cannot read", path.display()))?;
                let log = parse_decision_log(&text).with_context(|| format!("{}: invalid decision log", path.display()))?;
                for stale in session.replay(log) {
                    writeln!(err, "warning: {stale}")?;
                }
            }
            let report = session.report();
            match format {
                Format::Json => out.write_all(report.to_json_string().as_bytes())?,
                Format::Text => out.write_all(report.to_text().as_bytes())?,
            }
            Ok(if report.has_failing_defects() { EXIT_DEFECTS } else { EXIT_OK })
        }
        Command::Relations { input, kind, format } => {
            let session = Session::from_paths(&input.paths, input.strategy.as_deref())?;
            warn_models(&session, err)?;
            let selected: Vec<_> = session.graph().iter().filter(|c| kind.is_none_or(|k| c.kind == k)).collect();
            match format {
                Format::Json => {
                    let v = json!({
                        "relations": selected.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
                        "schema_version": 1,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
                }
                Format::Text => {
                    for c in &selected {
                        let sims: Vec<String> = c.similarity.iter().map(|s| s.to_string()).collect();
                        writeln!(out, "{:<20} {}  similarity {}", c.kind.as_str(), c.id, sims.join(","))?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Fmt { paths, check } => {
            let mut changed = false;
            for path in &paths {
                if format_file(path, check)? {
                    changed = true;
                    if check {
                        writeln!(out, "{} is not formatted", path.display())?;
                    }
                }
            }
            Ok(if check && changed { EXIT_DEFECTS } else { EXIT_OK })
        }
        Command::Serve { input, port } => {
            let session = Session::open(&input.paths, input.strategy.as_deref())?;
            warn_models(&session, err)?;
            for w in session.warnings() {
                writeln!(err, "warning: {w}")?;
            }
            let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(btlint_session::serve(session, addr, |bound| {
                let _ = writeln!(out, "listening on http://{bound}");
                let _ = out.flush();
            }))?;
            Ok(EXIT_OK)
        }
    }
}

/// Canonical text for one file, keeping its leading comment block.
pub fn format_text(path: &Path, text: &str) -> Result<String> {
    let set = parse_bts_named(&path.display().to_string(), text)?;
    let mut header = String::new();
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            header.push_str(line.trim_end());
            header.push('\n');
        } else {
            break;
        }
    }
    let header = header.trim_end();
    let body = emit_bts(&set);
    Ok(if header.is_empty() { body } else { format!("{header}\n\n{body}") })
}

/// Returns whether the file differs from its canonical form; rewrites it
/// unless `check_only`. Unparseable files are left untouched.
fn format_file(path: &Path, check_only: bool) -> Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
    let formatted = format_text(path, &text)?;
    if formatted == text {
        return Ok(false);
    }
    if !check_only {
        fs::write(path, formatted).with_context(|| format!("{}: cannot write", path.display()))?;
    }
    Ok(true)
}
