//! Output plumbing: every file carries the tool version, the command and the
//! full configuration that produced it.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn header_lines(cfg: &RunConfig, command: &str) -> Vec<String> {
    vec![
        format!("tsrm {VERSION} {command}"),
        format!("config: {}", serde_json::to_string(cfg).expect("config serializes")),
    ]
}

/// Opens `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `<base><suffix>`, e.g. `run` + `.report.json`.
pub fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tsrm_version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    report: &'a T,
}

pub fn write_json<T: Serialize>(path: Option<&Path>, cfg: &RunConfig, command: &str, report: &T) -> Result<(), CliError> {
    let mut out = sink(path)?;
    let env = Envelope {
        tsrm_version: VERSION,
        command,
        config: cfg,
        report,
    };
    serde_json::to_writer_pretty(&mut out, &env).map_err(|e| match e.io_error_kind() {
        Some(k) => CliError::from(std::io::Error::from(k)),
        None => CliError::Io(e.to_string()),
    })?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// CSV with a commented header and a column row. Format floats with
/// [`fmt_float`] (17 significant digits, round-trip exact).
pub fn write_csv(
    path: Option<&Path>,
    cfg: &RunConfig,
    command: &str,
    columns: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut out = sink(path)?;
    for line in header_lines(cfg, command) {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}
