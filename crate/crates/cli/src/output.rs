use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use kpzlab_core::fmt17;
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, GlobalArgs};
use crate::error::{io_error, CliResult};

/// What one command produced, before it is written anywhere.
pub struct Report {
    pub command: String,
    /// Seeds the result depends on; empty for exact commands.
    pub seeds: Vec<u64>,
    pub parameters: Value,
    pub json: Value,
    pub csv: String,
    pub default_format: Format,
    /// Human-readable text printed instead of JSON/CSV when no format is asked for.
    pub text: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub command: String,
    pub command_line: Vec<String>,
    pub seeds: Vec<u64>,
    pub versions: BTreeMap<String, String>,
    pub git_describe: String,
    pub wall_time_seconds: f64,
    pub threads: usize,
    pub parameters: Value,
    pub artifacts: Vec<String>,
}

impl RunManifest {
    pub fn new(report: &Report, argv: &[String], started: Instant, artifacts: Vec<String>) -> Self {
        let versions = [("kpzlab-core", kpzlab_core::VERSION), ("kpzlab-cli", env!("CARGO_PKG_VERSION"))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Self {
            tool: "kpzlab".into(),
            command: report.command.clone(),
            command_line: argv.to_vec(),
            seeds: report.seeds.clone(),
            versions,
            git_describe: git_describe(),
            wall_time_seconds: started.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
            parameters: report.parameters.clone(),
            artifacts,
        }
    }
}

fn git_describe() -> String {
    Command::new("git")
        .args(["-C", env!("CARGO_MANIFEST_DIR"), "describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = OsString::from(prefix.as_os_str());
    name.push(suffix);
    PathBuf::from(name)
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes the artifacts under `--out`, or prints the requested view to stdout.
pub fn emit(report: &Report, global: &GlobalArgs, argv: &[String], started: Instant) -> CliResult<()> {
    if let Some(prefix) = &global.out {
        let json_path = with_suffix(prefix, ".json");
        let csv_path = with_suffix(prefix, ".csv");
        write_file(&json_path, &pretty(&report.json))?;
        write_file(&csv_path, &report.csv)?;
        let artifacts = [&json_path, &csv_path].iter().map(|p| p.display().to_string()).collect();
        let manifest = RunManifest::new(report, argv, started, artifacts);
        write_file(&with_suffix(prefix, ".manifest.json"), &pretty(&manifest))?;
        if let (None, Some(text)) = (global.format, &report.text) {
            print_stdout(text);
        }
        return Ok(());
    }
    let text = match (global.format, &report.text) {
        (None, Some(text)) => text.clone(),
        (format, _) => match format.unwrap_or(report.default_format) {
            Format::Csv => report.csv.clone(),
            Format::Json => {
                let mut doc = report.json.clone();
                let manifest = RunManifest::new(report, argv, started, Vec::new());
                doc["manifest"] = serde_json::to_value(manifest).expect("manifest serializes");
                pretty(&doc)
            }
        },
    };
    print_stdout(&text);
    Ok(())
}

fn print_stdout(text: &str) {
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

/// RFC 4180 CSV from a header and rows of numbers, 17 significant digits.
pub fn numeric_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("writing to memory");
    for row in rows {
        writer.write_record(row.iter().map(|&x| fmt17(x))).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("writing to memory")).expect("CSV is UTF-8")
}

/// RFC 4180 CSV from string records.
pub fn text_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("writing to memory");
    for row in rows {
        writer.write_record(&row).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("writing to memory")).expect("CSV is UTF-8")
}
