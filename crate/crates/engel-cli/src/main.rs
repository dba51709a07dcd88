//! Command-line front end for the verification workbench.
//!
//! Each subcommand runs one check family from `engel-core` and emits a
//! structured report.  Reports are deterministic: the same command line
//! (including `--seed`) produces byte-identical output, so reports can be
//! diffed across runs and machines.  Flags are echoed in no particular
//! shell-dependent way — the effective configuration is part of the report.
//!
//! Exit status is zero unless some entry hard-fails; flagged findings
//! (contested table cells, the adjudicated inversion constant) do not fail
//! the run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use engel_core::verify::{run_check, CheckReport, CsvTable, Outcome, VerifyConfig};

#[derive(Parser)]
#[command(
    name = "engel",
    version,
    about = "Verification workbench for the pseudo-differential calculus on the step-3 Engel group",
    after_help = "A key=value configuration file (--config) accepts the same names as the long \
                  flags, without the leading dashes; command-line flags take precedence."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Grid size for transform comparisons (checks keep their own floors).
    #[arg(long, global = true, value_name = "N")]
    grid_n: Option<usize>,

    /// Grid half-width.
    #[arg(long, global = true, value_name = "L")]
    grid_l: Option<f64>,

    /// Smallest |lambda| drawn when sampling representation parameters.
    #[arg(long, global = true, value_name = "X")]
    lambda_min: Option<f64>,

    /// |lambda| cap for quadratures and sampled parameters.
    #[arg(long, global = true, value_name = "X")]
    lambda_max: Option<f64>,

    /// |mu| cap for sampled representation parameters.
    #[arg(long, global = true, value_name = "X")]
    mu_max: Option<f64>,

    /// Panels per half-axis in lambda quadratures.
    #[arg(long, global = true, value_name = "N")]
    panels: Option<usize>,

    /// Seed for randomized sample sets.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Tolerance override for verify-group.
    #[arg(long, global = true, value_name = "TOL")]
    tol_group: Option<f64>,

    /// Tolerance override for verify-fields.
    #[arg(long, global = true, value_name = "TOL")]
    tol_fields: Option<f64>,

    /// Tolerance override for rep-check.
    #[arg(long, global = true, value_name = "TOL")]
    tol_rep: Option<f64>,

    /// Tolerance override for gft-check.
    #[arg(long, global = true, value_name = "TOL")]
    tol_gft: Option<f64>,

    /// Tolerance override for plancherel.
    #[arg(long, global = true, value_name = "TOL")]
    tol_plancherel: Option<f64>,

    /// Tolerance override for diffops.
    #[arg(long, global = true, value_name = "TOL")]
    tol_diffops: Option<f64>,

    /// Tolerance override for delta-table.
    #[arg(long, global = true, value_name = "TOL")]
    tol_delta_table: Option<f64>,

    /// Tolerance override for seminorm.
    #[arg(long, global = true, value_name = "TOL")]
    tol_seminorm: Option<f64>,

    /// Tolerance override for quantize-check.
    #[arg(long, global = true, value_name = "TOL")]
    tol_quantize: Option<f64>,

    /// Tolerance override for heisenberg-check.
    #[arg(long, global = true, value_name = "TOL")]
    tol_heisenberg: Option<f64>,

    /// Key=value configuration file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Report destination; side tables land next to it as <stem>-<table>.csv.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format [default: json].
    #[arg(long, global = true, value_enum, value_name = "FMT")]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Exact group axioms, translation Jacobians and dilations.
    VerifyGroup,
    /// Exact vector-field algebra: invariance, brackets, gradation.
    VerifyFields,
    /// Representation homomorphism, unitarity and generator consistency.
    RepCheck,
    /// Transform kernel against the frequency symbol and the defining integral.
    GftCheck,
    /// Plancherel ratio measurement and candidate adjudication.
    Plancherel,
    /// Difference-operator formulas, Leibniz rule and invariance relations.
    Diffops,
    /// The four-by-four difference table with three-way adjudication.
    DeltaTable,
    /// Symbol-class seminorms and the spectral weight.
    Seminorm,
    /// Quantization: inversion, convolution semantics, composed form.
    QuantizeCheck,
    /// Weyl comparison and lambda-renormalization on the Heisenberg side.
    HeisenbergCheck,
    /// Every check in canonical order.
    All,
}

impl Command {
    fn check_names(&self) -> Vec<&'static str> {
        match self {
            Command::VerifyGroup => vec!["verify-group"],
            Command::VerifyFields => vec!["verify-fields"],
            Command::RepCheck => vec!["rep-check"],
            Command::GftCheck => vec!["gft-check"],
            Command::Plancherel => vec!["plancherel"],
            Command::Diffops => vec!["diffops"],
            Command::DeltaTable => vec!["delta-table"],
            Command::Seminorm => vec!["seminorm"],
            Command::QuantizeCheck => vec!["quantize-check"],
            Command::HeisenbergCheck => vec!["heisenberg-check"],
            Command::All => engel_core::verify::CHECK_NAMES.to_vec(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Command::All => "all",
            other => other.check_names()[0],
        }
    }
}

/// Effective numeric configuration, echoed into every report.
#[derive(Serialize)]
struct ConfigEcho {
    grid_n: usize,
    grid_l: f64,
    lambda_min: f64,
    lambda_max: f64,
    mu_max: f64,
    panels: usize,
    seed: u64,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    config: ConfigEcho,
    overall: Outcome,
    checks: Vec<CheckReport>,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    let mut cfg = VerifyConfig::default();
    let mut format = None;
    let mut out = None;

    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading configuration file {}", path.display()))?;
        for (key, value) in parse_config(&text)? {
            apply_setting(&mut cfg, &mut format, &mut out, &key, &value)
                .with_context(|| format!("configuration key `{key}`"))?;
        }
    }
    apply_flags(&cli, &mut cfg);
    let format = cli.format.or(format).unwrap_or(Format::Json);
    let out = cli.out.clone().or(out);

    let names = cli.command.check_names();
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    for name in names {
        let output = run_check(name, &cfg)?;
        eprintln!("check {name}: {}", outcome_str(output.report.outcome));
        checks.push(output.report);
        tables.extend(output.tables);
    }
    let overall = checks
        .iter()
        .map(|c| c.outcome)
        .max()
        .unwrap_or(Outcome::Pass);
    let report = RunReport {
        command: cli.command.label().into(),
        config: ConfigEcho {
            grid_n: cfg.grid_n,
            grid_l: cfg.grid_l,
            lambda_min: cfg.lambda_min,
            lambda_max: cfg.lambda_max,
            mu_max: cfg.mu_max,
            panels: cfg.panels,
            seed: cfg.seed,
        },
        overall,
        checks,
    };

    emit(&report, &tables, format, out.as_deref())?;
    Ok(if overall == Outcome::Fail {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn apply_flags(cli: &Cli, cfg: &mut VerifyConfig) {
    macro_rules! take {
        ($($field:ident => $target:expr),* $(,)?) => {
            $(if let Some(v) = cli.$field { $target = v.into(); })*
        };
    }
    take! {
        grid_n => cfg.grid_n,
        grid_l => cfg.grid_l,
        lambda_min => cfg.lambda_min,
        lambda_max => cfg.lambda_max,
        mu_max => cfg.mu_max,
        panels => cfg.panels,
        seed => cfg.seed,
        tol_group => cfg.tol.group,
        tol_fields => cfg.tol.fields,
        tol_rep => cfg.tol.rep,
        tol_gft => cfg.tol.gft,
        tol_plancherel => cfg.tol.plancherel,
        tol_diffops => cfg.tol.diffops,
        tol_delta_table => cfg.tol.delta_table,
        tol_seminorm => cfg.tol.seminorm,
        tol_quantize => cfg.tol.quantize,
        tol_heisenberg => cfg.tol.heisenberg,
    }
}

fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got `{line}`", lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn apply_setting(
    cfg: &mut VerifyConfig,
    format: &mut Option<Format>,
    out: &mut Option<PathBuf>,
    key: &str,
    value: &str,
) -> Result<()> {
    fn num<T: std::str::FromStr>(value: &str) -> Result<T>
    where
        T::Err: std::error::Error + Send + Sync + 'static,
    {
        value.parse::<T>().context("invalid number").map_err(Into::into)
    }
    match key {
        "grid-n" => cfg.grid_n = num(value)?,
        "grid-l" => cfg.grid_l = num(value)?,
        "lambda-min" => cfg.lambda_min = num(value)?,
        "lambda-max" => cfg.lambda_max = num(value)?,
        "mu-max" => cfg.mu_max = num(value)?,
        "panels" => cfg.panels = num(value)?,
        "seed" => cfg.seed = num(value)?,
        "tol-group" => cfg.tol.group = Some(num(value)?),
        "tol-fields" => cfg.tol.fields = Some(num(value)?),
        "tol-rep" => cfg.tol.rep = Some(num(value)?),
        "tol-gft" => cfg.tol.gft = Some(num(value)?),
        "tol-plancherel" => cfg.tol.plancherel = Some(num(value)?),
        "tol-diffops" => cfg.tol.diffops = Some(num(value)?),
        "tol-delta-table" => cfg.tol.delta_table = Some(num(value)?),
        "tol-seminorm" => cfg.tol.seminorm = Some(num(value)?),
        "tol-quantize" => cfg.tol.quantize = Some(num(value)?),
        "tol-heisenberg" => cfg.tol.heisenberg = Some(num(value)?),
        "format" => {
            *format = Some(match value {
                "json" => Format::Json,
                "csv" => Format::Csv,
                "both" => Format::Both,
                other => bail!("unknown format `{other}` (expected json, csv or both)"),
            })
        }
        "out" => *out = Some(PathBuf::from(value)),
        other => bail!("unknown configuration key `{other}`"),
    }
    Ok(())
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Pass => "pass",
        Outcome::Flag => "flag",
        Outcome::Fail => "fail",
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn json_document(report: &RunReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

fn csv_field(raw: &str) -> String {
    if raw.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

fn csv_document(header: &[String], rows: &[Vec<String>]) -> String {
    let mut text = String::new();
    let mut push_row = |cells: &[String]| {
        let line = cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
        text.push_str(&line);
        text.push_str("\r\n");
    };
    push_row(header);
    for row in rows {
        push_row(row);
    }
    text
}

/// Flattened entries table: one row per named value.
fn entries_csv(report: &RunReport) -> String {
    let header: Vec<String> = ["check", "entry", "reference", "name", "value", "tolerance", "outcome", "note"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for check in &report.checks {
        for e in &check.entries {
            for v in &e.computed {
                rows.push(vec![
                    check.check.clone(),
                    e.name.clone(),
                    e.reference.clone(),
                    v.name.clone(),
                    format!("{}", v.value),
                    format!("{}", e.tolerance),
                    outcome_str(e.outcome).to_string(),
                    e.note.clone(),
                ]);
            }
        }
    }
    csv_document(&header, &rows)
}

fn emit(
    report: &RunReport,
    tables: &[CsvTable],
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    match (format, out) {
        (Format::Json, None) => print!("{}", json_document(report)?),
        (Format::Csv, None) => {
            print!("{}", entries_csv(report));
            if !tables.is_empty() {
                eprintln!(
                    "note: {} side table(s) are only written with --out",
                    tables.len()
                );
            }
        }
        (Format::Both, None) => bail!("--format both needs --out to place the files"),
        (format, Some(path)) => {
            let stem = path.with_extension("");
            if matches!(format, Format::Json | Format::Both) {
                let target = if format == Format::Json {
                    path.to_path_buf()
                } else {
                    stem.with_extension("json")
                };
                write_file(&target, &json_document(report)?)?;
            }
            if matches!(format, Format::Csv | Format::Both) {
                let target = if format == Format::Csv {
                    path.to_path_buf()
                } else {
                    stem.with_extension("csv")
                };
                write_file(&target, &entries_csv(report))?;
                for table in tables {
                    let mut name = stem.file_name().unwrap_or_default().to_os_string();
                    name.push("-");
                    name.push(&table.name);
                    let target = stem.with_file_name(name).with_extension("csv");
                    write_file(&target, &csv_document(&table.header, &table.rows))?;
                }
            }
        }
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
