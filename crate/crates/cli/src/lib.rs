//! Command-line front end. Everything numerical lives in `ptwell`; this crate
//! only parses, validates, dispatches and formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ptwell::export::{self, format_float, DEFAULT_PRECISION};
use ptwell::oracle::{self, ValidationReport};
use ptwell::spectrum::{self, DEFAULT_S_MAX, DEFAULT_TOL};
use ptwell::{
    assemble, make_parity, solve_pattern, solve_unconstrained, CouplingMatrix, CouplingPattern,
    Error, Spectrum,
};

/// Environment variable overriding the number of significant digits.
pub const PRECISION_ENV: &str = "PTWELL_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BROKEN: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::ChannelMismatch { .. } | Error::PatternMismatch(_) => EXIT_INVALID,
        Error::BrokenSymmetry(_) => EXIT_BROKEN,
        Error::Numerical(_) => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Parser)]
#[command(name = "ptwell", version, about = "PT-symmetric coupled-channel square wells")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Print the coupling pattern allowed by the rotation r_(K,L).
    Pattern(CommonArgs),
    /// Bound-state levels from the secular equation.
    Spectrum(CommonArgs),
    /// Critical coupling, or the scaling at which a pattern reaches it.
    Critical(CommonArgs),
    /// Compare against the finite-difference oracle.
    Verify(CommonArgs),
    /// Build the metric of the discretized model.
    Metric(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Number of channels.
    #[arg(long = "k", default_value_t = 1)]
    pub k: usize,
    /// Rotation index; defaults to 0 for K = 1 and 1 otherwise.
    #[arg(long = "l")]
    pub l: Option<usize>,
    /// Pattern parameter, repeatable: --set Z=1 --set p1=0.5
    #[arg(long = "set", value_name = "LABEL=VALUE", value_parser = parse_assignment)]
    pub set: Vec<(String, f64)>,
    #[arg(long = "smax", default_value_t = DEFAULT_S_MAX)]
    pub s_max: f64,
    #[arg(long = "tol", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Interior grid points per channel (even).
    #[arg(long = "grid-n", default_value_t = 800)]
    pub grid_n: usize,
    /// Levels compared by `verify`.
    #[arg(long = "levels", default_value_t = 5)]
    pub levels: usize,
    #[arg(long = "format", value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long = "output")]
    pub output: Option<PathBuf>,
    /// Use all K^2 couplings as free labels (no pseudo-Hermiticity constraint).
    #[arg(long = "unconstrained")]
    pub unconstrained: bool,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (label, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected LABEL=VALUE, got `{s}`"))?;
    let label = label.trim();
    if label.is_empty() {
        return Err(format!("empty label in `{s}`"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((label.to_string(), value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Pattern,
    Spectrum,
    Critical,
    Verify,
    Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub params: BTreeMap<String, f64>,
    pub s_max: f64,
    pub tol: f64,
    pub grid_n: usize,
    pub levels: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub unconstrained: bool,
    /// Significant digits for CSV and table output.
    pub precision: usize,
}

impl RunConfig {
    /// Validates everything that can be checked before computing.
    pub fn from_cli(cli: Cli, precision: Option<&str>) -> ptwell::Result<Self> {
        let (command, args) = match cli.command {
            CliCommand::Pattern(a) => (Command::Pattern, a),
            CliCommand::Spectrum(a) => (Command::Spectrum, a),
            CliCommand::Critical(a) => (Command::Critical, a),
            CliCommand::Verify(a) => (Command::Verify, a),
            CliCommand::Metric(a) => (Command::Metric, a),
        };
        let invalid = |m: String| Error::InvalidInput(m);
        if args.k == 0 {
            return Err(invalid("--k must be at least 1".into()));
        }
        let l = args.l.unwrap_or(if args.k == 1 { 0 } else { 1 });
        if l >= args.k {
            return Err(invalid(format!("--l must lie in [0, {}), got {l}", args.k)));
        }
        let mut params = BTreeMap::new();
        for (label, value) in args.set {
            if !value.is_finite() {
                return Err(invalid(format!("parameter {label} must be finite")));
            }
            if params.insert(label.clone(), value).is_some() {
                return Err(invalid(format!("parameter {label} given twice")));
            }
        }
        if !(args.s_max > 0.0 && args.s_max.is_finite()) {
            return Err(invalid(format!("--smax must be positive, got {}", args.s_max)));
        }
        if !(args.tol > 0.0) {
            return Err(invalid(format!("--tol must be positive, got {}", args.tol)));
        }
        if matches!(command, Command::Verify | Command::Metric) && (args.grid_n < 4 || args.grid_n % 2 != 0) {
            return Err(invalid(format!("--grid-n must be even and at least 4, got {}", args.grid_n)));
        }
        if command == Command::Verify && args.levels == 0 {
            return Err(invalid("--levels must be at least 1".into()));
        }
        let precision = match precision {
            None => DEFAULT_PRECISION,
            Some(raw) => match raw.trim().parse::<usize>() {
                Ok(p) if (1..=DEFAULT_PRECISION).contains(&p) => p,
                _ => {
                    return Err(invalid(format!(
                        "{PRECISION_ENV} must be an integer in 1..={DEFAULT_PRECISION}, got `{raw}`"
                    )))
                }
            },
        };
        Ok(Self {
            command,
            k: args.k,
            l,
            params,
            s_max: args.s_max,
            tol: args.tol,
            grid_n: args.grid_n,
            levels: args.levels,
            format: args.format,
            output: args.output,
            unconstrained: args.unconstrained,
            precision,
        })
    }

    pub fn pattern(&self) -> ptwell::Result<CouplingPattern> {
        if self.unconstrained {
            solve_unconstrained(self.k)
        } else {
            solve_pattern(self.k, self.l)
        }
    }

    pub fn coupling(&self) -> ptwell::Result<CouplingMatrix> {
        assemble(&self.pattern()?, &self.params)
    }
}

/// Executes the command and returns the text to emit.
pub fn run(config: &RunConfig) -> ptwell::Result<String> {
    match config.command {
        Command::Pattern => run_pattern(config),
        Command::Spectrum => run_spectrum(config),
        Command::Critical => run_critical(config),
        Command::Verify => run_verify(config),
        Command::Metric => run_metric(config),
    }
}

fn run_pattern(config: &RunConfig) -> ptwell::Result<String> {
    let pattern = config.pattern()?;
    Ok(match config.format {
        Format::Json => pattern.to_json() + "\n",
        Format::Csv => {
            let mut out = String::from("row,col,label\n");
            for (i, row) in pattern.label_grid().iter().enumerate() {
                for (j, label) in row.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{}", i + 1, j + 1, label);
                }
            }
            out
        }
        Format::Table => {
            let grid = pattern.label_grid();
            let width = pattern.labels().iter().map(|l| l.len()).max().unwrap_or(1);
            let mut out = format!(
                "K = {}, L = {}, {} free parameters: {}\n",
                pattern.k(),
                pattern.l(),
                pattern.dimension(),
                pattern.labels().join(" ")
            );
            for row in grid {
                let cells: Vec<String> = row.iter().map(|l| format!("{l:>width$}")).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
            out
        }
    })
}

fn spectrum_of(config: &RunConfig) -> ptwell::Result<Spectrum> {
    spectrum::spectrum_for_pattern(&config.pattern()?, &config.params, config.s_max, config.tol)
}

fn run_spectrum(config: &RunConfig) -> ptwell::Result<String> {
    let sp = spectrum_of(config)?;
    Ok(match config.format {
        Format::Json => export::to_json(&sp) + "\n",
        Format::Csv => export::to_csv(&sp, config.precision),
        Format::Table => {
            let p = config.precision;
            let w = p + 7;
            let mut out = format!(
                "{:>4} {:>4} {:>w$} {:>w$} {:>w$} {:>w$} {:>10}\n",
                "n", "oval", "s", "t", "z_eff", "E", "degeneracy"
            );
            for r in export::rows(&sp) {
                let _ = writeln!(
                    out,
                    "{:>4} {:>4} {:>w$} {:>w$} {:>w$} {:>w$} {:>10}",
                    r.n,
                    r.oval,
                    format_float(r.s, p),
                    format_float(r.t, p),
                    format_float(r.z_eff, p),
                    format_float(r.energy, p),
                    r.degeneracy
                );
            }
            for (z, m) in &sp.complex_charges {
                let _ = writeln!(out, "complex charge {z} (x{m}): no real levels");
            }
            out
        }
    })
}

#[derive(Serialize)]
struct CriticalOutput {
    z_crit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_abs_charge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
}

fn run_critical(config: &RunConfig) -> ptwell::Result<String> {
    let out = if config.params.is_empty() {
        CriticalOutput {
            z_crit: spectrum::critical_coupling()?,
            max_abs_charge: None,
            scale: None,
        }
    } else {
        let c = spectrum::critical_scaling(&config.coupling()?)?;
        CriticalOutput {
            z_crit: c.z_crit,
            max_abs_charge: Some(c.max_abs_charge),
            scale: Some(c.scale),
        }
    };
    let p = config.precision;
    Ok(match config.format {
        Format::Json => serde_json::to_string_pretty(&out).expect("serializes") + "\n",
        Format::Csv => {
            let mut s = String::from("z_crit,max_abs_charge,scale\n");
            let opt = |v: Option<f64>| v.map(|x| format_float(x, p)).unwrap_or_default();
            let _ = writeln!(s, "{},{},{}", format_float(out.z_crit, p), opt(out.max_abs_charge), opt(out.scale));
            s
        }
        Format::Table => {
            let mut s = format!("z_crit {}\n", format_float(out.z_crit, p));
            if let (Some(m), Some(c)) = (out.max_abs_charge, out.scale) {
                let _ = writeln!(s, "max_abs_charge {}", format_float(m, p));
                let _ = writeln!(s, "scale {}", format_float(c, p));
            }
            s
        }
    })
}

#[derive(Serialize)]
struct MetricReport {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    residuals: BTreeMap<String, f64>,
}

fn report_text(
    k: usize,
    n: usize,
    max_rel_error: Option<f64>,
    residuals: &BTreeMap<String, f64>,
    format: Format,
    precision: usize,
) -> String {
    let mut rows: Vec<(&str, f64)> = Vec::new();
    if let Some(e) = max_rel_error {
        rows.push(("max_rel_error", e));
    }
    rows.extend(residuals.iter().map(|(name, v)| (name.as_str(), *v)));
    match format {
        Format::Json => unreachable!("JSON is serialized by the caller"),
        Format::Csv => {
            let mut s = String::from("K,N,quantity,value\n");
            for (name, v) in rows {
                let _ = writeln!(s, "{k},{n},{name},{}", format_float(v, precision));
            }
            s
        }
        Format::Table => {
            let mut s = format!("K {k}\nN {n}\n");
            for (name, v) in rows {
                let _ = writeln!(s, "{name} {}", format_float(v, precision));
            }
            s
        }
    }
}

fn run_verify(config: &RunConfig) -> ptwell::Result<String> {
    let a = config.coupling()?;
    let sp = spectrum::spectrum(&a, config.s_max, config.tol)?;
    if !sp.all_real {
        return Err(Error::BrokenSymmetry(format!(
            "{} complex effective charge(s); the oracle comparison needs real charges",
            sp.complex_charges.len()
        )));
    }
    let h = oracle::discretize(&a, config.grid_n)?;
    let cmp = oracle::compare_spectra(&sp, &h, config.levels)?;
    let mut residuals = BTreeMap::new();
    let parity = make_parity(config.k, config.l)?;
    residuals.insert(
        "pseudo_hermiticity".to_string(),
        oracle::pseudo_hermiticity_residual(&h, &parity)? / h.norm_max(),
    );
    let report = ValidationReport {
        k: config.k,
        n: config.grid_n,
        max_rel_error: cmp.max_rel_error,
        residuals,
    };
    Ok(match config.format {
        Format::Json => report.to_json() + "\n",
        f => report_text(report.k, report.n, Some(report.max_rel_error), &report.residuals, f, config.precision),
    })
}

fn run_metric(config: &RunConfig) -> ptwell::Result<String> {
    let a = config.coupling()?;
    let h = oracle::discretize(&a, config.grid_n)?;
    let parity = make_parity(config.k, config.l)?;
    let (pairs, theta) = oracle::physical_metric(&h, &parity, None)?;
    let mut biorth = 0.0f64;
    for (i, p) in pairs.iter().enumerate() {
        for (j, q) in pairs.iter().enumerate() {
            let g = ptwell::linalg::inner(
                p.ketket.as_slice().expect("contiguous"),
                q.ket.as_slice().expect("contiguous"),
            );
            let want = if i == j { 1.0 } else { 0.0 };
            biorth = biorth.max((g - want).norm());
        }
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("biorthogonality".to_string(), biorth);
    residuals.insert("hermiticity".to_string(), theta.hermiticity_residual());
    residuals.insert("min_eigenvalue".to_string(), theta.min_eigenvalue()?);
    residuals.insert("quasi_hermiticity".to_string(), theta.quasi_hermiticity_residual(&h)?);
    let report = MetricReport {
        k: config.k,
        n: config.grid_n,
        residuals,
    };
    Ok(match config.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("serializes") + "\n",
        f => report_text(report.k, report.n, None, &report.residuals, f, config.precision),
    })
}
