//! Command-line front end: `list-spaces`, `check` and `sweep`.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! malformed input, 3 when every check is gated by an unmet hypothesis.

mod report;
mod spec;

pub use report::{
    execute, exit_code, overall_verdict, write_entry_csv, CheckDetail, CheckEntry, CheckOptions,
    RunReport, Theorem,
};
pub use spec::{CustomSpec, SpaceSpec};

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::comparison::Verdict;
use crate::smms::{catalog_entries, RhoMode};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "smms",
    version,
    about = "Comparison-geometry checks on rotationally symmetric smooth metric measure spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the catalog spaces and their parameters.
    ListSpaces {
        #[arg(long)]
        json: bool,
    },
    /// Run one check and write a report.
    Check(CheckArgs),
    /// Run a check over a grid of parameter values and write a CSV summary.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct SpaceArgs {
    /// Catalog space name.
    #[arg(long)]
    space: Option<String>,
    /// Dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Catalog parameter as NAME=VALUE (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    params: Vec<String>,
    /// JSON file with a space description or custom profiles.
    #[arg(long, value_name = "FILE.json")]
    custom: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NumericArgs {
    /// Comparison theorem id (see --help of `check`).
    #[arg(long)]
    theorem: String,
    /// Curvature lower bound.
    #[arg(long = "H", allow_negative_numbers = true)]
    h: Option<f64>,
    /// Bound on |f|.
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Bound on -f'.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Relative slack of the eigenvalue estimate.
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Doubling constant.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Inner radius.
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Outer radius.
    #[arg(long = "R", allow_negative_numbers = true)]
    big_r: Option<f64>,
    /// Excess threshold for DOUBLING (computed from alpha when absent).
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    /// Override of the excess integral l.
    #[arg(long, allow_negative_numbers = true)]
    l: Option<f64>,
    /// Grid points.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, default_value = "radial")]
    mode: RhoMode,
    #[arg(long = "tol-abs", allow_negative_numbers = true)]
    tol_abs: Option<f64>,
    #[arg(long = "tol-rel", allow_negative_numbers = true)]
    tol_rel: Option<f64>,
}

impl NumericArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            h: self.h,
            k: self.k,
            a: self.a,
            delta: self.delta,
            alpha: self.alpha,
            r: self.r,
            big_r: self.big_r,
            epsilon: self.epsilon,
            l: self.l,
            grid: self.grid,
            mode: self.mode,
            tol_abs: self.tol_abs,
            tol_rel: self.tol_rel,
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Output file; grids are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    space: SpaceArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    /// NAME=START:STOP:COUNT (repeatable); NAME is a space parameter or a
    /// numeric option.
    #[arg(long = "range", value_name = "NAME=START:STOP:COUNT", required = true)]
    ranges: Vec<String>,
    /// CSV output file.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::ListSpaces { json } => list_spaces(json, &mut io::stdout().lock()).map(|_| 0),
        Command::Check(args) => cmd_check(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Writes the catalog listing.
pub fn list_spaces<W: Write>(json: bool, out: &mut W) -> Result<()> {
    let entries = catalog_entries();
    if json {
        serde_json::to_writer_pretty(&mut *out, &entries)?;
        writeln!(out)?;
        return Ok(());
    }
    for e in &entries {
        writeln!(out, "{}  {}", e.name, e.description)?;
        for p in &e.params {
            let default = p.default.map_or("-".to_string(), |d| d.to_string());
            writeln!(
                out,
                "    {:<6} default {:<5} [{}]  {}",
                p.name, default, p.unit, p.description
            )?;
        }
    }
    Ok(())
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for item in raw {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Error::param("param", format!("expected NAME=VALUE, got '{item}'")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::param(name.trim(), format!("not a number: '{value}'")))?;
        map.insert(name.trim().to_string(), v);
    }
    Ok(map)
}

fn build_spec(args: &SpaceArgs) -> Result<SpaceSpec> {
    let params = parse_params(&args.params)?;
    let spec = match (&args.custom, &args.space) {
        (Some(path), space) => {
            if let Some(name) = space.as_deref().filter(|s| *s != "custom") {
                return Err(Error::param(
                    "space",
                    format!("'{name}' conflicts with --custom"),
                ));
            }
            if !params.is_empty() {
                return Err(Error::param(
                    "param",
                    "custom spaces take no catalog parameters",
                ));
            }
            let mut spec = SpaceSpec::from_json_file(path)?;
            if let Some(n) = args.n {
                spec.n = n;
            }
            spec
        }
        (None, Some(name)) => SpaceSpec::catalog(name, args.n.unwrap_or(3), params),
        (None, None) => {
            return Err(Error::param(
                "space",
                "either --space or --custom is required",
            ))
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn sibling(out: &Path, tag: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{tag}.csv"))
}

fn summarize(entries: &[CheckEntry]) {
    for e in entries {
        let margin = e
            .min_margin
            .map_or("n/a".to_string(), |m| format!("{m:.3e}"));
        eprintln!(
            "{:<20} {:<15} min_margin {}",
            e.theorem_id,
            e.verdict.to_string(),
            margin
        );
    }
}

fn cmd_check(args: &CheckArgs) -> Result<i32> {
    let spec = build_spec(&args.space)?;
    let theorem: Theorem = args.numeric.theorem.parse()?;
    let options = args.numeric.options();
    let mut entries = execute(&spec, theorem, &options)?;
    let verdict = overall_verdict(entries.iter().map(|e| &e.verdict));
    summarize(&entries);

    match (args.format, &args.out) {
        (Format::Json, Some(out)) => {
            for e in &mut entries {
                let path = sibling(out, &e.theorem_id);
                let mut buf = Vec::new();
                if write_entry_csv(e, &mut buf)? {
                    std::fs::write(&path, buf)?;
                    e.grid_csv_path = Some(path.to_string_lossy().into_owned());
                }
            }
            let report = run_report(spec, theorem, options, entries, verdict);
            let mut w = BufWriter::new(File::create(out)?);
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
        (Format::Json, None) => {
            let report = run_report(spec, theorem, options, entries, verdict);
            let mut w = io::stdout().lock();
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
        }
        (Format::Csv, Some(out)) if entries.len() == 1 => {
            write_entry_csv(&entries[0], BufWriter::new(File::create(out)?))?;
        }
        (Format::Csv, Some(out)) => {
            for e in &entries {
                let mut buf = Vec::new();
                if write_entry_csv(e, &mut buf)? {
                    std::fs::write(sibling(out, &e.theorem_id), buf)?;
                }
            }
        }
        (Format::Csv, None) => {
            let mut w = io::stdout().lock();
            for (i, e) in entries.iter().enumerate() {
                if i > 0 {
                    writeln!(w)?;
                }
                write_entry_csv(e, &mut w)?;
            }
        }
    }
    Ok(exit_code(verdict))
}

fn run_report(
    spec: SpaceSpec,
    theorem: Theorem,
    options: CheckOptions,
    checks: Vec<CheckEntry>,
    verdict: Verdict,
) -> RunReport {
    RunReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        spec,
        theorem: theorem.to_string(),
        options,
        checks,
        verdict,
    }
}

/// One swept parameter with its values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRange {
    pub name: String,
    pub values: Vec<f64>,
}

impl std::str::FromStr for SweepRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::param("range", format!("'{s}': {why}"));
        let (name, rest) = s
            .split_once('=')
            .ok_or_else(|| bad("expected NAME=START:STOP:COUNT"))?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected START:STOP:COUNT"));
        }
        let start: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| bad("START is not a number"))?;
        let stop: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| bad("STOP is not a number"))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| bad("COUNT is not an integer"))?;
        if count == 0 {
            return Err(bad("empty range"));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(bad("bounds must be finite"));
        }
        let values = if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect()
        };
        Ok(SweepRange {
            name: name.trim().to_string(),
            values,
        })
    }
}

fn apply(spec: &mut SpaceSpec, opts: &mut CheckOptions, name: &str, value: f64) -> Result<()> {
    let space_params: Vec<&str> = catalog_entries()
        .into_iter()
        .find(|e| e.name == spec.name)
        .map(|e| e.params.iter().map(|p| p.name).collect())
        .unwrap_or_default();
    if space_params.contains(&name) {
        spec.params.insert(name.to_string(), value);
        Ok(())
    } else if name == "n" {
        if !(value >= 2.0) || value.fract() != 0.0 {
            return Err(Error::param(
                "n",
                format!("must be an integer >= 2, got {value}"),
            ));
        }
        spec.n = value as usize;
        Ok(())
    } else if CheckOptions::NAMES.contains(&name) {
        opts.set(name, value)
    } else {
        Err(Error::param(
            name,
            "not a space parameter or numeric option",
        ))
    }
}

/// Runs `theorem` at every point of the cartesian product of `ranges` and
/// writes `param...,[epsilon],min_margin,verdict` rows.
pub fn sweep<W: Write>(
    spec: &SpaceSpec,
    theorem: Theorem,
    options: &CheckOptions,
    ranges: &[SweepRange],
    out: W,
) -> Result<Verdict> {
    let derived = matches!(
        theorem,
        Theorem::Cheng | Theorem::Comparison(crate::comparison::TheoremId::Doubling)
    );
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ranges.iter().map(|r| r.name.clone()).collect();
    if derived {
        header.push("epsilon".into());
    }
    header.extend(["min_margin".into(), "verdict".into()]);
    w.write_record(&header)?;

    let total: usize = ranges.iter().map(|r| r.values.len()).product();
    let mut verdicts = Vec::with_capacity(total);
    for index in 0..total {
        let mut spec = spec.clone();
        let mut opts = options.clone();
        let mut rest = index;
        let mut row = Vec::with_capacity(header.len());
        let mut point = Vec::with_capacity(ranges.len());
        for r in ranges.iter().rev() {
            point.push((r, r.values[rest % r.values.len()]));
            rest /= r.values.len();
        }
        point.reverse();
        for (r, v) in &point {
            apply(&mut spec, &mut opts, &r.name, *v)?;
            row.push(v.to_string());
        }
        let entries = execute(&spec, theorem, &opts)?;
        let verdict = overall_verdict(entries.iter().map(|e| &e.verdict));
        if derived {
            let eps = entries
                .iter()
                .find_map(|e| e.params.get("epsilon").map(|q| q.value));
            row.push(eps.map_or(String::new(), |e| e.to_string()));
        }
        let margin = entries
            .iter()
            .filter_map(|e| e.min_margin)
            .fold(None, |acc: Option<f64>, m| {
                Some(acc.map_or(m, |a| a.min(m)))
            });
        row.push(margin.map_or(String::new(), |m| m.to_string()));
        row.push(verdict.to_string());
        w.write_record(&row)?;
        verdicts.push(verdict);
    }
    w.flush()?;
    Ok(overall_verdict(verdicts.iter()))
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let spec = build_spec(&args.space)?;
    let theorem: Theorem = args.numeric.theorem.parse()?;
    let ranges = args
        .ranges
        .iter()
        .map(|r| r.parse())
        .collect::<Result<Vec<SweepRange>>>()?;
    let options = args.numeric.options();
    let verdict = match &args.out {
        Some(path) => sweep(
            &spec,
            theorem,
            &options,
            &ranges,
            BufWriter::new(File::create(path)?),
        )?,
        None => sweep(&spec, theorem, &options, &ranges, io::stdout().lock())?,
    };
    Ok(exit_code(verdict))
}
