//! Command-line surface: argument types, file formats and report printing.
//!
//! Exit codes are `0` on success, `1` on a count mismatch, theorem finding or
//! failed claim, and `2` on a usage, parse or I/O error.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::enumeration::{full_enum, EnumError, EnumOptions, EnumerationResult, Method, SummaryRow};
use crate::fpalg::{is_prime, omega_formulas, omega_set};
use crate::skew_core::{SkewError, SkewMorphism, SkewRecord, SkewValidator};
use crate::structure_verify::{build_and_verify_example, sweep, ExampleReport, ExampleTag, VerifyError};

pub const WORKERS_ENV: &str = "SKEWMORPH_WORKERS";
pub const OMEGA_MAX_P: u32 = 13;

#[derive(Debug, Parser)]
#[command(name = "skewmorph", version, about = "Enumerate, validate and classify skew-morphisms of Z_p^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate all skew-morphisms of Z_p^n and compare with the closed-form count.
    Enum(EnumArgs),
    /// Classify every skew-morphism in a JSONL file.
    Verify(VerifyArgs),
    /// Build one of the worked examples and check its claims.
    Example(ExampleArgs),
    /// Size of the Ω-set against the closed forms.
    Omega(OmegaArgs),
}

#[derive(Debug, Args)]
pub struct WorkerArgs {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EnumArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub n: usize,
    /// brute, structured or both.
    #[arg(long, default_value = "structured")]
    pub method: String,
    /// JSONL output; defaults to skew_{p}_{n}.jsonl.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// CSV summary; defaults to the output path with a .csv extension.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Fraction of members validated on count-only runs.
    #[arg(long, default_value_t = 0.01)]
    pub sample_rate: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Build and write the full member list even where the default is count-only.
    #[arg(long)]
    pub materialize: bool,
    #[command(flatten)]
    pub workers: WorkerArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSONL file of skew-morphism records.
    pub input: PathBuf,
    /// Annotated JSONL output; defaults to <input>.classified.jsonl.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Fraction of automorphisms that also get the full affine search.
    #[arg(long, default_value_t = 0.05)]
    pub sample_rate: f64,
    #[command(flatten)]
    pub workers: WorkerArgs,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    /// e1, e2 or e3.
    pub tag: String,
    /// Print only the JSON block.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    #[arg(long)]
    pub p: u32,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            _ => 2,
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Unsupported(_) | EnumError::Fp(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

/// Validated settings of an `enum` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub p: u32,
    pub n: usize,
    pub method: Method,
    pub output: PathBuf,
    pub summary: PathBuf,
    pub sample_rate: f64,
    pub workers: usize,
    pub seed: u64,
    pub materialize: bool,
}

impl RunConfig {
    pub fn from_args(a: &EnumArgs) -> Result<Self, CliError> {
        if !is_prime(a.p) {
            return Err(CliError::Usage(format!("p = {} is not prime", a.p)));
        }
        if !(1..=3).contains(&a.n) {
            return Err(CliError::Usage(format!("n = {} is not in 1..=3", a.n)));
        }
        let method: Method = a.method.parse().map_err(CliError::Usage)?;
        let output = a.output.clone().unwrap_or_else(|| PathBuf::from(format!("skew_{}_{}.jsonl", a.p, a.n)));
        let summary = a.summary.clone().unwrap_or_else(|| output.with_extension("csv"));
        Ok(RunConfig {
            p: a.p,
            n: a.n,
            method,
            output,
            summary,
            sample_rate: check_rate(a.sample_rate)?,
            workers: resolve_workers(a.workers.workers)?,
            seed: a.seed,
            materialize: a.materialize,
        })
    }
}

fn check_rate(r: f64) -> Result<f64, CliError> {
    if r > 0.0 && r <= 1.0 {
        Ok(r)
    } else {
        Err(CliError::Usage(format!("sample rate {r} is not in (0, 1]")))
    }
}

fn resolve_workers(w: Option<usize>) -> Result<usize, CliError> {
    match w {
        Some(0) => Err(CliError::Usage("worker count must be positive".into())),
        Some(w) => Ok(w),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> i32 {
    let res = match cli.command {
        Command::Enum(a) => RunConfig::from_args(&a).and_then(|cfg| cmd_enum(&cfg, out)),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Example(a) => cmd_example(&a, out),
        Command::Omega(a) => cmd_omega(a.p, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn write_jsonl(path: &Path, skews: &[SkewMorphism]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for s in skews {
        serde_json::to_writer(&mut w, &s.to_record()).map_err(|e| CliError::Failure(e.to_string()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_summary(path: &Path, row: &SummaryRow) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    w.serialize(row).map_err(|e| CliError::Failure(e.to_string()))?;
    w.flush().map_err(io_err(path))
}

fn print_summary(out: &mut dyn Write, r: &EnumerationResult) -> io::Result<()> {
    writeln!(out, "p = {}, n = {}, method = {}", r.p, r.n, r.method)?;
    writeln!(out, "  total           {}", r.count_total)?;
    writeln!(out, "  automorphisms   {}", r.count_aut)?;
    writeln!(out, "  others          {}", r.count_nonaut)?;
    writeln!(out, "  closed form     {}", r.formula_value)?;
    writeln!(out, "  validated       {}", r.validated)?;
    if let Some(c) = &r.comparison {
        writeln!(
            out,
            "  brute vs structured: {} common, {} brute only, {} structured only",
            c.common,
            c.only_left.len(),
            c.only_right.len()
        )?;
        for w in c.only_left.iter().take(3) {
            writeln!(out, "    brute only: {w:?}")?;
        }
        for w in c.only_right.iter().take(3) {
            writeln!(out, "    structured only: {w:?}")?;
        }
    }
    writeln!(out, "  match           {}", r.matches_formula())
}

pub fn cmd_enum(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let opts = EnumOptions { sample_rate: cfg.sample_rate, seed: cfg.seed, materialize: cfg.materialize };
    let start = Instant::now();
    let r = in_pool(cfg.workers, || full_enum(cfg.p, cfg.n, cfg.method, &opts))??;
    let elapsed = start.elapsed();
    write_jsonl(&cfg.output, &r.skews)?;
    write_summary(&cfg.summary, &r.summary_row())?;
    let stdout_err = |e: io::Error| CliError::Io { path: "stdout".into(), source: e };
    print_summary(out, &r).map_err(stdout_err)?;
    if r.materialized {
        writeln!(out, "  wrote {} records to {}", r.skews.len(), cfg.output.display()).map_err(stdout_err)?;
    } else {
        writeln!(out, "  count-only run; {} is empty (use --materialize)", cfg.output.display()).map_err(stdout_err)?;
    }
    writeln!(out, "  elapsed {:.2?}", elapsed).map_err(stdout_err)?;
    Ok(if r.matches_formula() { 0 } else { 1 })
}

/// A record with the classification columns appended.
#[derive(Debug, Serialize)]
pub struct ClassifiedRecord<'a> {
    #[serde(flatten)]
    pub record: &'a SkewRecord,
    pub case: &'static str,
    pub core_rank: u32,
    pub g_normal_in_x: bool,
    pub g_normal_in_p: bool,
    #[serde(rename = "affine_T_found")]
    pub affine_t_found: Option<bool>,
}

/// Parses and validates every line; blank lines are skipped.
pub fn read_records(path: &Path) -> Result<(Vec<SkewRecord>, Vec<SkewMorphism>), CliError> {
    let reader = BufReader::new(File::open(path).map_err(io_err(path))?);
    let mut validators: HashMap<(u32, usize), SkewValidator> = HashMap::new();
    let (mut records, mut skews) = (Vec::new(), Vec::new());
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse = |msg: String| CliError::Parse { line: i + 1, msg };
        let rec: SkewRecord = serde_json::from_str(&line).map_err(|e| parse(e.to_string()))?;
        let v = match validators.entry((rec.p, rec.n)) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(SkewValidator::new(rec.p, rec.n).map_err(|e: SkewError| parse(e.to_string()))?)
            }
        };
        skews.push(v.from_record(&rec).map_err(|e| parse(e.to_string()))?);
        records.push(rec);
    }
    Ok((records, skews))
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let rate = check_rate(a.sample_rate)?;
    let workers = resolve_workers(a.workers.workers)?;
    let (records, skews) = read_records(&a.input)?;
    let stride = (1.0 / rate).round().max(1.0) as usize;
    let start = Instant::now();
    let (reports, summary) = in_pool(workers, || sweep(&skews, stride))??;
    let elapsed = start.elapsed();

    let output = a.output.clone().unwrap_or_else(|| a.input.with_extension("classified.jsonl"));
    let mut w = BufWriter::new(File::create(&output).map_err(io_err(&output))?);
    for (rec, rep) in records.iter().zip(&reports) {
        let row = ClassifiedRecord {
            record: rec,
            case: rep.case_label.as_str(),
            core_rank: rep.core_rank,
            g_normal_in_x: rep.g_normal_in_x,
            g_normal_in_p: rep.g_normal_in_p,
            affine_t_found: rep.affine_found(),
        };
        serde_json::to_writer(&mut w, &row).map_err(|e| CliError::Failure(e.to_string()))?;
        w.write_all(b"\n").map_err(io_err(&output))?;
    }
    w.flush().map_err(io_err(&output))?;

    let stdout_err = |e: io::Error| CliError::Io { path: "stdout".into(), source: e };
    (|| -> io::Result<()> {
        writeln!(out, "classified {} records from {}", summary.instances, a.input.display())?;
        for (label, count) in &summary.histogram {
            writeln!(out, "  {label:<20} {count}")?;
        }
        let normal = reports.iter().filter(|r| r.g_normal_in_x).count();
        writeln!(out, "  G normal in X       {normal}")?;
        writeln!(out, "  G not normal in X   {}", reports.len() - normal)?;
        writeln!(out, "  affine embedding    {}/{} searched", summary.affine_found, summary.affine_searched)?;
        writeln!(out, "  findings            {}", summary.findings.len())?;
        for (sigma, f) in summary.findings.iter().take(10) {
            writeln!(out, "    {}: {} for σ = {sigma:?}", f.claim, f.detail)?;
        }
        writeln!(out, "  wrote {}", output.display())?;
        writeln!(out, "  elapsed {:.2?}", elapsed)
    })()
    .map_err(stdout_err)?;
    Ok(if summary.findings.is_empty() { 0 } else { 1 })
}

pub fn print_example(out: &mut dyn Write, r: &ExampleReport) -> io::Result<()> {
    let width = r.claims.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    writeln!(out, "example {}", r.tag)?;
    for c in &r.claims {
        let pad = width - c.name.chars().count();
        writeln!(
            out,
            "  [{}] {}{}  expected {}, observed {}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            " ".repeat(pad),
            c.expected,
            c.observed
        )?;
    }
    for n in &r.notes {
        writeln!(out, "  note: {n}")?;
    }
    for f in &r.flags {
        writeln!(out, "  flag: {f}")?;
    }
    writeln!(out, "  case {}, core rank {}", r.classification.case_label.as_str(), r.classification.core_rank)
}

pub fn cmd_example(a: &ExampleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let tag: ExampleTag = a.tag.parse().map_err(CliError::Usage)?;
    let report = build_and_verify_example(tag)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Failure(e.to_string()))?;
    let stdout_err = |e: io::Error| CliError::Io { path: "stdout".into(), source: e };
    if !a.json {
        print_example(out, &report).map_err(stdout_err)?;
        writeln!(out).map_err(stdout_err)?;
    }
    writeln!(out, "{json}").map_err(stdout_err)?;
    Ok(if report.passed() { 0 } else { 1 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OmegaReport {
    pub p: u32,
    pub size: u64,
    pub branch_sum: u64,
    pub stated_closed_form: u64,
    pub factored_branch_sum: u64,
}

impl OmegaReport {
    pub fn matches_branch_sum(&self) -> bool {
        self.size == self.branch_sum
    }

    pub fn matches_closed_form(&self) -> bool {
        self.size == self.stated_closed_form
    }
}

pub fn omega_report(p: u32) -> Result<OmegaReport, CliError> {
    if p == 2 || p > OMEGA_MAX_P || !is_prime(p) {
        return Err(CliError::Usage(format!("p = {p} must be an odd prime at most {OMEGA_MAX_P}")));
    }
    let size = omega_set(p).map_err(|e| CliError::Usage(e.to_string()))?.len() as u64;
    let f = omega_formulas(p);
    Ok(OmegaReport {
        p,
        size,
        branch_sum: f.branch_sum,
        stated_closed_form: f.stated_closed_form,
        factored_branch_sum: f.factored_branch_sum,
    })
}

pub fn cmd_omega(p: u32, out: &mut dyn Write) -> Result<i32, CliError> {
    let r = omega_report(p)?;
    let mark = |ok: bool| if ok { "matches" } else { "MISMATCH" };
    let stdout_err = |e: io::Error| CliError::Io { path: "stdout".into(), source: e };
    (|| -> io::Result<()> {
        writeln!(out, "p = {}: |Ω| = {} by direct enumeration", r.p, r.size)?;
        writeln!(out, "  (p−2) + p²(p−2)²       = {:<8} {}", r.branch_sum, mark(r.matches_branch_sum()))?;
        writeln!(out, "  (p−2)(p−1)(p²−p+1)     = {:<8} {}", r.stated_closed_form, mark(r.matches_closed_form()))?;
        writeln!(out, "  (p−2)(p−1)(p²−p−1)     = {:<8} {}", r.factored_branch_sum, mark(r.size == r.factored_branch_sum))?;
        if !r.matches_closed_form() {
            writeln!(out, "  flag: the closed form (p−2)(p−1)(p²−p+1) does not equal the branch sum")?;
        }
        Ok(())
    })()
    .map_err(stdout_err)?;
    Ok(if r.matches_branch_sum() { 0 } else { 1 })
}
