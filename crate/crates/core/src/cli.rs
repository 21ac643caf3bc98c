//! The `nht` command line.
//!
//! Exit codes: 0 success, 1 verification or reproduction failure, 2 usage or
//! input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::arith::{self, Modulus};
use crate::correlation::{self, Convention};
use crate::io::csv;
use crate::io::fixtures;
use crate::io::SequenceFile;
use crate::nht;
use crate::reproduce;
use crate::search::{self, SearchOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nht",
    version,
    about = "NHT generator sequences and their modular correlations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that N·Nᵀ is a multiple of the identity modulo q
    Verify(VerifyArgs),
    /// Circular autocorrelation as CSV
    Autocorr(AutocorrArgs),
    /// Circular cross-correlation as CSV
    Xcorr(PairArgs),
    /// Expectation of a cross-correlation
    Expect(PairArgs),
    /// Evaluate doubling chains over a set of prime seeds
    Search(SearchArgs),
    /// Regenerate the published tables from the embedded fixtures
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ConventionArg {
    Raw,
    Scaled,
    /// Whichever convention best matches the published expectation table
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Operand {
    A,
    B,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Fixture name (example1..example6, chain2, chain3, chain11, chain13) or sequence file
    sequence: String,
    /// Modulus to verify against; defaults to the file's, else the discovered gcd
    #[arg(long)]
    modulus: Option<u64>,
    /// When discovering the modulus, use the largest prime factor of the gcd
    #[arg(long)]
    prime_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AutocorrArgs {
    sequence: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Auto)]
    convention: ConventionArg,
    /// Modulus for sequences that carry none
    #[arg(long)]
    modulus: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a stem plot of the normalized series
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PairArgs {
    a: String,
    b: String,
    /// Which operand's modulus the correlation is taken under
    #[arg(long, value_enum, default_value_t = Operand::A)]
    modulus_of: Operand,
    #[arg(long, value_enum, default_value_t = ConventionArg::Auto)]
    convention: ConventionArg,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Comma-separated seeds (`2,3,11,13`) or an inclusive range (`2..100`, primes only)
    #[arg(long, value_parser = parse_seeds, required_unless_present = "sample")]
    seeds: Option<SeedList>,
    /// Draw this many prime seeds at random from `--sample-range`
    #[arg(long)]
    sample: Option<usize>,
    #[arg(long, value_parser = parse_range, default_value = "2..10000")]
    sample_range: (u64, u64),
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long)]
    prime_only: bool,
    /// First chain value after the seed
    #[arg(long, default_value_t = 2)]
    chain_start: u64,
    /// Drop candidates that failed validation
    #[arg(long)]
    valid_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// Directory that receives the CSV files
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("'{s}' is not a range lo..hi"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: u64 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("{hi}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SeedList(Vec<u64>);

fn parse_seeds(s: &str) -> Result<SeedList, String> {
    if s.contains("..") {
        let (lo, hi) = parse_range(s)?;
        return Ok(SeedList(
            (lo..=hi).filter(|&p| arith::is_prime(p)).collect(),
        ));
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|e| format!("seed '{t}': {e}")))
        .collect::<Result<_, _>>()
        .map(SeedList)
}

/// What a command did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub convention: Option<Convention>,
    pub diagnostics: Vec<String>,
    pub exit_code: i32,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "command: {}", self.command)?;
        if !self.inputs.is_empty() {
            writeln!(f, "inputs: {}", self.inputs.join(", "))?;
        }
        if !self.outputs.is_empty() {
            writeln!(f, "outputs: {}", self.outputs.join(", "))?;
        }
        if let Some(c) = self.convention {
            writeln!(f, "convention: {c}")?;
        }
        for d in &self.diagnostics {
            writeln!(f, "diagnostic: {d}")?;
        }
        write!(f, "exit: {}", self.exit_code)
    }
}

enum Failure {
    Usage(String),
    Verification,
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Ctx<'a> {
    report: RunReport,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, out: Option<&Path>, contents: &str) -> Outcome {
        match out {
            Some(path) => {
                csv::write_atomic(path, contents)?;
                self.report.outputs.push(path.display().to_string());
            }
            None => {
                self.stdout.write_all(contents.as_bytes())?;
                self.report.outputs.push("stdout".into());
            }
        }
        Ok(())
    }

    fn load(&mut self, spec: &str) -> Result<SequenceFile, Failure> {
        self.report.inputs.push(spec.to_string());
        let path = Path::new(spec);
        if path.exists() {
            return Ok(SequenceFile::read(path)?);
        }
        fixtures::lookup(spec).ok_or_else(|| {
            Failure::Usage(format!(
                "'{spec}' is neither a file nor a fixture ({})",
                fixtures::names().join(", ")
            ))
        })
    }

    fn convention(&mut self, arg: ConventionArg) -> Convention {
        let c = match arg {
            ConventionArg::Raw => Convention::Raw,
            ConventionArg::Scaled => Convention::Scaled,
            ConventionArg::Auto => {
                correlation::resolve_convention(&fixtures::table2_residues(), &fixtures::TABLE2)
                    .chosen
            }
        };
        self.report.convention = Some(c);
        c
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // Help and version requests are output, not diagnostics.
                let _ = write!(stdout, "{e}");
                return RunReport {
                    command: "nht".into(),
                    ..Default::default()
                };
            }
            return RunReport {
                command: "nht".into(),
                diagnostics: vec![e.render().to_string().trim_end().to_string()],
                exit_code: EXIT_USAGE,
                ..Default::default()
            };
        }
    };
    let name = match &cli.command {
        Command::Verify(_) => "verify",
        Command::Autocorr(_) => "autocorr",
        Command::Xcorr(_) => "xcorr",
        Command::Expect(_) => "expect",
        Command::Search(_) => "search",
        Command::Reproduce(_) => "reproduce",
    };
    let mut ctx = Ctx {
        report: RunReport {
            command: name.into(),
            ..Default::default()
        },
        stdout,
    };
    let outcome = match cli.command {
        Command::Verify(a) => verify(&mut ctx, a),
        Command::Autocorr(a) => autocorr(&mut ctx, a),
        Command::Xcorr(a) => xcorr(&mut ctx, a),
        Command::Expect(a) => expect(&mut ctx, a),
        Command::Search(a) => run_search(&mut ctx, a),
        Command::Reproduce(a) => run_reproduce(&mut ctx, a),
    };
    let mut report = ctx.report;
    report.exit_code = match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_FAILURE,
        Err(Failure::Usage(msg)) => {
            report.diagnostics.push(msg);
            EXIT_USAGE
        }
    };
    report
}

fn verify(ctx: &mut Ctx, a: VerifyArgs) -> Outcome {
    let file = ctx.load(&a.sequence)?;
    let g = file.generator()?;
    let (q, source) = match (a.modulus, file.modulus) {
        (Some(q), _) => (Modulus::new(q)?, "argument".to_string()),
        (None, Some(q)) => (Modulus::new(q)?, "file".to_string()),
        (None, None) => {
            let c = search::evaluate_candidate(&g, a.prime_only);
            let q = c.modulus.ok_or_else(|| {
                Failure::Usage(format!(
                    "no usable modulus: gcd of lag sums is {} ({})",
                    c.gcd,
                    c.diagnostics.join("; ")
                ))
            })?;
            (q, format!("gcd {}", c.gcd))
        }
    };
    let report = nht::orthogonality_report(&g, q);
    let gram = nht::gram_lag_sums(&g);

    let mut text = String::new();
    use std::fmt::Write as _;
    writeln!(text, "name: {}", file.name).unwrap();
    writeln!(text, "n: {}", file.n).unwrap();
    writeln!(text, "modulus: {q} ({source})").unwrap();
    writeln!(text, "modulus_is_prime: {}", arith::is_prime(q.get())).unwrap();
    writeln!(text, "diagonal_sum: {}", gram.diagonal).unwrap();
    writeln!(text, "diagonal_residue: {}", report.diagonal_residue).unwrap();
    let normalizer = match report.normalizer {
        Some(w) => w.to_string(),
        None => "none".into(),
    };
    writeln!(text, "normalizer: {normalizer}").unwrap();
    writeln!(text, "identity: {}", report.is_exact_identity).unwrap();
    for (k, s) in gram.lag_sums.iter().enumerate() {
        writeln!(
            text,
            "lag {}: sum {s} residue {}",
            k + 1,
            report.offdiag_residues[&(k + 1)]
        )
        .unwrap();
    }
    let offending = report.offending_lags();
    writeln!(
        text,
        "status: {}",
        if offending.is_empty() {
            "orthogonal"
        } else {
            "not orthogonal"
        }
    )
    .unwrap();
    ctx.emit(a.out.as_deref(), &text)?;

    if report.diagonal_residue != 1 && report.normalizer.is_none() {
        ctx.report.diagnostics.push(format!(
            "diagonal residue {} has no normalizer mod {q}",
            report.diagonal_residue
        ));
    }
    if offending.is_empty() {
        Ok(())
    } else {
        for (k, r) in offending {
            ctx.report
                .diagnostics
                .push(format!("lag {k}: residue {r} (expected 0)"));
        }
        Err(Failure::Verification)
    }
}

fn autocorr(ctx: &mut Ctx, a: AutocorrArgs) -> Outcome {
    let file = ctx.load(&a.sequence)?;
    let fallback = a.modulus.map(Modulus::new).transpose()?;
    let s = file.residues(fallback)?;
    let conv = ctx.convention(a.convention);
    let series = correlation::circular_autocorr(&s, conv)?;
    ctx.emit(a.out.as_deref(), &csv::correlation_csv(&series))?;
    if let Some(svg) = a.svg {
        csv::write_atomic(
            &svg,
            &csv::stem_plot_svg(&series, &format!("autocorrelation of {}", file.name)),
        )?;
        ctx.report.outputs.push(svg.display().to_string());
    }
    Ok(())
}

fn pair_series(
    ctx: &mut Ctx,
    a: &PairArgs,
) -> Result<(SequenceFile, SequenceFile, correlation::CorrelationSeries), Failure> {
    let fa = ctx.load(&a.a)?;
    let fb = ctx.load(&a.b)?;
    if fa.n != fb.n {
        return Err(Failure::Usage(format!(
            "length mismatch: {} has {} values, {} has {}",
            fa.name, fa.n, fb.name, fb.n
        )));
    }
    let chosen = match a.modulus_of {
        Operand::A => &fa,
        Operand::B => &fb,
    };
    let q = chosen
        .modulus
        .ok_or_else(|| Failure::Usage(format!("sequence '{}' has no modulus", chosen.name)))?;
    let q = Modulus::new(q)?;
    let conv = ctx.convention(a.convention);
    let series = correlation::circular_crosscorr(&fa.values, &fb.values, q, conv)?;
    Ok((fa, fb, series))
}

fn xcorr(ctx: &mut Ctx, a: PairArgs) -> Outcome {
    let (fa, fb, series) = pair_series(ctx, &a)?;
    ctx.emit(a.out.as_deref(), &csv::correlation_csv(&series))?;
    if let Some(svg) = &a.svg {
        let title = format!(
            "cross-correlation of {} and {} mod {}",
            fa.name, fb.name, series.modulus
        );
        csv::write_atomic(svg, &csv::stem_plot_svg(&series, &title))?;
        ctx.report.outputs.push(svg.display().to_string());
    }
    Ok(())
}

fn expect(ctx: &mut Ctx, a: PairArgs) -> Outcome {
    let (fa, fb, series) = pair_series(ctx, &a)?;
    let e = correlation::expectation_measure(&series);
    let text = format!(
        "a,b,modulus,expectation,exact\n{},{},{},{},{}/{}\n",
        fa.name,
        fb.name,
        series.modulus,
        csv::format_expectation(&e),
        e.numer(),
        e.denom()
    );
    ctx.emit(a.out.as_deref(), &text)
}

fn run_search(ctx: &mut Ctx, a: SearchArgs) -> Outcome {
    let seeds = match (a.seeds, a.sample) {
        (Some(SeedList(s)), _) => s,
        (None, Some(count)) => {
            let (lo, hi) = a.sample_range;
            search::sample_prime_seeds(a.rng_seed, count, lo, hi)
        }
        (None, None) => unreachable!("clap requires --seeds or --sample"),
    };
    ctx.report.inputs.push(format!(
        "seeds {}",
        seeds
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    ));
    if a.n < 2 {
        return Err(Failure::Usage(format!("--n {} is below 2", a.n)));
    }
    let outcome = search::search_seeds(
        &seeds,
        SearchOptions {
            n: a.n,
            prime_only: a.prime_only,
            chain_start: a.chain_start,
            valid_only: a.valid_only,
        },
    );
    ctx.report.diagnostics.extend(outcome.diagnostics);
    for c in &outcome.candidates {
        for d in &c.diagnostics {
            ctx.report.diagnostics.push(format!("seed {}: {d}", c.seed));
        }
    }
    ctx.emit(a.out.as_deref(), &csv::search_csv(&outcome.candidates))
}

fn run_reproduce(ctx: &mut Ctx, a: ReproduceArgs) -> Outcome {
    let r = reproduce::run();
    ctx.report.convention = Some(r.resolution.chosen);
    ctx.report.inputs.push("embedded fixtures".into());

    let mut text = String::new();
    use std::fmt::Write as _;
    for c in &r.checks {
        writeln!(
            text,
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        )
        .unwrap();
    }
    writeln!(
        text,
        "\ncross-correlation expectations ({} convention)",
        r.resolution.chosen
    )
    .unwrap();
    writeln!(text, "i,j,modulus,expectation,published").unwrap();
    for row in &r.table2 {
        let published = fixtures::TABLE2
            .iter()
            .find(|t| t.source == row.source && t.target == row.target)
            .map(|t| csv::format_expectation(&t.value()))
            .unwrap_or_default();
        writeln!(
            text,
            "{},{},{},{},{}",
            row.source,
            row.target,
            row.modulus,
            csv::format_expectation(&row.expectation),
            published
        )
        .unwrap();
    }
    for p in r.resolution.rejected() {
        let max = p
            .max_deviation()
            .map(|m| format!("{:.4}", correlation::to_f64(&m)))
            .unwrap_or_else(|| "unavailable".into());
        writeln!(
            text,
            "rejected {} convention: max deviation {max}",
            p.convention
        )
        .unwrap();
    }

    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &r.artifacts {
            let path = dir.join(name);
            csv::write_atomic(&path, contents)?;
            ctx.report.outputs.push(path.display().to_string());
        }
    }
    ctx.stdout.write_all(text.as_bytes())?;
    ctx.report.outputs.push("stdout".into());

    for c in r.checks.iter().filter(|c| !c.passed) {
        ctx.report
            .diagnostics
            .push(format!("{}: {}", c.name, c.detail));
    }
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
