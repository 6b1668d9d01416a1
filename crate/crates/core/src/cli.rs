//! Command-line front end: `compute`, `verify` and `eval`.
//!
//! Exit codes: 0 success, 1 verification or computation failure, 2 usage
//! error. Precision and thread count can also come from `POLYZETA_PRECISION`
//! and `POLYZETA_THREADS`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{self, EngineState};
use crate::error::{Error, Result};
use crate::mzvalg::LambdaPoly;
use crate::ring::Ring;
use crate::numeval::{disk_eigenvalue, evaluate_expansion, lambda_poly_numeric, Ball};
use crate::serialize;
use crate::verify::{self, Report};

/// Largest working precision accepted on the command line; the numerics add
/// guard bits on top.
pub const MAX_CLI_PREC: u32 = 768;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Table2,
    Closedform,
    Wz,
    Properties,
    Expansion,
    Trigamma,
    Regularization,
    Bessel,
    Kappa,
    Grading,
    All,
}

#[derive(Debug, Parser)]
#[command(name = "polyzeta", version, about = "Dirichlet eigenvalues of regular polygons as series in 1/N over multiple zeta values")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Working precision of numeric evaluation in bits.
    #[arg(long, global = true, env = "POLYZETA_PRECISION", default_value_t = 256)]
    pub precision: u32,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "POLYZETA_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the engine and report C_n, kappa_n and V_n.
    Compute {
        #[arg(long, default_value_t = 10)]
        max_weight: usize,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Engine weight for the suites that need engine output.
        #[arg(long, default_value_t = 10)]
        max_weight: usize,
        /// Seed for the WZ sample points.
        #[arg(long, default_value_t = 20240601)]
        seed: u64,
    },
    /// Evaluate the truncated expansion for one polygon or a range of them.
    Eval {
        /// Number of sides, or a range `A..B` (inclusive) with --sweep.
        #[arg(long = "N", value_name = "N")]
        n: String,
        /// Keep the terms through N^-terms.
        #[arg(long, default_value_t = 8)]
        terms: usize,
        /// Index of the radial mode: lambda_m = j_{0,m}^2.
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Accept a range for --N.
        #[arg(long)]
        sweep: bool,
        /// Use the coefficients of a saved `compute --format json` document.
        #[arg(long)]
        from: Option<PathBuf>,
    },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub max_weight: usize,
    pub precision_bits: u32,
    pub threads: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_weight < 1 {
            return Err(Error::InvalidArgument("--max-weight must be at least 1".into()));
        }
        if !(64..=MAX_CLI_PREC).contains(&self.precision_bits) {
            return Err(Error::InvalidArgument(format!(
                "--precision must lie in 64..={MAX_CLI_PREC}, got {}",
                self.precision_bits
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("--threads must be positive".into()));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output_path {
            Some(p) => std::fs::write(p, text)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

/// Parses the process arguments and runs; the binary's whole body.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    ExitCode::from(run(cli))
}

pub fn run(cli: Cli) -> u8 {
    let max_weight = match &cli.command {
        Command::Compute { max_weight } | Command::Verify { max_weight, .. } => *max_weight,
        Command::Eval { terms, .. } => (*terms).max(1),
    };
    let config = RunConfig {
        max_weight,
        precision_bits: cli.global.precision,
        threads: cli.global.threads,
        output_path: cli.global.output.clone(),
        format: cli.global.format,
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start thread pool: {e}");
            return EXIT_FAILURE;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Compute { .. } => cmd_compute(&config),
        Command::Verify { suite, seed, .. } => cmd_verify(&config, suite, seed),
        Command::Eval { n, terms, m, sweep, from } => {
            parse_sides(&n, sweep).and_then(|sides| cmd_eval(&config, sides, terms, m, from.as_deref()))
        }
    });
    match result {
        Ok(code) => code,
        Err(e @ (Error::InvalidArgument(_) | Error::Parse(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

/// `N` or, with `sweep`, `A..B`.
pub fn parse_sides(s: &str, sweep: bool) -> Result<RangeInclusive<u64>> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("--N: not a number: {t:?}")));
    let range = match s.split_once("..") {
        Some((a, b)) => {
            if !sweep {
                return Err(Error::InvalidArgument("a range of N needs --sweep".into()));
            }
            num(a)?..=num(b.trim_start_matches('='))?
        }
        None => {
            let n = num(s)?;
            n..=n
        }
    };
    if *range.start() < 3 || range.is_empty() {
        return Err(Error::InvalidArgument(format!("--N must be at least 3 and nonempty, got {s}")));
    }
    Ok(range)
}

fn compute_state(max_weight: usize) -> Result<(EngineState, Vec<LambdaPoly>)> {
    let state = engine::run(max_weight)?;
    let c = state.c_coefficients()?;
    Ok((state, c))
}

pub fn cmd_compute(config: &RunConfig) -> Result<u8> {
    let (state, c) = compute_state(config.max_weight)?;
    let doc = serialize::engine_to_json(&state, &c);
    match config.format {
        Format::Json => {
            let mut text = serialize::to_string(&doc)?;
            text.push('\n');
            config.emit(&text)?;
            if config.output_path.is_some() {
                print!("{}", coefficient_table(&c, config.precision_bits)?);
            }
        }
        Format::Text => config.emit(&coefficient_table(&c, config.precision_bits)?)?,
    }
    Ok(EXIT_OK)
}

/// One row per order: C_n as a polynomial in lambda with MZV coefficients
/// (duality-canonical, composition notation), and its value at j_{0,1}^2.
pub fn coefficient_table(c: &[LambdaPoly], prec: u32) -> Result<String> {
    let lambda = disk_eigenvalue(1, prec)?;
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:<26}  C_n", "n", "C_n(j01^2)");
    for (n, cn) in c.iter().enumerate().skip(1) {
        let value = lambda_poly_numeric(cn, &lambda, prec)?;
        let _ = writeln!(out, "{n:>4}  {:<26}  {}", value.re.to_string_digits(20), lambda_poly_display(cn));
    }
    Ok(out)
}

/// Table notation, highest lambda power first: `(4*z(3)^2)*L + (8*z(3)^2)`.
pub fn lambda_poly_display(p: &LambdaPoly) -> String {
    let parts: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(d, c)| {
            let c = c.duality_canonical();
            match d {
                0 => format!("({c})"),
                1 => format!("({c})*L"),
                _ => format!("({c})*L^{d}"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    passed: bool,
    reports: &'a [Report],
}

pub fn run_suite(suite: Suite, max_weight: usize, prec: u32, seed: u64) -> Result<Vec<Report>> {
    let needs_engine =
        matches!(suite, Suite::Table1 | Suite::Table2 | Suite::Closedform | Suite::Expansion | Suite::Kappa | Suite::Grading | Suite::All);
    let engine = if needs_engine { Some(compute_state(max_weight.max(4))?) } else { None };
    let (state, c) = match &engine {
        Some((s, c)) => (Some(s), c.as_slice()),
        None => (None, &[][..]),
    };
    let state = || state.ok_or_else(|| Error::Precondition("suite needs engine output".into()));
    let one = |s: Suite| -> Result<Report> {
        match s {
            Suite::Table1 => verify::table1(c, max_weight, prec),
            Suite::Table2 => verify::table2(state()?),
            Suite::Closedform => verify::closedform(&c[..=max_weight.min(c.len() - 1)], prec),
            Suite::Wz => verify::wz(20, 5, seed),
            Suite::Properties => verify::properties(prec),
            Suite::Expansion => verify::expansion_small(c, prec),
            Suite::Trigamma => verify::trigamma(prec.max(192)),
            Suite::Regularization => verify::regularization(3, prec),
            Suite::Bessel => Ok(verify::bessel()),
            Suite::Kappa => Ok(verify::kappa_vanishing(state()?)),
            Suite::Grading => Ok(verify::grading(state()?, c)),
            Suite::All => unreachable!(),
        }
    };
    match suite {
        Suite::All => [
            Suite::Table1,
            Suite::Table2,
            Suite::Kappa,
            Suite::Grading,
            Suite::Expansion,
            Suite::Closedform,
            Suite::Trigamma,
            Suite::Wz,
            Suite::Regularization,
            Suite::Bessel,
            Suite::Properties,
        ]
        .into_iter()
        .map(one)
        .collect(),
        s => Ok(vec![one(s)?]),
    }
}

pub fn cmd_verify(config: &RunConfig, suite: Suite, seed: u64) -> Result<u8> {
    let reports = run_suite(suite, config.max_weight, config.precision_bits, seed)?;
    let passed = reports.iter().all(|r| r.passed);
    let text = match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&VerifyOutput { passed, reports: &reports })?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                for c in &r.checks {
                    let dev = c.deviation.map(|d| format!("  dev {d:.3e}")).unwrap_or_default();
                    let detail = if c.passed || c.detail.is_empty() { String::new() } else { format!("  [{}]", c.detail) };
                    let _ = writeln!(s, "{} {}: {}{dev}{detail}", if c.passed { "PASS" } else { "FAIL" }, r.suite, c.name);
                }
                let _ = writeln!(s, "{} {} ({} checks)", if r.passed { "PASS" } else { "FAIL" }, r.suite, r.checks.len());
            }
            s
        }
    };
    config.emit(&text)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Serialize)]
struct EvalRow {
    #[serde(rename = "N")]
    n: u64,
    ratio: String,
    eigenvalue: String,
}

#[derive(Serialize)]
struct EvalOutput {
    terms: usize,
    m: u32,
    lambda_m: String,
    rows: Vec<EvalRow>,
}

/// Truncated ratio lambda(P_N)/lambda_m and lambda_m times it, per N.
pub fn eval_rows(sides: RangeInclusive<u64>, terms: usize, m: u32, c: &[LambdaPoly], prec: u32) -> Result<Vec<(u64, Ball, Ball)>> {
    let lambda = disk_eigenvalue(m, prec)?;
    sides
        .map(|n| {
            let r = evaluate_expansion(n, terms, m, c, prec)?;
            let e = r.mul(&lambda);
            Ok((n, r, e))
        })
        .collect()
}

pub fn cmd_eval(
    config: &RunConfig,
    sides: RangeInclusive<u64>,
    terms: usize,
    m: u32,
    from: Option<&std::path::Path>,
) -> Result<u8> {
    if m == 0 {
        return Err(Error::InvalidArgument("--m counts zeros of J0 from 1".into()));
    }
    let c = match from {
        Some(p) => {
            let doc = serialize::from_str(&std::fs::read_to_string(p)?)?;
            if terms > doc.max_weight {
                return Err(Error::InvalidArgument(format!(
                    "{terms} terms requested but {} holds coefficients through order {}",
                    p.display(),
                    doc.max_weight
                )));
            }
            serialize::engine_from_json(&doc)?.1
        }
        None if terms == 0 => vec![LambdaPoly::one()],
        None => compute_state(terms)?.1,
    };
    let prec = config.precision_bits;
    let rows = eval_rows(sides, terms, m, &c, prec)?;
    let digits = (prec as f64 * 0.3 / 2.0) as usize;
    let text = match config.format {
        Format::Json => {
            let doc = EvalOutput {
                terms,
                m,
                lambda_m: disk_eigenvalue(m, prec)?.to_string_digits(digits),
                rows: rows
                    .iter()
                    .map(|(n, r, e)| EvalRow { n: *n, ratio: r.to_string_digits(digits), eigenvalue: e.to_string_digits(digits) })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "# terms = {terms}, lambda_{m} = j_(0,{m})^2 = {}", disk_eigenvalue(m, prec)?.to_string_digits(30));
            let _ = writeln!(s, "{:>8}  {:<40}  eigenvalue", "N", "ratio");
            for (n, r, e) in &rows {
                let _ = writeln!(s, "{n:>8}  {:<40}  {}", r.to_string_digits(digits), e.to_string_digits(digits));
            }
            s
        }
    };
    config.emit(&text)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sides_parsing() {
        assert_eq!(parse_sides("12", false).unwrap(), 12..=12);
        assert_eq!(parse_sides("10..100", true).unwrap(), 10..=100);
        assert!(parse_sides("10..100", false).is_err());
        assert!(parse_sides("2", false).is_err());
        assert!(parse_sides("x", false).is_err());
        assert!(parse_sides("20..10", true).is_err());
    }

    #[test]
    fn config_bounds() {
        let base = RunConfig { max_weight: 4, precision_bits: 256, threads: None, output_path: None, format: Format::Text };
        assert!(base.validate().is_ok());
        assert!(RunConfig { max_weight: 0, ..base.clone() }.validate().is_err());
        assert!(RunConfig { precision_bits: 32, ..base.clone() }.validate().is_err());
        assert!(RunConfig { threads: Some(0), ..base }.validate().is_err());
    }

    #[test]
    fn argument_parsing() {
        let cli = Cli::try_parse_from(["polyzeta", "eval", "--N", "12", "--terms", "3"]).unwrap();
        assert!(matches!(cli.command, Command::Eval { terms: 3, m: 1, sweep: false, .. }));
        let cli = Cli::try_parse_from(["polyzeta", "verify", "--suite", "table2", "--format", "json"]).unwrap();
        assert!(matches!(cli.command, Command::Verify { suite: Suite::Table2, .. }));
        assert_eq!(cli.global.format, Format::Json);
        assert!(Cli::try_parse_from(["polyzeta", "verify", "--suite", "nope"]).is_err());
    }

    #[test]
    fn table_row_six() {
        let (_, c) = compute_state(6).unwrap();
        assert_eq!(lambda_poly_display(&c[6]), "(6*z(6) - 8*z(1,5))*L + (8*z(3)^2)");
        assert_eq!(lambda_poly_display(&c[1]), "0");
        let t = coefficient_table(&c, 128).unwrap();
        assert_eq!(t.lines().count(), 7);
    }

    #[test]
    fn leading_term_at_twelve() {
        let (_, c) = compute_state(3).unwrap();
        let rows = eval_rows(12..=12, 3, 1, &c, 128).unwrap();
        let z3 = 1.2020569031595942853997381615114f64;
        assert!((rows[0].1.mid_f64() - (1.0 + 4.0 * z3 / 1728.0)).abs() < 1e-15);
    }
}
