//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or domain error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::series::DEFAULT_TRUNCATION;
use crate::arith::{singular_series, PrimeSieve};
use crate::counting::{CountMode, CountQuery, Counter};
use crate::delta::{
    delta_pair, find_threshold, find_threshold_in, main_term_bound, DeltaMode, DeltaParams,
    SieveLevel, DEFAULT_LAMBDA,
};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::report::{self, Format, OutputSpec, Record, Value};
use crate::sieve_functions::{SieveFn, SieveFunctions, EULER_GAMMA};
use crate::verify::{run_verify, VerifyOptions};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "sievekit", version, about = "Sieve constants, exact counts and verification for N - p = P_r")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Table)]
    pub format: FormatArg,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Decimal digits for fixed-point values.
    #[arg(long, global = true, default_value_t = report::DEFAULT_PRECISION)]
    pub precision: usize,

    /// Absolute and relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Sieve level λ in z = N^(1/λ).
    #[arg(long, global = true, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,

    /// Allow λ other than 11.99 (constants derived from λ).
    #[arg(long, global = true)]
    pub exploratory: bool,

    /// Smaller verification ranges.
    #[arg(long, global = true)]
    pub quick: bool,

    /// Add this offset to Euler's constant in the sieve functions.
    #[arg(long, global = true, hide = true, allow_hyphen_values = true)]
    pub inject_gamma_offset: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Table,
    Csv,
    #[value(alias = "json-lines")]
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::JsonLines,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionArg {
    #[value(name = "F")]
    Upper,
    #[value(name = "f")]
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    SmallPrimes,
    ShortInterval,
}

impl From<ModeArg> for DeltaMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::SmallPrimes => DeltaMode::SmallPrimes,
            ModeArg::ShortInterval => DeltaMode::ShortInterval,
        }
    }
}

/// `--theta` or `--kappa`, at most one.
#[derive(Debug, Clone, Copy, Args)]
#[group(multiple = false)]
pub struct ParamArgs {
    /// Small-primes mode, p <= N^θ.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Short-interval mode, |p - N/2| <= N^κ.
    #[arg(long)]
    pub kappa: Option<f64>,
}

impl ParamArgs {
    fn get(&self) -> Option<(DeltaMode, f64)> {
        match (self.theta, self.kappa) {
            (Some(t), _) => Some((DeltaMode::SmallPrimes, t)),
            (_, Some(k)) => Some((DeltaMode::ShortInterval, k)),
            _ => None,
        }
    }

    fn required(&self) -> Result<(DeltaMode, f64)> {
        self.get()
            .ok_or_else(|| Error::Domain("one of --theta or --kappa is required".into()))
    }

    fn count_mode(&self) -> CountMode {
        match self.get() {
            None => CountMode::Full,
            Some((DeltaMode::SmallPrimes, x)) => CountMode::SmallPrimes(x),
            Some((DeltaMode::ShortInterval, x)) => CountMode::ShortInterval(x),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate F(s) or f(s).
    Eval {
        #[arg(value_enum)]
        function: FunctionArg,
        #[arg(long)]
        s: f64,
    },
    /// Δ constants and their margin.
    Delta {
        #[command(flatten)]
        param: ParamArgs,
    },
    /// Smallest θ or κ with a positive margin.
    Threshold {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Lower end of the bisection bracket.
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        /// Upper end of the bisection bracket.
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
    },
    /// Main term of the lower bound for N - p = P_3.
    Bound {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        param: ParamArgs,
        /// Truncation of the Euler product in C(N).
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u64,
    },
    /// Count primes p with N - p = P_r.
    Count {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[command(flatten)]
        param: ParamArgs,
        /// Count N - p = 1 as a P_r.
        #[arg(long)]
        include_unit: bool,
    },
    /// Exact weighted sieve S1 - S2/2 against D_{1,3}.
    Sift {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        param: ParamArgs,
    },
    /// Singular series C(N).
    Series {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
        truncation: u64,
    },
    /// Counts over a list or range of N.
    Scan {
        /// Explicit comma-separated N values.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["from", "to"])]
        n: Vec<u64>,
        #[arg(long, requires = "to")]
        from: Option<u64>,
        #[arg(long, requires = "from")]
        to: Option<u64>,
        #[arg(long, default_value_t = 2)]
        step: u64,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[command(flatten)]
        param: ParamArgs,
        #[arg(long)]
        include_unit: bool,
    },
    /// Run the fixed verification pipeline.
    Verify,
}

/// Parse arguments, run, and map the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sievekit: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn output_spec(cli: &Cli) -> OutputSpec {
    OutputSpec {
        format: cli.format.into(),
        destination: cli.out.clone(),
        precision: cli.precision,
    }
}

fn quadrature(cli: &Cli) -> Result<QuadratureConfig> {
    match cli.tol {
        Some(t) => QuadratureConfig::with_tolerance(t),
        None => Ok(QuadratureConfig::default()),
    }
}

fn level(cli: &Cli) -> Result<SieveLevel> {
    SieveLevel::from_lambda(cli.lambda, cli.exploratory)
}

fn emit(records: &[Record], spec: &OutputSpec) -> Result<()> {
    let io_err = |e: io::Error| Error::Resource(format!("cannot write output: {e}"));
    match &spec.destination {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::Resource(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            report::write_records(&mut w, records, spec).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let mut w = io::stdout().lock();
            report::write_records(&mut w, records, spec).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

/// Execute a parsed command line; returns the exit code on success.
pub fn run(cli: &Cli) -> Result<u8> {
    let spec = output_spec(cli);
    let cfg = quadrature(cli)?;
    let gamma = EULER_GAMMA + cli.inject_gamma_offset.unwrap_or(0.0);

    let records = match &cli.command {
        Command::Eval { function, s } => {
            let func = match function {
                FunctionArg::Upper => SieveFn::Upper,
                FunctionArg::Lower => SieveFn::Lower,
            };
            let sf = SieveFunctions::new(cfg).with_gamma(gamma);
            vec![report::sieve_value_record(&sf.eval(func, *s)?)]
        }
        Command::Delta { param } => {
            let (mode, x) = param.required()?;
            let r = delta_pair(DeltaParams::new(mode, x).with_level(level(cli)?), &cfg)?;
            vec![report::delta_record(&r)]
        }
        Command::Threshold { mode, lo, hi } => {
            let t = match (lo, hi) {
                (Some(a), Some(b)) => find_threshold_in((*mode).into(), level(cli)?, (*a, *b), &cfg)?,
                _ => find_threshold((*mode).into(), level(cli)?, &cfg)?,
            };
            vec![report::threshold_record(&t)]
        }
        Command::Bound { n, param, truncation } => {
            let (mode, x) = param.required()?;
            let params = DeltaParams::new(mode, x).with_level(level(cli)?);
            let c = singular_series(*n, *truncation)?;
            let bound = main_term_bound(*n, params, c.value, &cfg)?;
            vec![Record::new()
                .field("N", *n)
                .field("mode", mode.name())
                .float("param", x)
                .float("lambda", params.lambda())
                .float("singular_series", c.value)
                .float("main_term", bound)]
        }
        Command::Count {
            n,
            r,
            param,
            include_unit,
        } => {
            let q = CountQuery {
                include_unit: *include_unit,
                ..CountQuery::new(*n, *r, param.count_mode())
            };
            let sieve = PrimeSieve::new((*n).max(2))?;
            let counter = Counter::new(&sieve)?.with_quadrature(cfg);
            vec![report::count_record(&counter.count(&q)?)]
        }
        Command::Sift { n, param } => {
            let (mode, x) = param.get().unwrap_or((DeltaMode::SmallPrimes, 1.0));
            let params = DeltaParams::new(mode, x).with_level(level(cli)?);
            let sieve = PrimeSieve::new((*n).max(2))?;
            vec![report::sift_record(&Counter::new(&sieve)?.sift(*n, params)?)]
        }
        Command::Series { n, truncation } => {
            let c = singular_series(*n, *truncation)?;
            let divisors: Vec<String> = c.odd_prime_divisors.iter().map(u64::to_string).collect();
            vec![Record::new()
                .field("N", c.n)
                .float("value", c.value)
                .float("twin_constant", c.twin_constant)
                .field("truncation", c.truncation_prime)
                .bound("tail_bound", c.tail_bound)
                .field("odd_prime_divisors", Value::Str(divisors.join(" ")))]
        }
        Command::Scan {
            n,
            from,
            to,
            step,
            r,
            param,
            include_unit,
        } => {
            let ns: Vec<u64> = match (from, to) {
                (Some(a), Some(b)) => {
                    if *step == 0 {
                        return Err(Error::Domain("--step must be positive".into()));
                    }
                    (*a..=*b).step_by(*step as usize).collect()
                }
                _ => n.clone(),
            };
            let template = CountQuery {
                include_unit: *include_unit,
                ..CountQuery::new(0, *r, param.count_mode())
            };
            let sieve = PrimeSieve::new(ns.iter().copied().max().unwrap_or(2).max(2))?;
            let counter = Counter::new(&sieve)?.with_quadrature(cfg);
            let mut records = Vec::with_capacity(ns.len());
            let mut failed = false;
            for (n, res) in ns.iter().zip(counter.scan(&ns, &template)) {
                match res {
                    Ok(rep) => records.push(report::count_record(&rep)),
                    Err(e) => {
                        eprintln!("sievekit: N = {n}: {e}");
                        failed = true;
                    }
                }
            }
            emit(&records, &spec)?;
            return Ok(if failed { EXIT_ERROR } else { EXIT_OK });
        }
        Command::Verify => {
            let opts = VerifyOptions {
                quick: cli.quick,
                quadrature: cfg,
                gamma,
            };
            let report = run_verify(&opts)?;
            emit(&report.records(), &spec)?;
            return Ok(if report.overall { EXIT_OK } else { EXIT_VERIFY_FAILED });
        }
    };
    emit(&records, &spec)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "sievekit", "count", "--n", "10", "--r", "2", "--format", "csv", "--precision", "4",
        ])
        .unwrap();
        assert_eq!(cli.format, FormatArg::Csv);
        assert_eq!(cli.precision, 4);
        assert!(matches!(cli.command, Command::Count { n: 10, r: 2, .. }));
    }

    #[test]
    fn theta_and_kappa_are_exclusive() {
        assert!(Cli::try_parse_from(["sievekit", "delta", "--theta", "0.9", "--kappa", "0.95"]).is_err());
        let cli = Cli::try_parse_from(["sievekit", "delta"]).unwrap();
        assert!(matches!(run(&cli), Err(Error::Domain(_))));
    }

    #[test]
    fn function_names_are_case_sensitive() {
        let up = Cli::try_parse_from(["sievekit", "eval", "F", "--s", "2"]).unwrap();
        let low = Cli::try_parse_from(["sievekit", "eval", "f", "--s", "2"]).unwrap();
        assert!(matches!(up.command, Command::Eval { function: FunctionArg::Upper, .. }));
        assert!(matches!(low.command, Command::Eval { function: FunctionArg::Lower, .. }));
    }

    #[test]
    fn non_default_lambda_needs_exploratory() {
        let cli = Cli::try_parse_from(["sievekit", "delta", "--theta", "0.9", "--lambda", "10"]).unwrap();
        assert!(matches!(run(&cli), Err(Error::Domain(_))));
    }
}
