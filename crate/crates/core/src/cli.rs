//! Command-line front end. Every subcommand writes one JSON document or one
//! CSV table, to stdout or to `--out`.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 invalid flags or inputs,
//! 3 when `verify` finds a violated bound.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{rate_table, slopes, write_rate_csv};
use crate::dist::{AuctionSetting, Distribution, TieRule};
use crate::error::{Error, Result};
use crate::oracle::{verify_maxmin, OracleConfig};
use crate::simulate::revenue_report;
use crate::solution::{maxmin, threat_curve};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "ROBUST_RESERVE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "robust-reserve",
    version,
    about = "Maxmin reserve prices for second-price auctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maxmin price set, revenue and worst-case distribution.
    Maxmin {
        #[command(flatten)]
        setting: SettingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Worst-case distribution at the maxmin price.
    WorstCase {
        #[command(flatten)]
        setting: SettingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Threat revenue against the reserve price.
    ThreatCurve {
        #[command(flatten)]
        setting: SettingArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Number of evenly spaced reserves.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Largest reserve; defaults to 1.5 times the mean.
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Check the maxmin price against a brute-force adversary.
    Verify {
        #[command(flatten)]
        setting: SettingArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Number of reserves on `[0, 1.5 m]`.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Points on the adversary's value grid.
        #[arg(long, default_value_t = 400)]
        value_grid: usize,
    },
    /// Revenue gaps to the mean for n = 2..n-max.
    Asymptotics {
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        vmax: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 1000)]
        n_max: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Revenue of a distribution by quadrature and Monte Carlo.
    Simulate {
        #[command(flatten)]
        setting: SettingArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Reserve price; defaults to the seller's cost.
        #[arg(long)]
        reserve: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Tie::NoSaleAtReserve)]
        tie: Tie,
        /// Distribution JSON file; defaults to the worst case.
        #[arg(long)]
        dist: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SettingKind {
    Bounded,
    Variance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Tie {
    NoSaleAtReserve,
    SaleAtReserve,
}

impl From<Tie> for TieRule {
    fn from(t: Tie) -> Self {
        match t {
            Tie::NoSaleAtReserve => TieRule::NoSaleAtReserve,
            Tie::SaleAtReserve => TieRule::SaleAtReserve,
        }
    }
}

#[derive(Debug, Args)]
struct SettingArgs {
    #[arg(long, value_enum)]
    setting: SettingKind,
    #[arg(long)]
    mean: f64,
    /// Upper bound on values (bounded setting).
    #[arg(long)]
    vmax: Option<f64>,
    /// Standard deviation bound (variance setting).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    cost: f64,
    #[arg(long)]
    bidders: u32,
}

impl SettingArgs {
    fn build(&self) -> Result<AuctionSetting> {
        let usage = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        match (self.setting, self.vmax, self.sigma) {
            (SettingKind::Bounded, Some(vmax), None) => {
                AuctionSetting::bounded(self.bidders, self.cost, self.mean, vmax)
            }
            (SettingKind::Bounded, None, _) => usage("--setting bounded requires --vmax"),
            (SettingKind::Bounded, Some(_), Some(_)) => usage("--sigma does not apply to --setting bounded"),
            (SettingKind::Variance, None, Some(sigma)) => {
                AuctionSetting::variance(self.bidders, self.cost, self.mean, sigma)
            }
            (SettingKind::Variance, _, None) => usage("--setting variance requires --sigma"),
            (SettingKind::Variance, Some(_), Some(_)) => usage("--vmax does not apply to --setting variance"),
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OutputArgs {
    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidArgument(
                format!("--format {f:?} is not available here").to_lowercase(),
            ))
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    Ok(buf)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Serialization(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Serialization(e.to_string()))
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSetting(_)
        | Error::InvalidDistribution(_)
        | Error::InvalidArgument(_)
        | Error::RhoOutOfRange { .. }
        | Error::InfeasibleConfig(_)
        | Error::WrongConstraint(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Output bytes, destination and whether a checked bound failed.
struct Rendered {
    bytes: Vec<u8>,
    out: Option<PathBuf>,
    violated: bool,
}

fn execute(command: Command) -> Result<Rendered> {
    let done = |bytes, output: &OutputArgs| Rendered {
        bytes,
        out: output.out.clone(),
        violated: false,
    };
    match command {
        Command::Maxmin { setting, output } => {
            output.format(Format::Json, &[Format::Json])?;
            let bytes = json(&maxmin(&setting.build()?)?)?;
            Ok(done(bytes, &output))
        }
        Command::WorstCase { setting, output } => {
            output.format(Format::Json, &[Format::Json])?;
            let bytes = json(&maxmin(&setting.build()?)?.worst_case)?;
            Ok(done(bytes, &output))
        }
        Command::ThreatCurve {
            setting,
            output,
            grid,
            r_max,
        } => {
            let format = output.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let s = setting.build()?;
            let curve = threat_curve(&s, r_max.unwrap_or(1.5 * s.mean()), grid)?;
            let bytes = match format {
                Format::Csv => csv_rows(&curve)?,
                Format::Json => json(&curve)?,
            };
            Ok(done(bytes, &output))
        }
        Command::Verify {
            setting,
            output,
            grid,
            value_grid,
        } => {
            let format = output.format(Format::Json, &[Format::Csv, Format::Json])?;
            let config = OracleConfig {
                value_grid_size: value_grid,
                seed: output.seed,
                ..OracleConfig::default()
            };
            let report = verify_maxmin(&setting.build()?, grid, &config)?;
            let bytes = match format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    buf
                }
            };
            Ok(Rendered {
                violated: !report.passed(),
                ..done(bytes, &output)
            })
        }
        Command::Asymptotics {
            mean,
            vmax,
            sigma,
            n_max,
            output,
        } => {
            let format = output.format(Format::Csv, &[Format::Csv, Format::Json])?;
            let rows = rate_table(mean, vmax, sigma, n_max)?;
            let bytes = match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_rate_csv(&rows, &mut buf)?;
                    buf
                }
                Format::Json => {
                    #[derive(Serialize)]
                    struct Table<'a> {
                        rows: &'a [crate::asymptotics::RateTableRow],
                        slopes: crate::asymptotics::RateSlopes,
                    }
                    json(&Table {
                        rows: &rows,
                        slopes: slopes(&rows),
                    })?
                }
            };
            Ok(done(bytes, &output))
        }
        Command::Simulate {
            setting,
            output,
            reserve,
            samples,
            tie,
            dist,
        } => {
            output.format(Format::Json, &[Format::Json])?;
            let s = setting.build()?;
            let r = reserve.unwrap_or(s.cost());
            let (dist, analytic) = match dist {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
                    (Distribution::from_json(&text)?, None)
                }
                None => {
                    let sol = maxmin(&s)?;
                    let analytic = (r == s.cost()).then_some(sol.maxmin_revenue);
                    (sol.worst_case, analytic)
                }
            };
            let report = revenue_report(&dist, r, &s, tie.into(), samples, output.seed, analytic)?;
            Ok(done(json(&report)?, &output))
        }
    }
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let fail = |stderr: &mut dyn Write, e: &Error| {
        let _ = writeln!(stderr, "error: {e}");
        exit_code(e)
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => return fail(stderr, &e),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        pool = pool.num_threads(k);
    }
    let rendered = match pool.build() {
        Ok(pool) => pool.install(|| execute(cli.command)),
        Err(e) => Err(Error::Numerical(format!("cannot start worker threads: {e}"))),
    };
    let rendered = match rendered {
        Ok(r) => r,
        Err(e) => return fail(stderr, &e),
    };
    let written = match &rendered.out {
        Some(path) => std::fs::write(path, &rendered.bytes),
        None => stdout.write_all(&rendered.bytes),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_FAILURE;
    }
    if rendered.violated {
        let _ = writeln!(stderr, "verification found violated bounds");
        return EXIT_VIOLATION;
    }
    EXIT_OK
}
