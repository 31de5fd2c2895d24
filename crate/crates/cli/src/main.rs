use std::io::{self, BufWriter, Write};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use erlang_loss::properties::{ConvexityGrid, Sweep};
use erlang_loss::simulator::{ServiceDistribution, DEFAULT_ARRIVALS};
use erlang_loss::{
    erlang_b_int, erlang_b_real, min_servers, phi, run_sweep, scaled_partial_sum, simulate,
    solve_servers_real, solve_traffic, BlockingTarget, CheckReport, OfferedLoad, QuadratureConfig,
    SimConfig, SimReport, SolveOptions, SweepGrid,
};
use serde::Serialize;

mod number;

use number::format as num;

#[derive(Parser)]
#[command(name = "erlang", version, about = "Erlang loss function: evaluation, dimensioning, checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Blocking probability B(n, λ) for an integer or real number of servers.
    Blocking(BlockingArgs),
    /// Servers needed for a blocking target, or the load a group carries at a target.
    Inverse {
        #[command(subcommand)]
        mode: InverseMode,
    },
    /// Run the inequality checks over a grid; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Tabulate B, φ and the scaled partial sum over an index range and loads.
    Table(TableArgs),
    /// Monte Carlo estimate of the blocking probability.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Int,
    Real,
}

#[derive(Args)]
struct QuadArgs {
    /// Relative tolerance of the continuation quadrature.
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
}

impl QuadArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            rel_tol: self.rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct BlockingArgs {
    /// Number of servers; `2` takes the integer path, `2.0` the continuation.
    #[arg(allow_negative_numbers = true)]
    servers: String,
    #[arg(long)]
    load: f64,
    /// Force the evaluation path regardless of the argument's syntax.
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
}

#[derive(Subcommand)]
enum InverseMode {
    /// Smallest integer n with B(n, λ) ≤ target.
    Servers {
        #[arg(long)]
        load: f64,
        #[arg(long)]
        target: f64,
        /// Also print B at the solution minus the target.
        #[arg(long)]
        round_trip: bool,
    },
    /// Real x with B(x, λ) = target.
    ServersReal {
        #[arg(long)]
        load: f64,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 1e-9)]
        x_tol: f64,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long)]
        round_trip: bool,
    },
    /// Load λ at which n servers block with probability target.
    Traffic {
        #[arg(long)]
        servers: u64,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value_t = 1e-9)]
        x_tol: f64,
        #[arg(long)]
        round_trip: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    n_min: u64,
    #[arg(long, default_value_t = 100)]
    n_max: u64,
    /// Comma-separated loads; an empty string runs no checks.
    #[arg(long, default_value = "0.1,0.5,1,2,5,10,20,50,100")]
    loads: String,
    /// Largest m in the product and chord checks.
    #[arg(long, default_value_t = 30)]
    index_limit: u64,
    /// Step of the second differences in the convexity probes.
    #[arg(long, default_value_t = 0.01)]
    h: f64,
    /// Skip the real-argument convexity probes.
    #[arg(long)]
    no_convexity: bool,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Print only failures and the summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Inclusive index range `a..b`, or a single index.
    #[arg(long, default_value = "0..10")]
    n: String,
    #[arg(long, default_value = "1")]
    loads: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Service {
    Exponential,
    Deterministic,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    servers: u64,
    #[arg(long)]
    load: f64,
    #[arg(long, default_value_t = DEFAULT_ARRIVALS)]
    arrivals: u64,
    /// Generator seed, or `auto` to derive one from the clock (it is echoed in the output).
    #[arg(long)]
    seed: String,
    #[arg(long, value_enum, default_value_t = Service::Exponential)]
    service: Service,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match command {
        Command::Blocking(a) => blocking(&a, &mut out)?,
        Command::Inverse { mode } => inverse(&mode, &mut out)?,
        Command::Verify(a) => verify(&a, &mut out)?,
        Command::Table(a) => table(&a, &mut out)?,
        Command::Simulate(a) => sim(&a, &mut out)?,
    };
    out.flush()?;
    Ok(code)
}

fn load(v: f64) -> Result<OfferedLoad> {
    Ok(OfferedLoad::new(v)?)
}

fn parse_loads(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().with_context(|| format!("invalid load {t:?}")))
        .collect()
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .with_context(|| format!("invalid index {t:?} in range {s:?}"))
    };
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        bail!("empty range {s:?}");
    }
    Ok((a, b))
}

#[derive(Serialize)]
struct BlockingOut {
    servers: f64,
    lambda: f64,
    blocking: f64,
    method: &'static str,
}

fn blocking(a: &BlockingArgs, out: &mut impl Write) -> Result<ExitCode> {
    let text = a.servers.trim();
    let integer_syntax = !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit());
    let method = a.method.unwrap_or(if integer_syntax { Method::Int } else { Method::Real });
    let l = load(a.load)?;
    let (servers, b) = match method {
        Method::Int => {
            let n: u64 = if integer_syntax {
                text.parse().context("server count out of range")?
            } else {
                let x: f64 = text.parse().with_context(|| format!("invalid server count {text:?}"))?;
                if !(x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63)) {
                    bail!("--method int needs a nonnegative whole number, got {text}");
                }
                x as u64
            };
            (n as f64, erlang_b_int(n, l).value())
        }
        Method::Real => {
            let x: f64 = text.parse().with_context(|| format!("invalid server count {text:?}"))?;
            (x, erlang_b_real(x, l, &a.quad.config())?.value())
        }
    };
    let method = match method {
        Method::Int => "int",
        Method::Real => "real",
    };
    match a.format {
        Format::Plain => writeln!(out, "{}", num(b))?,
        Format::Csv => {
            writeln!(out, "servers,lambda,blocking,method")?;
            writeln!(out, "{},{},{},{method}", num(servers), num(a.load), num(b))?;
        }
        Format::Json => {
            let row = BlockingOut {
                servers,
                lambda: a.load,
                blocking: b,
                method,
            };
            writeln!(out, "{}", serde_json::to_string(&row)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn inverse(mode: &InverseMode, out: &mut impl Write) -> Result<ExitCode> {
    match *mode {
        InverseMode::Servers {
            load: lam,
            target,
            round_trip,
        } => {
            let l = load(lam)?;
            let n = min_servers(l, BlockingTarget::new(target)?)?;
            writeln!(out, "{n}")?;
            if round_trip {
                let residual = erlang_b_int(n, l).value() - target;
                writeln!(out, "residual {}", num(residual))?;
            }
        }
        InverseMode::ServersReal {
            load: lam,
            target,
            x_tol,
            ref quad,
            round_trip,
        } => {
            let l = load(lam)?;
            let opts = SolveOptions {
                x_tol,
                ..Default::default()
            };
            let cfg = quad.config();
            let x = solve_servers_real(l, BlockingTarget::new(target)?, &opts, &cfg)?;
            writeln!(out, "{}", num(x))?;
            if round_trip {
                let residual = erlang_b_real(x, l, &cfg)?.value() - target;
                writeln!(out, "residual {}", num(residual))?;
            }
        }
        InverseMode::Traffic {
            servers,
            target,
            x_tol,
            round_trip,
        } => {
            let opts = SolveOptions {
                x_tol,
                ..Default::default()
            };
            let l = solve_traffic(servers, BlockingTarget::new(target)?, &opts)?;
            writeln!(out, "{}", num(l.value()))?;
            if round_trip {
                let residual = erlang_b_int(servers, l).value() - target;
                writeln!(out, "residual {}", num(residual))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const REPORT_HEADER: [&str; 10] = [
    "name", "n", "m", "l", "r", "lambda", "lhs", "rhs", "margin", "passed",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn report_fields(r: &CheckReport) -> [String; 10] {
    [
        r.name.to_string(),
        opt(r.n),
        opt(r.m),
        opt(r.l),
        opt(r.r),
        num(r.lambda),
        num(r.lhs),
        num(r.rhs),
        num(r.margin),
        r.passed.to_string(),
    ]
}

fn plain_report(r: &CheckReport) -> String {
    let f = report_fields(r);
    let mut line = String::from(if r.passed { "PASS " } else { "FAIL " });
    line.push_str(&f[0]);
    for (key, value) in REPORT_HEADER.iter().zip(&f).skip(1).take(8) {
        if !value.is_empty() {
            line.push_str(&format!(" {key}={value}"));
        }
    }
    line
}

fn summary(sweep: &Sweep) -> String {
    let margin = sweep
        .min_relative_margin()
        .map_or_else(|| "none".to_string(), num);
    format!(
        "checks={} passed={} failed={} errors={} min_relative_margin={}",
        sweep.reports.len(),
        sweep.passed(),
        sweep.failed(),
        sweep.failures.len(),
        margin
    )
}

fn verify(a: &VerifyArgs, out: &mut impl Write) -> Result<ExitCode> {
    let loads = parse_loads(&a.loads)?
        .into_iter()
        .map(load)
        .collect::<Result<Vec<_>>>()?;
    let convexity = (!a.no_convexity).then(|| ConvexityGrid {
        h: a.h,
        quadrature: a.quad.config(),
        ..Default::default()
    });
    let grid = SweepGrid {
        n_range: a.n_min..=a.n_max,
        loads,
        index_limit: a.index_limit,
        convexity,
    };
    let sweep = run_sweep(&grid)?;

    let shown = sweep.reports.iter().filter(|r| !a.quiet || !r.passed);
    match a.format {
        Format::Plain => {
            for r in shown {
                writeln!(out, "{}", plain_report(r))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(REPORT_HEADER)?;
            for r in shown {
                w.write_record(report_fields(r))?;
            }
            w.flush()?;
        }
        Format::Json => {
            for r in shown {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    for f in &sweep.failures {
        eprintln!(
            "error: {} at lambda={} n={}: {}",
            f.name,
            num(f.lambda),
            opt(f.params.n),
            f.error
        );
    }
    let line = summary(&sweep);
    if a.format == Format::Plain {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(if sweep.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

#[derive(Serialize)]
struct TableRow {
    n: u64,
    lambda: f64,
    blocking: f64,
    phi: f64,
    scaled_sum: f64,
}

fn table(a: &TableArgs, out: &mut impl Write) -> Result<ExitCode> {
    let (lo, hi) = parse_range(&a.n)?;
    let loads = parse_loads(&a.loads)?;
    let mut rows = Vec::new();
    for &lam in &loads {
        let l = load(lam)?;
        for n in lo..=hi {
            rows.push(TableRow {
                n,
                lambda: lam,
                blocking: erlang_b_int(n, l).value(),
                phi: phi(n as i64, l)?.value(),
                scaled_sum: scaled_partial_sum(n, l).value(),
            });
        }
    }
    match a.format {
        Format::Csv | Format::Plain => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["n", "lambda", "blocking", "phi", "scaled_sum"])?;
            for r in &rows {
                w.write_record([
                    r.n.to_string(),
                    num(r.lambda),
                    num(r.blocking),
                    num(r.phi),
                    num(r.scaled_sum),
                ])?;
            }
            w.flush()?;
        }
        Format::Json => {
            for r in &rows {
                writeln!(out, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sim(a: &SimulateArgs, out: &mut impl Write) -> Result<ExitCode> {
    let seed = if a.seed == "auto" {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .context("system clock before 1970")?
            .as_nanos() as u64
    } else {
        a.seed
            .parse()
            .with_context(|| format!("--seed takes an integer or `auto`, got {:?}", a.seed))?
    };
    let service = match a.service {
        Service::Exponential => ServiceDistribution::Exponential,
        Service::Deterministic => ServiceDistribution::Deterministic,
    };
    let cfg = SimConfig::new(a.servers, load(a.load)?, seed)
        .with_arrivals(a.arrivals)
        .with_service(service);
    let result = simulate(&cfg)?;
    writeln!(out, "{}", serde_json::to_string(&SimReport::new(&cfg, &result))?)?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use erlang_loss::properties::DEFAULT_LOADS;

    #[test]
    fn verify_defaults_match_the_library() {
        let cli = Cli::parse_from(["erlang", "verify"]);
        let Command::Verify(a) = cli.command else {
            unreachable!()
        };
        assert_eq!(parse_loads(&a.loads).unwrap(), DEFAULT_LOADS);
        let grid = SweepGrid::default();
        assert_eq!(a.n_min..=a.n_max, grid.n_range);
        assert_eq!(a.index_limit, grid.index_limit);
        assert_eq!(a.h, ConvexityGrid::default().h);
        assert_eq!(a.quad.config(), QuadratureConfig::default());
    }

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("0..100").unwrap(), (0, 100));
        assert_eq!(parse_range("3..=4").unwrap(), (3, 4));
        assert_eq!(parse_range("7").unwrap(), (7, 7));
        assert!(parse_range("5..2").is_err());
        assert!(parse_loads("").unwrap().is_empty());
        assert_eq!(parse_loads("0.1, 1,10").unwrap(), [0.1, 1.0, 10.0]);
        assert!(parse_loads("1,x").is_err());
    }
}
