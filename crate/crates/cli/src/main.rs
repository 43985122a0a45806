use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mprofile::{default_exclusion, Budget, DiagonalOrder, Precision, RunConfig, TieRule};
use mprofile_cli::commands::{
    self, BenchArgs, BenchSource, ComputeArgs, DemoKind, PlanArgs, VerifyArgs,
};
use mprofile_cli::input::SeriesFile;
use mprofile_cli::Result;

/// Exact, anytime, parallel matrix profiles for motif and discord discovery.
#[derive(Debug, Parser)]
#[command(name = "mprofile", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the matrix profile of a series and write it as CSV.
    Compute(ComputeCmd),
    /// Check the engine against the brute-force oracle on seeded series.
    Verify(VerifyCmd),
    /// Time the engine across worker counts and window lengths.
    Bench(BenchCmd),
    /// Size a worker count against memory bandwidth.
    Plan(PlanCmd),
    /// Write a synthetic series with a planted anomaly.
    Demo(DemoCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Random,
    Sequential,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Single,
    Double,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Single => Precision::Single,
            PrecisionArg::Double => Precision::Double,
        }
    }
}

fn order(arg: OrderArg, seed: u64) -> DiagonalOrder {
    match arg {
        OrderArg::Random => DiagonalOrder::Random { seed },
        OrderArg::Sequential => DiagonalOrder::Sequential,
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieRuleArg {
    LowestIndex,
    FirstSeen,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemoArg {
    Sine,
    Ecg,
}

#[derive(Debug, Args)]
struct ComputeCmd {
    /// Input series: one value per line, or CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// CSV column, by 0-based index or header name.
    #[arg(short, long)]
    column: Option<String>,
    /// Window length.
    #[arg(short)]
    m: usize,
    /// Exclusion zone half-width [default: m/4].
    #[arg(long)]
    exclusion: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value_t = OrderArg::Random)]
    order: OrderArg,
    /// Shuffle seed for random ordering.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
    /// Stop after this many diagonals.
    #[arg(long, conflicts_with = "budget_ms")]
    budget_diagonals: Option<usize>,
    /// Stop after this many milliseconds.
    #[arg(long)]
    budget_ms: Option<u64>,
    #[arg(long, default_value_t = 8)]
    batch_width: usize,
    /// Profile CSV [default: <input stem>.profile.csv].
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write an SVG of series and profile.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyCmd {
    /// Largest series length in the grid.
    #[arg(long, default_value_t = 1024)]
    max_n: usize,
    /// Seeded series per grid point.
    #[arg(long, default_value_t = 2)]
    seeds: u64,
    #[arg(long, value_enum, default_value_t = TieRuleArg::LowestIndex, hide = true)]
    tie_rule: TieRuleArg,
}

#[derive(Debug, Args)]
struct BenchCmd {
    /// Benchmark on a series file instead of a synthetic random walk.
    #[arg(short, long, conflicts_with = "n")]
    input: Option<PathBuf>,
    #[arg(short, long, requires = "input")]
    column: Option<String>,
    /// Synthetic series length.
    #[arg(short, long, default_value_t = 131_072)]
    n: usize,
    #[arg(short, default_value_t = 1024)]
    m: usize,
    /// Largest worker count [default: available cores].
    #[arg(long)]
    max_workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Window lengths to sweep at the largest worker count.
    #[arg(long, value_delimiter = ',')]
    m_sweep: Vec<usize>,
}

#[derive(Debug, Args)]
struct PlanCmd {
    /// Available memory bandwidth in GB/s.
    #[arg(long)]
    bandwidth: f64,
    /// Bandwidth one worker consumes in GB/s.
    #[arg(long)]
    per_worker: f64,
    /// Worker count to classify.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,
}

#[derive(Debug, Args)]
struct DemoCmd {
    #[arg(long, value_enum, default_value_t = DemoArg::Sine)]
    kind: DemoArg,
    #[arg(short, long)]
    output: PathBuf,
    /// Series length [default: 500 for sine, 4000 for ecg].
    #[arg(short, long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Compute(c) => {
            let mut config = RunConfig::new(c.m)
                .exclusion(c.exclusion.unwrap_or_else(|| default_exclusion(c.m)))
                .workers(c.workers)
                .order(order(c.order, c.seed))
                .precision(c.precision.into())
                .batch_width(c.batch_width);
            if let Some(b) = c.budget_diagonals {
                config = config.budget(Budget::Diagonals(b));
            }
            if let Some(ms) = c.budget_ms {
                config = config.budget(Budget::WallClock(Duration::from_millis(ms)));
            }
            let args = ComputeArgs {
                input: SeriesFile::new(c.input, c.column.as_deref()),
                config,
                output: c.output,
                plot: c.plot,
            };
            commands::compute(&args, out).map(drop)
        }
        Command::Verify(v) => {
            let args = VerifyArgs {
                max_n: v.max_n,
                seeds: v.seeds,
                tie_rule: match v.tie_rule {
                    TieRuleArg::LowestIndex => TieRule::LowestIndex,
                    TieRuleArg::FirstSeen => TieRule::FirstSeen,
                },
            };
            commands::verify(&args, out)
        }
        Command::Bench(b) => {
            let source = match b.input {
                Some(path) => BenchSource::File(SeriesFile::new(path, b.column.as_deref())),
                None => BenchSource::Synthetic {
                    n: b.n,
                    seed: b.seed,
                },
            };
            let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
            let args = BenchArgs {
                source,
                m: b.m,
                max_workers: b.max_workers.unwrap_or(cores),
                precision: b.precision.into(),
                order: DiagonalOrder::Random { seed: b.seed },
                m_sweep: b.m_sweep,
            };
            commands::bench(&args, out).map(drop)
        }
        Command::Plan(p) => commands::plan(
            &PlanArgs {
                bandwidth: p.bandwidth,
                per_worker: p.per_worker,
                workers: p.workers,
                precision: p.precision.into(),
            },
            out,
        ),
        Command::Demo(d) => {
            let kind = match d.kind {
                DemoArg::Sine => DemoKind::Sine,
                DemoArg::Ecg => DemoKind::Ecg,
            };
            commands::demo(kind, d.n, d.seed, &d.output, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli.command, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
