//! Subcommand bodies. Each writes its report to `out` and returns an error
//! carrying the exit status on failure.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mprofile::oracle::{brute_force_profile, pair_distance, Tolerance, ORACLE_MAX_WINDOWS};
use mprofile::{
    balanced_workers, run, schedule_diagonals, synthetic, DiagonalOrder, Precision, RunConfig,
    RunResult, TieRule, TimeSeries, NONE,
};

use crate::error::{CliError, Result};
use crate::input::SeriesFile;
use crate::output::write_profile;
use crate::plot::render_svg;

fn emit(out: &mut dyn Write, text: std::fmt::Arguments) -> Result<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|source| CliError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        emit($out, format_args!($($arg)*))
    };
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn order_name(order: DiagonalOrder) -> String {
    match order {
        DiagonalOrder::Random { seed } => format!("random(seed={seed})"),
        DiagonalOrder::Sequential => "sequential".into(),
    }
}

pub fn precision_name(precision: Precision) -> &'static str {
    match precision {
        Precision::Single => "single",
        Precision::Double => "double",
    }
}

/// `<dir>/<stem>.profile.csv` next to the input.
pub fn default_output(input: &Path) -> PathBuf {
    let stem = input
        .file_stem()
        .map_or_else(|| "series".into(), |s| s.to_string_lossy());
    input.with_file_name(format!("{stem}.profile.csv"))
}

#[derive(Debug, Clone)]
pub struct ComputeArgs {
    pub input: SeriesFile,
    pub config: RunConfig,
    pub output: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub fn compute(args: &ComputeArgs, out: &mut dyn Write) -> Result<RunResult> {
    let series = args.input.read()?;
    let result = run(&series, &args.config)?;
    let output = args
        .output
        .clone()
        .unwrap_or_else(|| default_output(&args.input.path));
    write_profile(&output, &result.profile, result.precision)?;
    if let Some(plot) = &args.plot {
        write_file(
            plot,
            &render_svg(series.values(), &result.profile.distances, args.config.m),
        )?;
    }

    let cfg = &args.config;
    say!(out, "n={}", series.len())?;
    say!(out, "m={}", cfg.m)?;
    say!(out, "exclusion={}", cfg.exclusion)?;
    say!(out, "workers={}", cfg.workers)?;
    say!(out, "ordering={}", order_name(cfg.order))?;
    say!(out, "precision={}", precision_name(result.precision))?;
    say!(out, "elapsed_s={:.6}", result.elapsed.as_secs_f64())?;
    say!(
        out,
        "diagonals={}/{}",
        result.diagonals_completed,
        result.total_diagonals
    )?;
    say!(out, "completed={}", result.completed)?;
    match (result.profile.argmin(), result.profile.argmax()) {
        (Some((lo, dlo)), Some((hi, dhi))) => {
            say!(out, "min_P={dlo}")?;
            say!(out, "argmin={lo}")?;
            say!(out, "max_P={dhi}")?;
            say!(out, "argmax={hi}")?;
        }
        _ => {
            say!(out, "min_P=")?;
            say!(out, "argmin=")?;
            say!(out, "max_P=")?;
            say!(out, "argmax=")?;
        }
    }
    say!(out, "profile={}", output.display())?;
    if let Some(plot) = &args.plot {
        say!(out, "plot={}", plot.display())?;
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct VerifyArgs {
    pub max_n: usize,
    pub seeds: u64,
    /// Only changed by the harness self-test.
    pub tie_rule: TieRule,
}

impl Default for VerifyArgs {
    fn default() -> Self {
        Self {
            max_n: 1024,
            seeds: 2,
            tie_rule: TieRule::LowestIndex,
        }
    }
}

const VERIFY_NS: [usize; 4] = [13, 64, 256, 1024];
const VERIFY_MS: [usize; 3] = [4, 8, 16];
const VERIFY_WORKERS: [usize; 3] = [1, 2, 4];

/// Uniform noise; on longer series one constant plateau of length `2m` is
/// laid in so its flat windows tie at distance zero with many neighbors.
/// A second plateau would make the edge windows `[x, c, c, c]` of both
/// normalize to the same shape, a true distance of zero that the dot-product
/// formulation only reaches to about 1e-7.
fn verify_series(n: usize, m: usize, seed: u64) -> Vec<f64> {
    let mut t = synthetic::uniform_noise(n, seed);
    if n >= 8 * m {
        t[n / 3..n / 3 + 2 * m].fill(0.25);
    }
    t
}

struct Mismatch {
    seed: u64,
    n: usize,
    m: usize,
    i: usize,
    detail: String,
}

pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<()> {
    let oracle_limit = ORACLE_MAX_WINDOWS;
    if args.max_n < VERIFY_NS[0] || args.max_n > oracle_limit {
        return Err(CliError::Params(format!(
            "--max-n must be in {}..={oracle_limit}, got {}",
            VERIFY_NS[0], args.max_n
        )));
    }
    if args.seeds == 0 {
        return Err(CliError::Params("--seeds must be at least 1".into()));
    }

    let s = schedule_diagonals(13, 4, 1, 2, DiagonalOrder::Sequential)?;
    say!(
        out,
        "schedule n=13 m=4 exclusion=1 workers=2: {} diagonals, target {} cells per pair",
        s.total_diagonals(),
        s.target()
    )?;
    for w in 0..s.workers() {
        say!(
            out,
            "  worker {w}: pairs {:?} -> {:?}",
            s.pairs(w),
            s.assignment(w)
        )?;
    }
    say!(out, "")?;
    say!(
        out,
        "{:>5} {:>3} {:>6} {:>5} {:>10}  result",
        "n",
        "m",
        "prec",
        "runs",
        "max_rel"
    )?;

    let mut first: Option<Mismatch> = None;
    let mut failed_rows = 0;
    for &n in VERIFY_NS.iter().filter(|&&n| n <= args.max_n) {
        for &m in VERIFY_MS.iter().filter(|&&m| m + 2 < n) {
            let exclusion = mprofile::default_exclusion(m);
            let oracles: Vec<_> = (0..args.seeds)
                .map(|seed| {
                    let s = TimeSeries::new(verify_series(n, m, seed))?;
                    let p = brute_force_profile(&s, m, exclusion)?;
                    Ok((s, p))
                })
                .collect::<Result<_>>()?;
            for precision in [Precision::Double, Precision::Single] {
                let (mut runs, mut max_rel, mut bad) = (0, 0.0f64, false);
                for (seed, (series, oracle)) in (0..).zip(&oracles) {
                    let tol = Tolerance::new(series, m, precision)?;
                    for workers in VERIFY_WORKERS {
                        for order in [DiagonalOrder::Random { seed }, DiagonalOrder::Sequential] {
                            let cfg = RunConfig::new(m)
                                .exclusion(exclusion)
                                .workers(workers)
                                .order(order)
                                .precision(precision)
                                .tie_rule(args.tie_rule);
                            let r = run(series, &cfg)?;
                            runs += 1;
                            for i in 0..oracle.len() {
                                let (got, want) = (r.profile.distances[i], oracle.distances[i]);
                                let err = (got - want).abs();
                                let scale = got.abs().max(want.abs());
                                if scale > 0.0 {
                                    max_rel = max_rel.max(err / scale);
                                }
                                let (gi, wi) = (r.profile.indices[i], oracle.indices[i]);
                                let ok = if gi == wi {
                                    tol.close(got, want, i, wi)
                                } else if gi == NONE || wi == NONE {
                                    false
                                } else {
                                    let alt = pair_distance(series, m, i, gi)?;
                                    tol.near_tie(i, gi, alt, wi, want) && tol.close(got, alt, i, gi)
                                };
                                if ok {
                                    continue;
                                }
                                bad = true;
                                if first.is_none() {
                                    first = Some(Mismatch {
                                        seed,
                                        n,
                                        m,
                                        i,
                                        detail: format!(
                                            "{} workers={workers} {}: P={got} I={gi}, oracle P={want} I={wi}",
                                            precision_name(precision),
                                            order_name(order)
                                        ),
                                    });
                                }
                                break;
                            }
                        }
                    }
                }
                failed_rows += bad as usize;
                say!(
                    out,
                    "{n:>5} {m:>3} {:>6} {runs:>5} {max_rel:>10.2e}  {}",
                    precision_name(precision),
                    if bad { "FAIL" } else { "pass" }
                )?;
            }
        }
    }

    match first {
        None => {
            say!(out, "verify: all rows pass")?;
            Ok(())
        }
        Some(f) => {
            say!(out, "verify: {failed_rows} rows failed")?;
            let msg = format!(
                "seed={} n={} m={} i={} ({})",
                f.seed, f.n, f.m, f.i, f.detail
            );
            say!(out, "first mismatch: {msg}")?;
            Err(CliError::Mismatch(msg))
        }
    }
}

#[derive(Debug, Clone)]
pub enum BenchSource {
    File(SeriesFile),
    /// Seeded random walk of the given length.
    Synthetic {
        n: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub source: BenchSource,
    pub m: usize,
    pub max_workers: usize,
    pub precision: Precision,
    pub order: DiagonalOrder,
    pub m_sweep: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub workers: usize,
    pub seconds: f64,
    pub cells: u64,
}

/// 1, 2, 4, ... up to `max`, with `max` itself appended if it is not a power of two.
pub fn worker_ladder(max: usize) -> Vec<usize> {
    let mut ladder: Vec<usize> = std::iter::successors(Some(1usize), |w| w.checked_mul(2))
        .take_while(|&w| w <= max)
        .collect();
    if ladder.last() != Some(&max) && max > 0 {
        ladder.push(max);
    }
    ladder
}

pub fn bench(args: &BenchArgs, out: &mut dyn Write) -> Result<Vec<BenchRow>> {
    if args.max_workers == 0 {
        return Err(CliError::Params("--max-workers must be at least 1".into()));
    }
    let series = match &args.source {
        BenchSource::File(f) => f.read()?,
        BenchSource::Synthetic { n, seed } => TimeSeries::new(synthetic::random_walk(*n, *seed))?,
    };
    let base = |m: usize, workers: usize| {
        RunConfig::new(m)
            .workers(workers)
            .precision(args.precision)
            .order(args.order)
    };
    let timed = |cfg: &RunConfig| -> Result<BenchRow> {
        let start = Instant::now();
        let r = run(&series, cfg)?;
        Ok(BenchRow {
            m: cfg.m,
            workers: cfg.workers,
            seconds: start.elapsed().as_secs_f64(),
            cells: r.cells_evaluated,
        })
    };

    let cores = std::thread::available_parallelism().map_or(1, |c| c.get());
    say!(
        out,
        "bench n={} m={} precision={} ordering={} cores={cores}",
        series.len(),
        args.m,
        precision_name(args.precision),
        order_name(args.order)
    )?;
    say!(
        out,
        "{:>7} {:>10} {:>8} {:>12} {:>14}",
        "workers",
        "wall_s",
        "speedup",
        "cells",
        "cells_per_s"
    )?;
    let mut rows = Vec::new();
    for workers in worker_ladder(args.max_workers) {
        let row = timed(&base(args.m, workers))?;
        let speedup = rows
            .first()
            .map_or(1.0, |r: &BenchRow| r.seconds / row.seconds);
        say!(
            out,
            "{workers:>7} {:>10.4} {speedup:>8.2} {:>12} {:>14.4e}",
            row.seconds,
            row.cells,
            row.cells as f64 / row.seconds
        )?;
        rows.push(row);
    }

    if !args.m_sweep.is_empty() {
        say!(out, "")?;
        say!(out, "m sweep at workers={}", args.max_workers)?;
        say!(
            out,
            "{:>7} {:>10} {:>12} {:>14}",
            "m",
            "wall_s",
            "cells",
            "cells_per_s"
        )?;
        let mut sweep: Vec<BenchRow> = Vec::new();
        for &m in &args.m_sweep {
            let row = timed(&base(m, args.max_workers))?;
            say!(
                out,
                "{m:>7} {:>10.4} {:>12} {:>14.4e}",
                row.seconds,
                row.cells,
                row.cells as f64 / row.seconds
            )?;
            sweep.push(row);
        }
        let decreasing = sweep.windows(2).all(|w| w[1].seconds < w[0].seconds);
        say!(out, "wall time decreasing with m: {decreasing}")?;
        rows.extend(sweep);
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct PlanArgs {
    pub bandwidth: f64,
    pub per_worker: f64,
    pub workers: Option<usize>,
    pub precision: Precision,
}

pub fn plan(args: &PlanArgs, out: &mut dyn Write) -> Result<()> {
    let mut report =
        balanced_workers(args.bandwidth, args.per_worker)?.with_precision(args.precision);
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CliError::Params("--workers must be at least 1".into()));
        }
        report = report.for_workers(w);
    }
    say!(out, "{}", report.key_values())?;
    say!(out, "")?;
    say!(out, "{}", report.describe())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoKind {
    /// 500-sample sine (period 50) flattened over samples 250..=270.
    Sine,
    /// Heartbeat-like trace with one malformed beat.
    Ecg,
}

/// Writes a synthetic series, one value per line, and reports the suggested
/// window length and where the anomaly was planted.
pub fn demo(
    kind: DemoKind,
    n: Option<usize>,
    seed: u64,
    path: &Path,
    out: &mut dyn Write,
) -> Result<()> {
    let (values, m, anomaly) = match kind {
        DemoKind::Sine => {
            let n = n.unwrap_or(500);
            let (a, b) = (n / 2, n / 2 + 20);
            (synthetic::sine_with_flat_segment(n, 50.0, a, b), 32, a)
        }
        DemoKind::Ecg => {
            let n = n.unwrap_or(4000);
            let beat = 100;
            let at = (n * 3 / 5) / beat * beat;
            (synthetic::ecg_like(n, beat, Some(at), seed), beat, at)
        }
    };
    if values.len() < 2 * m {
        return Err(CliError::Params(format!("demo needs n >= {}", 2 * m)));
    }
    let mut text = String::with_capacity(values.len() * 22);
    for v in &values {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    write_file(path, &text)?;
    say!(out, "wrote {} samples to {}", values.len(), path.display())?;
    say!(out, "suggested m={m}; anomaly planted at sample {anomaly}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder() {
        assert_eq!(worker_ladder(1), vec![1]);
        assert_eq!(worker_ladder(4), vec![1, 2, 4]);
        assert_eq!(worker_ladder(6), vec![1, 2, 4, 6]);
    }

    #[test]
    fn default_output_sits_next_to_input() {
        assert_eq!(
            default_output(Path::new("/d/ecg.txt")),
            Path::new("/d/ecg.profile.csv")
        );
        assert_eq!(default_output(Path::new("x")), Path::new("x.profile.csv"));
    }

    #[test]
    fn verify_series_has_flat_ties() {
        let t = verify_series(256, 8, 1);
        let flat = t
            .windows(8)
            .filter(|w| w.iter().all(|v| *v == w[0]))
            .count();
        assert_eq!(flat, 9);
        assert_eq!(verify_series(13, 4, 1), synthetic::uniform_noise(13, 1));
    }

    #[test]
    fn small_verify_passes_and_corrupted_rule_fails() {
        let mut sink = Vec::new();
        let args = VerifyArgs {
            max_n: 64,
            seeds: 1,
            ..VerifyArgs::default()
        };
        verify(&args, &mut sink).unwrap();
        let text = String::from_utf8(sink).unwrap();
        assert!(
            text.contains("worker 0: pairs [Pair(2, 9), Pair(4, 7)]"),
            "{text}"
        );

        let bad = VerifyArgs {
            tie_rule: TieRule::FirstSeen,
            ..args
        };
        let err = verify(&bad, &mut Vec::new()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
