//! Parallel diagonal traversal with worker-private profiles.
//!
//! A run computes window statistics, gives every worker its own full-length
//! profile, builds the diagonal schedule, lets each worker walk its
//! diagonals with the batched recurrence, then min-reduces the private
//! profiles. Workers share nothing mutable except a progress counter.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use crate::config::{Budget, Precision, RunConfig};
use crate::error::{Error, Result};
use crate::kernel::{add_term, dot_unchecked, DistanceParams};
use crate::profile::{Profile, TieRule};
use crate::real::Real;
use crate::scheduler::{schedule_diagonals, DiagonalSchedule};
use crate::series::{precompute_stats, TimeSeries, WindowStats};

/// Callback invoked after every finished diagonal with `(completed, total)`.
/// It may be called from any worker thread.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T = f64> {
    pub profile: Profile<T>,
    /// Precision the kernels ran at; a single-precision profile is widened
    /// exactly when returned from [`run`].
    pub precision: Precision,
    pub diagonals_completed: usize,
    pub total_diagonals: usize,
    /// Distance-matrix cells evaluated, summed over workers.
    pub cells_evaluated: u64,
    pub elapsed: Duration,
    /// False when a budget stopped the run early.
    pub completed: bool,
}

/// Computes the matrix profile of `series` under `config`.
pub fn run(series: &TimeSeries, config: &RunConfig) -> Result<RunResult> {
    run_with_progress(series, config, None)
}

pub fn run_with_progress(
    series: &TimeSeries,
    config: &RunConfig,
    progress: Option<Progress<'_>>,
) -> Result<RunResult> {
    match config.precision {
        Precision::Double => run_typed::<f64>(series, config, progress),
        Precision::Single => {
            let r = run_typed::<f32>(series, config, progress)?;
            Ok(RunResult {
                profile: r.profile.convert(),
                precision: r.precision,
                diagonals_completed: r.diagonals_completed,
                total_diagonals: r.total_diagonals,
                cells_evaluated: r.cells_evaluated,
                elapsed: r.elapsed,
                completed: r.completed,
            })
        }
    }
}

/// [`run`] with the element type chosen by the caller. `config.precision`
/// is only recorded in the result.
pub fn run_typed<T: Real>(
    series: &TimeSeries,
    config: &RunConfig,
    progress: Option<Progress<'_>>,
) -> Result<RunResult<T>> {
    let start = Instant::now();
    let n = series.len();
    config.validate(n)?;

    let values = series.values_as::<T>();
    let stats = precompute_stats::<T>(series, config.m)?;
    let schedule = schedule_diagonals(n, config.m, config.exclusion, config.workers, config.order)?;
    let total = schedule.total_diagonals();

    let (quotas, deadline) = match config.budget {
        None => (schedule.quotas(total), None),
        Some(Budget::Diagonals(b)) => (schedule.quotas(b), None),
        Some(Budget::WallClock(d)) => (schedule.quotas(total), Some(start + d)),
    };

    let job = Job {
        values: &values,
        stats: &stats,
        schedule: &schedule,
        batch_width: config.batch_width,
        tie_rule: config.tie_rule,
        deadline,
        done: AtomicUsize::new(0),
        total,
        progress,
    };

    let outcomes: Vec<WorkerOutcome<T>> = if config.workers == 1 {
        vec![job.work(0, quotas[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = quotas
                .iter()
                .enumerate()
                .map(|(w, &quota)| {
                    let job = &job;
                    scope.spawn(move || job.work(w, quota))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };

    let diagonals_completed = outcomes.iter().map(|o| o.diagonals).sum();
    let cells_evaluated = outcomes.iter().map(|o| o.cells).sum();
    let profile = reduce(
        outcomes.into_iter().map(|o| o.profile).collect(),
        config.tie_rule,
    )?;
    Ok(RunResult {
        profile,
        precision: config.precision,
        diagonals_completed,
        total_diagonals: total,
        cells_evaluated,
        elapsed: start.elapsed(),
        completed: diagonals_completed == total,
    })
}

struct Job<'a, T> {
    values: &'a [T],
    stats: &'a WindowStats<T>,
    schedule: &'a DiagonalSchedule,
    batch_width: usize,
    tie_rule: TieRule,
    deadline: Option<Instant>,
    done: AtomicUsize,
    total: usize,
    progress: Option<Progress<'a>>,
}

struct WorkerOutcome<T> {
    profile: Profile<T>,
    diagonals: usize,
    cells: u64,
}

impl<T: Real> Job<'_, T> {
    fn work(&self, worker: usize, quota: usize) -> WorkerOutcome<T> {
        let mut profile = Profile::new(self.schedule.windows(), self.stats.m);
        let mut kernel =
            DiagonalKernel::new(self.values, self.stats, self.batch_width, self.tie_rule);
        let mut diagonals = 0;
        let mut cells = 0;
        for &offset in &self.schedule.assignment(worker)[..quota] {
            if self.deadline.is_some_and(|d| Instant::now() >= d) {
                break;
            }
            cells += kernel.run(offset, &mut profile) as u64;
            diagonals += 1;
            let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
            if let Some(report) = self.progress {
                report(done, self.total);
            }
        }
        WorkerOutcome {
            profile,
            diagonals,
            cells,
        }
    }
}

/// Evaluates every cell `(i, i + offset)` of one diagonal into `profile`.
///
/// The first cell takes a direct dot product. The rest go in batches of
/// `batch_width`: per-lane recurrence corrections, a sequential prefix fold
/// that carries the dot product through the batch, then per-lane distances
/// and profile updates. The fold order is the same for every batch width,
/// so results are bitwise independent of it. Returns the number of cells.
pub fn compute_diagonal<T: Real>(
    series: &[T],
    stats: &WindowStats<T>,
    offset: usize,
    profile: &mut Profile<T>,
    batch_width: usize,
    tie_rule: TieRule,
) -> usize {
    DiagonalKernel::new(series, stats, batch_width, tie_rule).run(offset, profile)
}

struct DiagonalKernel<'a, T> {
    t: &'a [T],
    stats: &'a WindowStats<T>,
    params: DistanceParams<T>,
    qs: Vec<T>,
    ds: Vec<T>,
    tie_rule: TieRule,
}

impl<'a, T: Real> DiagonalKernel<'a, T> {
    fn new(t: &'a [T], stats: &'a WindowStats<T>, batch_width: usize, tie_rule: TieRule) -> Self {
        assert!(batch_width > 0, "batch width must be positive");
        Self {
            t,
            stats,
            params: DistanceParams::new(stats.m),
            qs: vec![T::zero(); batch_width],
            ds: vec![T::zero(); batch_width],
            tie_rule,
        }
    }

    #[inline(always)]
    fn cell(&self, profile: &mut Profile<T>, i: usize, j: usize, q: T) {
        let s = self.stats;
        let d = self.params.eval(
            q,
            s.means[i],
            s.stddevs[i],
            s.flat[i],
            s.means[j],
            s.stddevs[j],
            s.flat[j],
        );
        profile.offer(i, d, j, self.tie_rule);
        profile.offer(j, d, i, self.tie_rule);
    }

    fn run(&mut self, offset: usize, profile: &mut Profile<T>) -> usize {
        let m = self.stats.m;
        let windows = self.stats.len();
        debug_assert!(offset > 0 && offset < windows);
        let len = windows - offset;

        let mut q = dot_unchecked(self.t, 0, offset, m);
        self.cell(profile, 0, offset, q);

        let mut i = 1;
        // constant widths let the compiler unroll and vectorize the lanes
        match self.qs.len() {
            8 => {
                while i + 8 <= len {
                    q = self.batch(profile, i, offset, 8, q);
                    i += 8;
                }
            }
            16 => {
                while i + 16 <= len {
                    q = self.batch(profile, i, offset, 16, q);
                    i += 16;
                }
            }
            _ => {}
        }
        while i < len {
            let width = self.qs.len().min(len - i);
            q = self.batch(profile, i, offset, width, q);
            i += width;
        }
        len
    }

    /// Cells `i..i + width` of the diagonal, given the dot product of cell
    /// `i - 1`. Returns the dot product of the last cell.
    #[inline(always)]
    fn batch(
        &mut self,
        profile: &mut Profile<T>,
        i: usize,
        offset: usize,
        width: usize,
        q: T,
    ) -> T {
        let m = self.stats.m;
        let (t, s) = (self.t, self.stats);
        let j = i + offset;
        let qs = &mut self.qs[..width];
        let ds = &mut self.ds[..width];

        let (out_i, out_j) = (&t[i - 1..i - 1 + width], &t[j - 1..j - 1 + width]);
        let (in_i, in_j) = (
            &t[i + m - 1..i + m - 1 + width],
            &t[j + m - 1..j + m - 1 + width],
        );
        for l in 0..width {
            qs[l] = add_term(out_i[l], out_j[l], in_i[l], in_j[l]);
        }

        // the only sequential step: carry the dot product through the batch
        qs[0] = qs[0] + q;
        for l in 1..width {
            qs[l] = qs[l] + qs[l - 1];
        }

        let (mu_i, mu_j) = (&s.means[i..i + width], &s.means[j..j + width]);
        let (sd_i, sd_j) = (&s.stddevs[i..i + width], &s.stddevs[j..j + width]);
        let (fl_i, fl_j) = (&s.flat[i..i + width], &s.flat[j..j + width]);
        for l in 0..width {
            ds[l] = self
                .params
                .eval(qs[l], mu_i[l], sd_i[l], fl_i[l], mu_j[l], sd_j[l], fl_j[l]);
        }

        if offset >= width {
            profile.offer_pair_runs(i, j, ds, self.tie_rule);
        } else {
            // the two runs overlap; keep the per-lane order
            for (l, &d) in ds.iter().enumerate() {
                profile.offer(i + l, d, j + l, self.tie_rule);
                profile.offer(j + l, d, i + l, self.tie_rule);
            }
        }
        qs[width - 1]
    }
}

/// Element-wise minimum of private profiles. Under
/// [`TieRule::LowestIndex`] equal distances resolve to the smaller neighbor
/// index; under [`TieRule::FirstSeen`] the earliest profile in the list wins.
pub fn reduce<T: Real>(profiles: Vec<Profile<T>>, tie_rule: TieRule) -> Result<Profile<T>> {
    let mut iter = profiles.into_iter();
    let mut merged = iter.next().ok_or(Error::EmptyReduction)?;
    for p in iter {
        if p.len() != merged.len() || p.m != merged.m {
            return Err(Error::ShapeMismatch {
                expected: merged.len(),
                found: p.len(),
            });
        }
        for (i, (&d, &j)) in p.distances.iter().zip(&p.indices).enumerate() {
            merged.offer(i, d, j, tie_rule);
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DiagonalOrder;
    use crate::oracle::brute_force_profile;
    use crate::profile::NONE;
    use crate::real::Counted;
    use crate::synthetic;

    fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
        a == b || (a - b).abs() <= rtol * a.abs().max(b.abs())
    }

    #[test]
    fn shortest_diagonal() {
        let s = TimeSeries::new(synthetic::uniform_noise(20, 1)).unwrap();
        let m = 4;
        let stats = precompute_stats::<f64>(&s, m).unwrap();
        let windows = stats.len();
        let mut p = Profile::new(windows, m);
        let cells = compute_diagonal(
            s.values(),
            &stats,
            windows - 1,
            &mut p,
            8,
            TieRule::LowestIndex,
        );
        assert_eq!(cells, 1);
        assert_eq!(p.indices[0], windows - 1);
        assert_eq!(p.indices[windows - 1], 0);
        assert_eq!(p.distances[0], p.distances[windows - 1]);
        assert_eq!(p.indices.iter().filter(|&&i| i != NONE).count(), 2);
    }

    #[test]
    fn batch_width_does_not_change_bits() {
        let s = TimeSeries::new(synthetic::random_walk(512, 2)).unwrap();
        let m = 16;
        let stats = precompute_stats::<f64>(&s, m).unwrap();
        for offset in [5, 17, 100, 300, 496] {
            let mut reference = Profile::new(stats.len(), m);
            compute_diagonal(
                s.values(),
                &stats,
                offset,
                &mut reference,
                1,
                TieRule::LowestIndex,
            );
            for width in [2, 3, 8, 13, 64] {
                let mut p = Profile::new(stats.len(), m);
                compute_diagonal(
                    s.values(),
                    &stats,
                    offset,
                    &mut p,
                    width,
                    TieRule::LowestIndex,
                );
                assert_eq!(p, reference, "offset {offset} width {width}");
            }
        }
    }

    #[test]
    fn all_diagonals_match_oracle() {
        let s = TimeSeries::new(synthetic::uniform_noise(256, 3)).unwrap();
        let m = 8;
        let exclusion = 2;
        let stats = precompute_stats::<f64>(&s, m).unwrap();
        let mut p = Profile::new(stats.len(), m);
        for k in exclusion + 1..stats.len() {
            compute_diagonal(s.values(), &stats, k, &mut p, 8, TieRule::LowestIndex);
        }
        let oracle = brute_force_profile(&s, m, exclusion).unwrap();
        assert_eq!(p.indices, oracle.indices);
        for i in 0..p.len() {
            assert!(rel_close(p.distances[i], oracle.distances[i], 1e-9), "{i}");
        }
    }

    #[test]
    fn constant_series_is_all_zero() {
        let s = TimeSeries::new(vec![5.0; 64]).unwrap();
        let r = run(&s, &RunConfig::new(8).workers(3)).unwrap();
        assert!(r.completed);
        assert!(r.profile.distances.iter().all(|&d| d == 0.0));
        // every pair ties at 0: the smallest index beyond the exclusion zone wins
        for (i, &j) in r.profile.indices.iter().enumerate() {
            let want = if i > 2 { 0 } else { i + 3 };
            assert_eq!(j, want, "{i}");
        }
    }

    #[test]
    fn reduce_identity_and_ties() {
        let a = Profile {
            m: 4,
            distances: vec![1.0, 2.0, f64::INFINITY],
            indices: vec![7, 5, NONE],
        };
        assert_eq!(reduce(vec![a.clone()], TieRule::LowestIndex).unwrap(), a);
        let b = Profile {
            m: 4,
            distances: vec![1.0, 3.0, 0.5],
            indices: vec![3, 9, 0],
        };
        let r = reduce(vec![a.clone(), b.clone()], TieRule::LowestIndex).unwrap();
        assert_eq!(r.indices, vec![3, 5, 0]);
        assert_eq!(r.distances, vec![1.0, 2.0, 0.5]);
        let first = reduce(vec![a.clone(), b], TieRule::FirstSeen).unwrap();
        assert_eq!(first.indices[0], 7);

        let short = Profile::<f64>::new(2, 4);
        assert!(matches!(
            reduce(vec![a, short], TieRule::LowestIndex),
            Err(Error::ShapeMismatch { .. })
        ));
        assert_eq!(
            reduce::<f64>(vec![], TieRule::LowestIndex),
            Err(Error::EmptyReduction)
        );
    }

    #[test]
    fn zero_budget_leaves_sentinels() {
        let s = TimeSeries::new(synthetic::uniform_noise(100, 4)).unwrap();
        let r = run(
            &s,
            &RunConfig::new(8).workers(2).budget(Budget::Diagonals(0)),
        )
        .unwrap();
        assert!(!r.completed);
        assert_eq!(r.diagonals_completed, 0);
        assert!(r.profile.distances.iter().all(|d| d.is_infinite()));
        assert!(r.profile.indices.iter().all(|&i| i == NONE));
    }

    #[test]
    fn wall_clock_budget_of_zero_stops_immediately() {
        let s = TimeSeries::new(synthetic::uniform_noise(100, 4)).unwrap();
        let cfg = RunConfig::new(8).budget(Budget::WallClock(Duration::ZERO));
        let r = run(&s, &cfg).unwrap();
        assert!(!r.completed);
        assert_eq!(r.diagonals_completed, 0);
    }

    #[test]
    fn work_is_conserved_and_progress_reported() {
        let s = TimeSeries::new(synthetic::uniform_noise(300, 5)).unwrap();
        let m = 16;
        let windows = 300 - m + 1;
        let expected: u64 = (5..windows).map(|k| (windows - k) as u64).sum();
        let calls = AtomicUsize::new(0);
        let last = AtomicUsize::new(0);
        let progress = |done: usize, total: usize| {
            calls.fetch_add(1, Ordering::Relaxed);
            last.fetch_max(done, Ordering::Relaxed);
            assert!(done <= total);
        };
        for workers in [1, 3, 5] {
            calls.store(0, Ordering::Relaxed);
            let cfg = RunConfig::new(m).workers(workers);
            let r = run_with_progress(&s, &cfg, Some(&progress)).unwrap();
            assert_eq!(r.cells_evaluated, expected);
            assert_eq!(calls.load(Ordering::Relaxed), r.total_diagonals);
            assert_eq!(last.load(Ordering::Relaxed), r.total_diagonals);
        }
    }

    #[test]
    fn partition_and_order_independence() {
        let s = TimeSeries::new(synthetic::random_walk(700, 6)).unwrap();
        let base = run(&s, &RunConfig::new(16).order(DiagonalOrder::Sequential)).unwrap();
        for workers in [2, 3, 8] {
            for order in [
                DiagonalOrder::Sequential,
                DiagonalOrder::Random { seed: 42 },
            ] {
                let r = run(&s, &RunConfig::new(16).workers(workers).order(order)).unwrap();
                assert_eq!(r.profile, base.profile, "workers {workers} {order:?}");
            }
        }
    }

    #[test]
    fn steady_state_census_matches_instrumented_run() {
        let s = TimeSeries::new(synthetic::uniform_noise(200, 8)).unwrap();
        let m = 8;
        let stats = precompute_stats::<Counted>(&s, m).unwrap();
        let values = s.values_as::<Counted>();
        let count = |offset: usize| {
            let mut p = Profile::new(stats.len(), m);
            Counted::reset();
            compute_diagonal(&values, &stats, offset, &mut p, 8, TieRule::LowestIndex);
            Counted::ops()
        };
        // same first-cell cost, lengths differ by 90 cells
        let per_cell = (count(10) - count(100)) / 90;
        assert_eq!((count(10) - count(100)) % 90, 0);
        assert_eq!(
            per_cell,
            crate::kernel::OpCensus::steady_state().total() as u64
        );
    }
}
