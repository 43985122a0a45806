//! Exact, anytime, parallel matrix-profile computation.
//!
//! The profile is computed diagonal by diagonal over the implicit distance
//! matrix. Each diagonal seeds one dot product directly and slides it with
//! the recurrence `Q[i,j] = Q[i-1,j-1] - t[i-1]·t[j-1] + t[i+m-1]·t[j+m-1]`,
//! processed in batches whose only sequential step is a prefix fold of the
//! recurrence corrections. Diagonals are dealt to workers in complementary
//! pairs of equal total length; every worker owns a private profile and the
//! copies are min-reduced at the end.
//!
//! ```
//! use mprofile::{run, RunConfig, TimeSeries};
//!
//! let values: Vec<f64> = (0..200).map(|i| (i as f64 * 0.3).sin()).collect();
//! let series = TimeSeries::new(values).unwrap();
//! let result = run(&series, &RunConfig::new(16).workers(2)).unwrap();
//! assert_eq!(result.profile.len(), 200 - 16 + 1);
//! assert!(result.completed);
//! ```

mod config;
pub mod engine;
mod error;
pub mod kernel;
pub mod oracle;
pub mod planner;
mod profile;
mod real;
pub mod scheduler;
mod series;
pub mod synthetic;

pub use config::{default_exclusion, Budget, DiagonalOrder, Precision, RunConfig};
pub use engine::{
    compute_diagonal, reduce, run, run_typed, run_with_progress, Progress, RunResult,
};
pub use error::{Error, Result};
pub use kernel::{distance, dot_product, update_dot, DistanceParams, OpCensus};
pub use oracle::{brute_force_profile, pair_distance};
pub use planner::{arithmetic_intensity, balanced_workers, PlanReport, Regime};
pub use profile::{Profile, TieRule, NONE};
pub use real::{Counted, Real};
pub use scheduler::{schedule_diagonals, DiagonalPair, DiagonalSchedule};
pub use series::{is_flat, precompute_stats, TimeSeries, WindowStats, MIN_WINDOW};
