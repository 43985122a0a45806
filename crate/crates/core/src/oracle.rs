//! Brute-force reference profile.
//!
//! Every window is z-normalized explicitly with two-pass statistics and
//! pairs are compared with a plain Euclidean distance. Nothing here goes
//! through the dot-product kernels, so an algebra slip there cannot hide
//! in both places.

use crate::config::Precision;
use crate::error::{Error, Result};
use crate::profile::{Profile, NONE};
use crate::series::{check_window, is_flat, TimeSeries};

/// Largest profile length the oracle will take on.
pub const ORACLE_MAX_WINDOWS: usize = 8192;

/// Explicitly normalized windows of one series.
pub struct NormalizedWindows {
    m: usize,
    /// `None` for flat windows.
    windows: Vec<Option<Vec<f64>>>,
}

impl NormalizedWindows {
    pub fn new(series: &TimeSeries, m: usize) -> Result<Self> {
        check_window(series.len(), m)?;
        let windows = series
            .values()
            .windows(m)
            .map(|w| {
                let mean = w.iter().sum::<f64>() / m as f64;
                let var = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64;
                let sd = var.sqrt();
                let constant = w.iter().all(|&v| v == w[0]);
                if constant || is_flat::<f64>(mean, sd) {
                    None
                } else {
                    Some(w.iter().map(|v| (v - mean) / sd).collect())
                }
            })
            .collect();
        Ok(Self { m, windows })
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Euclidean distance between normalized windows `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match (&self.windows[i], &self.windows[j]) {
            (None, None) => 0.0,
            (None, Some(_)) | (Some(_), None) => (2.0 * self.m as f64).sqrt(),
            (Some(a), Some(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
        }
    }
}

/// Distance between windows `i` and `j` of `series`, from definitions.
pub fn pair_distance(series: &TimeSeries, m: usize, i: usize, j: usize) -> Result<f64> {
    check_window(series.len(), m)?;
    let windows = series.len() - m + 1;
    if i >= windows || j >= windows {
        return Err(Error::IndexOutOfRange { i, j, windows });
    }
    let t = series.values();
    let one = TimeSeries::new([&t[i..i + m], &t[j..j + m]].concat())?;
    Ok(NormalizedWindows::new(&one, m)?.distance(0, m))
}

/// Exact matrix profile by brute force, row by row. Ties go to the smaller
/// neighbor index. Pairs with `|i - j| <= exclusion` are skipped.
pub fn brute_force_profile(
    series: &TimeSeries,
    m: usize,
    exclusion: usize,
) -> Result<Profile<f64>> {
    let windows = series.window_count(m)?;
    if windows > ORACLE_MAX_WINDOWS {
        return Err(Error::OracleTooLarge {
            windows,
            limit: ORACLE_MAX_WINDOWS,
        });
    }
    let norm = NormalizedWindows::new(series, m)?;
    let mut profile = Profile::new(windows, m);
    let mut row = vec![f64::INFINITY; windows];
    for i in 0..windows {
        for (j, d) in row.iter_mut().enumerate() {
            *d = if i.abs_diff(j) > exclusion {
                norm.distance(i, j)
            } else {
                f64::INFINITY
            };
        }
        for (j, &d) in row.iter().enumerate() {
            if d < profile.distances[i] {
                profile.distances[i] = d;
                profile.indices[i] = j;
            }
        }
    }
    Ok(profile)
}

/// How far an engine distance may sit from the oracle's.
///
/// Either within `rtol` relative, or within the worst-case error the
/// dot-product recurrence can build up: each of up to `n` updates on a
/// diagonal is off by about `eps * peak` (`peak = max t^2`), and
/// `d^2 = 2m(1 - q'/(m sigma_i sigma_j))` turns an error in `q` into
/// `2 * dq / (sigma_i sigma_j)` in `d^2`. The second term matters only for
/// small distances between low-variance windows, where `1 - rho` cancels.
#[derive(Debug, Clone)]
pub struct Tolerance {
    rtol: f64,
    eps: f64,
    scale: f64,
    /// Two-pass standard deviation, `None` for flat windows.
    sds: Vec<Option<f64>>,
}

impl Tolerance {
    pub fn new(series: &TimeSeries, m: usize, precision: Precision) -> Result<Self> {
        check_window(series.len(), m)?;
        let (rtol, eps) = match precision {
            Precision::Double => (1e-9, f64::EPSILON),
            Precision::Single => (1e-3, f32::EPSILON as f64),
        };
        let peak = series.values().iter().fold(0.0f64, |a, v| a.max(v * v));
        let sds = series
            .values()
            .windows(m)
            .map(|w| {
                let mean = w.iter().sum::<f64>() / m as f64;
                let sd = (w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64).sqrt();
                let constant = w.iter().all(|&v| v == w[0]);
                (!constant && !is_flat::<f64>(mean, sd)).then_some(sd)
            })
            .collect();
        Ok(Self {
            rtol,
            eps,
            scale: 2.0 * (m + series.len()) as f64 * peak,
            sds,
        })
    }

    /// Largest `|d^2 - exact^2|` the recurrence can explain for pair `(i, j)`.
    /// Zero when either window is flat, since flat distances are exact.
    pub fn d2_bound(&self, i: usize, j: usize) -> f64 {
        if i == NONE || j == NONE {
            return 0.0;
        }
        match (self.sds[i], self.sds[j]) {
            (Some(a), Some(b)) => self.eps * self.scale / (a * b),
            _ => 0.0,
        }
    }

    /// `got` for pair `(i, j)` against its exact value `want`.
    pub fn close(&self, got: f64, want: f64, i: usize, j: usize) -> bool {
        got == want
            || (got - want).abs() <= self.rtol * got.abs().max(want.abs())
            || (got * got - want * want).abs() <= self.d2_bound(i, j)
    }

    /// Whether neighbor `alt` at exact distance `alt_d` is a near-tie with the
    /// oracle's choice `j` at `want` that the run precision cannot separate.
    /// Exact ties do not qualify: they must resolve to the lower index.
    pub fn near_tie(&self, i: usize, alt: usize, alt_d: f64, j: usize, want: f64) -> bool {
        alt_d > want && alt_d * alt_d - want * want <= self.d2_bound(i, alt) + self.d2_bound(i, j)
    }
}
