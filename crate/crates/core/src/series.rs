//! Input series and rolling per-window statistics.

use crate::error::{Error, Result};
use crate::real::Real;

/// Smallest window length accepted; below it the default exclusion `m / 4` is zero.
pub const MIN_WINDOW: usize = 4;

/// An ordered sequence of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::SeriesTooShort(values.len()));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The samples converted to the run precision.
    pub fn values_as<T: Real>(&self) -> Vec<T> {
        self.values.iter().map(|&v| T::from_f64(v)).collect()
    }

    /// Number of length-`m` windows, `n - m + 1`, after checking `m` is usable.
    pub fn window_count(&self, m: usize) -> Result<usize> {
        check_window(self.len(), m)?;
        Ok(self.len() - m + 1)
    }
}

pub(crate) fn check_window(n: usize, m: usize) -> Result<()> {
    if m < MIN_WINDOW {
        return Err(Error::WindowTooShort(m));
    }
    if m >= n {
        return Err(Error::WindowTooLong { m, n });
    }
    Ok(())
}

/// Means and population standard deviations of every length-`m` window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowStats<T = f64> {
    pub m: usize,
    pub means: Vec<T>,
    pub stddevs: Vec<T>,
    /// Windows whose deviation is below the flatness threshold of `T`.
    pub flat: Vec<bool>,
}

impl<T: Real> WindowStats<T> {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// Whether a window with the given mean and deviation is treated as constant
/// at precision `T`.
#[inline]
pub fn is_flat<T: Real>(mean: f64, stddev: f64) -> bool {
    stddev < T::FLAT_RTOL * mean.abs().max(1.0)
}

/// Rolling mean and standard deviation of every window, in O(n).
///
/// Works in `f64` whatever `T` is: the series is shifted by its global mean,
/// then double-double prefix sums of `t` and exact `t²` give each window's
/// moments, so `m Σt² - (Σt)²` does not lose the variance of quiet windows
/// sitting far from the mean.
/// Exactly constant windows are detected from run lengths and get `σ = 0`
/// and `μ = t_i` exactly.
pub fn precompute_stats<T: Real>(series: &TimeSeries, m: usize) -> Result<WindowStats<T>> {
    let t = series.values();
    let n = t.len();
    check_window(n, m)?;
    let windows = n - m + 1;

    let shift = t.iter().sum::<f64>() / n as f64;
    let x: Vec<f64> = t.iter().map(|&v| v - shift).collect();
    let sum = prefix(x.iter().map(|&v| Dd(v, 0.0)));
    let sum_sq = prefix(x.iter().map(|&v| two_prod(v, v)));

    // run[k]: length of the run of equal samples ending at k
    let mut run = vec![1usize; n];
    for k in 1..n {
        if t[k] == t[k - 1] {
            run[k] = run[k - 1] + 1;
        }
    }

    let mf = m as f64;
    let mut means = Vec::with_capacity(windows);
    let mut stddevs = Vec::with_capacity(windows);
    let mut flat = Vec::with_capacity(windows);
    for i in 0..windows {
        let (mean, stddev) = if run[i + m - 1] >= m {
            (t[i], 0.0)
        } else {
            let s = sum[i + m].sub(sum[i]);
            let ss = sum_sq[i + m].sub(sum_sq[i]);
            // m^2 var = m ss - s^2, cancelling in double-double
            let m2var = ss.scale(mf).sub(s.mul(s)).value();
            (shift + s.value() / mf, (m2var.max(0.0)).sqrt() / mf)
        };
        means.push(T::from_f64(mean));
        stddevs.push(T::from_f64(stddev));
        flat.push(is_flat::<T>(mean, stddev));
    }
    Ok(WindowStats {
        m,
        means,
        stddevs,
        flat,
    })
}

/// Double-double: the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

/// Exact product via Dekker splitting, no fused multiply-add needed.
fn two_prod(a: f64, b: f64) -> Dd {
    const SPLIT: f64 = 134_217_729.0; // 2^27 + 1
    let split = |v: f64| {
        let c = SPLIT * v;
        let hi = c - (c - v);
        (hi, v - hi)
    };
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    Dd(p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    fn renorm(self) -> Dd {
        let s = self.0 + self.1;
        Dd(s, self.1 - (s - self.0))
    }

    fn add(self, o: Dd) -> Dd {
        let Dd(s, e) = two_sum(self.0, o.0);
        Dd(s, e + self.1 + o.1).renorm()
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd(-o.0, -o.1))
    }

    fn mul(self, o: Dd) -> Dd {
        let Dd(p, e) = two_prod(self.0, o.0);
        Dd(p, e + self.0 * o.1 + self.1 * o.0).renorm()
    }

    fn scale(self, k: f64) -> Dd {
        self.mul(Dd(k, 0.0))
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

fn prefix(values: impl Iterator<Item = Dd>) -> Vec<Dd> {
    let mut acc = Dd(0.0, 0.0);
    let mut out = vec![acc];
    out.extend(values.map(|v| {
        acc = acc.add(v);
        acc
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(t: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
        t.windows(m)
            .map(|w| {
                let mu = w.iter().sum::<f64>() / m as f64;
                let var = w.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / m as f64;
                (mu, var.sqrt())
            })
            .unzip()
    }

    fn close(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * a.abs().max(b.abs()) || a == b
    }

    #[test]
    fn constant_series_is_exactly_flat() {
        let s = TimeSeries::new(vec![1.0; 6]).unwrap();
        let st = precompute_stats::<f64>(&s, 4).unwrap();
        assert_eq!(st.means, vec![1.0; 3]);
        assert_eq!(st.stddevs, vec![0.0; 3]);
        assert!(st.flat.iter().all(|&f| f));
    }

    #[test]
    fn alternating_series() {
        let s = TimeSeries::new(vec![0., 1., 0., 1., 0., 1., 0., 1.]).unwrap();
        let st = precompute_stats::<f64>(&s, 4).unwrap();
        assert_eq!(st.len(), 5);
        for i in 0..5 {
            assert_eq!(st.means[i], 0.5);
            assert_eq!(st.stddevs[i], 0.5);
            assert!(!st.flat[i]);
        }
    }

    #[test]
    fn matches_two_pass_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t: Vec<f64> = (0..256).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let s = TimeSeries::new(t.clone()).unwrap();
        let st = precompute_stats::<f64>(&s, 16).unwrap();
        let (mu, sd) = naive(&t, 16);
        for i in 0..st.len() {
            assert!(close(st.means[i], mu[i], 1e-12), "mean {i}");
            assert!(close(st.stddevs[i], sd[i], 1e-12), "stddev {i}");
        }
    }

    #[test]
    fn large_series_and_single_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t: Vec<f64> = (0..100_000).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let s = TimeSeries::new(t.clone()).unwrap();
        let (mu, sd) = naive(&t, 64);
        let st = precompute_stats::<f64>(&s, 64).unwrap();
        let st32 = precompute_stats::<f32>(&s, 64).unwrap();
        for i in 0..st.len() {
            assert!(close(st.stddevs[i], sd[i], 1e-12), "stddev {i}");
            assert!((st.means[i] - mu[i]).abs() <= 1e-12 * 100.0, "mean {i}");
            assert!(
                close(st32.stddevs[i] as f64, sd[i], 1e-4),
                "single stddev {i}"
            );
            assert!((st32.means[i] as f64 - mu[i]).abs() <= 1e-4 * mu[i].abs().max(1.0));
        }
    }

    #[test]
    fn quiet_windows_far_from_the_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t: Vec<f64> = (0..4000)
            .map(|i| {
                let level = if i < 2000 { -100.0 } else { 100.0 };
                let amp = if i % 500 < 250 { 1e-3 } else { 10.0 };
                level + amp * rng.gen_range(-1.0..1.0)
            })
            .collect();
        let s = TimeSeries::new(t.clone()).unwrap();
        for m in [4, 16, 100] {
            let st = precompute_stats::<f64>(&s, m).unwrap();
            let (mu, sd) = naive(&t, m);
            for i in 0..st.len() {
                assert!((st.means[i] - mu[i]).abs() <= 1e-12 * 100.0, "{m} {i}");
                assert!(
                    close(st.stddevs[i], sd[i], 1e-12),
                    "{m} {i}: {} vs {}",
                    st.stddevs[i],
                    sd[i]
                );
            }
        }
    }

    #[test]
    fn double_double_products_are_exact() {
        let a = 1.0 + f64::EPSILON;
        let p = two_prod(a, a);
        assert_eq!(p.0, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.1, f64::EPSILON * f64::EPSILON);
        let d = Dd(1.0, 1e-20).sub(Dd(1.0, 0.0));
        assert_eq!(d.value(), 1e-20);
    }

    #[test]
    fn flat_run_inside_noise() {
        let mut t: Vec<f64> = (0..40).map(|k| (k as f64 * 0.7).sin()).collect();
        for v in &mut t[10..20] {
            *v = 3.25;
        }
        let s = TimeSeries::new(t).unwrap();
        let st = precompute_stats::<f64>(&s, 8).unwrap();
        for i in 0..st.len() {
            let constant = (10..=12).contains(&i);
            assert_eq!(st.flat[i], constant, "window {i}");
            if constant {
                assert_eq!((st.means[i], st.stddevs[i]), (3.25, 0.0));
            }
        }
    }

    #[test]
    fn rejects_bad_windows_and_samples() {
        let s = TimeSeries::new(vec![0.0; 8]).unwrap();
        assert_eq!(
            precompute_stats::<f64>(&s, 3),
            Err(Error::WindowTooShort(3))
        );
        assert_eq!(
            precompute_stats::<f64>(&s, 8),
            Err(Error::WindowTooLong { m: 8, n: 8 })
        );
        assert_eq!(TimeSeries::new(vec![0.0; 3]), Err(Error::SeriesTooShort(3)));
        assert!(matches!(
            TimeSeries::new(vec![0.0, 1.0, f64::NAN, 2.0]),
            Err(Error::NonFinite { index: 2, .. })
        ));
    }
}
