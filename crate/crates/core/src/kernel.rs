//! Distance kernels: the direct dot product, the diagonal recurrence for it,
//! and the z-normalized Euclidean distance computed from a dot product and
//! window statistics.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::series::is_flat;

/// Dot product of windows `i` and `j` of length `m`.
pub fn dot_product<T: Real>(series: &[T], i: usize, j: usize, m: usize) -> Result<T> {
    let windows = (series.len() + 1).saturating_sub(m);
    if m == 0 || i >= windows || j >= windows {
        return Err(Error::IndexOutOfRange { i, j, windows });
    }
    Ok(dot_unchecked(series, i, j, m))
}

#[inline]
pub(crate) fn dot_unchecked<T: Real>(series: &[T], i: usize, j: usize, m: usize) -> T {
    series[i..i + m]
        .iter()
        .zip(&series[j..j + m])
        .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
}

/// Slides a dot product one step down its diagonal:
/// `Q[i,j] = Q[i-1,j-1] - t[i-1]·t[j-1] + t[i+m-1]·t[j+m-1]`.
#[inline]
pub fn update_dot<T: Real>(q_prev: T, t_im1: T, t_jm1: T, t_imm1: T, t_jmm1: T) -> T {
    add_term(t_im1, t_jm1, t_imm1, t_jmm1) + q_prev
}

/// The correction the recurrence adds to the previous dot product. The
/// engine computes these per lane before folding them in sequence.
#[inline(always)]
pub(crate) fn add_term<T: Real>(t_im1: T, t_jm1: T, t_imm1: T, t_jmm1: T) -> T {
    t_imm1 * t_jmm1 - t_im1 * t_jm1
}

/// Window-length constants the distance formula needs, converted once.
#[derive(Debug, Clone, Copy)]
pub struct DistanceParams<T> {
    m: T,
    two_m: T,
    four_m: T,
    one: T,
    one_flat: T,
}

impl<T: Real> DistanceParams<T> {
    pub fn new(m: usize) -> Self {
        let mf = m as f64;
        Self {
            m: T::from_f64(mf),
            two_m: T::from_f64(2.0 * mf),
            four_m: T::from_f64(4.0 * mf),
            one: T::from_f64(1.0),
            one_flat: T::from_f64((2.0 * mf).sqrt()),
        }
    }

    /// Distance with flatness of both windows already known.
    ///
    /// Both flat gives 0, exactly one flat gives `sqrt(2m)`. Otherwise the
    /// radicand `2m(1 - (q - m·μi·μj) / (m·σi·σj))` is clamped to `[0, 4m]`.
    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    pub fn eval(
        &self,
        q: T,
        mu_i: T,
        sigma_i: T,
        flat_i: bool,
        mu_j: T,
        sigma_j: T,
        flat_j: bool,
    ) -> T {
        let num = q - self.m * (mu_i * mu_j);
        let den = self.m * (sigma_i * sigma_j);
        let rad = self.two_m * (self.one - num / den);
        let rad = if rad < T::zero() { T::zero() } else { rad };
        let rad = if rad > self.four_m { self.four_m } else { rad };
        let d = rad.sqrt();
        // selected after the fact so the common path stays branch-free
        match (flat_i, flat_j) {
            (false, false) => d,
            (true, true) => T::zero(),
            _ => self.one_flat,
        }
    }
}

/// z-normalized Euclidean distance between two windows of length `m`, given
/// their dot product `q` and their statistics. Never NaN.
pub fn distance<T: Real>(m: usize, q: T, mu_i: T, sigma_i: T, mu_j: T, sigma_j: T) -> T {
    let flat_i = is_flat::<T>(mu_i.to_f64(), sigma_i.to_f64());
    let flat_j = is_flat::<T>(mu_j.to_f64(), sigma_j.to_f64());
    DistanceParams::new(m).eval(q, mu_i, sigma_i, flat_i, mu_j, sigma_j, flat_j)
}

/// FLOPs and comparisons spent on one cell past the first of a diagonal.
///
/// This is the op census the planner reports. It must match what the engine
/// actually executes; a test runs the engine over [`crate::Counted`] to
/// check it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpCensus {
    /// `t[i+m-1]·t[j+m-1]` and `t[i-1]·t[j-1]`.
    pub update_mul: u32,
    /// Their difference and the fold into the running dot product.
    pub update_add: u32,
    /// `m·(μi·μj)`, `m·(σi·σj)`, `2m·(…)`.
    pub distance_mul: u32,
    /// `q - …` and `1 - …`.
    pub distance_add: u32,
    pub distance_div: u32,
    pub distance_sqrt: u32,
    /// Clamp of the radicand to `[0, 4m]`.
    pub clamp_cmp: u32,
    /// One ordered comparison against each of the two profile entries.
    pub profile_cmp: u32,
}

impl OpCensus {
    pub const fn steady_state() -> Self {
        Self {
            update_mul: 2,
            update_add: 2,
            distance_mul: 5,
            distance_add: 2,
            distance_div: 1,
            distance_sqrt: 1,
            clamp_cmp: 2,
            profile_cmp: 2,
        }
    }

    pub const fn total(&self) -> u32 {
        self.update_mul
            + self.update_add
            + self.distance_mul
            + self.distance_add
            + self.distance_div
            + self.distance_sqrt
            + self.clamp_cmp
            + self.profile_cmp
    }
}
