//! Floating-point element types the kernels are generic over.
//!
//! `f64` and `f32` are the two run precisions. [`Counted`] wraps `f64` and
//! tallies every arithmetic operation and comparison it performs into a
//! thread-local counter, so the engine's real code path can be censused.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

pub trait Real:
    Copy
    + Send
    + Sync
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// Storage width of one element in bytes.
    const BYTES: usize;
    /// Relative threshold under which a window's standard deviation counts as flat.
    const FLAT_RTOL: f64;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn zero() -> Self;
    fn infinity() -> Self;
}

impl Real for f64 {
    const BYTES: usize = 8;
    const FLAT_RTOL: f64 = 1e-13;

    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline(always)]
    fn zero() -> Self {
        0.0
    }
    #[inline(always)]
    fn infinity() -> Self {
        f64::INFINITY
    }
}

impl Real for f32 {
    const BYTES: usize = 4;
    const FLAT_RTOL: f64 = 1e-5;

    #[inline(always)]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline(always)]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline(always)]
    fn sqrt(self) -> Self {
        f32::sqrt(self)
    }
    #[inline(always)]
    fn zero() -> Self {
        0.0
    }
    #[inline(always)]
    fn infinity() -> Self {
        f32::INFINITY
    }
}

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

/// An `f64` that counts the floating-point operations applied to it.
///
/// Conversions (`from_f64`, `to_f64`, `zero`, `infinity`) are free; every
/// `+ - * /`, `sqrt` and ordered comparison costs one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counted(pub f64);

impl Counted {
    /// Operations counted on the current thread since the last reset.
    pub fn ops() -> u64 {
        OPS.with(Cell::get)
    }

    pub fn reset() {
        OPS.with(|c| c.set(0));
    }

    fn tick() {
        OPS.with(|c| c.set(c.get() + 1));
    }
}

impl PartialOrd for Counted {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Self::tick();
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! counted_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Counted {
            type Output = Counted;
            fn $method(self, rhs: Counted) -> Counted {
                Self::tick();
                Counted(self.0 $op rhs.0)
            }
        }
    };
}

counted_binop!(Add, add, +);
counted_binop!(Sub, sub, -);
counted_binop!(Mul, mul, *);
counted_binop!(Div, div, /);

impl Real for Counted {
    const BYTES: usize = 8;
    const FLAT_RTOL: f64 = 1e-13;

    fn from_f64(v: f64) -> Self {
        Counted(v)
    }
    fn to_f64(self) -> f64 {
        self.0
    }
    fn sqrt(self) -> Self {
        Self::tick();
        Counted(self.0.sqrt())
    }
    fn zero() -> Self {
        Counted(0.0)
    }
    fn infinity() -> Self {
        Counted(f64::INFINITY)
    }
}
