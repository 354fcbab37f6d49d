use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, Sub};

/// Floating-point element type carried in rank vectors and update bins.
///
/// `f32` is the 4-byte mode, `f64` the 8-byte mode.
pub trait Value:
    Copy
    + Default
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    const ZERO: Self;
    const BYTES: usize;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn from_count(c: u32) -> Self;
    /// Raw bit pattern widened to 64 bits, for bitwise comparisons.
    fn bits(self) -> u64;
}

impl Value for f32 {
    const ZERO: Self = 0.0;
    const BYTES: usize = 4;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn from_count(c: u32) -> Self {
        c as f32
    }
    #[inline]
    fn bits(self) -> u64 {
        self.to_bits() as u64
    }
}

impl Value for f64 {
    const ZERO: Self = 0.0;
    const BYTES: usize = 8;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_count(c: u32) -> Self {
        c as f64
    }
    #[inline]
    fn bits(self) -> u64 {
        self.to_bits()
    }
}
