//! Scalar abstraction shared by colors, costs and statistics.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::Debug;

/// Real number type the segmentation core is generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; used for constants and parameters.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion from f64")
    }

    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("scalar conversion from usize")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }

    /// Integer key that orders non-negative finite values like the values
    /// themselves.
    fn order_bits(self) -> u64;
}

impl Scalar for f32 {
    #[inline]
    fn order_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits() as u64
        }
    }
}

impl Scalar for f64 {
    #[inline]
    fn order_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

/// Euclidean distance between two 3-vectors.
#[inline]
pub fn dist3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    (d0 * d0 + d1 * d1 + d2 * d2).sqrt()
}
