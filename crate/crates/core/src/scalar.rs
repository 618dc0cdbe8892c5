//! Coefficient fields.
//!
//! Everything above this module is generic over [`Scalar`]. Two backends exist:
//! exact Gaussian rationals ([`GaussianRational`]) and IEEE complex numbers
//! (`Complex<f64>`, `Complex<f32>`). The float backend makes every rank and
//! kernel decision against a single global tolerance, see [`float_tolerance`].

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::gaussian::GaussianRational;
use crate::linalg::{DenseBlock, DenseReduction};

/// Which arithmetic a scalar type performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend `{other}` (expected exact|float)")),
        }
    }
}

pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

static FLOAT_TOLERANCE: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Global tolerance used by the float backend for rank, kernel and equality decisions.
pub fn float_tolerance() -> f64 {
    f64::from_bits(FLOAT_TOLERANCE.load(Ordering::Relaxed))
}

/// Replaces the global float tolerance. Non-positive or non-finite values are ignored.
pub fn set_float_tolerance(eps: f64) {
    if eps.is_finite() && eps > 0.0 {
        FLOAT_TOLERANCE.store(eps.to_bits(), Ordering::Relaxed);
    }
}

/// A field with complex conjugation, plus the backend-specific dense kernels.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const BACKEND: Backend;

    fn conj(&self) -> Self;

    /// Absolute value, rounded to `f64`. Only used for reporting and thresholds.
    fn modulus(&self) -> f64;

    fn imag_unit() -> Self;

    fn from_gaussian(value: &GaussianRational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_gaussian(&GaussianRational::from_integer(n))
    }

    /// `0` for exact arithmetic, the global tolerance otherwise.
    fn tolerance() -> f64 {
        match Self::BACKEND {
            Backend::Exact => 0.0,
            Backend::Float => float_tolerance(),
        }
    }

    /// Product without consuming either operand.
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    /// Largest singular value of a dense block. The exact backend never needs it.
    fn spectral_norm(block: &DenseBlock<Self>) -> f64;

    /// Rank, kernel basis and column-space basis of a dense block.
    ///
    /// `scale` is the largest singular value of the enclosing map; the float
    /// backend treats singular values `<= tolerance * scale` as zero.
    fn reduce(block: &DenseBlock<Self>, scale: f64) -> DenseReduction<Self>;

    /// Some `x` with `block * x = rhs`, or `None` when `rhs` is not in the image.
    fn solve(block: &DenseBlock<Self>, rhs: &[Self], scale: f64) -> Option<Vec<Self>>;
}

impl Scalar for GaussianRational {
    const BACKEND: Backend = Backend::Exact;

    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }

    fn modulus(&self) -> f64 {
        let re = self.re.to_f64().unwrap_or(f64::INFINITY);
        let im = self.im.to_f64().unwrap_or(f64::INFINITY);
        re.hypot(im)
    }

    fn imag_unit() -> Self {
        GaussianRational::i()
    }

    fn from_gaussian(value: &GaussianRational) -> Self {
        value.clone()
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn spectral_norm(_block: &DenseBlock<Self>) -> f64 {
        0.0
    }

    fn reduce(block: &DenseBlock<Self>, _scale: f64) -> DenseReduction<Self> {
        crate::gaussian::fraction_free_reduce(block)
    }

    fn solve(block: &DenseBlock<Self>, rhs: &[Self], _scale: f64) -> Option<Vec<Self>> {
        crate::gaussian::fraction_free_solve(block, rhs)
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for Complex<$t> {
            const BACKEND: Backend = Backend::Float;

            fn conj(&self) -> Self {
                Complex::conj(self)
            }

            fn modulus(&self) -> f64 {
                self.norm() as f64
            }

            fn imag_unit() -> Self {
                Complex::i()
            }

            fn from_gaussian(value: &GaussianRational) -> Self {
                Complex::new(
                    value.re.to_f64().unwrap_or(f64::NAN) as $t,
                    value.im.to_f64().unwrap_or(f64::NAN) as $t,
                )
            }

            fn mul_ref(&self, rhs: &Self) -> Self {
                *self * *rhs
            }

            fn spectral_norm(block: &DenseBlock<Self>) -> f64 {
                crate::float::spectral_norm(block)
            }

            fn reduce(block: &DenseBlock<Self>, scale: f64) -> DenseReduction<Self> {
                crate::float::svd_reduce(block, scale, Self::tolerance())
            }

            fn solve(block: &DenseBlock<Self>, rhs: &[Self], scale: f64) -> Option<Vec<Self>> {
                crate::float::svd_solve(block, rhs, scale, Self::tolerance())
            }
        }
    };
}

impl_float_scalar!(f64);
impl_float_scalar!(f32);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerance_bits() {
        assert_eq!(f64::from_bits(0x3E11_2E0B_E826_D695), DEFAULT_FLOAT_TOLERANCE);
    }

    #[test]
    fn backend_parse() {
        assert_eq!("exact".parse::<Backend>().unwrap(), Backend::Exact);
        assert!("double".parse::<Backend>().is_err());
    }

    #[test]
    fn tolerance_is_zero_for_exact() {
        assert_eq!(GaussianRational::tolerance(), 0.0);
        assert!(<Complex<f64> as Scalar>::tolerance() > 0.0);
    }
}
