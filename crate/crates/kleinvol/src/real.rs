//! Working-precision real arithmetic.
//!
//! Everything numeric in this crate is generic over [`Real`], with two tiers:
//! plain `f64` (the engine tier) and [`MpReal`] (MPFR-backed, `extended`
//! feature) for verification oracles and rational reconstruction, where 53
//! bits are not enough headroom.
//!
//! Values carry their own precision; `of` mints literals at the precision of
//! the receiver, so generic code never needs an explicit context argument.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Precision selector for the two arithmetic tiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub const STANDARD_BITS: u32 = 53;
    pub const EXTENDED_MIN_BITS: u32 = 200;

    /// 53-bit hardware tier.
    pub fn standard() -> Self {
        Precision { bits: Self::STANDARD_BITS }
    }

    /// Software tier; clamped up to the 200-bit floor the oracles assume.
    pub fn extended(bits: u32) -> Self {
        Precision { bits: bits.max(Self::EXTENDED_MIN_BITS) }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_extended(&self) -> bool {
        self.bits > Self::STANDARD_BITS
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::standard()
    }
}

/// Minimal field interface shared by real and complex scalar types.
///
/// The spectral-curve evaluators are generic over this so the same code runs
/// on `Complex64` (residue contours) and on any [`Real`] (pointwise probes).
pub trait Field:
    Clone
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A literal with the same precision/backing as `self`.
    fn of(&self, v: f64) -> Self;
    fn exp(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

/// Real scalar: ordered [`Field`] with the transcendental functions the
/// kernels and volumes need. Never NaN; code must reject non-finite values
/// at API boundaries.
pub trait Real: Field + PartialOrd + fmt::Display {
    fn f64(&self) -> f64;
    fn pi(&self) -> Self;
    fn ln(&self) -> Self;
    fn ln_1p(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn tanh(&self) -> Self;
    fn asinh(&self) -> Self;
    fn acosh(&self) -> Self;
    fn atanh(&self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn is_finite(&self) -> bool;
    /// Unit roundoff at this value's precision.
    fn epsilon(&self) -> Self;

    fn is_zero(&self) -> bool {
        *self == self.of(0.0)
    }
    fn max_val(&self, other: &Self) -> Self {
        if *self >= *other { self.clone() } else { other.clone() }
    }
    fn min_val(&self, other: &Self) -> Self {
        if *self <= *other { self.clone() } else { other.clone() }
    }
}

impl Field for f64 {
    fn of(&self, v: f64) -> Self {
        v
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

impl Real for f64 {
    fn f64(&self) -> f64 {
        *self
    }
    fn pi(&self) -> Self {
        std::f64::consts::PI
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn ln_1p(&self) -> Self {
        f64::ln_1p(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sinh(&self) -> Self {
        f64::sinh(*self)
    }
    fn cosh(&self) -> Self {
        f64::cosh(*self)
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn asinh(&self) -> Self {
        f64::asinh(*self)
    }
    fn acosh(&self) -> Self {
        f64::acosh(*self)
    }
    fn atanh(&self) -> Self {
        f64::atanh(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
    fn epsilon(&self) -> Self {
        f64::EPSILON
    }
}

impl Field for num_complex::Complex64 {
    fn of(&self, v: f64) -> Self {
        num_complex::Complex64::new(v, 0.0)
    }
    fn exp(&self) -> Self {
        num_complex::Complex64::exp(*self)
    }
    fn sin(&self) -> Self {
        num_complex::Complex64::sin(*self)
    }
    fn cos(&self) -> Self {
        num_complex::Complex64::cos(*self)
    }
    fn powi(&self, n: i32) -> Self {
        num_complex::Complex64::powi(self, n)
    }
}

#[cfg(all(feature = "extended", not(target_arch = "wasm32")))]
mod mp {
    use super::*;
    use rug::float::Constant;
    use rug::ops::CompleteRound;
    use rug::Float;

    /// MPFR-backed real at a fixed precision (≥ 200 bits in practice).
    #[derive(Debug, Clone, PartialEq, PartialOrd)]
    pub struct MpReal(pub Float);

    impl MpReal {
        pub fn with_prec(prec: Precision, v: f64) -> Self {
            MpReal(Float::with_val(prec.bits(), v))
        }

        pub fn prec(&self) -> u32 {
            self.0.prec()
        }
    }

    impl fmt::Display for MpReal {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            self.0.fmt(f)
        }
    }

    macro_rules! binop {
        ($tr:ident, $m:ident) => {
            impl $tr for MpReal {
                type Output = MpReal;
                fn $m(self, rhs: MpReal) -> MpReal {
                    MpReal(self.0.$m(rhs.0))
                }
            }
        };
    }
    binop!(Add, add);
    binop!(Sub, sub);
    binop!(Mul, mul);
    binop!(Div, div);

    impl Neg for MpReal {
        type Output = MpReal;
        fn neg(self) -> MpReal {
            MpReal(-self.0)
        }
    }

    impl Field for MpReal {
        fn of(&self, v: f64) -> Self {
            MpReal(Float::with_val(self.0.prec(), v))
        }
        fn exp(&self) -> Self {
            MpReal(self.0.exp_ref().complete(self.0.prec()))
        }
        fn sin(&self) -> Self {
            MpReal(self.0.sin_ref().complete(self.0.prec()))
        }
        fn cos(&self) -> Self {
            MpReal(self.0.cos_ref().complete(self.0.prec()))
        }
        fn powi(&self, n: i32) -> Self {
            use rug::ops::Pow;
            MpReal((&self.0).pow(n).complete(self.0.prec()))
        }
    }

    impl Real for MpReal {
        fn f64(&self) -> f64 {
            self.0.to_f64()
        }
        fn pi(&self) -> Self {
            MpReal(Float::with_val(self.0.prec(), Constant::Pi))
        }
        fn ln(&self) -> Self {
            MpReal(self.0.ln_ref().complete(self.0.prec()))
        }
        fn ln_1p(&self) -> Self {
            MpReal(self.0.ln_1p_ref().complete(self.0.prec()))
        }
        fn sqrt(&self) -> Self {
            MpReal(self.0.sqrt_ref().complete(self.0.prec()))
        }
        fn sinh(&self) -> Self {
            MpReal(self.0.sinh_ref().complete(self.0.prec()))
        }
        fn cosh(&self) -> Self {
            MpReal(self.0.cosh_ref().complete(self.0.prec()))
        }
        fn tanh(&self) -> Self {
            MpReal(self.0.tanh_ref().complete(self.0.prec()))
        }
        fn asinh(&self) -> Self {
            MpReal(self.0.asinh_ref().complete(self.0.prec()))
        }
        fn acosh(&self) -> Self {
            MpReal(self.0.acosh_ref().complete(self.0.prec()))
        }
        fn atanh(&self) -> Self {
            MpReal(self.0.atanh_ref().complete(self.0.prec()))
        }
        fn abs(&self) -> Self {
            MpReal(self.0.abs_ref().complete(self.0.prec()))
        }
        fn floor(&self) -> Self {
            MpReal(self.0.floor_ref().complete(self.0.prec()))
        }
        fn is_finite(&self) -> bool {
            self.0.is_finite()
        }
        fn epsilon(&self) -> Self {
            let mut one = Float::with_val(self.0.prec(), 1.0);
            one >>= self.0.prec() - 1;
            MpReal(one)
        }
    }

    /// Reference dilogarithm from MPFR, used as an independent oracle in
    /// tests for the crate's own implementation.
    pub fn mpfr_li2(x: &MpReal) -> MpReal {
        MpReal(x.0.li2_ref().complete(x.0.prec()))
    }
}

#[cfg(all(feature = "extended", not(target_arch = "wasm32")))]
pub use mp::{mpfr_li2, MpReal};

/// Total order helper for sorting f64 node tables.
pub(crate) fn cmp_f64(a: &f64, b: &f64) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}
