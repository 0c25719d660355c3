//! Non-negative binary fixed point with a few hundred fractional bits.
//!
//! `f64` runs out of digits long before the root estimates stop moving, so
//! evaluations and bisections work in [`Fixed`]. Products round down, which
//! keeps every evaluation of a polynomial with non-negative coefficients a
//! lower bound of the exact value.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Fractional bits.
pub const PREC: u32 = 320;
/// Values are clamped here. The cap is far above every level the root
/// finders compare against, and wide enough for the coefficients of the
/// explicit polynomials up to `h = 12`.
const CAP_BITS: u64 = PREC as u64 + (1 << 14);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(BigUint);

impl Fixed {
    pub fn zero() -> Self {
        Self(BigUint::zero())
    }

    pub fn one() -> Self {
        Self(BigUint::one() << PREC)
    }

    pub fn from_int(v: &BigUint) -> Self {
        Self(v << PREC).clamped()
    }

    pub fn from_ratio(p: u64, q: u64) -> Self {
        assert!(q > 0);
        Self((BigUint::from(p) << PREC) / q)
    }

    /// Exact conversion of a finite non-negative float.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite() && x >= 0.0, "{x} is not a finite non-negative value");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let (mantissa, exp) = if exp == 0 { (bits & ((1 << 52) - 1), -1074) } else { ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075) };
        let shift = exp + PREC as i64;
        let m = BigUint::from(mantissa);
        Self(if shift >= 0 { m << shift as u64 } else { m >> (-shift) as u64 }).clamped()
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        assert!(k <= PREC);
        Self(BigUint::one() << (PREC - k))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self(&self.0 + &o.0).clamped()
    }

    /// Difference, or zero when `o` exceeds `self`.
    pub fn sub_sat(&self, o: &Self) -> Self {
        if o.0 >= self.0 {
            Self::zero()
        } else {
            Self(&self.0 - &o.0)
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self((&self.0 * &o.0) >> PREC).clamped()
    }

    pub fn mul_int(&self, k: &BigUint) -> Self {
        Self(&self.0 * k).clamped()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Midpoint, rounded down.
    pub fn mid(&self, o: &Self) -> Self {
        Self((&self.0 + &o.0) >> 1u32)
    }

    pub fn double(&self) -> Self {
        Self(&self.0 << 1u32).clamped()
    }

    pub fn half(&self) -> Self {
        Self(&self.0 >> 1u32)
    }

    pub fn is_saturated(&self) -> bool {
        self.0.bits() >= CAP_BITS
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.0.bits();
        // Keep 64 significant bits, then scale.
        let drop = bits.saturating_sub(64);
        let top = (&self.0 >> drop).to_u64().unwrap() as f64;
        top * 2f64.powi(drop as i32 - PREC as i32)
    }

    /// Decimal expansion truncated to `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let int = &self.0 >> PREC;
        let frac = &self.0 - (&int << PREC);
        let scaled = (frac * BigUint::from(10u32).pow(digits as u32)) >> PREC;
        format!("{int}.{scaled:0>digits$}")
    }

    fn clamped(self) -> Self {
        if self.0.bits() > CAP_BITS {
            Self(BigUint::one() << CAP_BITS)
        } else {
            self
        }
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(20)))
    }
}

/// Closed interval `[lo, hi]` known to contain a quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Fixed,
    pub hi: Fixed,
}

impl Interval {
    pub fn new(lo: Fixed, hi: Fixed) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn mid(&self) -> Fixed {
        self.lo.mid(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn width(&self) -> Fixed {
        self.hi.sub_sat(&self.lo)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = Fixed::from_f64(x);
        self.lo <= x && x <= self.hi
    }

    /// Whether the interval meets `[a, b)`.
    pub fn meets(&self, a: f64, b: f64) -> bool {
        self.hi >= Fixed::from_f64(a) && self.lo < Fixed::from_f64(b)
    }

    pub fn cmp_mid(&self, o: &Self) -> Ordering {
        self.mid().cmp(&o.mid())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = f.precision().unwrap_or(20);
        write!(f, "[{}, {}]", self.lo.to_decimal(d), self.hi.to_decimal(d))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.lo_f64(), self.hi_f64()].serialize(s)
    }
}
