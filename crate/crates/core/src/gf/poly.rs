use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::real::Fixed;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Largest number of coefficients a polynomial may hold.
pub const MAX_TERMS: usize = 1 << 16;

/// Polynomial with non-negative integer coefficients, index = degree.
/// With a truncation degree, products drop every term above it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigUint>,
    trunc: Option<usize>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigUint>, trunc: Option<usize>) -> Self {
        let mut p = Self { coeffs, trunc };
        p.normalize();
        p
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigUint::from(c)).collect(), None)
    }

    pub fn one() -> Self {
        Self::from_u64s(&[1])
    }

    /// `z`.
    pub fn z() -> Self {
        Self::from_u64s(&[0, 1])
    }

    pub fn with_truncation(mut self, trunc: Option<usize>) -> Self {
        self.trunc = trunc;
        self.normalize();
        self
    }

    pub fn truncation(&self) -> Option<usize> {
        self.trunc
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> BigUint {
        self.coeffs.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Smallest degree with a non-zero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Sum of the coefficients.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        let (long, short) = if self.coeffs.len() >= o.coeffs.len() { (self, o) } else { (o, self) };
        let mut c = long.coeffs.clone();
        for (x, y) in c.iter_mut().zip(&short.coeffs) {
            *x += y;
        }
        Self::new(c, min_trunc(self.trunc, o.trunc))
    }

    pub fn scale(&self, k: &BigUint) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect(), self.trunc)
    }

    pub fn mul(&self, o: &Self, exec: Execution) -> Result<Self> {
        let trunc = min_trunc(self.trunc, o.trunc);
        if self.is_zero() || o.is_zero() {
            return Ok(Self::new(Vec::new(), trunc));
        }
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = trunc.map_or(full, |t| full.min(t + 1));
        if len > MAX_TERMS {
            return Err(Error::Resource(format!("product with {len} terms exceeds {MAX_TERMS}")));
        }
        let (a, b) = (&self.coeffs, &o.coeffs);
        let coeffs = par::map_range(0..len, exec, |d| {
            let lo = d.saturating_sub(b.len() - 1);
            let hi = d.min(a.len() - 1);
            let mut s = BigUint::zero();
            for i in lo..=hi {
                if !a[i].is_zero() && !b[d - i].is_zero() {
                    s += &a[i] * &b[d - i];
                }
            }
            s
        });
        Ok(Self::new(coeffs, trunc))
    }

    pub fn pow(&self, e: u32, exec: Execution) -> Result<Self> {
        let mut acc = Self::one().with_truncation(self.trunc);
        for _ in 0..e {
            acc = acc.mul(self, exec)?;
        }
        Ok(acc)
    }

    /// Horner evaluation in `f64`.
    pub fn eval_f64(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c.to_f64().unwrap_or(f64::INFINITY))
    }

    /// Horner evaluation in fixed point; a lower bound of the exact value.
    pub fn eval(&self, z: &Fixed) -> Fixed {
        self.coeffs.iter().rev().fold(Fixed::zero(), |acc, c| acc.mul(z).add(&Fixed::from_int(c)))
    }

    fn normalize(&mut self) {
        if let Some(t) = self.trunc {
            self.coeffs.truncate(t + 1);
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

fn min_trunc(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coeff = if c == &BigUint::from(1u32) && d > 0 { String::new() } else { c.to_string() };
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{coeff}z")?,
                _ => write!(f, "{coeff}z^{d}")?,
            }
        }
        Ok(())
    }
}
