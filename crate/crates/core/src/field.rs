//! Arithmetic in the prime field `F_p`.
//!
//! Hot loops work on raw `u32` residues together with a [`PrimeField`]
//! context; [`FpScalar`] is the self-describing value type used at API
//! boundaries, where moduli have to be checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The field `F_p` for an odd prime `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u32,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// Moduli are restricted to odd primes below 128 so that packed
    /// exponent bytes never overflow (see `truncpoly`).
    pub fn new(p: u32) -> Result<Self> {
        if p < 3 || p >= 128 || !is_prime(p) {
            return Err(Error::InvalidModulus(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.p == 0 {
            return Err(Error::DivisionByZero { p: self.p });
        }
        Ok(self.pow(a, (self.p - 2) as u64))
    }

    /// Inverse of a value already known to be nonzero.
    #[inline]
    pub(crate) fn inv_nz(self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0);
        self.pow(a, (self.p - 2) as u64)
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        0..self.p
    }

    /// Signed representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

/// A residue together with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

/// Operations accepted by [`fp_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpOp {
    Add,
    Mul,
    Inv,
    Neg,
}

impl FpScalar {
    pub fn new(value: i64, field: PrimeField) -> Self {
        FpScalar { value: field.reduce(value), p: field.p() }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    fn check(self, other: FpScalar) -> Result<PrimeField> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch { left: self.p, right: other.p });
        }
        Ok(self.field())
    }

    pub fn try_add(self, other: FpScalar) -> Result<FpScalar> {
        let f = self.check(other)?;
        Ok(FpScalar { value: f.add(self.value, other.value), p: self.p })
    }

    pub fn try_mul(self, other: FpScalar) -> Result<FpScalar> {
        let f = self.check(other)?;
        Ok(FpScalar { value: f.mul(self.value, other.value), p: self.p })
    }

    pub fn neg(self) -> FpScalar {
        FpScalar { value: self.field().neg(self.value), p: self.p }
    }

    pub fn inv(self) -> Result<FpScalar> {
        Ok(FpScalar { value: self.field().inv(self.value)?, p: self.p })
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.p)
    }
}

/// Residue arithmetic; `b` is ignored for the unary operations.
pub fn fp_arith(a: FpScalar, b: FpScalar, op: FpOp) -> Result<FpScalar> {
    match op {
        FpOp::Add => a.try_add(b),
        FpOp::Mul => a.try_mul(b),
        FpOp::Inv => a.inv(),
        FpOp::Neg => Ok(a.neg()),
    }
}
