//! Prime-field coefficients.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The field 𝔽_ℓ. All raw arithmetic in the crate goes through this type.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.0 as u64) as u32
    }

    #[inline]
    pub fn reduce_signed(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        self.reduce(s)
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        self.add(a, self.0 - b % self.0)
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        self.reduce(a as u64 * b as u64)
    }

    pub fn pow(self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0 as u64 - 2))
        }
    }
}

impl TryFrom<u32> for Prime {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Prime::new(p)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A residue in `[0, ℓ)` together with its modulus.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coeff {
    modulus: Prime,
    value: u32,
}

impl Coeff {
    pub fn new(modulus: Prime, value: i64) -> Self {
        Coeff {
            modulus,
            value: modulus.reduce_signed(value),
        }
    }

    pub fn zero(modulus: Prime) -> Self {
        Coeff { modulus, value: 0 }
    }

    pub fn one(modulus: Prime) -> Self {
        Coeff::new(modulus, 1)
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_unit(&self) -> bool {
        self.value != 0
    }

    fn check(&self, other: &Coeff) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::usage(format!(
                "coefficients mod {} and mod {} cannot be combined",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Coeff) -> Result<Coeff> {
        self.check(other)?;
        Ok(Coeff {
            modulus: self.modulus,
            value: self.modulus.add(self.value, other.value),
        })
    }

    pub fn mul(&self, other: &Coeff) -> Result<Coeff> {
        self.check(other)?;
        Ok(Coeff {
            modulus: self.modulus,
            value: self.modulus.mul(self.value, other.value),
        })
    }

    pub fn neg(&self) -> Coeff {
        Coeff {
            modulus: self.modulus,
            value: self.modulus.neg(self.value),
        }
    }

    pub fn inv(&self) -> Result<Coeff> {
        self.modulus
            .inv(self.value)
            .map(|value| Coeff {
                modulus: self.modulus,
                value,
            })
            .ok_or(Error::NotInvertible)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
