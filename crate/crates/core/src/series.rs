//! Truncated one-variable power series over 𝔽_ℓ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeff::{Coeff, Prime};
use crate::error::{Error, Result};

/// `Σ_{k ≤ N} a_k u^k`, exact modulo `u^{N+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    var: String,
    prime: Prime,
    coeffs: Vec<u32>,
}

impl Series {
    /// Series with the given integer coefficients, padded or truncated to `order`.
    pub fn new(var: &str, prime: Prime, coeffs: &[i64], order: usize) -> Series {
        let mut c: Vec<u32> = coeffs.iter().map(|&x| prime.reduce_signed(x)).collect();
        c.resize(order + 1, 0);
        Series {
            var: var.to_string(),
            prime,
            coeffs: c,
        }
    }

    pub fn one(var: &str, prime: Prime, order: usize) -> Series {
        Series::new(var, prime, &[1], order)
    }

    /// `c·u^k` truncated at `order`.
    pub fn monomial(var: &str, prime: Prime, k: usize, c: i64, order: usize) -> Series {
        let mut v = vec![0i64; k + 1];
        v[k] = c;
        Series::new(var, prime, &v, order)
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u32 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn coefficient(&self, k: usize) -> Coeff {
        Coeff::new(self.prime, self.coeff(k) as i64)
    }

    pub fn constant_term(&self) -> Coeff {
        self.coefficient(0)
    }

    /// Truncates to `order`; a larger `order` leaves the series unchanged.
    pub fn truncate(&self, order: usize) -> Series {
        let keep = order.min(self.order());
        Series {
            var: self.var.clone(),
            prime: self.prime,
            coeffs: self.coeffs[..=keep].to_vec(),
        }
    }

    fn check(&self, other: &Series) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::usage("series over different primes"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.prime.add(self.coeff(k), other.coeff(k)))
            .collect();
        Ok(Series {
            var: self.var.clone(),
            prime: self.prime,
            coeffs,
        })
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let n = self.order().min(other.order());
        let p = self.prime;
        let mut coeffs = vec![0u32; n + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                coeffs[i + j] = p.add(coeffs[i + j], p.mul(a, b));
            }
        }
        Ok(Series {
            var: self.var.clone(),
            prime: p,
            coeffs,
        })
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut acc = Series::one(&self.var, self.prime, self.order());
        for _ in 0..k {
            acc = acc.mul(self).expect("same prime");
        }
        acc
    }

    pub fn scale(&self, c: i64) -> Series {
        let c = self.prime.reduce_signed(c);
        Series {
            var: self.var.clone(),
            prime: self.prime,
            coeffs: self.coeffs.iter().map(|&a| self.prime.mul(a, c)).collect(),
        }
    }

    /// Multiplicative inverse modulo `u^{N+1}`.
    pub fn invert(&self) -> Result<Series> {
        let p = self.prime;
        let inv0 = p.inv(self.coeff(0)).ok_or(Error::NotInvertible)?;
        let n = self.order();
        let mut b = vec![0u32; n + 1];
        b[0] = inv0;
        for k in 1..=n {
            let mut s = 0;
            for i in 1..=k {
                s = p.add(s, p.mul(self.coeff(i), b[k - i]));
            }
            b[k] = p.neg(p.mul(inv0, s));
        }
        Ok(Series {
            var: self.var.clone(),
            prime: p,
            coeffs: b,
        })
    }

    /// `s(u)/u`, defined when the constant term vanishes. The result has order `N - 1`.
    pub fn divide_by_var(&self) -> Result<Series> {
        if self.coeff(0) != 0 {
            return Err(Error::ContractViolation(format!(
                "series {self} is not divisible by {}",
                self.var
            )));
        }
        let coeffs = if self.coeffs.len() > 1 {
            self.coeffs[1..].to_vec()
        } else {
            vec![0]
        };
        Ok(Series {
            var: self.var.clone(),
            prime: self.prime,
            coeffs,
        })
    }

    pub fn is_one(&self) -> bool {
        self.coeff(0) == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => self.var.clone(),
                _ => format!("{}^{}", self.var, k),
            };
            parts.push(match (c, k) {
                (c, 0) => c.to_string(),
                (1, _) => mono,
                (c, _) => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}
