//! Factorials, binomials, time budgets and decimal rendering.

use std::time::Duration;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Integer, Rational};

/// Exact factorial table `0!, 1!, ..., n!`.
#[derive(Debug, Clone)]
pub struct Factorials {
    table: Vec<BigInt>,
}

impl Factorials {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(BigInt::one());
        for i in 1..=n {
            let next = &table[i - 1] * BigInt::from(i);
            table.push(next);
        }
        Factorials { table }
    }

    pub fn factorial(&self, n: usize) -> &BigInt {
        &self.table[n]
    }

    pub fn binomial(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            return BigInt::zero();
        }
        &self.table[n] / (&self.table[k] * &self.table[n - k])
    }

    /// `|k|! / Π k_i!`.
    pub fn multinomial(&self, k: &[usize]) -> BigInt {
        let total: usize = k.iter().sum();
        let denom = k.iter().fold(BigInt::one(), |acc, &ki| acc * &self.table[ki]);
        &self.table[total] / denom
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Optional wall-clock deadline. A budget without a limit never reads the
/// clock, which keeps it usable on targets without one.
#[derive(Debug, Clone, Copy, Default)]
pub struct Budget {
    deadline: Option<std::time::Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn within(limit: Duration) -> Self {
        Budget {
            deadline: Some(std::time::Instant::now() + limit),
        }
    }

    pub fn check(&self) -> Result<()> {
        match self.deadline {
            Some(d) if std::time::Instant::now() > d => Err(Error::Timeout),
            _ => Ok(()),
        }
    }
}

/// Renders `r` rounded half away from zero to `places` decimals.
pub fn to_decimal(r: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = r.numer().abs() * &scale;
    let (q, rem) = scaled.div_rem(r.denom());
    let q = if rem * 2u32 >= *r.denom() { q + 1u32 } else { q };
    let digits = q.to_string();
    let (whole, frac) = if places == 0 {
        (digits, String::new())
    } else if digits.len() > places {
        let (a, b) = digits.split_at(digits.len() - places);
        (a.to_string(), b.to_string())
    } else {
        ("0".to_string(), format!("{digits:0>places$}"))
    };
    let sign = if r.is_negative() && !q_is_zero(&whole, &frac) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

fn q_is_zero(whole: &str, frac: &str) -> bool {
    whole.chars().chain(frac.chars()).all(|c| c == '0')
}

/// `a / b` as an exact integer, or `None` if it does not divide.
pub fn exact_integer(r: &Rational) -> Option<Integer> {
    r.is_integer().then(|| r.to_integer())
}
