//! Small finite fields `F_q` backed by lookup tables.
//!
//! Prime fields are integers mod `q`. The prime powers 4, 8 and 9 use
//! polynomials over `F_p` reduced by a fixed irreducible, with an element
//! encoded as the base-`p` integer of its coefficient vector.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    q: usize,
    p: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
}

impl GaloisField {
    pub fn new(q: usize) -> Result<Self> {
        if !is_supported_order(q) {
            return Err(Error::param(
                "q",
                alloc::format!("{q} is not a prime <= {MAX_ORDER} or one of 4, 8, 9"),
            ));
        }
        let (p, modulus): (usize, &[usize]) = match q {
            // coefficients low degree first, monic
            4 => (2, &[1, 1, 1]),    // x^2 + x + 1
            8 => (2, &[1, 1, 0, 1]), // x^3 + x + 1
            9 => (3, &[1, 0, 1]),    // x^2 + 1
            _ => (q, &[0, 1]),
        };
        let deg = modulus.len() - 1;
        let mut add = alloc::vec![0u8; q * q];
        let mut mul = alloc::vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let (s, t) = if deg == 1 {
                    ((a + b) % p, (a * b) % p)
                } else {
                    poly_ops(a, b, p, modulus)
                };
                add[a * q + b] = s as u8;
                mul[a * q + b] = t as u8;
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).expect("additive inverse") as u8)
            .collect();
        Ok(GaloisField { q, p, add, mul, neg })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: u8) -> Option<u8> {
        (1..self.q as u8).find(|&b| self.mul(a, b) == 1)
    }

    pub fn contains(&self, a: u8) -> bool {
        (a as usize) < self.q
    }
}

fn poly_ops(a: usize, b: usize, p: usize, modulus: &[usize]) -> (usize, usize) {
    let deg = modulus.len() - 1;
    let digits = |mut v: usize| {
        let mut d = alloc::vec![0usize; deg];
        for slot in d.iter_mut() {
            *slot = v % p;
            v /= p;
        }
        d
    };
    let (da, db) = (digits(a), digits(b));
    let sum: Vec<usize> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();

    let mut prod = alloc::vec![0usize; 2 * deg - 1];
    for (i, x) in da.iter().enumerate() {
        for (j, y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (deg..prod.len()).rev() {
        let c = prod[top];
        if c != 0 {
            // subtract c * x^(top-deg) * modulus
            for (i, &mcoef) in modulus.iter().enumerate() {
                let idx = top - deg + i;
                prod[idx] = (prod[idx] + p * p - (c * mcoef) % p) % p;
            }
        }
    }
    let pack = |d: &[usize]| d.iter().rev().fold(0, |acc, &c| acc * p + c);
    (pack(&sum), pack(&prod[..deg]))
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn is_prime_power(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n >= 2 has a divisor");
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// Orders [`GaloisField::new`] accepts.
pub fn is_supported_order(q: usize) -> bool {
    q <= MAX_ORDER && (is_prime(q) || matches!(q, 4 | 8 | 9))
}

/// Smallest supported field order `>= lower`.
pub fn smallest_supported_order_at_least(lower: f64) -> Option<usize> {
    if !lower.is_finite() {
        return None;
    }
    let start = libm::ceil(lower.max(2.0)) as usize;
    (start..=MAX_ORDER).find(|&q| is_supported_order(q))
}
