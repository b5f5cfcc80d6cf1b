use crate::error::{Error, Result};

/// Upper bound on the number of combinations a brute-force check may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumCap(pub u128);

impl EnumCap {
    /// Default for the combinatorial oracles in [`crate::verify`].
    pub const VERIFY: EnumCap = EnumCap(1_000_000);
    /// Default for exhaustive codeword enumeration in [`crate::codes`].
    pub const CODEWORDS: EnumCap = EnumCap(100_000);

    pub fn ensure(self, needed: u128) -> Result<()> {
        if needed <= self.0 {
            Ok(())
        } else {
            Err(Error::EnumerationCap { needed, cap: self.0 })
        }
    }
}

impl Default for EnumCap {
    fn default() -> Self {
        EnumCap::VERIFY
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn pow_saturating(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
