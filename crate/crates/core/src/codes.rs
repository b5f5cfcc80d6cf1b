//! q-ary linear codes meeting the Gilbert–Varshamov bound.
//!
//! [`gv_code_construct`] derandomizes the random-linear-code argument with
//! the method of conditional expectations. Generator entries are fixed one
//! at a time (column by column, top to bottom within a column). Each entry
//! takes the field element minimizing
//!
//! ```text
//! Σ_{u ≠ 0} Pr[ wt(uG) < t ]
//! ```
//!
//! where the probability is over the still-undetermined entries, drawn
//! uniformly from `F_q`, and `t = ⌈δ·d⌉`. When the GV inequality
//! `msg_len <= (1 - H_q(δ))·d` holds and `δ <= (q-1)/q`, the estimator
//! starts below one. Greedy choices never increase it, so it ends at zero
//! and every nonzero codeword has weight at least `t`.

use alloc::vec::Vec;

use crate::enumerate::{pow_saturating, EnumCap};
use crate::error::{Error, Result};
use crate::field::GaloisField;

/// `H_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x)`, with `0 log 0 = 0`.
pub fn q_entropy(q: usize, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::param("q", "alphabet size must be at least 2"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param("x", alloc::format!("{x} is outside [0, 1]")));
    }
    let ln_q = libm::log(q as f64);
    let xlogx = |v: f64| if v == 0.0 { 0.0 } else { v * libm::log(v) };
    let h = (x * libm::log((q - 1) as f64) - xlogx(x) - xlogx(1.0 - x)) / ln_q;
    Ok(h.clamp(0.0, 1.0))
}

/// Smallest `t` with `t >= δ·d`.
pub fn distance_target(delta: f64, d: usize) -> usize {
    libm::ceil(delta * d as f64 - 1e-9).max(0.0) as usize
}

/// Smallest block length `d` with `msg_len <= (1 - H_q(δ))·d`.
pub fn gv_block_length(q: usize, msg_len: usize, delta: f64) -> Result<usize> {
    let rate = 1.0 - q_entropy(q, delta)?;
    if rate <= 0.0 {
        return Err(Error::infeasible(
            "delta",
            alloc::format!("H_{q}({delta}) >= 1 leaves no positive rate"),
        ));
    }
    let fits = |d: usize| msg_len as f64 <= rate * d as f64;
    let mut d = libm::ceil(msg_len as f64 / rate).max(1.0) as usize;
    while d > 1 && fits(d - 1) {
        d -= 1;
    }
    while !fits(d) {
        d += 1;
    }
    Ok(d)
}

/// A linear code over `F_q` given by a `msg_len × d` generator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QaryCode {
    field: GaloisField,
    msg_len: usize,
    d: usize,
    delta: f64,
    generator: Vec<u8>,
}

impl QaryCode {
    /// Wraps a row-major generator; `delta` is the advertised relative distance.
    pub fn new(q: usize, msg_len: usize, d: usize, delta: f64, generator: Vec<u8>) -> Result<Self> {
        let field = GaloisField::new(q)?;
        if msg_len == 0 || d == 0 {
            return Err(Error::param("shape", "generator needs msg_len >= 1 and d >= 1"));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::param("delta", alloc::format!("{delta} is outside [0, 1]")));
        }
        Error::check_dim(msg_len * d, generator.len())?;
        if let Some(&s) = generator.iter().find(|&&s| !field.contains(s)) {
            return Err(Error::param("generator", alloc::format!("symbol {s} is not in F_{q}")));
        }
        Ok(QaryCode { field, msg_len, d, delta, generator })
    }

    /// The binary repetition code `{0^d, 1^d}`.
    pub fn repetition(d: usize) -> Result<Self> {
        Self::new(2, 1, d, 1.0, alloc::vec![1; d])
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn msg_len(&self) -> usize {
        self.msg_len
    }

    pub fn block_len(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rate(&self) -> f64 {
        self.msg_len as f64 / self.d as f64
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn generator_row(&self, i: usize) -> &[u8] {
        &self.generator[i * self.d..(i + 1) * self.d]
    }

    /// `q^msg_len`, saturating.
    pub fn num_codewords(&self) -> u128 {
        pow_saturating(self.q(), self.msg_len)
    }

    /// Message number `index` in lexicographic order (first symbol most significant).
    pub fn message(&self, index: usize) -> Vec<u8> {
        message_digits(index, self.q(), self.msg_len)
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        Error::check_dim(self.msg_len, message.len())?;
        if let Some(&s) = message.iter().find(|&&s| !self.field.contains(s)) {
            return Err(Error::param("message", alloc::format!("symbol {s} is not in F_{}", self.q())));
        }
        let f = &self.field;
        let mut word = alloc::vec![0u8; self.d];
        for (i, &u) in message.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (w, &g) in word.iter_mut().zip(self.generator_row(i)) {
                *w = f.add(*w, f.mul(u, g));
            }
        }
        Ok(word)
    }

    /// Minimum Hamming weight over all nonzero codewords, by enumeration.
    pub fn min_distance(&self, cap: EnumCap) -> Result<usize> {
        cap.ensure(self.num_codewords())?;
        let count = self.num_codewords() as usize;
        (1..count)
            .map(|idx| {
                let w = self.encode(&self.message(idx)).expect("enumerated message is valid");
                w.iter().filter(|&&s| s != 0).count()
            })
            .min()
            .ok_or_else(|| Error::param("msg_len", "code has no nonzero codewords"))
    }
}

pub(crate) fn message_digits(mut index: usize, q: usize, len: usize) -> Vec<u8> {
    let mut digits = alloc::vec![0u8; len];
    for slot in digits.iter_mut().rev() {
        *slot = (index % q) as u8;
        index /= q;
    }
    digits
}

/// Builds a GV code at the minimal feasible block length.
pub fn gv_code_construct(q: usize, msg_len: usize, delta: f64, cap: EnumCap) -> Result<QaryCode> {
    let d = gv_block_length(q, msg_len, delta)?;
    gv_code_with_length(q, msg_len, delta, d, cap)
}

/// The greedy derandomized construction at a caller-chosen block length.
pub fn gv_code_with_length(q: usize, msg_len: usize, delta: f64, d: usize, cap: EnumCap) -> Result<QaryCode> {
    greedy_generator(q, msg_len, delta, d, cap, None)
}

fn greedy_generator(
    q: usize,
    msg_len: usize,
    delta: f64,
    d: usize,
    cap: EnumCap,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<QaryCode> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", alloc::format!("{delta} is outside (0, 1]")));
    }
    if msg_len == 0 || d == 0 {
        return Err(Error::param("shape", "need msg_len >= 1 and d >= 1"));
    }
    let field = GaloisField::new(q)?;
    cap.ensure(pow_saturating(q, msg_len))?;
    let n_msgs = pow_saturating(q, msg_len) as usize;
    let target = distance_target(delta, d);
    let tail = BinomialTail::new(d, (q - 1) as f64 / q as f64, target);

    let messages: Vec<Vec<u8>> = (1..n_msgs).map(|i| message_digits(i, q, msg_len)).collect();
    let last_nonzero: Vec<usize> = messages
        .iter()
        .map(|u| u.iter().rposition(|&s| s != 0).expect("nonzero message"))
        .collect();
    // weight over completed columns, and running symbol of the current column
    let mut weight = alloc::vec![0usize; messages.len()];
    let mut symbol = alloc::vec![0u8; messages.len()];
    let mut generator = alloc::vec![0u8; msg_len * d];

    for col in 0..d {
        let after = d - col - 1;
        for row in 0..msg_len {
            // Only messages whose last nonzero digit is `row` become fully
            // determined in this column; everything else is unaffected by
            // the choice of this entry.
            let mut best: Option<(f64, u8)> = None;
            for g in 0..q as u8 {
                let mut score = 0.0;
                for (idx, u) in messages.iter().enumerate() {
                    if last_nonzero[idx] != row {
                        continue;
                    }
                    let s = field.add(symbol[idx], field.mul(u[row], g));
                    score += tail.below(after, weight[idx] + usize::from(s != 0));
                }
                if best.is_none_or(|(b, _)| score < b) {
                    best = Some((score, g));
                }
            }
            let (_, g) = best.expect("q >= 2 candidates");
            generator[row * d + col] = g;
            for (idx, u) in messages.iter().enumerate() {
                if u[row] != 0 {
                    symbol[idx] = field.add(symbol[idx], field.mul(u[row], g));
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.push(estimator(&tail, d, col, row, &last_nonzero, &weight, &symbol));
            }
        }
        for idx in 0..messages.len() {
            weight[idx] += usize::from(symbol[idx] != 0);
            symbol[idx] = 0;
        }
    }

    let bad = weight.iter().filter(|&&w| w < target).count();
    if bad > 0 {
        return Err(Error::infeasible(
            "d",
            alloc::format!("{bad} nonzero codewords stay below weight {target} at d={d}"),
        ));
    }
    QaryCode::new(q, msg_len, d, delta, generator)
}

/// Full pessimistic estimator after entry `(row, col)` has been fixed.
fn estimator(
    tail: &BinomialTail,
    d: usize,
    col: usize,
    row: usize,
    last_nonzero: &[usize],
    weight: &[usize],
    symbol: &[u8],
) -> f64 {
    (0..weight.len())
        .map(|idx| {
            if last_nonzero[idx] > row {
                tail.below(d - col, weight[idx])
            } else {
                tail.below(d - col - 1, weight[idx] + usize::from(symbol[idx] != 0))
            }
        })
        .sum()
}

/// `Pr[w + Bin(r, p) < target]` for all `r, w <= d`.
struct BinomialTail {
    d: usize,
    target: usize,
    // cdf[r][j] = Pr[Bin(r, p) <= j]
    cdf: Vec<Vec<f64>>,
}

impl BinomialTail {
    fn new(d: usize, p: f64, target: usize) -> Self {
        let mut cdf = Vec::with_capacity(d + 1);
        let mut pmf = alloc::vec![1.0];
        for r in 0..=d {
            if r > 0 {
                let mut next = alloc::vec![0.0; r + 1];
                for (j, &v) in pmf.iter().enumerate() {
                    next[j] += v * (1.0 - p);
                    next[j + 1] += v * p;
                }
                pmf = next;
            }
            let mut acc = 0.0;
            cdf.push(pmf.iter().map(|v| {
                acc += v;
                acc
            }).collect());
        }
        BinomialTail { d, target, cdf }
    }

    fn below(&self, remaining: usize, weight: usize) -> f64 {
        debug_assert!(remaining <= self.d);
        if weight >= self.target {
            return 0.0;
        }
        let need = self.target - weight; // Bin(remaining) <= need - 1
        let row: &Vec<f64> = &self.cdf[remaining];
        if need < row.len() {
            row[need - 1]
        } else {
            1.0
        }
    }
}
