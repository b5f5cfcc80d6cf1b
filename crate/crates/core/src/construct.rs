//! Measurement-matrix constructions.
//!
//! Random ensembles (Gaussian, Bernoulli, constant column weight), Robust
//! UFFs derived from GV codes, the stacked group-testing/Gaussian matrix,
//! and the Gaussian row-count calculator.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::codes::{gv_block_length, gv_code_with_length, QaryCode};
use crate::enumerate::{pow_saturating, EnumCap};
use crate::error::{Error, Result};
use crate::field::smallest_supported_order_at_least;
use crate::matrix::{BinaryMatrix, MeasurementMatrix, RealMatrix};

/// `n` subsets of `[m]` (0-based), each of size `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    universe: usize,
    d: usize,
    sets: Vec<Vec<usize>>,
}

impl SetFamily {
    pub fn new(universe: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() || universe == 0 {
            return Err(Error::param("sets", "family needs at least one set over a nonempty universe"));
        }
        for s in sets.iter_mut() {
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&e| e >= universe) {
                return Err(Error::param("sets", alloc::format!("element {bad} outside universe {universe}")));
            }
        }
        let d = sets[0].len();
        if let Some(s) = sets.iter().find(|s| s.len() != d) {
            return Err(Error::param("sets", alloc::format!("set sizes differ ({} vs {d})", s.len())));
        }
        Ok(SetFamily { universe, d, sets })
    }

    pub fn n_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn set_size(&self) -> usize {
        self.d
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    /// `m × n` matrix with entry `(i, j) = 1` iff `i ∈ B_j`.
    pub fn incidence_matrix(&self) -> BinaryMatrix {
        let mut b = BinaryMatrix::zeros(self.universe, self.sets.len()).expect("nonempty family");
        for (j, s) in self.sets.iter().enumerate() {
            for &i in s {
                b.set(i, j, true);
            }
        }
        b
    }

    pub fn truncate(&mut self, n: usize) {
        self.sets.truncate(n.max(1));
    }
}

/// Target accuracy and failure budget for approximate recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryParams {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub eta: f64,
}

impl RecoveryParams {
    /// Failure probability used when only "with high probability" is asked for.
    pub const DEFAULT_ETA: f64 = 0.01;

    pub fn new(n: usize, k: usize, eps: f64, eta: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::param("k", alloc::format!("need 1 <= k <= n, got k={k}, n={n}")));
        }
        if !(eps > 0.0 && eps <= 2.0) {
            return Err(Error::param("eps", alloc::format!("{eps} is outside (0, 2]")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::param("eta", alloc::format!("{eta} is outside (0, 1)")));
        }
        Ok(RecoveryParams { n, k, eps, eta })
    }
}

/// A binary group-testing block stacked on a Gaussian block.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedMatrix {
    pub top: BinaryMatrix,
    pub bottom: RealMatrix,
}

impl StackedMatrix {
    pub fn new(top: BinaryMatrix, bottom: RealMatrix) -> Result<Self> {
        Error::check_dim(top.ncols(), bottom.ncols())?;
        Ok(StackedMatrix { top, bottom })
    }

    pub fn m1(&self) -> usize {
        self.top.nrows()
    }

    pub fn m2(&self) -> usize {
        self.bottom.nrows()
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<RealMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::param("shape", "gaussian matrix needs m, n >= 1"));
    }
    let data = (0..m * n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(RealMatrix::from_raw(m, n, data))
}

pub fn bernoulli_matrix<R: Rng + ?Sized>(m: usize, n: usize, p: f64, rng: &mut R) -> Result<BinaryMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", alloc::format!("{p} is outside [0, 1]")));
    }
    let data = (0..m * n).map(|_| u8::from(rng.random::<f64>() < p)).collect();
    BinaryMatrix::from_row_major(m, n, data)
}

/// The group-testing density used throughout: `1/(k+1)`.
pub fn default_bernoulli_p(k: usize) -> f64 {
    1.0 / (k as f64 + 1.0)
}

/// Group-testing rows for the stacked experiment: `round(4k·log10 n)`.
pub fn superset_rows(n: usize, k: usize) -> usize {
    libm::round(4.0 * k as f64 * libm::log10(n as f64)) as usize
}

/// One set per codeword: `B_u = { i·q + c_i(u) : i < d }` over the universe `[q·d]`.
///
/// Messages are taken in lexicographic order.
pub fn ruff_from_code(code: &QaryCode, cap: EnumCap) -> Result<SetFamily> {
    cap.ensure(code.num_codewords())?;
    let q = code.q();
    let sets = (0..code.num_codewords() as usize)
        .map(|idx| {
            let word = code.encode(&code.message(idx))?;
            Ok(word.iter().enumerate().map(|(i, &c)| i * q + c as usize).collect())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    SetFamily::new(q * code.block_len(), sets)
}

/// Parameters picked by [`explicit_ruff`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitRuff {
    pub family: SetFamily,
    pub incidence: BinaryMatrix,
    pub code: QaryCode,
    pub k: usize,
    pub alpha: f64,
}

/// An `(n_target, q·d, d, k, α)`-Robust UFF from a GV code.
///
/// Uses `q` = smallest supported prime power `>= 2k/α` and relative distance
/// `(k-α)/k`. Pairwise intersections below `(α/k)·d` lift the single-set
/// property to unions of `k` sets.
pub fn explicit_ruff(n_target: usize, k: usize, alpha: f64, cap: EnumCap) -> Result<ExplicitRuff> {
    if n_target < 2 {
        return Err(Error::param("n_target", "need at least two sets"));
    }
    if k == 0 {
        return Err(Error::param("k", "need k >= 1"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", alloc::format!("{alpha} is outside (0, 1]")));
    }
    let q = smallest_supported_order_at_least(2.0 * k as f64 / alpha)
        .ok_or_else(|| Error::infeasible("q", alloc::format!("no supported field of order >= {}", 2.0 * k as f64 / alpha)))?;
    let delta = (k as f64 - alpha) / k as f64;
    let mut msg_len = 1;
    while pow_saturating(q, msg_len) < n_target as u128 {
        msg_len += 1;
    }
    let needed = pow_saturating(q, msg_len);
    if needed > cap.0 {
        return Err(Error::infeasible(
            "q^msg_len",
            alloc::format!("{q}^{msg_len} = {needed} codewords exceeds the enumeration cap {}", cap.0),
        ));
    }

    let d0 = gv_block_length(q, msg_len, delta)?;
    // Grow d until the strict intersection bound holds for every pair.
    for d in d0..d0 + 64 {
        let code = gv_code_with_length(q, msg_len, delta, d, cap)?;
        let mut family = ruff_from_code(&code, cap)?;
        family.truncate(n_target);
        if ((k * max_pairwise_intersection(&family)) as f64) < alpha * d as f64 {
            let incidence = family.incidence_matrix();
            return Ok(ExplicitRuff { family, incidence, code, k, alpha });
        }
    }
    Err(Error::infeasible("d", "pairwise intersections never dropped below alpha*d/k"))
}

pub(crate) fn max_pairwise_intersection(family: &SetFamily) -> usize {
    let sets = family.sets();
    let mut best = 0;
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            best = best.max(sorted_intersection_len(&sets[a], &sets[b]));
        }
    }
    best
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Each column's support is an independent uniform `⌊m/k⌋`-subset of `[m]`.
pub fn constant_weight_random<R: Rng + ?Sized>(m: usize, n: usize, k: usize, rng: &mut R) -> Result<BinaryMatrix> {
    if k == 0 {
        return Err(Error::param("k", "need k >= 1"));
    }
    let d = m / k;
    if d == 0 {
        return Err(Error::param("m", alloc::format!("column weight floor({m}/{k}) is 0")));
    }
    let mut b = BinaryMatrix::zeros(m, n)?;
    let mut rows: Vec<usize> = (0..m).collect();
    for j in 0..n {
        rows.sort_unstable();
        let (chosen, _) = rows.partial_shuffle(rng, d);
        for &i in chosen.iter() {
            b.set(i, j, true);
        }
    }
    Ok(b)
}

/// Gaussian rows sufficient for universal ε-approximate recovery:
///
/// ```text
/// m >= (10/ε) · ( 2k·ln((9e·n^{3/2} + 9e·n) / (kε)) + ln(1/η) )
/// ```
pub fn gaussian_rows_needed(params: &RecoveryParams) -> usize {
    let RecoveryParams { n, k, eps, eta } = *params;
    let (n, k) = (n as f64, k as f64);
    let e = core::f64::consts::E;
    let inner = (9.0 * e * libm::pow(n, 1.5) + 9.0 * e * n) / (k * eps);
    let rhs = (10.0 / eps) * (2.0 * k * libm::log(inner) + libm::log(1.0 / eta));
    libm::ceil(rhs).max(1.0) as usize
}

/// Library path: `m2` from [`gaussian_rows_needed`].
pub fn stacked_matrix<R: Rng + ?Sized>(
    params: &RecoveryParams,
    p: f64,
    m1: usize,
    rng: &mut R,
) -> Result<StackedMatrix> {
    if m1 == 0 {
        return Err(Error::param("m1", "need m1 >= 1"));
    }
    let m2 = gaussian_rows_needed(params);
    sample_stacked(params.n, m1, m2, p, rng)
}

/// Experiment path: `m2 = m_total - m1`.
pub fn stacked_matrix_with_total<R: Rng + ?Sized>(
    n: usize,
    m_total: usize,
    m1: usize,
    p: f64,
    rng: &mut R,
) -> Result<StackedMatrix> {
    if m1 == 0 {
        return Err(Error::param("m1", "need m1 >= 1"));
    }
    if m_total <= m1 {
        return Err(Error::param(
            "m",
            alloc::format!("total rows {m_total} leave no Gaussian rows after m1={m1}"),
        ));
    }
    sample_stacked(n, m1, m_total - m1, p, rng)
}

fn sample_stacked<R: Rng + ?Sized>(n: usize, m1: usize, m2: usize, p: f64, rng: &mut R) -> Result<StackedMatrix> {
    let top = bernoulli_matrix(m1, n, p, rng)?;
    let bottom = gaussian_matrix(m2, n, rng)?;
    StackedMatrix::new(top, bottom)
}
