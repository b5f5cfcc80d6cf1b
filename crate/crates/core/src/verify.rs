//! Brute-force checks for the combinatorial properties, plus Monte Carlo and
//! numeric checks for the probabilistic bounds.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::construct::SetFamily;
use crate::enumerate::{binomial, EnumCap};
use crate::error::{Error, Result};
use crate::experiment::derive_trial_seed;
use crate::matrix::{BinaryMatrix, MeasurementMatrix, RealMatrix};
use crate::signal::{SparseSignal, SupportSet};

/// One line of a verification report: `PASS|FAIL name observed threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub threshold: f64,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, passed: bool, observed: f64, threshold: f64) -> Self {
        CheckReport { name: name.into(), passed, observed, threshold }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} {} {}", self.name, self.observed, self.threshold)
    }
}

/// Fixed-width bitset over rows.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits(alloc::vec![0; len.div_ceil(64)])
    }

    fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut b = Bits::zeros(len);
        for &i in idx {
            b.0[i / 64] |= 1 << (i % 64);
        }
        b
    }

    fn or_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a |= b);
    }

    fn and_count(&self, other: &Bits) -> usize {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

fn column_supports<M: MeasurementMatrix + ?Sized>(m: &M) -> Vec<Vec<usize>> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).filter(|&i| m.entry(i, j) != 0.0).collect())
        .collect()
}

fn common_weight(supports: &[Vec<usize>]) -> Result<usize> {
    let d = supports.first().map_or(0, Vec::len);
    if supports.iter().any(|s| s.len() != d) {
        return Err(Error::param("B", "columns do not share a common weight"));
    }
    Ok(d)
}

/// Largest number of columns outside some `k`-set `S` that are covered by
/// the rows of `S`. `M` is `(k, l)`-list disjunct iff this is `< l`.
pub fn list_disjunct_worst(m: &BinaryMatrix, k: usize) -> usize {
    let n = m.ncols();
    let cols: Vec<Bits> = (0..n).map(|j| Bits::from_indices(m.nrows(), &m.column_support(j))).collect();
    let mut worst = 0;
    for s in (0..n).combinations(k.min(n)) {
        let mut union = Bits::zeros(m.nrows());
        for &j in &s {
            union.or_assign(&cols[j]);
        }
        let covered = (0..n).filter(|j| !s.contains(j) && cols[*j].is_subset_of(&union)).count();
        worst = worst.max(covered);
    }
    worst
}

/// For every disjoint `S, T` with `|S| = k`, `|T| = l`, some row has a 1 in
/// a column of `T` and zeros in every column of `S`.
pub fn check_list_disjunct(m: &BinaryMatrix, k: usize, l: usize, cap: EnumCap) -> Result<bool> {
    Ok(list_disjunct_report(m, k, l, cap)?.passed)
}

pub fn list_disjunct_report(m: &BinaryMatrix, k: usize, l: usize, cap: EnumCap) -> Result<CheckReport> {
    if k == 0 || l == 0 {
        return Err(Error::param("k, l", "need k >= 1 and l >= 1"));
    }
    let n = m.ncols();
    cap.ensure(binomial(n, k).saturating_mul(binomial(n.saturating_sub(k), l)))?;
    let worst = list_disjunct_worst(m, k);
    Ok(CheckReport::new("list-disjunct", worst < l, worst as f64, l as f64))
}

/// Largest `|B_j0 ∩ (B_j1 ∪ … ∪ B_jk)|` over distinct indices. Families with
/// at most `k` sets use all the other sets.
pub fn ruff_worst_overlap(family: &SetFamily, k: usize, cap: EnumCap) -> Result<usize> {
    if k == 0 {
        return Err(Error::param("k", "need k >= 1"));
    }
    let n = family.n_sets();
    let k = k.min(n.saturating_sub(1));
    cap.ensure((n as u128).saturating_mul(binomial(n.saturating_sub(1), k)))?;
    let m = family.universe();
    let sets: Vec<Bits> = family.sets().iter().map(|s| Bits::from_indices(m, s)).collect();
    let mut worst = 0;
    for j0 in 0..n {
        let others: Vec<Bits> = (0..n)
            .filter(|&j| j != j0)
            .map(|j| {
                let mut b = sets[j].clone();
                b.0.iter_mut().zip(&sets[j0].0).for_each(|(a, c)| *a &= c);
                b
            })
            .collect();
        for combo in (0..others.len()).combinations(k) {
            let mut union = Bits::zeros(m);
            for &i in &combo {
                union.or_assign(&others[i]);
            }
            worst = worst.max(union.and_count(&sets[j0]));
        }
    }
    Ok(worst)
}

/// `|B_j0 ∩ (B_j1 ∪ … ∪ B_jk)| < α|B_j0|` for every distinct `(j0, …, jk)`.
pub fn check_ruff(family: &SetFamily, k: usize, alpha: f64, cap: EnumCap) -> Result<bool> {
    Ok(ruff_report(family, k, alpha, cap)?.passed)
}

/// Observed value is the worst overlap as a fraction of the set size.
pub fn ruff_report(family: &SetFamily, k: usize, alpha: f64, cap: EnumCap) -> Result<CheckReport> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite(alpha));
    }
    let worst = ruff_worst_overlap(family, k, cap)?;
    let d = family.set_size();
    let passed = (worst as f64) < alpha * d as f64;
    let observed = if d == 0 { 0.0 } else { worst as f64 / d as f64 };
    Ok(CheckReport::new("ruff", passed, observed, alpha))
}

/// Every row whose support meets `supp(x)` sees a nonzero inner product.
pub fn check_property1(m: &BinaryMatrix, x: &SparseSignal) -> Result<bool> {
    Error::check_dim(m.ncols(), x.n())?;
    let support = x.support();
    Ok((0..m.nrows()).all(|i| {
        let row = m.row(i);
        let hit: Vec<usize> = support.indices().iter().copied().filter(|&j| row[j] != 0).collect();
        hit.is_empty() || hit.iter().map(|&j| x.values()[j]).sum::<f64>() != 0.0
    }))
}

/// Columns outside `S` whose support is at least half covered by the
/// supports of the columns in `S`.
pub fn compute_ts<M: MeasurementMatrix + ?Sized>(b: &M, s: &SupportSet) -> Result<SupportSet> {
    let supports = column_supports(b);
    common_weight(&supports)?;
    if let Some(&j) = s.indices().last() {
        if j >= b.ncols() {
            return Err(Error::param("S", alloc::format!("index {j} out of range")));
        }
    }
    Ok(ts_from_supports(&supports, b.nrows(), s.indices()))
}

fn covered_rows(supports: &[Vec<usize>], m: usize, s: &[usize]) -> Vec<bool> {
    let mut covered = alloc::vec![false; m];
    for &i in s {
        for &r in &supports[i] {
            covered[r] = true;
        }
    }
    covered
}

fn ts_from_supports(supports: &[Vec<usize>], m: usize, s: &[usize]) -> SupportSet {
    let covered = covered_rows(supports, m, s);
    (0..supports.len())
        .filter(|j| !s.contains(j))
        .filter(|&j| 2 * supports[j].iter().filter(|&&r| covered[r]).count() >= supports[j].len())
        .collect()
}

fn subsets_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, s| acc.saturating_add(binomial(n, s)))
}

/// Largest `|T_S|` over all `|S| <= k`, with a set attaining it.
pub fn ts_worst<M: MeasurementMatrix + ?Sized>(b: &M, k: usize, cap: EnumCap) -> Result<(usize, SupportSet)> {
    let supports = column_supports(b);
    common_weight(&supports)?;
    let n = b.ncols();
    cap.ensure(subsets_up_to(n, k))?;
    let mut best = (0, SupportSet::default());
    for size in 0..=k.min(n) {
        for s in (0..n).combinations(size) {
            let t = ts_from_supports(&supports, b.nrows(), &s).len();
            if t > best.0 {
                best = (t, SupportSet::new(s));
            }
        }
    }
    Ok(best)
}

/// Whether the nullspace of `a` contains a vector with no zero entries.
///
/// Row reduction with absolute pivot tolerance `tol`; a coordinate can be
/// nonzero in a nullvector iff it is free or its pivot row touches a free column.
pub fn has_full_support_nullvec(a: &RealMatrix, tol: f64) -> bool {
    full_support_nullvec_dense(a.as_row_major().to_vec(), a.nrows(), a.ncols(), tol)
}

fn full_support_nullvec_dense(mut data: Vec<f64>, rows: usize, cols: usize, tol: f64) -> bool {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, libm::fabs(data[i * cols + c])))
            .fold((r, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if val <= tol {
            continue;
        }
        for j in 0..cols {
            data.swap(r * cols + j, best * cols + j);
        }
        let p = data[r * cols + c];
        for j in 0..cols {
            data[r * cols + j] /= p;
        }
        for i in (0..rows).filter(|&i| i != r) {
            let f = data[i * cols + c];
            if f != 0.0 {
                for j in 0..cols {
                    data[i * cols + j] -= f * data[r * cols + j];
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    let mut is_pivot = alloc::vec![false; cols];
    for &(_, c) in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    if free.is_empty() {
        return false;
    }
    pivots
        .iter()
        .all(|&(row, _)| free.iter().any(|&f| libm::fabs(data[row * cols + f]) > tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ListRuffParams {
    pub k: usize,
    pub l: usize,
    pub alpha: f64,
    pub rank_tol: f64,
}

impl ListRuffParams {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::param("k, l", "need k >= 1 and l >= 1"));
        }
        Ok(ListRuffParams { k, l, alpha: 0.5, rank_tol: 1e-9 })
    }
}

/// First witness against the list-RUFF properties, if any.
#[derive(Debug, Clone, PartialEq)]
pub enum ListRuffViolation {
    /// `|T_S| >= l`.
    TooManyConfusable { s: SupportSet, ts_len: usize },
    /// Rows `rows` of `A_{S,j}` admit a nullvector with full support.
    NullRows { s: SupportSet, j: usize, rows: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListRuffReport {
    pub max_ts: usize,
    pub violation: Option<ListRuffViolation>,
}

pub fn check_list_ruff<M: MeasurementMatrix + ?Sized>(b: &M, params: &ListRuffParams, cap: EnumCap) -> Result<bool> {
    Ok(list_ruff_report(b, params, cap)?.violation.is_none())
}

/// Property 1 is `|T_S| < l` for every `|S| <= k`. Property 2 asks that for
/// each `j ∈ T_S` no `ceil(α d)` rows of `A_{S,j} = B[L_{S,j} : S ∪ {j}]`
/// share a nullvector with full support.
pub fn list_ruff_report<M: MeasurementMatrix + ?Sized>(
    b: &M,
    params: &ListRuffParams,
    cap: EnumCap,
) -> Result<ListRuffReport> {
    if !(params.alpha > 0.0 && params.alpha <= 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1]"));
    }
    let supports = column_supports(b);
    let d = common_weight(&supports)?;
    let n = b.ncols();
    cap.ensure(subsets_up_to(n, params.k))?;
    let need = libm::ceil(params.alpha * d as f64 - 1e-9) as usize;

    let mut work: u128 = 0;
    let mut report = ListRuffReport { max_ts: 0, violation: None };
    for size in 0..=params.k.min(n) {
        for s in (0..n).combinations(size) {
            let covered = covered_rows(&supports, b.nrows(), &s);
            let ts = ts_from_supports(&supports, b.nrows(), &s);
            report.max_ts = report.max_ts.max(ts.len());
            if report.violation.is_some() {
                continue;
            }
            if ts.len() >= params.l {
                report.violation = Some(ListRuffViolation::TooManyConfusable { s: SupportSet::new(s.clone()), ts_len: ts.len() });
                continue;
            }
            let mut cols = s.clone();
            cols.push(0);
            for &j in ts.indices() {
                *cols.last_mut().expect("nonempty") = j;
                let l_rows: Vec<usize> = supports[j].iter().copied().filter(|&r| covered[r]).collect();
                work = work.saturating_add(binomial(l_rows.len(), need));
                cap.ensure(work)?;
                let witness = l_rows.iter().copied().combinations(need).find(|rows| {
                    let data = rows.iter().flat_map(|&r| cols.iter().map(move |&c| b.entry(r, c))).collect();
                    full_support_nullvec_dense(data, rows.len(), cols.len(), params.rank_tol)
                });
                if let Some(rows) = witness {
                    report.violation = Some(ListRuffViolation::NullRows { s: SupportSet::new(s.clone()), j, rows });
                    break;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSepParams {
    pub eps: f64,
    pub delta_net: f64,
    pub n: usize,
    pub samples: u64,
}

impl BallSepParams {
    /// Samples drawn per independently seeded chunk.
    pub const CHUNK: u64 = 1 << 16;

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 2.0) {
            return Err(Error::param("eps", "must lie in (0, 2]"));
        }
        if !(self.delta_net >= 0.0 && self.delta_net.is_finite()) {
            return Err(Error::param("delta_net", "must be finite and nonnegative"));
        }
        if self.n < 2 {
            return Err(Error::param("n", "need n >= 2"));
        }
        if self.samples == 0 {
            return Err(Error::param("samples", "need at least one sample"));
        }
        Ok(())
    }

    pub fn chunks(&self) -> u64 {
        self.samples.div_ceil(Self::CHUNK)
    }

    /// `(ε − 2δ√n)/π`.
    pub fn lower_bound(&self) -> f64 {
        (self.eps - 2.0 * self.delta_net * libm::sqrt(self.n as f64)) / PI
    }

    /// Separation probability of the two points alone: `arccos(xᵀy)/π`.
    pub fn exact_without_net(&self) -> f64 {
        2.0 * libm::asin(self.eps / 2.0) / PI
    }
}

/// Counts separating hyperplanes in one chunk; chunk `c` is seeded from
/// `(seed, c)` so the total does not depend on how chunks are scheduled.
pub fn ball_separation_chunk(params: &BallSepParams, seed: u64, chunk: u64) -> Result<u64> {
    params.validate()?;
    let start = chunk * BallSepParams::CHUNK;
    let count = BallSepParams::CHUNK.min(params.samples.saturating_sub(start));
    let theta = 2.0 * libm::asin(params.eps / 2.0);
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    let mut rng = ChaCha8Rng::seed_from_u64(derive_trial_seed(seed, 0xba11, chunk));
    let mut hits = 0;
    for _ in 0..count {
        let h1: f64 = rng.sample(StandardNormal);
        let h2: f64 = rng.sample(StandardNormal);
        let rest: f64 = (2..params.n).map(|_| libm::pow(rng.sample::<f64, _>(StandardNormal), 2.0)).sum();
        let norm = libm::sqrt(h1 * h1 + h2 * h2 + rest);
        let (hx, hy) = (h1, c * h1 + s * h2);
        let separated = (hx > 0.0) != (hy > 0.0) && hx != 0.0 && hy != 0.0;
        if separated && libm::fabs(hx) >= params.delta_net * norm && libm::fabs(hy) >= params.delta_net * norm {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Frequency and binomial standard error from a hit count.
pub fn ball_separation_estimate(hits: u64, samples: u64) -> (f64, f64) {
    let p = hits as f64 / samples as f64;
    (p, libm::sqrt(p * (1.0 - p) / samples as f64))
}

pub fn mc_ball_separation_seeded(params: &BallSepParams, seed: u64) -> Result<(f64, f64)> {
    params.validate()?;
    let mut hits = 0;
    for chunk in 0..params.chunks() {
        hits += ball_separation_chunk(params, seed, chunk)?;
    }
    Ok(ball_separation_estimate(hits, params.samples))
}

/// Draws unit `x, y` at distance `ε` and estimates how often a Gaussian
/// hyperplane separates the `δ`-balls around them.
pub fn mc_ball_separation<R: Rng + ?Sized>(params: &BallSepParams, rng: &mut R) -> Result<(f64, f64)> {
    mc_ball_separation_seeded(params, rng.next_u64())
}

/// Density of `Beta((n−1)/2, (n−1)/2)` at `1/2`.
pub fn beta_pdf_at_half(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::param("n", "need n >= 4"));
    }
    let nf = n as f64;
    let ln = (nf - 3.0) * -core::f64::consts::LN_2 + libm::lgamma(nf - 1.0) - 2.0 * libm::lgamma((nf - 1.0) / 2.0);
    let v = libm::exp(ln);
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    Ok(v)
}

/// `(n−2)^{n−3/2} / (π (n−3)^{n−2})`, the bound before the final
/// simplification to `√n/π`.
pub fn beta_half_intermediate_bound(n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::param("n", "need n >= 4"));
    }
    let nf = n as f64;
    let ln = (nf - 1.5) * libm::log(nf - 2.0) - (nf - 2.0) * libm::log(nf - 3.0);
    Ok(libm::exp(ln) / PI)
}

fn linspace(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = if points > 1 { (hi - lo) / (points - 1) as f64 } else { 0.0 };
    (0..points).map(move |i| if i + 1 == points { hi } else { lo + step * i as f64 })
}

/// `1 − x < e^{−x}` for nonzero `x` on a grid over `[−10, 10]`.
/// Observed value is the smallest gap.
pub fn fact1_report(points: usize) -> CheckReport {
    let gap = linspace(-10.0, 10.0, points)
        .filter(|&x| x != 0.0)
        .map(|x| libm::exp(-x) - (1.0 - x))
        .fold(f64::INFINITY, f64::min);
    CheckReport::new("fact1", gap > 0.0, gap, 0.0)
}

/// `arccos(x) >= √(2(1−x))` on a grid over `[0, 1]`.
pub fn fact2_report(points: usize) -> CheckReport {
    let gap = linspace(0.0, 1.0, points)
        .map(|x| libm::acos(x) - libm::sqrt(2.0 * (1.0 - x)))
        .fold(f64::INFINITY, f64::min);
    CheckReport::new("fact2", gap >= 0.0, gap, 0.0)
}

/// `beta_pdf_at_half(n) <= √n/π` for every `n` in the range; observed value
/// is the largest ratio of the density to the bound.
pub fn beta_bound_report(ns: core::ops::RangeInclusive<usize>) -> Result<CheckReport> {
    let mut worst = f64::NEG_INFINITY;
    for n in ns {
        worst = worst.max(beta_pdf_at_half(n)? / (libm::sqrt(n as f64) / PI));
    }
    Ok(CheckReport::new("beta-sqrt-n-bound", worst <= 1.0, worst, 1.0))
}

pub fn beta_intermediate_report(ns: core::ops::RangeInclusive<usize>) -> Result<CheckReport> {
    let mut worst = f64::NEG_INFINITY;
    for n in ns {
        worst = worst.max(beta_pdf_at_half(n)? / beta_half_intermediate_bound(n)?);
    }
    Ok(CheckReport::new("beta-intermediate-bound", worst <= 1.0, worst, 1.0))
}
