//! Signals, sign observations, and the two measurement operators.
//!
//! `sign` is three-valued: a measurement that lands exactly on zero reports
//! `0`. That exact zero is what lets a sign outcome be reread as a
//! group-testing outcome (`m ⊙ x`).

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::MeasurementMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(i8)]
pub enum Sign {
    Neg = -1,
    Zero = 0,
    Pos = 1,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self as i8)
    }

    pub fn from_i8(v: i8) -> Result<Sign> {
        match v {
            -1 => Ok(Sign::Neg),
            0 => Ok(Sign::Zero),
            1 => Ok(Sign::Pos),
            _ => Err(Error::param("sign", alloc::format!("{v} is not in {{-1, 0, 1}}"))),
        }
    }
}

impl core::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

/// The observation `sign(Mx)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Sign> + '_ {
        self.0.iter().copied()
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&s| s == Sign::Zero)
    }

    /// Group-testing outcomes recovered entrywise by [`sign_to_gt`].
    pub fn to_gt(&self) -> Vec<bool> {
        self.iter().map(sign_to_gt).collect()
    }

    pub fn split_at(&self, mid: usize) -> (SignVector, SignVector) {
        let (a, b) = self.0.split_at(mid);
        (SignVector(a.to_vec()), SignVector(b.to_vec()))
    }
}

/// A sorted set of 0-based coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SupportSet(Vec<usize>);

impl SupportSet {
    /// Sorts and deduplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SupportSet(indices)
    }

    pub fn full(n: usize) -> Self {
        SupportSet((0..n).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_superset_of(&self, other: &SupportSet) -> bool {
        other.0.iter().all(|&i| self.contains(i))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl FromIterator<usize> for SupportSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        SupportSet::new(iter.into_iter().collect())
    }
}

/// A real vector of length `n` with at most `k` nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    k: usize,
}

impl SparseSignal {
    pub fn new(values: Vec<f64>, k: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("values", "signal has length 0"));
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        let nnz = values.iter().filter(|&&v| v != 0.0).count();
        if nnz > k {
            return Err(Error::param("k", alloc::format!("signal has {nnz} nonzeros, budget is {k}")));
        }
        Ok(SparseSignal { values, k })
    }

    /// Uses the number of nonzeros as the sparsity budget.
    pub fn from_dense(values: Vec<f64>) -> Result<Self> {
        let nnz = values.iter().filter(|&&v| v != 0.0).count();
        Self::new(values, nnz.max(1))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn support(&self) -> SupportSet {
        SupportSet(self.support_indices())
    }

    fn support_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// How [`gen_signal`] fills the chosen support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalModel {
    /// i.i.d. standard normals, normalized.
    Real,
    /// Absolute values of standard normals, normalized.
    Nonnegative,
    /// Every support entry equal to `1/√k`.
    Binary,
}

impl core::str::FromStr for SignalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(SignalModel::Real),
            "nonnegative" => Ok(SignalModel::Nonnegative),
            "binary" => Ok(SignalModel::Binary),
            other => Err(Error::param("model", alloc::format!("unknown signal model `{other}`"))),
        }
    }
}

pub fn sign_value(y: f64) -> Result<Sign> {
    sign_value_with_tolerance(y, 0.0)
}

/// Like [`sign_value`], but reports `0` whenever `|y| <= tol`.
pub fn sign_value_with_tolerance(y: f64, tol: f64) -> Result<Sign> {
    if !y.is_finite() {
        return Err(Error::NonFinite(y));
    }
    Ok(if y > tol {
        Sign::Pos
    } else if y < -tol {
        Sign::Neg
    } else {
        Sign::Zero
    })
}

/// `sign(Mx)`; only the support of `x` is visited.
pub fn sign_measure<M: MeasurementMatrix + ?Sized>(m: &M, x: &SparseSignal) -> Result<SignVector> {
    Error::check_dim(m.ncols(), x.n())?;
    let support = x.support_indices();
    measure_support(m, &support, x.values())
}

pub(crate) fn measure_support<M: MeasurementMatrix + ?Sized>(
    m: &M,
    support: &[usize],
    x: &[f64],
) -> Result<SignVector> {
    (0..m.nrows())
        .map(|i| sign_value(m.sparse_row_dot(i, support, x)))
        .collect::<Result<Vec<_>>>()
        .map(SignVector)
}

/// `row ⊙ x`: whether the test row touches the support of `x`.
pub fn gt_measure(row: &[u8], x: &SparseSignal) -> Result<bool> {
    Error::check_dim(row.len(), x.n())?;
    Ok(row.iter().zip(x.values()).any(|(&r, &v)| r != 0 && v != 0.0))
}

pub fn sign_to_gt(s: Sign) -> bool {
    s != Sign::Zero
}

/// Draws a signal with exactly `k` nonzeros on a uniformly random support.
pub fn gen_signal<R: Rng + ?Sized>(n: usize, k: usize, model: SignalModel, rng: &mut R) -> Result<SparseSignal> {
    if k == 0 || k > n {
        return Err(Error::param("k", alloc::format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let (chosen, _) = indices.partial_shuffle(rng, k);
    let mut values = alloc::vec![0.0; n];
    match model {
        SignalModel::Binary => {
            let v = 1.0 / libm::sqrt(k as f64);
            for &i in chosen.iter() {
                values[i] = v;
            }
        }
        SignalModel::Real | SignalModel::Nonnegative => loop {
            for &i in chosen.iter() {
                let z: f64 = rng.sample(StandardNormal);
                values[i] = if model == SignalModel::Nonnegative { libm::fabs(z) } else { z };
            }
            let norm = l2_norm(&values);
            // An exact zero draw would shrink the support below k.
            if norm > 0.0 && chosen.iter().all(|&i| values[i] != 0.0) {
                for &i in chosen.iter() {
                    values[i] /= norm;
                }
                break;
            }
        },
    }
    SparseSignal::new(values, k)
}

/// Distance between `x/‖x‖` and `xhat/‖xhat‖`, in `[0, 2]`.
pub fn l2_error(x: &SparseSignal, xhat: &SparseSignal) -> Result<f64> {
    unit_distance(x.values(), xhat.values())
}

pub(crate) fn unit_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    Error::check_dim(a.len(), b.len())?;
    let na = l2_norm(a);
    let nb = l2_norm(b);
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sq: f64 = a.iter().zip(b).map(|(&u, &v)| (u / na - v / nb) * (u / na - v / nb)).sum();
    Ok(libm::sqrt(sq).min(2.0))
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}
