//! Decoders: group-testing superset decoding, Robust-UFF support decoding,
//! BIHT, the two-stage superset pipeline, and rounding to binary signals.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::construct::StackedMatrix;
use crate::error::{Error, Result};
use crate::matrix::{BinaryMatrix, MeasurementMatrix, RealMatrix};
use crate::signal::{measure_support, l2_norm, Sign, SignVector, SparseSignal, SupportSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BihtConfig {
    pub max_iters: usize,
    /// Scaled by `1/m` inside the update.
    pub step_size: f64,
    /// Stop as soon as `sign(A x) == y`.
    pub consistency_stop: bool,
}

impl Default for BihtConfig {
    fn default() -> Self {
        BihtConfig { max_iters: 1000, step_size: 1.0, consistency_stop: true }
    }
}

/// Drops every column that takes part in a negative test.
pub fn gt_superset_decode(m: &BinaryMatrix, outcomes: &[bool]) -> Result<SupportSet> {
    Error::check_dim(m.nrows(), outcomes.len())?;
    let mut keep = alloc::vec![true; m.ncols()];
    for (i, _) in outcomes.iter().enumerate().filter(|(_, &pos)| !pos) {
        for (slot, &v) in keep.iter_mut().zip(m.row(i)) {
            if v != 0 {
                *slot = false;
            }
        }
    }
    Ok(keep.iter().enumerate().filter(|(_, &k)| k).map(|(j, _)| j).collect())
}

/// Keeps column `j` when more than half of `supp(B_j)` sees a nonzero sign.
pub fn ruff_decode(b: &BinaryMatrix, obs: &SignVector) -> Result<SupportSet> {
    Error::check_dim(b.nrows(), obs.len())?;
    let d = b
        .constant_column_weight()
        .ok_or_else(|| Error::param("B", "columns do not share a common weight"))?;
    let mut hits = alloc::vec![0usize; b.ncols()];
    for (i, s) in obs.iter().enumerate() {
        if s == Sign::Zero {
            continue;
        }
        for (h, &v) in hits.iter_mut().zip(b.row(i)) {
            *h += usize::from(v);
        }
    }
    Ok(hits.iter().enumerate().filter(|(_, &h)| 2 * h > d).map(|(j, _)| j).collect())
}

/// Result of a BIHT run with its stopping information.
#[derive(Debug, Clone, PartialEq)]
pub struct BihtOutcome {
    pub signal: SparseSignal,
    pub iterations: usize,
    pub consistent: bool,
}

/// Binary iterative hard thresholding, returning a unit-norm `k`-sparse estimate.
pub fn biht(a: &RealMatrix, y: &SignVector, k: usize, cfg: &BihtConfig) -> Result<SparseSignal> {
    biht_detailed(a, y, k, cfg).map(|o| o.signal)
}

/// `x ← TopK_k(x + (step/m)·Aᵀ(y − sign(Ax)))` from `x = 0`.
pub fn biht_detailed(a: &RealMatrix, y: &SignVector, k: usize, cfg: &BihtConfig) -> Result<BihtOutcome> {
    Error::check_dim(a.nrows(), y.len())?;
    if k == 0 {
        return Err(Error::param("k", "need k >= 1"));
    }
    if cfg.max_iters == 0 {
        return Err(Error::param("max_iters", "need at least one iteration"));
    }
    if !(cfg.step_size > 0.0 && cfg.step_size.is_finite()) {
        return Err(Error::param("step_size", "must be positive and finite"));
    }
    let (m, n) = (a.nrows(), a.ncols());
    let k = k.min(n);
    let scale = cfg.step_size / m as f64;
    let target: Vec<f64> = y.iter().map(Sign::as_f64).collect();

    let mut x = alloc::vec![0.0; n];
    let mut support: Vec<usize> = Vec::new();
    let mut iterations = 0;
    let mut consistent = false;
    for _ in 0..cfg.max_iters {
        let current = measure_support(a, &support, &x)?;
        if cfg.consistency_stop && current == *y {
            consistent = true;
            break;
        }
        let mut next = x.clone();
        for (i, s) in current.iter().enumerate() {
            let r = target[i] - s.as_f64();
            if r != 0.0 {
                let w = scale * r;
                for (v, &aij) in next.iter_mut().zip(a.row(i)) {
                    *v += w * aij;
                }
            }
        }
        support = top_k_indices(&next, k);
        x.iter_mut().for_each(|v| *v = 0.0);
        for &j in &support {
            x[j] = next[j];
        }
        iterations += 1;
    }
    if !consistent && cfg.consistency_stop {
        consistent = measure_support(a, &support, &x)? == *y;
    }

    let norm = l2_norm(&x);
    if norm == 0.0 {
        return Err(Error::DecodeFailure("BIHT ended at the zero vector".to_string()));
    }
    x.iter_mut().for_each(|v| *v /= norm);
    Ok(BihtOutcome { signal: SparseSignal::new(x, k)?, iterations, consistent })
}

/// Indices of the `k` largest-magnitude entries (ties to the lower index), ascending.
pub fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    if k < v.len() {
        let by_magnitude = |&a: &usize, &b: &usize| libm::fabs(v[b]).total_cmp(&libm::fabs(v[a])).then(a.cmp(&b));
        idx.select_nth_unstable_by(k, by_magnitude);
        idx.truncate(k);
        idx.sort_unstable();
    }
    idx
}

/// What [`superset_recover`] does when every group test is negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AllNegativePolicy {
    #[default]
    Error,
    /// Run BIHT on the whole Gaussian block instead.
    FullBiht,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupersetConfig {
    pub biht: BihtConfig,
    pub all_negative: AllNegativePolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersetRecovery {
    pub signal: SparseSignal,
    pub superset: SupportSet,
    pub fallback_used: bool,
}

pub fn superset_recover(
    sm: &StackedMatrix,
    y1: &SignVector,
    y2: &SignVector,
    k: usize,
    cfg: &SupersetConfig,
) -> Result<SparseSignal> {
    superset_recover_detailed(sm, y1, y2, k, cfg).map(|r| r.signal)
}

/// Superset from the binary block, then BIHT on the Gaussian block restricted
/// to the superset's columns; the estimate is embedded back into `ℝⁿ`.
pub fn superset_recover_detailed(
    sm: &StackedMatrix,
    y1: &SignVector,
    y2: &SignVector,
    k: usize,
    cfg: &SupersetConfig,
) -> Result<SupersetRecovery> {
    Error::check_dim(sm.m1(), y1.len())?;
    Error::check_dim(sm.m2(), y2.len())?;
    let n = sm.top.ncols();

    if y1.is_all_zero() {
        return match cfg.all_negative {
            AllNegativePolicy::Error => Err(Error::DecodeFailure(
                "every group test is negative; no superset to restrict to".to_string(),
            )),
            AllNegativePolicy::FullBiht => Ok(SupersetRecovery {
                signal: biht(&sm.bottom, y2, k, &cfg.biht)?,
                superset: SupportSet::full(n),
                fallback_used: true,
            }),
        };
    }

    let superset = gt_superset_decode(&sm.top, &y1.to_gt())?;
    if superset.is_empty() {
        return Err(Error::DecodeFailure("group-testing decode eliminated every column".to_string()));
    }
    let restricted = sm.bottom.select_columns(superset.indices())?;
    let inner = biht(&restricted, y2, k, &cfg.biht)?;
    let mut values = alloc::vec![0.0; n];
    for (&j, &v) in superset.indices().iter().zip(inner.values()) {
        values[j] = v;
    }
    Ok(SupersetRecovery { signal: SparseSignal::new(values, k)?, superset, fallback_used: false })
}

/// Snaps an estimate to the binary signal on its `k` largest-magnitude entries.
pub fn binary_round(xhat: &SparseSignal, k: usize) -> Result<SparseSignal> {
    if k == 0 || k > xhat.n() {
        return Err(Error::param("k", alloc::format!("need 1 <= k <= n, got k={k}, n={}", xhat.n())));
    }
    let v = 1.0 / libm::sqrt(k as f64);
    let mut values = alloc::vec![0.0; xhat.n()];
    for j in top_k_indices(xhat.values(), k) {
        values[j] = v;
    }
    SparseSignal::new(values, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{gaussian_matrix, stacked_matrix_with_total};
    use crate::signal::{gen_signal, l2_error, sign_measure, SignalModel};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn signs(v: &[i8]) -> SignVector {
        SignVector(v.iter().map(|&s| Sign::from_i8(s).unwrap()).collect())
    }

    #[test]
    fn gt_decode_cases() {
        let m = BinaryMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        assert_eq!(gt_superset_decode(&m, &[true, false]).unwrap().indices(), &[0]);
        assert_eq!(gt_superset_decode(&m, &[true, true]).unwrap(), SupportSet::full(3));
        assert!(gt_superset_decode(&m, &[true]).is_err());
    }

    #[test]
    fn gt_decode_contains_support_on_exact_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10_000 {
            let m = crate::construct::bernoulli_matrix(20, 40, 0.2, &mut rng).unwrap();
            let x = gen_signal(40, 3, SignalModel::Real, &mut rng).unwrap();
            let outcomes: Vec<bool> = (0..20).map(|i| crate::signal::gt_measure(m.row(i), &x).unwrap()).collect();
            let s = gt_superset_decode(&m, &outcomes).unwrap();
            assert!(s.is_superset_of(&x.support()));
        }
    }

    #[test]
    fn ruff_decode_cases() {
        // disjoint supports of size 2
        let b = BinaryMatrix::from_rows(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
        let x = SparseSignal::new(vec![0.8, 0.0], 1).unwrap();
        let y = sign_measure(&b, &x).unwrap();
        assert_eq!(ruff_decode(&b, &y).unwrap().indices(), &[0]);
        assert!(ruff_decode(&b, &signs(&[0, 0, 0, 0])).unwrap().is_empty());

        let uneven = BinaryMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert!(ruff_decode(&uneven, &signs(&[1, 1])).is_err());
    }

    #[test]
    fn biht_identity_one_step() {
        let a = RealMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let out = biht_detailed(&a, &signs(&[0, 1, 0]), 1, &BihtConfig::default()).unwrap();
        assert_eq!(out.signal.values(), &[0.0, 1.0, 0.0]);
        assert_eq!(out.iterations, 1);
        assert!(out.consistent);
    }

    #[test]
    fn biht_without_consistency_stop_runs_all_iterations() {
        let a = RealMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let cfg = BihtConfig { max_iters: 7, consistency_stop: false, ..BihtConfig::default() };
        let out = biht_detailed(&a, &signs(&[1, 0]), 1, &cfg).unwrap();
        assert_eq!(out.iterations, 7);
        assert_eq!(out.signal.values(), &[1.0, 0.0]);
    }

    #[test]
    fn biht_zero_observation_fails() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            biht(&a, &signs(&[0]), 1, &BihtConfig::default()),
            Err(Error::DecodeFailure(_))
        ));
        assert!(biht(&a, &signs(&[1, 1]), 1, &BihtConfig::default()).is_err());
    }

    #[test]
    fn biht_output_is_sparse_and_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = gaussian_matrix(200, 60, &mut rng).unwrap();
            let x = gen_signal(60, 4, SignalModel::Real, &mut rng).unwrap();
            let y = sign_measure(&a, &x).unwrap();
            let xhat = biht(&a, &y, 4, &BihtConfig::default()).unwrap();
            assert!(xhat.nnz() <= 4);
            assert!((xhat.norm() - 1.0).abs() < 1e-12);
            assert!(l2_error(&x, &xhat).unwrap() < 0.5);
        }
    }

    #[test]
    fn top_k_ties_prefer_lower_index() {
        assert_eq!(top_k_indices(&[1.0, -1.0, 1.0, 0.5], 2), vec![0, 1]);
        assert_eq!(top_k_indices(&[0.0, -3.0, 2.0], 1), vec![1]);
        assert_eq!(top_k_indices(&[0.1, 0.2], 5), vec![0, 1]);
    }

    #[test]
    fn superset_matches_restricted_biht() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut checked = 0;
        for _ in 0..30 {
            let sm = stacked_matrix_with_total(200, 400, 40, 1.0 / 6.0, &mut rng).unwrap();
            let x = gen_signal(200, 5, SignalModel::Real, &mut rng).unwrap();
            let y1 = sign_measure(&sm.top, &x).unwrap();
            let y2 = sign_measure(&sm.bottom, &x).unwrap();
            let rec = superset_recover_detailed(&sm, &y1, &y2, 5, &SupersetConfig::default()).unwrap();
            assert!(rec.signal.nnz() <= 5);
            if rec.superset.is_superset_of(&x.support()) {
                let sub = sm.bottom.select_columns(rec.superset.indices()).unwrap();
                let direct = biht(&sub, &y2, 5, &BihtConfig::default()).unwrap();
                let embedded: Vec<f64> = (0..200)
                    .map(|j| rec.superset.indices().iter().position(|&s| s == j).map_or(0.0, |p| direct.values()[p]))
                    .collect();
                assert_eq!(rec.signal.values(), embedded.as_slice());
                checked += 1;
            }
        }
        assert_eq!(checked, 30);
    }

    #[test]
    fn all_negative_tests_follow_policy() {
        let top = BinaryMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        let bottom = RealMatrix::from_rows(&[vec![1.0, 0.0, 0.5], vec![0.0, 1.0, 1.0]]).unwrap();
        let sm = StackedMatrix::new(top, bottom).unwrap();
        let y1 = signs(&[0, 0]);
        let y2 = signs(&[1, 1]);
        assert!(matches!(
            superset_recover(&sm, &y1, &y2, 1, &SupersetConfig::default()),
            Err(Error::DecodeFailure(_))
        ));
        let cfg = SupersetConfig { all_negative: AllNegativePolicy::FullBiht, ..SupersetConfig::default() };
        let rec = superset_recover_detailed(&sm, &y1, &y2, 1, &cfg).unwrap();
        assert!(rec.fallback_used);
        assert_eq!(rec.superset, SupportSet::full(3));
    }

    #[test]
    fn empty_superset_is_a_failure() {
        // both columns appear in the negative second test
        let top = BinaryMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        let bottom = RealMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let sm = StackedMatrix::new(top, bottom).unwrap();
        assert!(matches!(
            superset_recover(&sm, &signs(&[1, 0]), &signs(&[1]), 1, &SupersetConfig::default()),
            Err(Error::DecodeFailure(_))
        ));
    }

    #[test]
    fn binary_round_cases() {
        let half = SparseSignal::new(vec![0.5, 0.0, 0.5, 0.5, 0.5], 4).unwrap();
        assert_eq!(binary_round(&half, 4).unwrap(), half);

        let x = SparseSignal::new(vec![0.0, 0.5, 0.5, 0.5, 0.5, 0.0], 4).unwrap();
        let noisy = SparseSignal::from_dense(vec![0.05, 0.45, 0.55, 0.5, 0.49, -0.03]).unwrap();
        assert!(l2_error(&x, &noisy).unwrap() < 1.0 / (2.0 * 2.0));
        assert_eq!(binary_round(&noisy, 4).unwrap(), x);

        let one = SparseSignal::from_dense(vec![0.1, -0.9, 0.3]).unwrap();
        assert_eq!(binary_round(&one, 1).unwrap().values(), &[0.0, 1.0, 0.0]);
        assert!(binary_round(&one, 0).is_err());
    }
}
