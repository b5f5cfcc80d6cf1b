//! Error-curve and Bernoulli-probability sweep experiments.
//!
//! Every trial draws from its own generator seeded by [`derive_trial_seed`],
//! so trials can run in any order and aggregate to the same table.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construct::{bernoulli_matrix, default_bernoulli_p, gaussian_matrix, stacked_matrix_with_total, superset_rows};
use crate::decode::{biht, gt_superset_decode, superset_recover_detailed, BihtConfig, SupersetConfig};
use crate::error::{Error, Result};
use crate::signal::{gen_signal, l2_error, sign_measure, SignalModel};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Avalanche mix of a base seed, a stream id and a trial index.
pub fn derive_trial_seed(base_seed: u64, stream_id: u64, trial_index: u64) -> u64 {
    let a = splitmix64(base_seed);
    let b = splitmix64(a ^ stream_id);
    splitmix64(b ^ splitmix64(trial_index ^ 0x5851_f42d_4c95_7f2d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    AllGaussian,
    Superset,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::AllGaussian, Method::Superset];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::AllGaussian => "all_gaussian",
            Method::Superset => "superset",
        }
    }
}

const SWEEP_TAG: u64 = 3;

/// Stream id for one (method, m, p) cell.
pub fn stream_id(tag: u64, m: usize, p: f64) -> u64 {
    splitmix64(splitmix64(splitmix64(tag) ^ m as u64) ^ p.to_bits())
}

fn method_tag(method: Method) -> u64 {
    match method {
        Method::AllGaussian => 1,
        Method::Superset => 2,
    }
}

fn trial_rng(base: u64, stream: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_trial_seed(base, stream, trial as u64))
}

/// Mean and sample standard deviation; the deviation is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurveConfig {
    pub n: usize,
    pub k: usize,
    pub m_values: Vec<usize>,
    pub trials: usize,
    pub p: f64,
    pub base_seed: u64,
    pub biht: BihtConfig,
}

impl ErrorCurveConfig {
    /// Uses `p = 1/(k+1)` and default BIHT settings.
    pub fn new(n: usize, k: usize, m_values: Vec<usize>, trials: usize, base_seed: u64) -> Self {
        ErrorCurveConfig { n, k, m_values, trials, p: default_bernoulli_p(k), base_seed, biht: BihtConfig::default() }
    }

    /// Group-testing rows, `round(4k·log10 n)`.
    pub fn m1(&self) -> usize {
        superset_rows(self.n, self.k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::param("k", "need 1 <= k <= n"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.m_values.is_empty() {
            return Err(Error::param("m_values", "empty"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::param("p", "must lie in (0, 1)"));
        }
        let m1 = self.m1();
        if let Some(&m) = self.m_values.iter().find(|&&m| m <= m1) {
            return Err(Error::param("m_values", format!("m={m} leaves no Gaussian rows after m1={m1}")));
        }
        Ok(())
    }

    /// Work items `(m, method, trial)` in output order.
    pub fn work_items(&self) -> Vec<(usize, Method, usize)> {
        let mut ms = self.m_values.clone();
        ms.sort_unstable();
        ms.dedup();
        let mut items = Vec::with_capacity(ms.len() * 2 * self.trials);
        for m in ms {
            for method in Method::ALL {
                items.extend((0..self.trials).map(|t| (m, method, t)));
            }
        }
        items
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub m: usize,
    pub m1: usize,
    pub trial_index: usize,
    pub error: f64,
    pub superset_size: Option<usize>,
}

/// One trial: a fresh real-model signal and a fresh matrix for `method`.
pub fn error_curve_trial(cfg: &ErrorCurveConfig, method: Method, m: usize, trial: usize) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.base_seed, stream_id(method_tag(method), m, cfg.p), trial);
    let x = gen_signal(cfg.n, cfg.k, SignalModel::Real, &mut rng)?;
    match method {
        Method::AllGaussian => {
            let a = gaussian_matrix(m, cfg.n, &mut rng)?;
            let y = sign_measure(&a, &x)?;
            let xhat = biht(&a, &y, cfg.k, &cfg.biht)?;
            Ok(TrialRecord { method, m, m1: 0, trial_index: trial, error: l2_error(&x, &xhat)?, superset_size: None })
        }
        Method::Superset => {
            let m1 = cfg.m1();
            let sm = stacked_matrix_with_total(cfg.n, m, m1, cfg.p, &mut rng)?;
            let y1 = sign_measure(&sm.top, &x)?;
            let y2 = sign_measure(&sm.bottom, &x)?;
            let sc = SupersetConfig { biht: cfg.biht, ..SupersetConfig::default() };
            let rec = superset_recover_detailed(&sm, &y1, &y2, cfg.k, &sc)?;
            Ok(TrialRecord {
                method,
                m,
                m1,
                trial_index: trial,
                error: l2_error(&x, &rec.signal)?,
                superset_size: Some(rec.superset.len()),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurveRow {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub m1: usize,
    pub p: f64,
    pub method: Method,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
}

impl ErrorCurveRow {
    pub const CSV_HEADER: &'static str = "n,k,m,m1,p,method,trials,mean_error,std_error";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.m,
            self.m1,
            self.p,
            self.method.as_str(),
            self.trials,
            self.mean_error,
            self.std_error
        )
    }
}

/// Groups records by `(m, method)`; within a group values are reduced in
/// trial order so the result does not depend on how they were produced.
pub fn aggregate_error_curve(cfg: &ErrorCurveConfig, records: &[TrialRecord]) -> Vec<ErrorCurveRow> {
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.m, r.method, r.trial_index));
    sorted
        .chunk_by(|a, b| a.m == b.m && a.method == b.method)
        .map(|group| {
            let errors: Vec<f64> = group.iter().map(|r| r.error).collect();
            let (mean_error, std_error) = mean_std(&errors);
            let first = group[0];
            ErrorCurveRow {
                n: cfg.n,
                k: cfg.k,
                m: first.m,
                m1: first.m1,
                p: cfg.p,
                method: first.method,
                trials: group.len(),
                mean_error,
                std_error,
            }
        })
        .collect()
}

pub fn run_error_curve(cfg: &ErrorCurveConfig) -> Result<Vec<ErrorCurveRow>> {
    cfg.validate()?;
    let records = cfg
        .work_items()
        .into_iter()
        .map(|(m, method, t)| error_curve_trial(cfg, method, m, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_error_curve(cfg, &records))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub m_values: Vec<usize>,
    pub p_values: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::param("k", "need 1 <= k <= n"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(Error::param("m_values", "need a nonempty list of positive row counts"));
        }
        if self.p_values.is_empty() || self.p_values.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::param("p_values", "need a nonempty list inside (0, 1)"));
        }
        Ok(())
    }

    /// Work items `(m, p, trial)` in output order.
    pub fn work_items(&self) -> Vec<(usize, f64, usize)> {
        let mut ms = self.m_values.clone();
        ms.sort_unstable();
        ms.dedup();
        let mut ps = self.p_values.clone();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        let mut items = Vec::with_capacity(ms.len() * ps.len() * self.trials);
        for &m in &ms {
            for &p in &ps {
                items.extend((0..self.trials).map(|t| (m, p, t)));
            }
        }
        items
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub m: usize,
    pub p: f64,
    pub trial_index: usize,
    pub superset_size: usize,
}

/// Bernoulli(p) tests on a fresh real-model signal, decoded to a superset.
pub fn sweep_trial(cfg: &SweepConfig, m: usize, p: f64, trial: usize) -> Result<SweepRecord> {
    let mut rng = trial_rng(cfg.base_seed, stream_id(SWEEP_TAG, m, p), trial);
    let x = gen_signal(cfg.n, cfg.k, SignalModel::Real, &mut rng)?;
    let a = bernoulli_matrix(m, cfg.n, p, &mut rng)?;
    let outcomes = sign_measure(&a, &x)?.to_gt();
    let s = gt_superset_decode(&a, &outcomes)?;
    Ok(SweepRecord { m, p, trial_index: trial, superset_size: s.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    pub trials: usize,
    pub mean_superset_size: f64,
    pub std_superset_size: f64,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str = "n,k,m,p,trials,mean_superset_size,std_superset_size";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n, self.k, self.m, self.p, self.trials, self.mean_superset_size, self.std_superset_size
        )
    }
}

fn cmp_cell(a: &SweepRecord, b: &SweepRecord) -> Ordering {
    a.m.cmp(&b.m).then(a.p.total_cmp(&b.p)).then(a.trial_index.cmp(&b.trial_index))
}

pub fn aggregate_sweep(cfg: &SweepConfig, records: &[SweepRecord]) -> Vec<SweepRow> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| cmp_cell(a, b));
    sorted
        .chunk_by(|a, b| a.m == b.m && a.p.to_bits() == b.p.to_bits())
        .map(|group| {
            let sizes: Vec<f64> = group.iter().map(|r| r.superset_size as f64).collect();
            let (mean, std) = mean_std(&sizes);
            SweepRow {
                n: cfg.n,
                k: cfg.k,
                m: group[0].m,
                p: group[0].p,
                trials: group.len(),
                mean_superset_size: mean,
                std_superset_size: std,
            }
        })
        .collect()
}

pub fn run_bernoulli_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let records = cfg
        .work_items()
        .into_iter()
        .map(|(m, p, t)| sweep_trial(cfg, m, p, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate_sweep(cfg, &records))
}

/// Header plus one line per row, newline terminated.
pub fn error_curve_csv(rows: &[ErrorCurveRow]) -> String {
    let mut out = String::from(ErrorCurveRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SweepRow::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
