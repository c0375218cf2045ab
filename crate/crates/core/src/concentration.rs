//! Closed-form tail bounds for partition-symmetric statistics under sampling
//! without replacement, the slack constants used by the risk bounds, and an
//! empirical validator that checks the calculators by simulation.

use crate::error::{Error, Result};
use crate::sample::{sample_partition, Partition};
use crate::util::{derive_seed, kahan_sum};
use rayon::prelude::*;
use std::str::FromStr;

/// Which tail-probability calculator to evaluate. All five bound
/// `P(f − E f ≥ ε)` for a statistic `f` of a uniformly random train/test
/// partition that is symmetric within each side of the split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailKind {
    /// Sharpest bound for a β-Lipschitz statistic (Lipschitz with respect to
    /// swapping one train point with one test point).
    LipschitzTight,
    /// Simpler but looser bound for the same β-Lipschitz statistics, via a
    /// reduction to min(m,u) independent draws.
    LipschitzSimple,
    /// Specialization to the test-minus-train mean gap of a 0/1 marking
    /// (β = 1/m + 1/u implied).
    TestTrainGap,
    /// Specialization to the train mean of a 0/1 marking, deviating from the
    /// full-sample mean (β = 1/m implied).
    TrainMean,
    /// Serfling's classical bound for the train mean, asymptotically
    /// equivalent to `TrainMean`.
    Serfling,
}

impl TailKind {
    /// True when the calculator needs an explicit Lipschitz constant β.
    #[must_use]
    pub fn needs_beta(self) -> bool {
        matches!(self, TailKind::LipschitzTight | TailKind::LipschitzSimple)
    }

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            TailKind::LipschitzTight => "lipschitz-tight",
            TailKind::LipschitzSimple => "lipschitz-simple",
            TailKind::TestTrainGap => "test-train-gap",
            TailKind::TrainMean => "train-mean",
            TailKind::Serfling => "serfling",
        }
    }
}

impl FromStr for TailKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lipschitz-tight" => Ok(TailKind::LipschitzTight),
            "lipschitz-simple" => Ok(TailKind::LipschitzSimple),
            "test-train-gap" => Ok(TailKind::TestTrainGap),
            "train-mean" => Ok(TailKind::TrainMean),
            "serfling" => Ok(TailKind::Serfling),
            other => Err(Error::InvalidParameter(format!(
                "unknown tail-bound kind '{other}' (expected lipschitz-tight, \
                 lipschitz-simple, test-train-gap, train-mean, or serfling)"
            ))),
        }
    }
}

/// One tail-bound evaluation request. `beta` is only consulted by the two
/// Lipschitz calculators; the specialized calculators have their constant
/// built in.
#[derive(Debug, Clone, Copy)]
pub struct TailBoundQuery {
    pub kind: TailKind,
    pub m: usize,
    pub u: usize,
    pub beta: Option<f64>,
    pub epsilon: f64,
}

/// Evaluates the requested tail bound exactly as displayed, without clipping
/// to [0, 1] — callers clip for presentation so formula regressions stay
/// visible.
pub fn tail_bound(query: &TailBoundQuery) -> Result<f64> {
    let TailBoundQuery {
        kind,
        m,
        u,
        beta,
        epsilon,
    } = *query;
    if m == 0 || u == 0 {
        return Err(Error::InvalidParameter(format!(
            "tail bound needs m ≥ 1 and u ≥ 1 (got m={m}, u={u})"
        )));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be nonnegative (got {epsilon})"
        )));
    }
    if let Some(b) = beta {
        if !(b >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must be nonnegative (got {b})"
            )));
        }
    }
    if epsilon == 0.0 {
        return Ok(1.0);
    }
    let mf = m as f64;
    let uf = u as f64;
    let n = mf + uf;
    let maxmu = mf.max(uf);
    let e2 = epsilon * epsilon;
    let exponent = match kind {
        TailKind::LipschitzTight | TailKind::LipschitzSimple => {
            let b = beta.ok_or(Error::MissingParameter(
                "beta (Lipschitz constant) is required for this tail-bound kind",
            ))?;
            if b == 0.0 {
                // A 0-Lipschitz statistic is constant: positive deviation is
                // impossible.
                return Ok(0.0);
            }
            match kind {
                TailKind::LipschitzTight => {
                    -2.0 * e2 * (n - 0.5) / (mf * uf * b * b) * (1.0 - 1.0 / (2.0 * maxmu))
                }
                _ => -2.0 * e2 / (b * b * mf.min(uf)),
            }
        }
        TailKind::TestTrainGap => {
            -e2 * mf * uf * (n - 0.5) / (n * n) * ((2.0 * maxmu - 1.0) / maxmu)
        }
        TailKind::TrainMean => -e2 * (n - 0.5) * mf / uf * ((2.0 * maxmu - 1.0) / maxmu),
        TailKind::Serfling => -2.0 * e2 * n * mf / (uf + 1.0),
    };
    Ok(exponent.exp())
}

/// The three constants that appear in every assembled risk bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackConstants {
    /// Q = 1/m + 1/u.
    pub q_const: f64,
    /// S = (m+u) / ((m+u−1/2)·(1 − 1/(2·max(m,u)))); always > 1 and → 1 as
    /// both sides grow.
    pub s_const: f64,
    /// c₀ = √(32·ln(4e)/3) ≈ 5.045; the universal constant multiplying the
    /// √min(m,u) slack term.
    pub c0: f64,
}

/// Evaluates Q, S, and c₀ for a given split size.
pub fn slack_constants(m: usize, u: usize) -> Result<SlackConstants> {
    if m == 0 || u == 0 {
        return Err(Error::InvalidParameter(format!(
            "slack constants need m ≥ 1 and u ≥ 1 (got m={m}, u={u})"
        )));
    }
    let mf = m as f64;
    let uf = u as f64;
    let n = mf + uf;
    let q_const = 1.0 / mf + 1.0 / uf;
    let s_const = n / ((n - 0.5) * (1.0 - 1.0 / (2.0 * mf.max(uf))));
    let c0 = (32.0 * (4.0 * std::f64::consts::E).ln() / 3.0).sqrt();
    Ok(SlackConstants {
        q_const,
        s_const,
        c0,
    })
}

/// The confidence term √((S/2)·Q·ln(1/δ)) shared by every risk bound; having
/// a single evaluation point keeps the variants bit-identical.
pub fn confidence_slack(m: usize, u: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfidence(delta));
    }
    let c = slack_constants(m, u)?;
    Ok((c.s_const / 2.0 * c.q_const * (1.0 / delta).ln()).sqrt())
}

/// Deviation slack for a statistic with range [b1, b2] (b1 ≤ 0 ≤ b2):
/// `B_max·c₀·Q·√min(m,u) + B·√((S/2)·Q·ln(1/δ))` with B = b2 − b1 and
/// B_max = max(|b1|, b2).
pub fn deviation_slack(m: usize, u: usize, b1: f64, b2: f64, delta: f64) -> Result<f64> {
    if !(b1 <= 0.0) || !(b2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "range must satisfy b1 ≤ 0 ≤ b2 (got b1={b1}, b2={b2})"
        )));
    }
    let c = slack_constants(m, u)?;
    let confidence = confidence_slack(m, u, delta)?;
    let b = b2 - b1;
    let b_max = (-b1).max(b2);
    let min_mu = (m.min(u)) as f64;
    Ok(b_max * c.c0 * c.q_const * min_mu.sqrt() + b * confidence)
}

/// Result of simulating a partition statistic: its sample mean and the
/// empirical exceedance probability at each requested ε.
#[derive(Debug, Clone)]
pub struct EmpiricalTail {
    pub mean: f64,
    pub tails: Vec<f64>,
}

/// Estimates `P(f − E f ≥ ε)` for each ε by sampling `n_samples` uniform
/// partitions. The expectation is replaced by the sample mean. Partitions
/// are evaluated in parallel but each draw's seed depends only on
/// (seed, draw index), so the result is deterministic.
pub fn empirical_tail<F>(
    f: F,
    m: usize,
    u: usize,
    epsilons: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<EmpiricalTail>
where
    F: Fn(&Partition) -> f64 + Sync,
{
    if n_samples == 0 {
        return Err(Error::InvalidParameter(
            "empirical tail needs at least one sampled partition".into(),
        ));
    }
    if m == 0 || u == 0 {
        return Err(Error::InvalidPartition { m, total: m + u });
    }
    let total = m + u;
    let values: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let part = sample_partition(total, m, derive_seed(seed, i as u64))?;
            Ok(f(&part))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mean = kahan_sum(&values) / n_samples as f64;
    let tails = epsilons
        .iter()
        .map(|&eps| {
            values.iter().filter(|&&v| v - mean >= eps).count() as f64 / n_samples as f64
        })
        .collect();
    Ok(EmpiricalTail { mean, tails })
}

/// Statistic covered by `TestTrainGap`: mean of a 0/1 marking over the test
/// side minus its mean over the train side. Its exact expectation is 0.
pub fn test_train_gap_statistic(marking: Vec<f64>) -> impl Fn(&Partition) -> f64 + Sync {
    move |part: &Partition| {
        let train: f64 = part.train_indices().iter().map(|&i| marking[i]).sum();
        let test: f64 = part.test_indices().iter().map(|&i| marking[i]).sum();
        test / part.u() as f64 - train / part.m() as f64
    }
}

/// Statistic covered by `TrainMean` and `Serfling`: mean of a 0/1 marking
/// over the train side. Its exact expectation is the full-sample mean of the
/// marking.
pub fn train_mean_statistic(marking: Vec<f64>) -> impl Fn(&Partition) -> f64 + Sync {
    move |part: &Partition| {
        let train: f64 = part.train_indices().iter().map(|&i| marking[i]).sum();
        train / part.m() as f64
    }
}
