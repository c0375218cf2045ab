//! Full-sample containers, train/test partitions, signed random vectors, and
//! the margin / 0-1 loss scoring shared by every bound and algorithm.

use crate::error::{Error, Result};
use crate::util::KahanSum;
use ndarray::{Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A labeled point set: one feature row per point and a ±1 label per row.
/// Labels are used only for scoring — the learning algorithms see labels
/// exclusively through the train-side label vector they are given.
#[derive(Debug, Clone)]
pub struct FullSample {
    features: Array2<f64>,
    labels: Vec<i8>,
}

impl FullSample {
    /// Builds a sample, validating that the label count matches the row
    /// count and every label is −1 or +1.
    pub fn new(features: Array2<f64>, labels: Vec<i8>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        for (i, &y) in labels.iter().enumerate() {
            if y != -1 && y != 1 {
                return Err(Error::InvalidLabel {
                    line: i,
                    value: y.to_string(),
                });
            }
        }
        Ok(Self { features, labels })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[must_use]
    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    #[must_use]
    pub fn labels(&self) -> &[i8] {
        &self.labels
    }
}

/// A split of `{0..m+u-1}` into `m` train indices and `u` test indices.
/// Both index lists are kept sorted; together they cover every point once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    train_indices: Vec<usize>,
    test_indices: Vec<usize>,
}

impl Partition {
    /// Builds a partition from explicit train indices over `total` points.
    pub fn new(total: usize, train_indices: Vec<usize>) -> Result<Self> {
        let m = train_indices.len();
        if m == 0 || m >= total {
            return Err(Error::InvalidPartition { m, total });
        }
        let mut seen = vec![false; total];
        for &i in &train_indices {
            if i >= total {
                return Err(Error::InvalidPartition { m, total });
            }
            if seen[i] {
                return Err(Error::InvalidPartition { m, total });
            }
            seen[i] = true;
        }
        let mut train = train_indices;
        train.sort_unstable();
        let test: Vec<usize> = (0..total).filter(|&i| !seen[i]).collect();
        Ok(Self {
            train_indices: train,
            test_indices: test,
        })
    }

    #[must_use]
    pub fn m(&self) -> usize {
        self.train_indices.len()
    }

    #[must_use]
    pub fn u(&self) -> usize {
        self.test_indices.len()
    }

    #[must_use]
    pub fn total(&self) -> usize {
        self.m() + self.u()
    }

    #[must_use]
    pub fn train_indices(&self) -> &[usize] {
        &self.train_indices
    }

    #[must_use]
    pub fn test_indices(&self) -> &[usize] {
        &self.test_indices
    }

    /// True when index `i` is a train point (binary search over the sorted
    /// train list).
    #[must_use]
    pub fn is_train(&self, i: usize) -> bool {
        self.train_indices.binary_search(&i).is_ok()
    }
}

/// Draws a uniformly distributed `m`-subset of `{0..total-1}` as the train
/// set via a partial Fisher–Yates pass: position `i` is swapped with a
/// uniform position in `{i..total-1}` for `i = 0..m-1`, and the first `m`
/// slots become the train indices.
pub fn sample_partition(total: usize, m: usize, seed: u64) -> Result<Partition> {
    if m == 0 || m >= total {
        return Err(Error::InvalidPartition { m, total });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<usize> = (0..total).collect();
    for i in 0..m {
        let d = rng.random_range(i..total);
        z.swap(i, d);
    }
    z.truncate(m);
    Partition::new(total, z)
}

/// A vector over {−1, 0, +1} with P(+1) = P(−1) = `p` and P(0) = 1 − 2p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RademacherVector {
    values: Vec<i8>,
    p_bits: u64,
}

impl RademacherVector {
    /// Wraps explicit sign values (used by exhaustive enumeration and
    /// tests); every entry must be −1, 0, or +1 and `p` must be a valid
    /// sign probability.
    pub fn from_values(values: Vec<i8>, p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        if let Some(&bad) = values.iter().find(|v| !matches!(v, -1..=1)) {
            return Err(Error::InvalidParameter(format!(
                "sign vectors may only contain -1, 0, 1 (got {bad})"
            )));
        }
        Ok(Self {
            values,
            p_bits: p.to_bits(),
        })
    }

    #[must_use]
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[must_use]
    pub fn p(&self) -> f64 {
        f64::from_bits(self.p_bits)
    }

    /// Iterates over the nonzero entries as `(index, ±1.0)`; the expected
    /// fraction of nonzeros is 2p, so sparse accumulation over this iterator
    /// is the cheap way to form dot products with the vector.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != 0)
            .map(|(i, &v)| (i, f64::from(v)))
    }
}

/// Samples a signed vector of the given size with entry law
/// {+1: p, −1: p, 0: 1−2p}, deterministically from `seed`.
pub fn sample_rademacher(size: usize, p: f64, seed: u64) -> Result<RademacherVector> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..size)
        .map(|_| {
            let x: f64 = rng.random();
            if x < p {
                1
            } else if x < 2.0 * p {
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(RademacherVector {
        values,
        p_bits: p.to_bits(),
    })
}

/// The canonical sign probability p₀ = mu/(m+u)², the value at which the
/// complexity term enters the risk bounds.
#[must_use]
pub fn default_p(m: usize, u: usize) -> f64 {
    let n = (m + u) as f64;
    (m as f64) * (u as f64) / (n * n)
}

/// Margin loss at margin `gamma`: 0 when `score·label ≥ gamma`, otherwise
/// `min(1, 1 − score·label/gamma)`. Always in [0, 1] and dominating the 0-1
/// loss.
pub fn margin_loss(score: f64, label: i8, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidMargin(gamma));
    }
    let sy = score * f64::from(label);
    if sy >= gamma {
        Ok(0.0)
    } else {
        Ok((1.0 - sy / gamma).min(1.0))
    }
}

/// 0-1 loss of the thresholded score: an exact zero score counts as an error
/// against either label (conservative tie-breaking).
#[must_use]
pub fn zero_one_loss(score: f64, label: i8) -> f64 {
    if score * f64::from(label) <= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Train / test / full-sample error rates of a soft-label vector at a fixed
/// margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub empirical_01: f64,
    pub empirical_margin: f64,
    pub test_01: f64,
    pub test_margin: f64,
    pub full_sample_01: f64,
    pub full_sample_margin: f64,
    pub gamma: f64,
}

/// Scores a soft-label vector against the sample's labels, averaging the 0-1
/// and margin losses over the train set, the test set, and the full sample.
pub fn score_errors(
    h: ArrayView1<'_, f64>,
    sample: &FullSample,
    part: &Partition,
    gamma: f64,
) -> Result<ErrorReport> {
    let n = sample.len();
    if h.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "score vector has length {} but the sample has {} points",
            h.len(),
            n
        )));
    }
    if part.total() != n {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} points but the sample has {}",
            part.total(),
            n
        )));
    }
    let labels = sample.labels();
    let mean_over = |indices: &[usize]| -> Result<(f64, f64)> {
        let mut zo = KahanSum::new();
        let mut mg = KahanSum::new();
        for &i in indices {
            zo.add(zero_one_loss(h[i], labels[i]));
            mg.add(margin_loss(h[i], labels[i], gamma)?);
        }
        let count = indices.len() as f64;
        Ok((zo.value() / count, mg.value() / count))
    };
    let (empirical_01, empirical_margin) = mean_over(part.train_indices())?;
    let (test_01, test_margin) = mean_over(part.test_indices())?;
    let all: Vec<usize> = (0..n).collect();
    let (full_sample_01, full_sample_margin) = mean_over(&all)?;
    Ok(ErrorReport {
        empirical_01,
        empirical_margin,
        test_01,
        test_margin,
        full_sample_01,
        full_sample_margin,
        gamma,
    })
}
