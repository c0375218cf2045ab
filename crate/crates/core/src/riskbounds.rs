//! End-to-end risk bounds: the margin bound assembled from a complexity
//! estimate plus concentration slack, an inductive-style comparison bound,
//! the full-sample translation of a test-set bound, and a PAC-Bayesian bound
//! for convex mixtures of base predictors.

use crate::concentration::{confidence_slack, slack_constants};
use crate::error::{Error, Result};
use crate::rademacher::ComplexityEstimate;
use crate::sample::{score_errors, FullSample, Partition};
use crate::util::{clip_unit, KahanSum};
use ndarray::Array1;

/// A fully assembled risk bound with every summand recorded. The invariant
/// is exactness: `total` is the plain sum
/// `empirical_margin_error + complexity.value/gamma + slack_sqrt_min +
/// slack_confidence` in that order, so reruns on identical inputs are
/// bit-reproducible. `total_clipped` is the presentation companion clamped
/// to [0, 1]; `total` itself may exceed 1 (a vacuous bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub empirical_margin_error: f64,
    pub complexity: ComplexityEstimate,
    pub gamma: f64,
    pub delta: f64,
    pub m: usize,
    pub u: usize,
    /// c₀·Q·√min(m,u)
    pub slack_sqrt_min: f64,
    /// √((S/2)·Q·ln(1/δ))
    pub slack_confidence: f64,
    pub total: f64,
    pub total_clipped: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidMargin(gamma));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidConfidence(delta));
    }
    Ok(())
}

/// Margin risk bound: with probability ≥ 1 − δ over train/test splits, the
/// test margin error is at most
/// `empirical + complexity/γ + c₀Q√min(m,u) + √((S/2)·Q·ln(1/δ))`.
/// The two slack terms together equal `deviation_slack(m, u, 0, 1, δ)`
/// bit-for-bit (the loss takes values in [0, 1]).
pub fn margin_risk_bound(
    empirical_margin_error: f64,
    complexity: ComplexityEstimate,
    gamma: f64,
    m: usize,
    u: usize,
    delta: f64,
) -> Result<BoundReport> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    let constants = slack_constants(m, u)?;
    let slack_sqrt_min = constants.c0 * constants.q_const * ((m.min(u)) as f64).sqrt();
    let slack_confidence = confidence_slack(m, u, delta)?;
    let total = empirical_margin_error + complexity.value / gamma + slack_sqrt_min + slack_confidence;
    Ok(BoundReport {
        empirical_margin_error,
        complexity,
        gamma,
        delta,
        m,
        u,
        slack_sqrt_min,
        slack_confidence,
        total,
        total_clipped: clip_unit(total),
    })
}

/// Inductive-style comparison bound:
/// `empirical + r_ind/γ + √(2·ln(2/δ)/m)`, where `r_ind` is a
/// caller-supplied inductive complexity of the hypothesis class.
pub fn inductive_risk_bound(
    empirical_margin_error: f64,
    r_ind: f64,
    gamma: f64,
    m: usize,
    delta: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    if m == 0 {
        return Err(Error::InvalidParameter(
            "inductive bound needs m ≥ 1".into(),
        ));
    }
    Ok(empirical_margin_error + r_ind / gamma + (2.0 * (2.0 / delta).ln() / m as f64).sqrt())
}

/// Translates a test-set slack into a full-sample bound:
/// `empirical + (u/(m+u))·slack`. The weight vanishes as u → 0; the
/// degenerate m = u = 0 case returns `empirical` (zero-weight limit).
#[must_use]
pub fn full_sample_translate(empirical_margin_error: f64, slack: f64, m: usize, u: usize) -> f64 {
    let total = m + u;
    if total == 0 {
        return empirical_margin_error;
    }
    empirical_margin_error + (u as f64 / total as f64) * slack
}

/// Kullback–Leibler divergence Σ qᵢ·ln(qᵢ/pᵢ) over the support of q, with
/// 0·ln(0/·) = 0 and +∞ when q places mass where p has none. Both vectors
/// must be valid distributions (nonnegative, summing to 1 within 1e-8).
/// The result is floored at 0 to absorb last-bit cancellation when q ≈ p.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions have lengths {} and {}",
            q.len(),
            p.len()
        )));
    }
    for (name, v) in [("first", q), ("second", p)] {
        let mut acc = KahanSum::new();
        for &x in v {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "{name} vector has entry {x}"
                )));
            }
            acc.add(x);
        }
        let sum = acc.value();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidDistribution(format!(
                "{name} vector sums to {sum}"
            )));
        }
    }
    let mut acc = KahanSum::new();
    for (&qi, &pi) in q.iter().zip(p) {
        if qi > 0.0 {
            if pi == 0.0 {
                return Ok(f64::INFINITY);
            }
            acc.add(qi * (qi / pi).ln());
        }
    }
    Ok(acc.value().max(0.0))
}

/// A finite set of base soft-label vectors with a prior and posterior over
/// them, plus the union grid parameters (s, g₀) controlling how posteriors
/// far from the prior are charged. Constructed through [`MixtureSpec::new`],
/// which validates shapes and distributions; posterior support outside the
/// prior's is allowed here and rejected (unbounded) at bound time.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    bases: Vec<Array1<f64>>,
    prior: Vec<f64>,
    posterior: Vec<f64>,
    s: f64,
    g0: f64,
}

impl MixtureSpec {
    pub const DEFAULT_S: f64 = 2.0;
    pub const DEFAULT_G0: f64 = 0.05;

    /// Builds a mixture over `bases` with the default grid (s = 2,
    /// g₀ = 0.05). All base vectors must share one length; `prior` and
    /// `posterior` must be distributions over the bases (nonnegative,
    /// summing to 1 within 1e-10).
    pub fn new(bases: Vec<Array1<f64>>, prior: Vec<f64>, posterior: Vec<f64>) -> Result<Self> {
        if bases.is_empty() {
            return Err(Error::InvalidParameter(
                "a mixture needs at least one base predictor".into(),
            ));
        }
        let len = bases[0].len();
        for (i, b) in bases.iter().enumerate() {
            if b.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "base {i} has length {} but base 0 has length {len}",
                    b.len()
                )));
            }
        }
        for (name, v) in [("prior", &prior), ("posterior", &posterior)] {
            if v.len() != bases.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} entries for {} bases",
                    v.len(),
                    bases.len()
                )));
            }
            let mut acc = KahanSum::new();
            for &x in v.iter() {
                if !(x >= 0.0) || !x.is_finite() {
                    return Err(Error::InvalidDistribution(format!(
                        "{name} has entry {x}"
                    )));
                }
                acc.add(x);
            }
            let sum = acc.value();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidDistribution(format!(
                    "{name} sums to {sum}"
                )));
            }
        }
        Ok(Self {
            bases,
            prior,
            posterior,
            s: Self::DEFAULT_S,
            g0: Self::DEFAULT_G0,
        })
    }

    /// Replaces the union grid parameters; requires s > 1 and g₀ > 0.
    pub fn with_grid(mut self, s: f64, g0: f64) -> Result<Self> {
        if !(s > 1.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid ratio must exceed 1 (got {s})"
            )));
        }
        if !(g0 > 0.0 && g0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid floor must be positive (got {g0})"
            )));
        }
        self.s = s;
        self.g0 = g0;
        Ok(self)
    }

    #[must_use]
    pub fn bases(&self) -> &[Array1<f64>] {
        &self.bases
    }

    #[must_use]
    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    #[must_use]
    pub fn posterior(&self) -> &[f64] {
        &self.posterior
    }

    #[must_use]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[must_use]
    pub fn g0(&self) -> f64 {
        self.g0
    }
}

/// The posterior-weighted convex combination Σ qᵢ·hᵢ of the base vectors.
#[must_use]
pub fn mixture_predict(spec: &MixtureSpec) -> Array1<f64> {
    let mut out = Array1::zeros(spec.bases[0].len());
    for (w, h) in spec.posterior.iter().zip(&spec.bases) {
        out.scaled_add(*w, h);
    }
    out
}

/// A fully assembled PAC-Bayesian mixture bound with every summand and
/// intermediate recorded. `total` is the exact ordered sum
/// `empirical_margin_error + complexity_term + slack_sqrt_min + slack_union`.
#[derive(Debug, Clone, PartialEq)]
pub struct PacBayesReport {
    /// Training-set margin error of the posterior mixture.
    pub empirical_margin_error: f64,
    pub kl: f64,
    /// g̃ = s·max(KL, g₀)
    pub g_tilde: f64,
    /// max over bases of ‖h‖₂²
    pub sup_norm_sq: f64,
    /// (Q/γ)·√(2·g̃·sup‖h‖²)
    pub complexity_term: f64,
    /// c₀·Q·√min(m,u)
    pub slack_sqrt_min: f64,
    /// √((S/2)·Q·(ln(1/δ) + union_log_term))
    pub slack_union: f64,
    /// 2·ln(log_s(g̃/g₀)); zero whenever KL ≤ g₀, in particular at q = p.
    pub union_log_term: f64,
    pub gamma: f64,
    pub delta: f64,
    pub m: usize,
    pub u: usize,
    pub total: f64,
    pub total_clipped: f64,
}

/// PAC-Bayesian risk bound for the posterior mixture h̃ = Σ qᵢhᵢ: with
/// probability ≥ 1 − δ, the test margin error of h̃ is at most its training
/// margin error plus `(Q/γ)·√(2·g̃(q)·sup‖h‖²) + c₀Q√min(m,u) + slack_union`
/// where g̃(q) = s·max(D(q‖p), g₀) and the union slack absorbs both the
/// confidence level and how far g̃ sits above the grid floor. An infinite
/// divergence (posterior mass outside the prior's support) is rejected.
pub fn pac_bayes_bound(
    spec: &MixtureSpec,
    sample: &FullSample,
    part: &Partition,
    gamma: f64,
    delta: f64,
) -> Result<PacBayesReport> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    let kl = kl_divergence(&spec.posterior, &spec.prior)?;
    if !kl.is_finite() {
        return Err(Error::UnboundedPosterior);
    }
    let mixture = mixture_predict(spec);
    let report = score_errors(mixture.view(), sample, part, gamma)?;
    let (m, u) = (part.m(), part.u());
    let constants = slack_constants(m, u)?;
    let q_const = constants.q_const;
    let g_tilde = spec.s * kl.max(spec.g0);
    let sup_norm_sq = spec
        .bases
        .iter()
        .map(|h| h.dot(h))
        .fold(0.0f64, f64::max);
    let complexity_term = q_const / gamma * (2.0 * g_tilde * sup_norm_sq).sqrt();
    let slack_sqrt_min = constants.c0 * q_const * ((m.min(u)) as f64).sqrt();
    let union_log_term = 2.0 * ((g_tilde / spec.g0).ln() / spec.s.ln()).ln();
    let slack_union =
        (constants.s_const / 2.0 * q_const * ((1.0 / delta).ln() + union_log_term)).sqrt();
    let total = report.empirical_margin + complexity_term + slack_sqrt_min + slack_union;
    Ok(PacBayesReport {
        empirical_margin_error: report.empirical_margin,
        kl,
        g_tilde,
        sup_norm_sq,
        complexity_term,
        slack_sqrt_min,
        slack_union,
        union_log_term,
        gamma,
        delta,
        m,
        u,
        total,
        total_clipped: clip_unit(total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::deviation_slack;
    use crate::rademacher::ComplexityMethod;
    use crate::sample::margin_loss;
    use ndarray::{arr1, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fixed_complexity(value: f64) -> ComplexityEstimate {
        ComplexityEstimate {
            method: ComplexityMethod::Generic,
            value,
            mc_mean: None,
            mc_lower: None,
            n_samples: None,
            delta: None,
            p: 0.25,
        }
    }

    fn random_sample(n: usize, seed: u64) -> FullSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let features = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1.0f64..1.0));
        let labels: Vec<i8> = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        FullSample::new(features, labels).unwrap()
    }

    #[test]
    fn margin_bound_with_zero_inputs_is_pure_slack() {
        let report = margin_risk_bound(0.0, fixed_complexity(0.0), 0.5, 20, 30, 0.05).unwrap();
        assert_eq!(
            report.total,
            report.slack_sqrt_min + report.slack_confidence
        );
        assert!(report.total > 0.0);
        assert_eq!(report.total_clipped, report.total.clamp(0.0, 1.0));
    }

    #[test]
    fn margin_bound_slack_matches_unit_range_deviation_slack_bitwise() {
        for (m, u) in [(5, 7), (100, 50), (2, 2), (145, 290)] {
            let report =
                margin_risk_bound(0.1, fixed_complexity(0.3), 0.25, m, u, 0.05).unwrap();
            let reference = deviation_slack(m, u, 0.0, 1.0, 0.05).unwrap();
            let combined = report.slack_sqrt_min + report.slack_confidence;
            assert_eq!(combined.to_bits(), reference.to_bits());
        }
    }

    #[test]
    fn margin_bound_total_is_the_exact_ordered_sum() {
        let c = fixed_complexity(0.37);
        let report = margin_risk_bound(0.21, c, 0.4, 12, 34, 0.1).unwrap();
        let expected = 0.21 + c.value / 0.4 + report.slack_sqrt_min + report.slack_confidence;
        assert_eq!(report.total.to_bits(), expected.to_bits());
        let again = margin_risk_bound(0.21, c, 0.4, 12, 34, 0.1).unwrap();
        assert_eq!(report.total.to_bits(), again.total.to_bits());
    }

    #[test]
    fn margin_bound_rejects_bad_parameters() {
        let c = fixed_complexity(0.0);
        assert!(matches!(
            margin_risk_bound(0.0, c, 0.0, 2, 2, 0.05),
            Err(Error::InvalidMargin(_))
        ));
        assert!(matches!(
            margin_risk_bound(0.0, c, 0.5, 2, 2, 1.0),
            Err(Error::InvalidConfidence(_))
        ));
        assert!(margin_risk_bound(0.0, c, 0.5, 0, 2, 0.05).is_err());
    }

    #[test]
    fn inductive_bound_hand_values() {
        // δ = 2/e² makes ln(2/δ) = 2, so the slack is √(4/m) = 2/√m.
        let delta = 2.0 / std::f64::consts::E.powi(2);
        let v = inductive_risk_bound(0.0, 0.0, 0.5, 100, delta).unwrap();
        assert!((v - 0.2).abs() < 1e-14, "{v}");
        // δ → 1⁻ leaves √(2·ln2/m).
        let near_one = inductive_risk_bound(0.0, 0.0, 0.5, 50, 1.0 - 1e-12).unwrap();
        let limit = (2.0 * 2.0f64.ln() / 50.0).sqrt();
        assert!((near_one - limit).abs() < 1e-9, "{near_one} vs {limit}");
        // r_ind enters divided by γ.
        let with_r = inductive_risk_bound(0.1, 0.3, 0.5, 100, delta).unwrap();
        assert!((with_r - (0.1 + 0.6 + 0.2)).abs() < 1e-14);
    }

    #[test]
    fn inductive_bound_decreases_in_m() {
        let mut last = f64::INFINITY;
        for m in [10, 40, 160, 640] {
            let v = inductive_risk_bound(0.05, 0.2, 0.5, m, 0.05).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn full_sample_translation_weights() {
        assert_eq!(full_sample_translate(0.2, 0.4, 7, 7), 0.2 + 0.2);
        let near_train_only = full_sample_translate(0.2, 1.0, 1_000_000, 1);
        assert!((near_train_only - 0.2) < 1.1e-6);
        assert_eq!(full_sample_translate(0.3, 9.9, 0, 0), 0.3);
        // Composing with the margin bound reweights exactly its slack part.
        let report = margin_risk_bound(0.1, fixed_complexity(0.2), 0.5, 10, 30, 0.05).unwrap();
        let slack_part = report.total - report.empirical_margin_error;
        let translated =
            full_sample_translate(report.empirical_margin_error, slack_part, 10, 30);
        assert!((translated - (0.1 + 0.75 * slack_part)).abs() < 1e-15);
    }

    #[test]
    fn kl_hand_values() {
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        let v = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - 2.0f64.ln()).abs() < 1e-15);
        assert!(kl_divergence(&[0.0, 1.0], &[1.0, 0.0])
            .unwrap()
            .is_infinite());
        assert!(matches!(
            kl_divergence(&[0.6, 0.5], &[0.5, 0.5]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(kl_divergence(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn kl_matches_direct_summation_and_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let raw_q: Vec<f64> = (0..6).map(|_| rng.random_range(0.01..1.0)).collect();
            let raw_p: Vec<f64> = (0..6).map(|_| rng.random_range(0.01..1.0)).collect();
            let sq: f64 = raw_q.iter().sum();
            let sp: f64 = raw_p.iter().sum();
            let q: Vec<f64> = raw_q.iter().map(|x| x / sq).collect();
            let p: Vec<f64> = raw_p.iter().map(|x| x / sp).collect();
            let v = kl_divergence(&q, &p).unwrap();
            let direct: f64 = q
                .iter()
                .zip(&p)
                .map(|(&qi, &pi)| qi * (qi / pi).ln())
                .sum();
            assert!((v - direct).abs() < 1e-12);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn mixture_prediction_is_the_convex_combination() {
        let bases = vec![arr1(&[1.0, 0.0, -1.0]), arr1(&[0.0, 2.0, 0.0])];
        let concentrated =
            MixtureSpec::new(bases.clone(), vec![0.5, 0.5], vec![0.0, 1.0]).unwrap();
        assert_eq!(mixture_predict(&concentrated), bases[1]);
        let identical = MixtureSpec::new(
            vec![bases[0].clone(), bases[0].clone()],
            vec![0.5, 0.5],
            vec![0.5, 0.5],
        )
        .unwrap();
        let blended = mixture_predict(&identical);
        for (a, b) in blended.iter().zip(bases[0].iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn mixture_spec_validation() {
        let bases = vec![arr1(&[1.0, 0.0]), arr1(&[0.0, 1.0, 2.0])];
        assert!(MixtureSpec::new(bases, vec![0.5, 0.5], vec![0.5, 0.5]).is_err());
        let ok = vec![arr1(&[1.0, 0.0]), arr1(&[0.0, 1.0])];
        assert!(MixtureSpec::new(ok.clone(), vec![0.7, 0.4], vec![0.5, 0.5]).is_err());
        assert!(MixtureSpec::new(ok.clone(), vec![0.5, 0.5], vec![0.5, 0.5])
            .unwrap()
            .with_grid(1.0, 0.05)
            .is_err());
        assert!(MixtureSpec::new(ok, vec![0.5, 0.5], vec![0.5, 0.5])
            .unwrap()
            .with_grid(2.0, 0.0)
            .is_err());
    }

    #[test]
    fn pac_bayes_at_posterior_equal_prior() {
        let sample = random_sample(8, 5);
        let part = Partition::new(8, vec![0, 1, 2]).unwrap();
        let bases = vec![
            arr1(&[0.2; 8]),
            arr1(&[-0.1; 8]),
            arr1(&[0.05; 8]),
        ];
        let spec = MixtureSpec::new(bases, vec![1.0 / 3.0; 3], vec![1.0 / 3.0; 3]).unwrap();
        let report = pac_bayes_bound(&spec, &sample, &part, 0.5, 0.05).unwrap();
        assert_eq!(report.union_log_term, 0.0);
        assert_eq!(report.kl, 0.0);
        // With the log term zero the union slack collapses to the shared
        // confidence slack.
        let reference = confidence_slack(part.m(), part.u(), 0.05).unwrap();
        assert_eq!(report.slack_union.to_bits(), reference.to_bits());
        // g̃ = s·g₀ pins the complexity term in closed form.
        let q = 1.0 / part.m() as f64 + 1.0 / part.u() as f64;
        let expected = q / 0.5 * (2.0 * 2.0 * 0.05 * report.sup_norm_sq).sqrt();
        assert!((report.complexity_term - expected).abs() < 1e-15);
        assert_eq!(
            report.total.to_bits(),
            (report.empirical_margin_error
                + report.complexity_term
                + report.slack_sqrt_min
                + report.slack_union)
                .to_bits()
        );
    }

    #[test]
    fn pac_bayes_single_base_equals_that_base() {
        let sample = random_sample(6, 9);
        let part = Partition::new(6, vec![0, 3]).unwrap();
        let base = arr1(&[0.4, -0.2, 0.9, -0.5, 0.1, -0.8]);
        let spec = MixtureSpec::new(vec![base.clone()], vec![1.0], vec![1.0]).unwrap();
        let report = pac_bayes_bound(&spec, &sample, &part, 0.5, 0.1).unwrap();
        let direct = score_errors(base.view(), &sample, &part, 0.5).unwrap();
        assert_eq!(report.empirical_margin_error, direct.empirical_margin);
        assert_eq!(report.kl, 0.0);
        assert_eq!(report.union_log_term, 0.0);
    }

    #[test]
    fn pac_bayes_complexity_grows_with_divergence() {
        let sample = random_sample(10, 13);
        let part = Partition::new(10, vec![0, 2, 4, 6]).unwrap();
        let bases = vec![arr1(&[0.3; 10]), arr1(&[-0.3; 10]), arr1(&[0.1; 10])];
        let prior = vec![1.0 / 3.0; 3];
        // Posteriors drifting away from uniform have increasing divergence.
        let posteriors = [
            vec![1.0 / 3.0; 3],
            vec![0.5, 0.3, 0.2],
            vec![0.7, 0.2, 0.1],
            vec![0.9, 0.05, 0.05],
            vec![0.99, 0.005, 0.005],
        ];
        let mut last_kl = -1.0;
        let mut last_complexity = -1.0;
        for q in posteriors {
            let spec = MixtureSpec::new(bases.clone(), prior.clone(), q).unwrap();
            let report = pac_bayes_bound(&spec, &sample, &part, 0.5, 0.05).unwrap();
            assert!(report.kl > last_kl);
            if report.kl > MixtureSpec::DEFAULT_G0 && last_kl > MixtureSpec::DEFAULT_G0 {
                assert!(
                    report.complexity_term > last_complexity,
                    "complexity must strictly grow once the divergence clears the floor"
                );
            } else {
                assert!(report.complexity_term >= last_complexity);
            }
            last_kl = report.kl;
            last_complexity = report.complexity_term;
        }
    }

    #[test]
    fn pac_bayes_complexity_is_continuous_at_vanishing_divergence() {
        let sample = random_sample(8, 21);
        let part = Partition::new(8, vec![0, 1, 4]).unwrap();
        let bases = vec![arr1(&[0.25; 8]), arr1(&[-0.5; 8])];
        let prior = vec![0.5, 0.5];
        let at_prior = pac_bayes_bound(
            &MixtureSpec::new(bases.clone(), prior.clone(), prior.clone()).unwrap(),
            &sample,
            &part,
            0.5,
            0.05,
        )
        .unwrap();
        for eps in [1e-3, 1e-6, 1e-9] {
            let q = vec![0.5 + eps, 0.5 - eps];
            let spec = MixtureSpec::new(bases.clone(), prior.clone(), q).unwrap();
            let report = pac_bayes_bound(&spec, &sample, &part, 0.5, 0.05).unwrap();
            // Tiny divergences stay below the g₀ floor, so the complexity
            // term is exactly the q = p value.
            assert!(report.kl < MixtureSpec::DEFAULT_G0);
            assert_eq!(
                report.complexity_term.to_bits(),
                at_prior.complexity_term.to_bits()
            );
        }
    }

    #[test]
    fn pac_bayes_rejects_unbounded_posteriors() {
        let sample = random_sample(6, 3);
        let part = Partition::new(6, vec![0, 1]).unwrap();
        let bases = vec![arr1(&[0.1; 6]), arr1(&[-0.1; 6])];
        let spec = MixtureSpec::new(bases, vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            pac_bayes_bound(&spec, &sample, &part, 0.5, 0.05),
            Err(Error::UnboundedPosterior)
        ));
    }

    #[test]
    fn mixture_margin_loss_obeys_jensen_against_the_hinge_majorant() {
        // The capped margin loss itself is not convex (the cap introduces a
        // concave kink at zero margin), so the mixture's loss can exceed the
        // posterior average of the capped losses. Jensen does hold against
        // the uncapped hinge majorant max(0, 1 − t/γ) ≥ capped loss.
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let gamma = 0.4;
        let hinge = |score: f64, label: i8| (1.0 - score * f64::from(label) / gamma).max(0.0);
        for trial in 0..20 {
            let n = 12;
            let sample = random_sample(n, 100 + trial);
            let bases: Vec<Array1<f64>> = (0..3)
                .map(|_| Array1::from_shape_fn(n, |_| rng.random_range(-1.5f64..1.5)))
                .collect();
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let q: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let spec = MixtureSpec::new(bases.clone(), vec![1.0 / 3.0; 3], q.clone()).unwrap();
            let mixture = mixture_predict(&spec);
            for i in 0..n {
                let label = sample.labels()[i];
                let mixed = margin_loss(mixture[i], label, gamma).unwrap();
                let averaged: f64 = bases
                    .iter()
                    .zip(&q)
                    .map(|(h, &w)| w * hinge(h[i], label))
                    .sum();
                assert!(
                    mixed <= averaged + 1e-12,
                    "point {i}: mixture loss {mixed} exceeds hinge average {averaged}"
                );
            }
        }
    }

    #[test]
    fn mixture_margin_loss_obeys_jensen_where_the_loss_is_convex() {
        // Restricted to nonnegative margins the cap never binds, the loss
        // is convex there, and the plain per-point Jensen bound holds.
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let gamma = 0.4;
        for trial in 0..20 {
            let n = 10;
            let sample = random_sample(n, 200 + trial);
            let bases: Vec<Array1<f64>> = (0..3)
                .map(|_| {
                    Array1::from_shape_fn(n, |i| {
                        rng.random_range(0.0f64..1.5) * f64::from(sample.labels()[i])
                    })
                })
                .collect();
            let raw: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let q: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let spec = MixtureSpec::new(bases.clone(), vec![1.0 / 3.0; 3], q.clone()).unwrap();
            let mixture = mixture_predict(&spec);
            for i in 0..n {
                let label = sample.labels()[i];
                let mixed = margin_loss(mixture[i], label, gamma).unwrap();
                let averaged: f64 = bases
                    .iter()
                    .zip(&q)
                    .map(|(h, &w)| w * margin_loss(h[i], label, gamma).unwrap())
                    .sum();
                assert!(
                    mixed <= averaged + 1e-12,
                    "point {i}: mixture loss {mixed} exceeds average {averaged}"
                );
            }
        }
    }
}
