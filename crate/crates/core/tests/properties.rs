//! Randomized property checks over the public API: loss dominance and
//! Lipschitz continuity, mixture identities, divergence positivity,
//! tail-bound monotonicity, bound homogeneity, and partition/error-report
//! invariants.

use ndarray::{Array1, Array2};
use proptest::prelude::*;
use transrad::concentration::{
    confidence_slack, deviation_slack, slack_constants, tail_bound, TailBoundQuery, TailKind,
};
use transrad::rademacher::{generic_ulr_bound, kernel_ulr_bound};
use transrad::riskbounds::{kl_divergence, mixture_predict, MixtureSpec};
use transrad::sample::{
    margin_loss, sample_partition, score_errors, zero_one_loss, FullSample, Partition,
};
use transrad::util::clip_unit;

fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

proptest! {
    /// The ramped margin loss never undercuts the 0/1 loss and stays in [0, 1].
    #[test]
    fn margin_loss_dominates_zero_one(
        score in -5.0f64..5.0,
        label in prop::sample::select(vec![-1i8, 1]),
        gamma in 0.05f64..3.0,
    ) {
        let margin = margin_loss(score, label, gamma).unwrap();
        let zero_one = zero_one_loss(score, label);
        prop_assert!((0.0..=1.0).contains(&margin));
        prop_assert!(margin >= zero_one - 1e-15);
    }

    /// The margin loss is (1/γ)-Lipschitz in the score.
    #[test]
    fn margin_loss_is_lipschitz(
        s1 in -5.0f64..5.0,
        s2 in -5.0f64..5.0,
        label in prop::sample::select(vec![-1i8, 1]),
        gamma in 0.05f64..3.0,
    ) {
        let l1 = margin_loss(s1, label, gamma).unwrap();
        let l2 = margin_loss(s2, label, gamma).unwrap();
        prop_assert!((l1 - l2).abs() <= (s1 - s2).abs() / gamma + 1e-12);
    }

    /// The mixture prediction is exactly the posterior-weighted sum of bases.
    #[test]
    fn mixture_prediction_matches_weighted_sum(
        values in prop::collection::vec(-3.0f64..3.0, 6..=24),
        raw_q in prop::collection::vec(0.05f64..1.0, 3),
    ) {
        let n = values.len() / 3;
        let bases: Vec<Array1<f64>> = (0..3)
            .map(|b| Array1::from_iter(values[b * n..(b + 1) * n].iter().copied()))
            .collect();
        let q = normalized(raw_q);
        let prior = vec![1.0 / 3.0; 3];
        let spec = MixtureSpec::new(bases.clone(), prior, q.clone()).unwrap();
        let mixed = mixture_predict(&spec);
        for j in 0..n {
            let direct: f64 = (0..3).map(|b| q[b] * bases[b][j]).sum();
            prop_assert!((mixed[j] - direct).abs() <= 1e-12);
        }
    }

    /// Divergence is nonnegative and vanishes only at equality.
    #[test]
    fn divergence_is_nonnegative(
        raw_q in prop::collection::vec(0.05f64..1.0, 4),
        raw_p in prop::collection::vec(0.05f64..1.0, 4),
    ) {
        let q = normalized(raw_q);
        let p = normalized(raw_p);
        prop_assert!(kl_divergence(&q, &p).unwrap() >= 0.0);
        prop_assert_eq!(kl_divergence(&q, &q.clone()).unwrap(), 0.0);
    }

    /// Every tail bound decays (weakly) as the threshold grows, and its
    /// clipped form is a probability.
    #[test]
    fn tail_bounds_decay_in_epsilon(
        m in 1usize..40,
        u in 1usize..40,
        beta in 0.01f64..2.0,
    ) {
        for kind in [
            TailKind::LipschitzTight,
            TailKind::LipschitzSimple,
            TailKind::TestTrainGap,
            TailKind::TrainMean,
            TailKind::Serfling,
        ] {
            let beta_arg = kind.needs_beta().then_some(beta);
            let mut last = f64::INFINITY;
            for i in 0..8 {
                let epsilon = 0.05 + 0.1 * i as f64;
                let bound = tail_bound(&TailBoundQuery { kind, m, u, beta: beta_arg, epsilon })
                    .unwrap();
                prop_assert!(bound <= last + 1e-12);
                let clipped = clip_unit(bound);
                prop_assert!((0.0..=1.0).contains(&clipped));
                last = bound;
            }
        }
    }

    /// The looser Lipschitz bound never undercuts the sharp one once both
    /// sides have at least two points (at min(m, u) = 1 the reduction to
    /// independent draws is the smaller of the two).
    #[test]
    fn simple_lipschitz_bound_dominates_tight(
        m in 2usize..40,
        u in 2usize..40,
        beta in 0.01f64..2.0,
        epsilon in 0.01f64..1.0,
    ) {
        let tight = tail_bound(&TailBoundQuery {
            kind: TailKind::LipschitzTight, m, u, beta: Some(beta), epsilon,
        }).unwrap();
        let simple = tail_bound(&TailBoundQuery {
            kind: TailKind::LipschitzSimple, m, u, beta: Some(beta), epsilon,
        }).unwrap();
        prop_assert!(simple >= tight - 1e-12);
    }

    /// Both closed-form complexity bounds are 1-homogeneous in the factor
    /// scale (the kernel one through its quadratic dependence).
    #[test]
    fn closed_form_bounds_scale_homogeneously(
        entries in prop::collection::vec(-1.0f64..1.0, 16),
        scale in 0.1f64..10.0,
        mu in 0.1f64..3.0,
    ) {
        let g = Array2::from_shape_vec((4, 4), entries).unwrap();
        let base = generic_ulr_bound(g.view(), mu, 2, 2).unwrap();
        let scaled = generic_ulr_bound((&g * scale).view(), mu, 2, 2).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * (1.0 + scaled.abs()));

        let psd = g.dot(&g.t());
        let kernel_base = kernel_ulr_bound(psd.view(), mu, 2, 2).unwrap();
        let kernel_scaled = kernel_ulr_bound((&psd * (scale * scale)).view(), mu, 2, 2).unwrap();
        prop_assert!(
            (kernel_scaled - scale * kernel_base).abs() <= 1e-10 * (1.0 + kernel_scaled.abs())
        );
    }

    /// Sampled partitions are exact set partitions of the index range.
    #[test]
    fn partitions_cover_the_range_disjointly(
        total in 2usize..60,
        seed in any::<u64>(),
    ) {
        let m = 1 + seed as usize % (total - 1);
        let part = sample_partition(total, m, seed).unwrap();
        prop_assert_eq!(part.m(), m);
        prop_assert_eq!(part.u(), total - m);
        let mut seen = vec![false; total];
        for &i in part.train_indices().iter().chain(part.test_indices()) {
            prop_assert!(!seen[i], "index {} appears twice", i);
            seen[i] = true;
        }
        prop_assert!(seen.into_iter().all(|s| s));
        prop_assert!(part.train_indices().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(part.test_indices().windows(2).all(|w| w[0] < w[1]));
    }

    /// Error rates mix: the full-sample rate is the size-weighted average of
    /// the train and test rates, for both losses.
    #[test]
    fn error_report_rates_mix_by_size(
        raw_scores in prop::collection::vec(-2.0f64..2.0, 8..=30),
        seed in any::<u64>(),
        gamma in 0.05f64..2.0,
    ) {
        let total = raw_scores.len();
        let labels: Vec<i8> = (0..total)
            .map(|i| if (seed >> (i % 60)) & 1 == 0 { 1 } else { -1 })
            .collect();
        let features = Array2::from_shape_fn((total, 2), |(i, j)| {
            1.0 + raw_scores[i].abs() + j as f64
        });
        let sample = FullSample::new(features, labels).unwrap();
        let m = 1 + (seed as usize >> 7) % (total - 1);
        let part = sample_partition(total, m, seed).unwrap();
        let h = Array1::from_vec(raw_scores);
        let report = score_errors(h.view(), &sample, &part, gamma).unwrap();
        let (mf, uf) = (part.m() as f64, part.u() as f64);
        let mix_01 = (mf * report.empirical_01 + uf * report.test_01) / (mf + uf);
        let mix_margin =
            (mf * report.empirical_margin + uf * report.test_margin) / (mf + uf);
        prop_assert!((report.full_sample_01 - mix_01).abs() <= 1e-12);
        prop_assert!((report.full_sample_margin - mix_margin).abs() <= 1e-12);
        for rate in [
            report.empirical_01,
            report.empirical_margin,
            report.test_01,
            report.test_margin,
            report.full_sample_01,
            report.full_sample_margin,
        ] {
            prop_assert!((0.0..=1.0).contains(&rate));
        }
    }

    /// Slack pieces: Q is exact, S is a mild inflation, the deviation slack
    /// is 1-homogeneous in the statistic's range and caps the pure
    /// confidence slack.
    #[test]
    fn slack_terms_behave(
        m in 1usize..200,
        u in 1usize..200,
        delta in 0.001f64..0.5,
        scale in 0.1f64..10.0,
    ) {
        let c = slack_constants(m, u).unwrap();
        prop_assert_eq!(c.q_const, 1.0 / m as f64 + 1.0 / u as f64);
        prop_assert!(c.s_const >= 1.0);
        prop_assert!(c.c0 > 5.0 && c.c0 < 5.05);

        let base = deviation_slack(m, u, -0.25, 1.0, delta).unwrap();
        let scaled = deviation_slack(m, u, -0.25 * scale, scale, delta).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * scaled.abs());
        prop_assert!(base >= confidence_slack(m, u, delta).unwrap() * 1.25 - 1e-12);
    }
}

/// Non-random spot check kept alongside the properties: a partition of two
/// points is one of exactly two splits, so uniformity is enumerable.
#[test]
fn partition_enumeration_smoke() {
    let mut seen = [false; 2];
    for seed in 0..32 {
        let part = sample_partition(2, 1, seed).unwrap();
        seen[part.train_indices()[0]] = true;
    }
    assert!(seen[0] && seen[1], "32 seeds never produced one of the two splits");
    assert!(Partition::new(2, vec![0, 1]).is_err());
}
