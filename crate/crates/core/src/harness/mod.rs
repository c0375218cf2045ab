//! Experiment orchestration: dataset → graph → model → truncation sweep →
//! assembled bounds, with deterministic emission.
//!
//! Determinism contract: the pair (configuration, seed) uniquely determines
//! every number in the sweep CSV. The partition is drawn from stream 0 of
//! the seed, Monte-Carlo probe i from stream 1's sub-stream i, and all
//! reductions run in draw-index order.

mod config;
mod dataset;
mod output;

pub use config::{AlgorithmSpec, DatasetSchema, ExperimentConfig};
pub use dataset::{load_dataset, standardize};
pub use output::{
    emit_csv, render_csv, render_metadata, write_metadata, TruncationRow, CSV_HEADER,
};

use crate::algorithms::{
    consistency_method, sgt, tikhonov_belkin, HypothesisFamily, LabelVector, UlrModel,
};
use crate::concentration::slack_constants;
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::rademacher::{
    exact_oracle, generic_ulr_bound, kernel_ulr_bound, sup_ball, sup_kernel, sup_vanilla,
    ComplexityEstimate, ComplexityMethod, EXACT_ORACLE_CAP,
};
use crate::riskbounds::{margin_risk_bound, BoundReport};
use crate::sample::{
    default_p, sample_partition, sample_rademacher, score_errors, ErrorReport,
};
use crate::spectral::{sym_eig, SpectralTolerances};
use crate::util::{derive_seed, frobenius_norm, KahanSum};
use ndarray::{s, Array2, ArrayView2};
use rayon::prelude::*;

/// Truncated spectral reconstruction: the sum of the `t` smallest
/// eigenpairs λᵢvᵢvᵢᵀ of a symmetric PSD matrix (1 ≤ t ≤ n).
pub fn spectral_truncate(u_mat: ArrayView2<'_, f64>, t: usize) -> Result<Array2<f64>> {
    let eig = sym_eig(u_mat, &SpectralTolerances::default())?;
    let fro = frobenius_norm(u_mat);
    if let Some(&min) = eig.values.first() {
        if min < -1e-8 * fro {
            return Err(Error::NotPsd(min));
        }
    }
    eig.reconstruct_truncated(t)
}

/// Everything one experiment produced: partition sizes, the constants that
/// scale every bound, the sweep rows, the model's error report, and the
/// assembled risk bound at the full (untruncated) model.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub m: usize,
    pub u: usize,
    pub q_const: f64,
    pub s_const: f64,
    pub c0: f64,
    pub p0: f64,
    pub seed: u64,
    pub grid: Vec<usize>,
    pub rows: Vec<TruncationRow>,
    pub errors: ErrorReport,
    pub risk: BoundReport,
    pub wall_seconds: f64,
}

/// Runs the full pipeline for one configuration and seed.
pub fn run_experiment(config: &ExperimentConfig, seed: u64) -> Result<ExperimentResult> {
    let start = std::time::Instant::now();
    let sample = load_dataset(&config.dataset_path, config.dataset_schema)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "experiment needs at least two points".into(),
        ));
    }
    let m = ((config.train_fraction * n as f64).floor() as usize).max(1);
    let part = sample_partition(n, m, derive_seed(seed, 0))?;
    let graph = build_graph(sample.features().view(), config.k_neighbors)?;
    let tau = LabelVector::from_sample(&sample, &part)?;
    let model = match config.algorithm {
        AlgorithmSpec::Cm { beta } => consistency_method(&graph, &tau, beta)?,
        AlgorithmSpec::Sgt { c, r } => sgt(&graph, &tau, c, r)?,
        AlgorithmSpec::Belkin { c } => tikhonov_belkin(&graph, &tau, c)?,
    };
    let errors = score_errors(model.h.view(), &sample, &part, config.gamma)?;
    let (m, u) = (part.m(), part.u());
    let constants = slack_constants(m, u)?;
    let mc_seed = derive_seed(seed, 1);
    let (grid, rows) = sweep(&model, m, u, config, mc_seed)?;
    let complexity = full_complexity(&model, m, u)?;
    let risk = margin_risk_bound(
        errors.empirical_margin,
        complexity,
        config.gamma,
        m,
        u,
        config.delta,
    )?;
    Ok(ExperimentResult {
        m,
        u,
        q_const: constants.q_const,
        s_const: constants.s_const,
        c0: constants.c0,
        p0: default_p(m, u),
        seed,
        grid,
        rows,
        errors,
        risk,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Tightest closed-form complexity of the untruncated model: the smaller of
/// the coefficient-norm and kernel-trace bounds, whichever are certified.
fn full_complexity(model: &UlrModel, m: usize, u: usize) -> Result<ComplexityEstimate> {
    let generic = match model.mu1 {
        Some(mu1) => Some(generic_ulr_bound(model.u_mat.view(), mu1, m, u)?),
        None => None,
    };
    let kernel = if model.is_kernel {
        let mu2 = model
            .mu2
            .ok_or(Error::MissingParameter("mu2 for a kernel model"))?;
        Some(kernel_ulr_bound(model.u_mat.view(), mu2, m, u)?)
    } else {
        None
    };
    let (method, value) = match (generic, kernel) {
        (Some(g), Some(k)) if g <= k => (ComplexityMethod::Generic, g),
        (_, Some(k)) => (ComplexityMethod::Kernel, k),
        (Some(g), None) => (ComplexityMethod::Generic, g),
        (None, None) => {
            return Err(Error::MissingParameter(
                "complexity certificate (mu1 or kernel mu2)",
            ))
        }
    };
    Ok(ComplexityEstimate {
        method,
        value,
        mc_mean: None,
        mc_lower: None,
        n_samples: None,
        delta: None,
        p: default_p(m, u),
    })
}

fn resolve_grid(requested: Option<&[usize]>, cap: usize) -> Result<Vec<usize>> {
    match requested {
        Some(g) => {
            let mut v = g.to_vec();
            v.sort_unstable();
            v.dedup();
            if v.is_empty() {
                return Err(Error::InvalidParameter("truncation grid is empty".into()));
            }
            if v[0] == 0 || *v.last().unwrap() > cap {
                return Err(Error::InvalidParameter(format!(
                    "truncation grid must lie within 1..={cap}"
                )));
            }
            Ok(v)
        }
        None => {
            let mut v = Vec::new();
            let mut t = 1usize;
            while t < cap {
                v.push(t);
                t *= 2;
            }
            v.push(cap);
            Ok(v)
        }
    }
}

fn sweep(
    model: &UlrModel,
    m: usize,
    u: usize,
    config: &ExperimentConfig,
    mc_seed: u64,
) -> Result<(Vec<usize>, Vec<TruncationRow>)> {
    if model.is_kernel && model.u_mat.nrows() == model.u_mat.ncols() {
        eigen_sweep(model, m, u, config, mc_seed)
    } else if model.hypothesis_family == HypothesisFamily::Ball && model.mu1.is_some() {
        column_sweep(model, m, u, config, mc_seed)
    } else {
        Err(Error::InvalidParameter(
            "truncation sweep needs a kernel factor or an orthonormal-column factor".into(),
        ))
    }
}

/// Hoeffding half-width of the Monte-Carlo mean: one probe's supremum lies
/// in a range certified by `range_cert` (μ₁·λ_max·√(m+u) or the kernel
/// analogue), so the mean of `n_draws` probes concentrates within
/// `range_cert·√(2·ln(1/δ)/n_draws)`.
fn mc_band_base(n: usize, delta: f64, n_draws: usize) -> f64 {
    (n as f64).sqrt() * (2.0 * (1.0 / delta).ln() / n_draws as f64).sqrt()
}

/// Sweep for square kernel factors (label propagation, Laplacian
/// regularization): truncation keeps the `t` smallest eigenpairs. Probes
/// are projected onto the eigenbasis once per draw and every truncation
/// level reuses the projection incrementally.
fn eigen_sweep(
    model: &UlrModel,
    m: usize,
    u: usize,
    config: &ExperimentConfig,
    mc_seed: u64,
) -> Result<(Vec<usize>, Vec<TruncationRow>)> {
    let n = model.u_mat.nrows();
    let eig = sym_eig(model.u_mat.view(), &SpectralTolerances::default())?;
    let fro = frobenius_norm(model.u_mat.view());
    if eig.values[0] < -1e-8 * fro {
        return Err(Error::NotPsd(eig.values[0]));
    }
    let lambdas: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
    // Row i of `basis` is eigenvector i, contiguous for the hot loops.
    let basis: Array2<f64> = eig.vectors.t().to_owned();
    let grid = resolve_grid(config.truncation_grid.as_deref(), n)?;
    let vanilla = model.hypothesis_family == HypothesisFamily::Vanilla;
    let mu2 = model
        .mu2
        .ok_or(Error::MissingParameter("mu2 for a kernel model"))?;
    let p0 = default_p(m, u);
    let q_const = 1.0 / m as f64 + 1.0 / u as f64;
    let n_draws = config.mc_samples;

    let sup_rows: Vec<Vec<f64>> = (0..n_draws)
        .into_par_iter()
        .map_init(
            || (vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; n]),
            |(c, w, scratch), i| -> Result<Vec<f64>> {
                let sigma = sample_rademacher(n, p0, derive_seed(mc_seed, i as u64))?;
                c.iter_mut().for_each(|x| *x = 0.0);
                for (row, sign) in sigma.nonzero() {
                    for (cj, vj) in c.iter_mut().zip(eig.vectors.row(row).iter()) {
                        *cj += sign * vj;
                    }
                }
                let mut out = Vec::with_capacity(grid.len());
                if vanilla {
                    w.iter_mut().for_each(|x| *x = 0.0);
                    let mut prev = 0usize;
                    for &t in &grid {
                        for idx in prev..t {
                            let scale = lambdas[idx] * c[idx];
                            if scale != 0.0 {
                                for (wj, bj) in w.iter_mut().zip(basis.row(idx).iter()) {
                                    *wj += scale * bj;
                                }
                            }
                        }
                        prev = t;
                        for (sj, wj) in scratch.iter_mut().zip(w.iter()) {
                            *sj = wj.abs();
                        }
                        let split = n - m;
                        scratch.select_nth_unstable_by(split, |a, b| {
                            a.partial_cmp(b).expect("finite scores")
                        });
                        out.push(scratch[split..].iter().sum());
                    }
                } else {
                    let mut quad = 0.0f64;
                    let mut prev = 0usize;
                    for &t in &grid {
                        for idx in prev..t {
                            quad += lambdas[idx] * c[idx] * c[idx];
                        }
                        prev = t;
                        out.push(mu2 * quad.max(0.0).sqrt());
                    }
                }
                Ok(out)
            },
        )
        .collect::<Result<Vec<_>>>()?;

    let band_base = mc_band_base(n, config.delta, n_draws);
    let mut u_acc: Array2<f64> = Array2::zeros((n, n));
    let mut prev = 0usize;
    let mut rows = Vec::with_capacity(grid.len());
    for (gi, &t) in grid.iter().enumerate() {
        for (idx, &lam) in lambdas.iter().enumerate().take(t).skip(prev) {
            if lam == 0.0 {
                continue;
            }
            let vrow = basis.row(idx);
            for a in 0..n {
                let va = lam * vrow[a];
                if va == 0.0 {
                    continue;
                }
                for b in a..n {
                    u_acc[(a, b)] += va * vrow[b];
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                u_acc[(b, a)] = u_acc[(a, b)];
            }
        }
        prev = t;

        let mut acc = KahanSum::new();
        for row in &sup_rows {
            acc.add(row[gi]);
        }
        let mean = acc.value() / n_draws as f64;
        let lambda_top = lambdas[t - 1];
        let band = if vanilla {
            model.mu1.expect("vanilla models certify mu1") * lambda_top * band_base
        } else {
            mu2 * lambda_top.sqrt() * band_base
        };
        let generic_bound = match model.mu1 {
            Some(mu1) => Some(generic_ulr_bound(u_acc.view(), mu1, m, u)?),
            None => None,
        };
        // For trinary coefficients (‖α‖² ≤ m) the truncated kernel also
        // certifies αᵀU_tα ≤ λ_max(U_t)·m, which is tighter when the kept
        // spectrum is small.
        let mu2_t = if vanilla {
            mu2.min((lambda_top * m as f64).sqrt())
        } else {
            mu2
        };
        let kernel_bound = Some(kernel_ulr_bound(u_acc.view(), mu2_t, m, u)?);
        let exact = if n <= EXACT_ORACLE_CAP {
            Some(if vanilla {
                exact_oracle(|sg| sup_vanilla(sg, u_acc.view(), m), m, u, p0)?
            } else {
                exact_oracle(|sg| sup_kernel(sg, u_acc.view(), mu2), m, u, p0)?
            })
        } else {
            None
        };
        rows.push(TruncationRow {
            t,
            mc_lower: q_const * (mean - band),
            mc_upper: q_const * (mean + band),
            generic_bound,
            kernel_bound,
            exact_oracle: exact,
        });
    }
    Ok((grid, rows))
}

/// Sweep for orthonormal-column factors (spectral transduction): truncation
/// keeps the first `t` columns, i.e. the lowest spectral directions.
fn column_sweep(
    model: &UlrModel,
    m: usize,
    u: usize,
    config: &ExperimentConfig,
    mc_seed: u64,
) -> Result<(Vec<usize>, Vec<TruncationRow>)> {
    let n = model.u_mat.nrows();
    let r = model.u_mat.ncols();
    let grid = resolve_grid(config.truncation_grid.as_deref(), r)?;
    let mu1 = model.mu1.expect("ball models certify mu1");
    let p0 = default_p(m, u);
    let q_const = 1.0 / m as f64 + 1.0 / u as f64;
    let n_draws = config.mc_samples;

    let sup_rows: Vec<Vec<f64>> = (0..n_draws)
        .into_par_iter()
        .map_init(
            || vec![0.0f64; r],
            |c, i| -> Result<Vec<f64>> {
                let sigma = sample_rademacher(n, p0, derive_seed(mc_seed, i as u64))?;
                c.iter_mut().for_each(|x| *x = 0.0);
                for (row, sign) in sigma.nonzero() {
                    for (cj, vj) in c.iter_mut().zip(model.u_mat.row(row).iter()) {
                        *cj += sign * vj;
                    }
                }
                let mut out = Vec::with_capacity(grid.len());
                let mut ssq = 0.0f64;
                let mut prev = 0usize;
                for &t in &grid {
                    for cj in &c[prev..t] {
                        ssq += cj * cj;
                    }
                    prev = t;
                    out.push(mu1 * ssq.sqrt());
                }
                Ok(out)
            },
        )
        .collect::<Result<Vec<_>>>()?;

    // Orthonormal columns: every truncation's largest singular value is 1.
    let band = mu1 * mc_band_base(n, config.delta, n_draws);
    let mut rows = Vec::with_capacity(grid.len());
    for (gi, &t) in grid.iter().enumerate() {
        let u_t = model.u_mat.slice(s![.., ..t]);
        let mut acc = KahanSum::new();
        for row in &sup_rows {
            acc.add(row[gi]);
        }
        let mean = acc.value() / n_draws as f64;
        let generic_bound = Some(generic_ulr_bound(u_t, mu1, m, u)?);
        let exact = if n <= EXACT_ORACLE_CAP {
            Some(exact_oracle(|sg| sup_ball(sg, u_t, mu1), m, u, p0)?)
        } else {
            None
        };
        rows.push(TruncationRow {
            t,
            mc_lower: q_const * (mean - band),
            mc_upper: q_const * (mean + band),
            generic_bound,
            kernel_bound: None,
            exact_oracle: exact,
        });
    }
    Ok((grid, rows))
}
