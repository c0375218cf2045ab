//! The three transductive graph classifiers. Each returns its factored form
//! `h = U·α` — with `U` depending only on the unlabeled point set and `α`
//! carrying the label information — together with certified norm bounds that
//! the complexity estimators consume.

use crate::error::{Error, Result};
use crate::graph::{connected_components, GraphBundle};
use crate::sample::{FullSample, Partition};
use crate::spectral::{
    solve_linear, sphere_constrained_min, sym_eig, LuFactor, SpectralTolerances,
};
use ndarray::{s, Array1, Array2};

/// Which constraint set the coefficient vector `α` ranges over; this selects
/// the matching supremum routine for complexity estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisFamily {
    /// `‖α‖₂ ≤ μ₁` (Euclidean ball).
    Ball,
    /// `α` has exactly m entries in {−1,+1} (on the train indices) and zeros
    /// elsewhere.
    Vanilla,
}

impl HypothesisFamily {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            HypothesisFamily::Ball => "ball",
            HypothesisFamily::Vanilla => "vanilla",
        }
    }
}

/// A soft classifier in factored form `h = U·α`, with certified norm bounds.
/// `mu1` bounds `‖α‖₂` when present; `mu2` bounds `√(αᵀUα)` and is present
/// exactly when `U` is a positive semidefinite kernel matrix.
#[derive(Debug, Clone)]
pub struct UlrModel {
    pub u_mat: Array2<f64>,
    pub alpha: Array1<f64>,
    pub h: Array1<f64>,
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub is_kernel: bool,
    pub hypothesis_family: HypothesisFamily,
}

impl UlrModel {
    /// Builds a model and enforces the cheap structural invariants:
    /// consistent shapes, `‖h − U·α‖∞ ≤ 1e-8`, `‖α‖₂ ≤ μ₁·(1+1e-8)` when μ₁
    /// is certified, and for kernels a square symmetric `U` with
    /// `αᵀUα ≤ μ₂²·(1+1e-8)`. (Full PSD validation is a spectral test,
    /// exercised in the test suite rather than on every construction.)
    pub fn new(
        u_mat: Array2<f64>,
        alpha: Array1<f64>,
        h: Array1<f64>,
        mu1: Option<f64>,
        mu2: Option<f64>,
        is_kernel: bool,
        hypothesis_family: HypothesisFamily,
    ) -> Result<Self> {
        if u_mat.nrows() != h.len() || u_mat.ncols() != alpha.len() {
            return Err(Error::DimensionMismatch(format!(
                "factored model shapes disagree: U is {}×{}, α has {}, h has {}",
                u_mat.nrows(),
                u_mat.ncols(),
                alpha.len(),
                h.len()
            )));
        }
        let recomputed = u_mat.dot(&alpha);
        let drift = h
            .iter()
            .zip(recomputed.iter())
            .fold(0.0f64, |acc, (&a, &b)| acc.max((a - b).abs()));
        if drift > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "soft labels drift from U·α by {drift} (limit 1e-8)"
            )));
        }
        if let Some(m1) = mu1 {
            let norm = alpha.dot(&alpha).sqrt();
            if !(m1 >= 0.0) || norm > m1 * (1.0 + 1e-8) {
                return Err(Error::InvalidParameter(format!(
                    "certified ‖α‖₂ bound {m1} violated by actual norm {norm}"
                )));
            }
        }
        if is_kernel {
            let Some(m2) = mu2 else {
                return Err(Error::MissingParameter(
                    "kernel models must certify the quadratic-form bound mu2",
                ));
            };
            if u_mat.nrows() != u_mat.ncols() {
                return Err(Error::DimensionMismatch(
                    "kernel models need a square U".into(),
                ));
            }
            let quad = alpha.dot(&u_mat.dot(&alpha));
            if quad > m2 * m2 * (1.0 + 1e-8) {
                return Err(Error::InvalidParameter(format!(
                    "certified αᵀUα bound {} violated by actual value {quad}",
                    m2 * m2
                )));
            }
        } else if mu2.is_some() {
            return Err(Error::InvalidParameter(
                "mu2 is only meaningful for kernel models".into(),
            ));
        }
        Ok(Self {
            u_mat,
            alpha,
            h,
            mu1,
            mu2,
            is_kernel,
            hypothesis_family,
        })
    }

    /// Spectral validation of the kernel claim: the smallest eigenvalue of
    /// `U` must be ≥ −1e-8·‖U‖_F.
    pub fn validate_kernel_psd(&self) -> Result<()> {
        if !self.is_kernel {
            return Ok(());
        }
        let eig = sym_eig(self.u_mat.view(), &SpectralTolerances::default())?;
        let floor = -1e-8 * crate::util::frobenius_norm(self.u_mat.view());
        match eig.values.first() {
            Some(&min) if min < floor => Err(Error::NotPsd(min)),
            _ => Ok(()),
        }
    }
}

/// Train labels spread over the full sample: ±1 on the partition's train
/// indices, 0 everywhere else. Constructed against a partition so indices
/// cannot skew.
#[derive(Debug, Clone)]
pub struct LabelVector {
    tau: Array1<f64>,
    m: usize,
}

impl LabelVector {
    /// Places the given ±1 labels (one per train index, in the partition's
    /// sorted train order) into a full-length vector.
    pub fn new(part: &Partition, train_labels: &[i8]) -> Result<Self> {
        if train_labels.len() != part.m() {
            return Err(Error::DimensionMismatch(format!(
                "{} train labels supplied for {} train indices",
                train_labels.len(),
                part.m()
            )));
        }
        let mut tau = Array1::zeros(part.total());
        for (&idx, &y) in part.train_indices().iter().zip(train_labels) {
            if y != -1 && y != 1 {
                return Err(Error::InvalidLabel {
                    line: idx,
                    value: y.to_string(),
                });
            }
            tau[idx] = f64::from(y);
        }
        Ok(Self { tau, m: part.m() })
    }

    /// Reveals the sample's labels on the train side only.
    pub fn from_sample(sample: &FullSample, part: &Partition) -> Result<Self> {
        if sample.len() != part.total() {
            return Err(Error::DimensionMismatch(format!(
                "partition covers {} points but the sample has {}",
                part.total(),
                sample.len()
            )));
        }
        let train_labels: Vec<i8> = part
            .train_indices()
            .iter()
            .map(|&i| sample.labels()[i])
            .collect();
        Self::new(part, &train_labels)
    }

    #[must_use]
    pub fn tau(&self) -> &Array1<f64> {
        &self.tau
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Number of labeled (train) entries.
    #[must_use]
    pub fn m(&self) -> usize {
        self.m
    }
}

/// Solves `(I − β·N)x = (1−β)·rhs` where `N` is the graph's degree-
/// normalized weight matrix. The system is always nonsingular for
/// β ∈ (0,1) because N's spectrum lies in [−1, 1].
fn cm_solve(graph: &GraphBundle, rhs: &Array1<f64>, beta: f64) -> Result<Array1<f64>> {
    let n = graph.len();
    let mut system = graph.lap_norm_sym.mapv(|x| -beta * x);
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let x = solve_linear(system.view(), rhs.view())?;
    Ok(x.mapv(|v| (1.0 - beta) * v))
}

/// Label propagation by normalized-graph smoothing: soft labels solve
/// `(I − β·D^{-1/2}WD^{-1/2})·h = (1−β)·τ`. Returns the full factored model
/// with the propagation kernel `U = (1−β)(I − βD^{-1/2}WD^{-1/2})^{-1}`
/// materialized column-by-column from one factorization; `U`'s spectrum
/// lies in (0, 1] with maximum exactly 1, so both norm certificates equal
/// √m.
pub fn consistency_method(graph: &GraphBundle, tau: &LabelVector, beta: f64) -> Result<UlrModel> {
    let n = graph.len();
    if tau.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "label vector has length {} but the graph has {n} vertices",
            tau.len()
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing weight beta must lie in (0,1) (got {beta})"
        )));
    }
    let mut system = graph.lap_norm_sym.mapv(|x| -beta * x);
    for i in 0..n {
        system[(i, i)] += 1.0;
    }
    let lu = LuFactor::new(system.view())?;
    let mut u_mat = Array2::zeros((n, n));
    let mut basis = Array1::zeros(n);
    for j in 0..n {
        basis[j] = 1.0;
        let col = lu.solve(basis.view())?;
        basis[j] = 0.0;
        for i in 0..n {
            u_mat[(i, j)] = (1.0 - beta) * col[i];
        }
    }
    // The exact kernel is symmetric; remove the LU solve's roundoff skew.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (u_mat[(i, j)] + u_mat[(j, i)]);
            u_mat[(i, j)] = avg;
            u_mat[(j, i)] = avg;
        }
    }
    let h = lu.solve(tau.tau().view())?.mapv(|v| (1.0 - beta) * v);
    let sqrt_m = (tau.m() as f64).sqrt();
    UlrModel::new(
        u_mat,
        tau.tau().clone(),
        h,
        Some(sqrt_m),
        Some(sqrt_m),
        true,
        HypothesisFamily::Vanilla,
    )
}

/// The label-propagation scores alone, via a single linear solve — for
/// callers that only need predictions, not the materialized kernel.
pub fn cm_predict(graph: &GraphBundle, tau: &LabelVector, beta: f64) -> Result<Array1<f64>> {
    if tau.len() != graph.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vector has length {} but the graph has {} vertices",
            tau.len(),
            graph.len()
        )));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing weight beta must lie in (0,1) (got {beta})"
        )));
    }
    cm_solve(graph, tau.tau(), beta)
}

/// Spectral graph transduction: restricts the soft labels to the span of
/// the Laplacian eigenvectors v₂..v_{r+1} with squared-index eigenvalue
/// reweighting, and minimizes the penalized quadratic under the zero-mean,
/// fixed-norm constraints. The zero-mean constraint is automatic because
/// every retained eigenvector is orthogonal to the constant vector, which
/// is why the graph must be connected.
pub fn sgt(graph: &GraphBundle, tau: &LabelVector, c: f64, r: usize) -> Result<UlrModel> {
    let n = graph.len();
    if tau.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "label vector has length {} but the graph has {n} vertices",
            tau.len()
        )));
    }
    if graph.component_count != 1 {
        return Err(Error::Disconnected(graph.component_count));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "penalty weight c must be positive (got {c})"
        )));
    }
    if r == 0 || r > n - 1 {
        return Err(Error::InvalidParameter(format!(
            "spectral rank must satisfy 1 ≤ r ≤ {} (got {r})",
            n - 1
        )));
    }
    let eig = sym_eig(graph.lap_unnorm.view(), &SpectralTolerances::default())?;
    let u = eig.vectors.slice(s![.., 1..=r]).to_owned();
    let m = tau.m() as f64;
    // C·x scales train entries by 1/m and zeroes the rest; τ is already
    // supported on the train set.
    let is_train: Vec<bool> = {
        let mut mask = vec![false; n];
        for (i, &t) in tau.tau().iter().enumerate() {
            if t != 0.0 {
                mask[i] = true;
            }
        }
        mask
    };
    let mut cu = u.clone();
    for (i, mut row) in cu.rows_mut().into_iter().enumerate() {
        let scale = if is_train[i] { 1.0 / m } else { 0.0 };
        row.mapv_inplace(|x| x * scale);
    }
    let mut a_red = u.t().dot(&cu).mapv(|x| c * x);
    for (j, diag) in a_red.diag_mut().iter_mut().enumerate() {
        let idx = (j + 2) as f64;
        *diag += idx * idx;
    }
    let ctau = tau.tau().mapv(|x| x / m);
    let b_red = u.t().dot(&ctau).mapv(|x| c * x);
    let radius = (n as f64).sqrt();
    let sol = sphere_constrained_min(
        a_red.view(),
        b_red.view(),
        radius,
        &SpectralTolerances::default(),
    )?;
    let h = u.dot(&sol.alpha);
    UlrModel::new(
        u,
        sol.alpha,
        h,
        Some(radius),
        None,
        false,
        HypothesisFamily::Ball,
    )
}

/// Laplacian-regularized regression with zero-mean constraints: minimizes
/// `hᵀLh + c·(h−τ)ᵀC(h−τ)` subject to h summing to zero on every connected
/// component, via the KKT linear system. The reproducing kernel is the
/// pseudo-inverse of L (inverted nonzero eigenvalues), and the optimum's
/// smoothness certificate gives `√(αᵀUα) ≤ √c`.
pub fn tikhonov_belkin(graph: &GraphBundle, tau: &LabelVector, c: f64) -> Result<UlrModel> {
    let n = graph.len();
    if tau.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "label vector has length {} but the graph has {n} vertices",
            tau.len()
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "penalty weight c must be positive (got {c})"
        )));
    }
    let m = tau.m() as f64;
    let t = graph.component_count;
    let (_, comp_labels) = connected_components(graph.w.view())?;
    // KKT system over (h, ν): [[2(L + cC), G], [Gᵀ, 0]] with G the component
    // indicator columns (the all-ones vector when connected).
    let dim = n + t;
    let mut kkt = Array2::zeros((dim, dim));
    for i in 0..n {
        for j in 0..n {
            kkt[(i, j)] = 2.0 * graph.lap_unnorm[(i, j)];
        }
    }
    let is_train: Vec<bool> = tau.tau().iter().map(|&x| x != 0.0).collect();
    for i in 0..n {
        if is_train[i] {
            kkt[(i, i)] += 2.0 * c / m;
        }
        let g = n + comp_labels[i];
        kkt[(i, g)] = 1.0;
        kkt[(g, i)] = 1.0;
    }
    let mut rhs = Array1::zeros(dim);
    for i in 0..n {
        rhs[i] = 2.0 * c * tau.tau()[i] / m;
    }
    let solution = solve_linear(kkt.view(), rhs.view())?;
    let h: Array1<f64> = solution.slice(s![..n]).to_owned();

    let eig = sym_eig(graph.lap_unnorm.view(), &SpectralTolerances::default())?;
    // The t smallest eigenvalues are the zero modes (one per component);
    // the kernel inverts the rest.
    let mut u_mat = Array2::zeros((n, n));
    let mut alpha = Array1::zeros(n);
    for idx in t..n {
        let lambda = eig.values[idx];
        let v = eig.vectors.column(idx);
        let vh = v.dot(&h);
        for i in 0..n {
            for j in 0..n {
                u_mat[(i, j)] += v[i] * v[j] / lambda;
            }
            alpha[i] += lambda * vh * v[i];
        }
    }
    UlrModel::new(
        u_mat,
        alpha,
        h,
        None,
        Some(c.sqrt()),
        true,
        HypothesisFamily::Ball,
    )
}
