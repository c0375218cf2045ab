//! Dense symmetric eigendecomposition (cyclic Jacobi), singular values,
//! LU-based linear solves, and the sphere-constrained quadratic minimizer.
//!
//! Everything here targets dense matrices up to roughly 1500², which covers
//! every graph this toolkit builds; no sparse or iterative paths are
//! provided.

use crate::error::{Error, Result};
use crate::util::frobenius_norm;
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

/// Numeric tolerances for the solvers in this module. The defaults are the
/// contract values used by every caller; tests construct variants to probe
/// edge behavior.
#[derive(Debug, Clone, Copy)]
pub struct SpectralTolerances {
    /// Relative asymmetry (against ‖A‖_F) tolerated before rejecting input.
    pub symmetry_tol: f64,
    /// Jacobi convergence: off-diagonal Frobenius mass below this fraction
    /// of ‖A‖_F counts as diagonalized.
    pub jacobi_tol: f64,
    /// Maximum Jacobi sweeps before reporting non-convergence.
    pub max_jacobi_sweeps: usize,
    /// Hard-case detection: ‖projection of b onto the bottom eigenspace‖
    /// below this fraction of ‖b‖ switches the sphere solver to the
    /// eigenvector-augmentation path.
    pub hard_case_tol: f64,
    /// Offset keeping the secular-equation bracket strictly above −λ_min.
    pub secular_shift: f64,
    /// Bisection iterations for the secular equation.
    pub bisection_iters: usize,
    /// Newton refinement iterations after bisection.
    pub newton_iters: usize,
}

impl Default for SpectralTolerances {
    fn default() -> Self {
        Self {
            symmetry_tol: 1e-10,
            jacobi_tol: 1e-12,
            max_jacobi_sweeps: 64,
            hard_case_tol: 1e-10,
            secular_shift: 1e-12,
            bisection_iters: 120,
            newton_iters: 10,
        }
    }
}

/// A full symmetric eigendecomposition: `values` ascending, `vectors`
/// orthonormal with column i paired to `values[i]`. Column signs follow a
/// deterministic convention: the entry of largest magnitude (first index on
/// ties) is positive.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

impl EigenDecomposition {
    /// Rebuilds the rank-`t` matrix Σ λᵢvᵢvᵢᵀ over the `t` smallest
    /// eigenpairs.
    pub fn reconstruct_truncated(&self, t: usize) -> Result<Array2<f64>> {
        let n = self.values.len();
        if t == 0 || t > n {
            return Err(Error::InvalidParameter(format!(
                "truncation rank must satisfy 1 ≤ t ≤ {n} (got {t})"
            )));
        }
        let vt = self.vectors.slice(s![.., ..t]);
        let mut scaled = vt.to_owned();
        for (j, mut col) in scaled.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|x| x * self.values[j]);
        }
        Ok(scaled.dot(&vt.t()))
    }
}

fn off_diagonal_frobenius(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            acc += 2.0 * m[(p, q)] * m[(p, q)];
        }
    }
    acc.sqrt()
}

fn apply_sign_convention(vectors: &mut Array2<f64>) {
    for mut col in vectors.columns_mut() {
        let mut best = 0;
        let mut best_abs = col[0].abs();
        for (i, &x) in col.iter().enumerate().skip(1) {
            if x.abs() > best_abs {
                best = i;
                best_abs = x.abs();
            }
        }
        if col[best] < 0.0 {
            col.mapv_inplace(|x| -x);
        }
    }
}

/// Diagonalizes a symmetric matrix with the cyclic Jacobi method (threshold
/// sweeps, compensated diagonal updates). Robust and deterministic; O(n³)
/// per sweep with a handful of sweeps in practice.
pub fn sym_eig(a: ArrayView2<'_, f64>, opts: &SpectralTolerances) -> Result<EigenDecomposition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix (got {}×{})",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("eigendecomposition input"));
    }
    let fro = frobenius_norm(a);
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > opts.symmetry_tol * fro {
                return Err(Error::NotSymmetric);
            }
        }
    }
    // Work on the exactly-symmetrized upper triangle.
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[(i, i)] = a[(i, i)];
        for j in (i + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v: Array2<f64> = Array2::eye(n);
    let mut d: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let mut b: Vec<f64> = d.clone();
    let mut z: Vec<f64> = vec![0.0; n];

    let mut converged = n < 2;
    for sweep in 0..opts.max_jacobi_sweeps {
        if off_diagonal_frobenius(&m) <= opts.jacobi_tol * fro {
            converged = true;
            break;
        }
        let sm: f64 = {
            let mut acc = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    acc += m[(p, q)].abs();
                }
            }
            acc
        };
        let tresh = if sweep < 3 {
            0.2 * sm / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = 100.0 * m[(p, q)].abs();
                // After a few sweeps, zero out entries that are negligible
                // relative to both diagonal entries.
                if sweep > 3 && d[p].abs() + g == d[p].abs() && d[q].abs() + g == d[q].abs() {
                    m[(p, q)] = 0.0;
                    continue;
                }
                if m[(p, q)].abs() <= tresh {
                    continue;
                }
                let mut h = d[q] - d[p];
                let t = if h.abs() + g == h.abs() {
                    m[(p, q)] / h
                } else {
                    let theta = 0.5 * h / m[(p, q)];
                    let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        -t
                    } else {
                        t
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                h = t * m[(p, q)];
                z[p] -= h;
                z[q] += h;
                d[p] -= h;
                d[q] += h;
                m[(p, q)] = 0.0;
                let rotate = |mat: &mut Array2<f64>, i: usize, j: usize, k: usize, l: usize| {
                    let g = mat[(i, j)];
                    let h = mat[(k, l)];
                    mat[(i, j)] = g - s * (h + g * tau);
                    mat[(k, l)] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut m, j, p, j, q);
                }
                for j in (p + 1)..q {
                    rotate(&mut m, p, j, j, q);
                }
                for j in (q + 1)..n {
                    rotate(&mut m, p, j, q, j);
                }
                for j in 0..n {
                    rotate(&mut v, j, p, j, q);
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    if !converged && off_diagonal_frobenius(&m) > opts.jacobi_tol * fro {
        return Err(Error::NoConvergence(opts.max_jacobi_sweeps));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    apply_sign_convention(&mut vectors);
    Ok(EigenDecomposition { values, vectors })
}

/// Singular values of an arbitrary rectangular matrix, ascending. Computed
/// through the eigenvalues of the smaller Gram matrix; tiny negative
/// eigenvalues from roundoff are clamped to zero.
pub fn singular_values(u_mat: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    let (n, r) = (u_mat.nrows(), u_mat.ncols());
    if n == 0 || r == 0 {
        return Ok(Vec::new());
    }
    let gram = if n >= r {
        u_mat.t().dot(&u_mat)
    } else {
        u_mat.dot(&u_mat.t())
    };
    let eig = sym_eig(gram.view(), &SpectralTolerances::default())?;
    Ok(eig.values.iter().map(|&x| x.max(0.0).sqrt()).collect())
}

/// An LU factorization with partial pivoting, reusable across right-hand
/// sides (the consistency-method kernel is materialized through n solves
/// against one factorization).
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: Array2<f64>,
    perm: Vec<usize>,
}

impl LuFactor {
    /// Factors a square matrix; rejects matrices whose pivots fall below
    /// n·ε·max|aᵢⱼ| as singular to working precision.
    pub fn new(a: ArrayView2<'_, f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "linear solve needs a square matrix (got {}×{})",
                n,
                a.ncols()
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("linear-solve input"));
        }
        let max_abs = a.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let pivot_floor = n as f64 * f64::EPSILON * max_abs;
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_abs = lu[(k, k)].abs();
            for r in (k + 1)..n {
                if lu[(r, k)].abs() > pivot_abs {
                    pivot_row = r;
                    pivot_abs = lu[(r, k)].abs();
                }
            }
            if pivot_abs <= pivot_floor {
                return Err(Error::SingularSystem);
            }
            if pivot_row != k {
                perm.swap(k, pivot_row);
                for c in 0..n {
                    let tmp = lu[(k, c)];
                    lu[(k, c)] = lu[(pivot_row, c)];
                    lu[(pivot_row, c)] = tmp;
                }
            }
            for r in (k + 1)..n {
                let factor = lu[(r, k)] / lu[(k, k)];
                lu[(r, k)] = factor;
                for c in (k + 1)..n {
                    lu[(r, c)] -= factor * lu[(k, c)];
                }
            }
        }
        Ok(Self { lu, perm })
    }

    /// Solves `a·x = b` for one right-hand side.
    pub fn solve(&self, b: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let n = self.lu.nrows();
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {} but the matrix is {n}×{n}",
                b.len()
            )));
        }
        let mut x: Array1<f64> = self.perm.iter().map(|&i| b[i]).collect();
        // Forward substitution with unit-diagonal L.
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// One-shot linear solve `a·x = b` via LU with partial pivoting.
pub fn solve_linear(a: ArrayView2<'_, f64>, b: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
    LuFactor::new(a)?.solve(b)
}

/// Minimizer of a quadratic over a sphere, with the multiplier that
/// certifies it: `(a + lambda·I)·alpha = b` with `a + lambda·I` positive
/// semidefinite and `‖alpha‖₂ = radius`.
#[derive(Debug, Clone)]
pub struct SphereSolution {
    pub alpha: Array1<f64>,
    pub lambda: f64,
}

/// Globally minimizes `αᵀAα − 2bᵀα` subject to `‖α‖₂ = radius` (the
/// equality-constrained trust-region subproblem). Works in A's eigenbasis:
/// the multiplier solves the secular equation ‖(A+λI)⁻¹b‖ = radius on
/// (−λ_min, ∞), found by safeguarded bisection plus Newton refinement; when
/// b has no component in the bottom eigenspace and the interior limit
/// undershoots the radius (the hard case), the solution is completed with a
/// bottom-eigenvector direction.
pub fn sphere_constrained_min(
    a: ArrayView2<'_, f64>,
    b: ArrayView1<'_, f64>,
    radius: f64,
    opts: &SpectralTolerances,
) -> Result<SphereSolution> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "quadratic is {n}×{n} but the linear term has length {}",
            b.len()
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sphere radius must be positive and finite (got {radius})"
        )));
    }
    let eig = sym_eig(a, opts)?;
    let lam = &eig.values;
    let lam_min = lam[0];
    // Coordinates of b in the eigenbasis.
    let b_tilde = eig.vectors.t().dot(&b);
    let b_norm = b_tilde.iter().map(|x| x * x).sum::<f64>().sqrt();

    // Bottom eigenspace: eigenvalues indistinguishable from λ_min.
    let gap_tol = 1e-10 * (1.0 + lam_min.abs());
    let bottom: Vec<usize> = (0..n).filter(|&i| lam[i] - lam_min <= gap_tol).collect();
    let bottom_mass = bottom
        .iter()
        .map(|&i| b_tilde[i] * b_tilde[i])
        .sum::<f64>()
        .sqrt();

    let alpha_from = |coeffs: &Array1<f64>| -> Array1<f64> { eig.vectors.dot(coeffs) };
    let phi = |lambda: f64| -> f64 {
        lam.iter()
            .zip(b_tilde.iter())
            .map(|(&l, &bi)| {
                let r = bi / (l + lambda);
                r * r
            })
            .sum::<f64>()
            .sqrt()
    };

    // Interior limit of the norm as λ → −λ_min, excluding the bottom space.
    let phi_perp_edge = lam
        .iter()
        .zip(b_tilde.iter())
        .enumerate()
        .filter(|&(i, _)| !bottom.contains(&i))
        .map(|(_, (&l, &bi))| {
            let r = bi / (l - lam_min);
            r * r
        })
        .sum::<f64>()
        .sqrt();

    if b_norm == 0.0 || (bottom_mass <= opts.hard_case_tol * b_norm && phi_perp_edge <= radius) {
        // Hard case: fix λ* = −λ_min, take the interior component, and top
        // up to the radius along the first bottom eigenvector.
        let lambda = -lam_min;
        let mut coeffs = Array1::zeros(n);
        for i in 0..n {
            if !bottom.contains(&i) {
                coeffs[i] = b_tilde[i] / (lam[i] + lambda);
            }
        }
        let top_up = (radius * radius - phi_perp_edge * phi_perp_edge).max(0.0).sqrt();
        coeffs[bottom[0]] = top_up;
        let mut alpha = alpha_from(&coeffs);
        let norm = alpha.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            alpha.mapv_inplace(|x| x * radius / norm);
        }
        return Ok(SphereSolution { alpha, lambda });
    }

    // Generic case: bracket the secular root. φ is strictly decreasing on
    // (−λ_min, ∞); it diverges at the left end (the bottom component is
    // nonzero) and is < radius at the right end below.
    let mut lo = -lam_min + opts.secular_shift * (1.0 + lam_min.abs());
    let mut hi = -lam_min + b_norm / radius + 1.0;
    for _ in 0..opts.bisection_iters {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    // Newton refinement on φ(λ) − radius with the bracket as a safeguard.
    for _ in 0..opts.newton_iters {
        let value = phi(lambda);
        if !value.is_finite() {
            break;
        }
        let slope = -lam
            .iter()
            .zip(b_tilde.iter())
            .map(|(&l, &bi)| bi * bi / (l + lambda).powi(3))
            .sum::<f64>()
            / value;
        if slope == 0.0 {
            break;
        }
        let next = lambda - (value - radius) / slope;
        lambda = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }
    let coeffs: Array1<f64> = lam
        .iter()
        .zip(b_tilde.iter())
        .map(|(&l, &bi)| bi / (l + lambda))
        .collect();
    let mut alpha = alpha_from(&coeffs);
    let norm = alpha.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        alpha.mapv_inplace(|x| x * radius / norm);
    }
    Ok(SphereSolution { alpha, lambda })
}
