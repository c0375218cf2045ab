//! Similarity-graph construction: cosine similarity, symmetrized k-nearest-
//! neighbor weights, Laplacians, and connected components.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, ArrayView2};
use std::collections::VecDeque;

/// A weighted undirected graph together with the derived matrices every
/// algorithm consumes: degrees, the unnormalized Laplacian `D − W`, the
/// degree-normalized weight matrix `D^{-1/2} W D^{-1/2}`, and the connected
/// component count.
#[derive(Debug, Clone)]
pub struct GraphBundle {
    /// Symmetric nonnegative weights with a zero diagonal.
    pub w: Array2<f64>,
    /// Row sums of `w`; strictly positive (isolated vertices are rejected).
    pub degrees: Array1<f64>,
    /// Unnormalized Laplacian `D − W`; positive semidefinite and annihilates
    /// the all-ones vector.
    pub lap_unnorm: Array2<f64>,
    /// `D^{-1/2} W D^{-1/2}`; symmetric with spectrum in [−1, 1] and 1
    /// attained.
    pub lap_norm_sym: Array2<f64>,
    /// Number of connected components under "edge iff w(i,j) > 0".
    pub component_count: usize,
}

impl GraphBundle {
    /// Validates a weight matrix (square, exactly symmetric, nonnegative,
    /// zero diagonal, no zero-degree vertex) and assembles the bundle.
    pub fn from_weights(w: Array2<f64>) -> Result<Self> {
        let n = w.nrows();
        if w.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "weight matrix must be square (got {}×{})",
                n,
                w.ncols()
            )));
        }
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "weight matrix must have a zero diagonal (entry ({i},{i}) = {})",
                    w[(i, i)]
                )));
            }
            for j in 0..n {
                let wij = w[(i, j)];
                if !wij.is_finite() {
                    return Err(Error::NonFinite("graph weight"));
                }
                if wij < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "weights must be nonnegative (entry ({i},{j}) = {wij})"
                    )));
                }
                if wij != w[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let degrees: Array1<f64> = w.rows().into_iter().map(|row| row.sum()).collect();
        for (i, &d) in degrees.iter().enumerate() {
            if d == 0.0 {
                return Err(Error::IsolatedVertex(i));
            }
        }
        let mut lap_unnorm = Array2::zeros((n, n));
        let mut lap_norm_sym = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    lap_unnorm[(i, j)] = degrees[i] - w[(i, j)];
                } else {
                    lap_unnorm[(i, j)] = -w[(i, j)];
                }
                lap_norm_sym[(i, j)] = w[(i, j)] / (degrees[i] * degrees[j]).sqrt();
            }
        }
        let (component_count, _) = connected_components(w.view())?;
        Ok(Self {
            w,
            degrees,
            lap_unnorm,
            lap_norm_sym,
            component_count,
        })
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.w.nrows() == 0
    }
}

/// Pairwise clamped cosine similarity: entry (i,j) = max(0, cos(xᵢ, xⱼ)) for
/// i ≠ j, diagonal 0. Negative cosines are clamped so downstream weights are
/// nonnegative; values are also capped at 1 to absorb roundoff overshoot.
pub fn cosine_similarity(features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = features.nrows();
    let norms: Vec<f64> = (0..n)
        .map(|i| features.row(i).dot(&features.row(i)).sqrt())
        .collect();
    for (i, &nm) in norms.iter().enumerate() {
        if nm == 0.0 {
            return Err(Error::DegenerateFeatures(i));
        }
        if !nm.is_finite() {
            return Err(Error::NonFinite("feature row norm"));
        }
    }
    let mut sim = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let cos = features.row(i).dot(&features.row(j)) / (norms[i] * norms[j]);
            let clamped = cos.clamp(0.0, 1.0);
            sim[(i, j)] = clamped;
            sim[(j, i)] = clamped;
        }
    }
    Ok(sim)
}

/// Builds the union-symmetrized k-nearest-neighbor graph: an edge (i,j)
/// carries weight sim(i,j) when j is among the k most similar points to i or
/// vice versa. Ties at the k-th rank are all kept, so a vertex may exceed k
/// neighbors; this makes the graph independent of input order.
pub fn knn_graph(sim: ArrayView2<'_, f64>, k: usize) -> Result<GraphBundle> {
    let n = sim.nrows();
    if sim.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "similarity matrix must be square (got {}×{})",
            n,
            sim.ncols()
        )));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "k must satisfy 1 ≤ k ≤ {} (got {k})",
            n.saturating_sub(1)
        )));
    }
    if sim.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("similarity"));
    }
    // keep[i][j]: j is within vertex i's (tie-extended) top-k list.
    let mut keep = vec![false; n * n];
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| {
            sim[(i, b)]
                .partial_cmp(&sim[(i, a)])
                .expect("finite similarities")
                .then(a.cmp(&b))
        });
        let threshold = sim[(i, others[k - 1])];
        for &j in &others {
            if sim[(i, j)] >= threshold {
                keep[i * n + j] = true;
            } else {
                break;
            }
        }
    }
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j && (keep[i * n + j] || keep[j * n + i]) {
                w[(i, j)] = sim[(i, j)];
            }
        }
    }
    GraphBundle::from_weights(w)
}

/// Counts connected components under "edge iff w(i,j) > 0" and labels each
/// vertex with its component id (ids assigned in order of first discovery).
pub fn connected_components(w: ArrayView2<'_, f64>) -> Result<(usize, Vec<usize>)> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "weight matrix must be square (got {}×{})",
            n,
            w.ncols()
        )));
    }
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for j in 0..n {
                if label[j] == usize::MAX && w[(v, j)] > 0.0 {
                    label[j] = count;
                    queue.push_back(j);
                }
            }
        }
        count += 1;
    }
    Ok((count, label))
}

/// Convenience pipeline used by the experiment harness: cosine similarity
/// followed by the symmetrized kNN graph.
pub fn build_graph(features: ArrayView2<'_, f64>, k: usize) -> Result<GraphBundle> {
    let sim = cosine_similarity(features)?;
    knn_graph(sim.view(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sym_eig;
    use ndarray::{arr2, Array2};

    #[test]
    fn cosine_handles_identical_orthogonal_and_antiparallel_rows() {
        let feats = arr2(&[
            [1.0, 2.0, 0.0],
            [1.0, 2.0, 0.0],  // identical to row 0
            [0.0, 0.0, 3.0],  // orthogonal to rows 0-1
            [-1.0, -2.0, 0.0], // antiparallel to row 0
        ]);
        let sim = cosine_similarity(feats.view()).unwrap();
        assert!((sim[(0, 1)] - 1.0).abs() < 1e-12);
        assert_eq!(sim[(0, 2)], 0.0);
        assert_eq!(sim[(0, 3)], 0.0, "negative cosine must clamp to 0");
        for i in 0..4 {
            assert_eq!(sim[(i, i)], 0.0);
        }
    }

    #[test]
    fn cosine_rejects_zero_rows() {
        let feats = arr2(&[[1.0, 0.0], [0.0, 0.0]]);
        assert!(matches!(
            cosine_similarity(feats.view()),
            Err(Error::DegenerateFeatures(1))
        ));
    }

    #[test]
    fn complete_knn_graph_recovers_the_similarity_matrix() {
        // k = n−1 with all-positive similarities keeps every off-diagonal
        // entry.
        let sim = arr2(&[
            [0.0, 0.9, 0.5, 0.3],
            [0.9, 0.0, 0.4, 0.2],
            [0.5, 0.4, 0.0, 0.8],
            [0.3, 0.2, 0.8, 0.0],
        ]);
        let g = knn_graph(sim.view(), 3).unwrap();
        assert_eq!(g.w, sim);
        assert_eq!(g.component_count, 1);
    }

    #[test]
    fn knn_graph_is_symmetric_and_keeps_rank_ties() {
        // Vertex 0 sees ties 0.5 at ranks 1-3; with k = 1 all three tied
        // neighbors are kept.
        let sim = arr2(&[
            [0.0, 0.5, 0.5, 0.5],
            [0.5, 0.0, 0.9, 0.1],
            [0.5, 0.9, 0.0, 0.1],
            [0.5, 0.1, 0.1, 0.0],
        ]);
        let g = knn_graph(sim.view(), 1).unwrap();
        assert_eq!(g.w[(0, 1)], 0.5);
        assert_eq!(g.w[(0, 2)], 0.5);
        assert_eq!(g.w[(0, 3)], 0.5);
        // Union symmetrization: 3's best neighbor is 0 (0.5), and 1-2 keep
        // each other (0.9); 1-3 and 2-3 are dropped by both sides.
        assert_eq!(g.w[(1, 3)], 0.0);
        assert_eq!(g.w[(2, 3)], 0.0);
        assert_eq!(g.w, g.w.t().to_owned(), "weights must be exactly symmetric");
    }

    #[test]
    fn knn_graph_rejects_isolated_vertices_and_bad_k() {
        // Vertex 2 has zero similarity to everything: zero degree.
        let sim = arr2(&[
            [0.0, 0.7, 0.0],
            [0.7, 0.0, 0.0],
            [0.0, 0.0, 0.0],
        ]);
        assert!(matches!(
            knn_graph(sim.view(), 1),
            Err(Error::IsolatedVertex(2))
        ));
        let ok = arr2(&[[0.0, 0.7], [0.7, 0.0]]);
        assert!(matches!(
            knn_graph(ok.view(), 0),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            knn_graph(ok.view(), 2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn component_counts_on_small_graphs() {
        // Path on 4 vertices: one component.
        let path = arr2(&[
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let (count, labels) = connected_components(path.view()).unwrap();
        assert_eq!(count, 1);
        assert_eq!(labels, vec![0, 0, 0, 0]);
        // Two disjoint edges: two components.
        let pairs = arr2(&[
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let (count, labels) = connected_components(pairs.view()).unwrap();
        assert_eq!(count, 2);
        assert_eq!(labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn component_count_equals_zero_eigenvalue_multiplicity() {
        // Two disjoint triangles with unequal weights.
        let mut w = Array2::zeros((6, 6));
        for &(i, j, v) in &[
            (0usize, 1usize, 0.5),
            (1, 2, 0.7),
            (0, 2, 0.2),
            (3, 4, 1.0),
            (4, 5, 0.3),
            (3, 5, 0.9),
        ] {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        let g = GraphBundle::from_weights(w).unwrap();
        assert_eq!(g.component_count, 2);
        // Independent oracle: multiplicity of the zero eigenvalue of D − W.
        let eig = sym_eig(g.lap_unnorm.view(), &Default::default()).unwrap();
        let zeros = eig.values.iter().filter(|&&v| v.abs() <= 1e-8).count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn laplacian_annihilates_ones_and_is_psd() {
        let feats = arr2(&[
            [1.0, 0.2, 0.1],
            [0.9, 0.3, 0.0],
            [0.1, 1.0, 0.4],
            [0.2, 0.9, 0.5],
            [0.5, 0.5, 0.5],
        ]);
        let g = build_graph(feats.view(), 2).unwrap();
        let ones = ndarray::Array1::from_elem(5, 1.0);
        let residual = g.lap_unnorm.dot(&ones);
        assert!(residual.iter().all(|&x| x.abs() <= 1e-10));
        let eig = sym_eig(g.lap_unnorm.view(), &Default::default()).unwrap();
        assert!(eig.values.iter().all(|&v| v >= -1e-10), "{:?}", eig.values);
        if g.component_count == 1 {
            assert!(eig.values[1] > 0.0);
        }
    }

    #[test]
    fn normalized_weights_have_spectrum_in_unit_interval_with_one_attained() {
        let feats = arr2(&[
            [1.0, 0.1],
            [0.9, 0.2],
            [0.2, 1.0],
            [0.1, 0.8],
            [0.6, 0.6],
            [0.7, 0.4],
        ]);
        let g = build_graph(feats.view(), 2).unwrap();
        let eig = sym_eig(g.lap_norm_sym.view(), &Default::default()).unwrap();
        let lo = eig.values[0];
        let hi = eig.values[eig.values.len() - 1];
        assert!(lo >= -1.0 - 1e-10);
        assert!((hi - 1.0).abs() <= 1e-10, "largest eigenvalue {hi}");
    }

    #[test]
    fn from_weights_validates_shape_symmetry_sign_and_diagonal() {
        let rect = Array2::zeros((2, 3));
        assert!(matches!(
            GraphBundle::from_weights(rect),
            Err(Error::DimensionMismatch(_))
        ));
        let asym = arr2(&[[0.0, 1.0], [0.5, 0.0]]);
        assert!(matches!(
            GraphBundle::from_weights(asym),
            Err(Error::NotSymmetric)
        ));
        let neg = arr2(&[[0.0, -1.0], [-1.0, 0.0]]);
        assert!(matches!(
            GraphBundle::from_weights(neg),
            Err(Error::InvalidParameter(_))
        ));
        let diag = arr2(&[[1.0, 0.5], [0.5, 0.0]]);
        assert!(matches!(
            GraphBundle::from_weights(diag),
            Err(Error::InvalidParameter(_))
        ));
    }
}
