#pragma once

#include <Eigen/Dense>

#include <vector>

namespace gmn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Undirected sensor network with binary connectivity.
///
/// `adjacency` has a zero diagonal, `self_adjacency` is `adjacency + I`, and
/// `degree[i]` is the number of neighbours of vertex `i`. Instances are
/// immutable once built.
class Graph {
 public:
  Graph() = default;

  Index size() const { return adjacency_.rows(); }
  const Matrix& adjacency() const { return adjacency_; }
  const Matrix& self_adjacency() const { return self_adjacency_; }
  const Eigen::VectorXi& degree() const { return degree_; }

  friend Graph build_graph(const Matrix& adjacency_input);

 private:
  Matrix adjacency_;
  Matrix self_adjacency_;
  Eigen::VectorXi degree_;
};

/// Builds a graph from a square nonnegative (possibly weighted) matrix.
/// Weights are symmetrized with max(w_ij, w_ji); any positive entry becomes
/// an edge. Diagonal entries of the input are ignored.
Graph build_graph(const Matrix& adjacency_input);

/// Hop-reachability masks of orders 1..n over the self-connected adjacency.
/// `mask(k)` is 1 at (i, j) iff j is reachable from i in at most k hops.
class HopMaskSet {
 public:
  HopMaskSet() = default;
  explicit HopMaskSet(std::vector<Matrix> masks) : masks_(std::move(masks)) {}

  int order() const { return static_cast<int>(masks_.size()); }
  /// 1-based: mask(1) is the self-connected adjacency.
  const Matrix& mask(int k) const { return masks_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<Matrix>& masks() const { return masks_; }

 private:
  std::vector<Matrix> masks_;
};

HopMaskSet hop_masks(const Graph& graph, int n);

/// I - D^{-1/2} A D^{-1/2}; isolated vertices keep a unit diagonal.
Matrix normalized_laplacian(const Graph& graph);

/// Orthonormal eigenvectors (columns) and ascending eigenvalues.
struct SpectralBasis {
  Matrix eigenvectors;
  Vector eigenvalues;

  Index size() const { return eigenvalues.size(); }
};

struct EigenSolverOptions {
  int max_sweeps = 100;
  double off_diagonal_tolerance = 1e-12;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted ascending and each eigenvector is flipped so that
/// its largest-magnitude entry is positive. Eigenvalues within 1e-12 of zero
/// are snapped to +0. Throws std::invalid_argument on asymmetric input and
/// std::runtime_error if the sweep cap is reached before convergence.
SpectralBasis spectral_basis(const Matrix& symmetric, const EigenSolverOptions& options = {});

/// Basis of the normalized Laplacian of `graph`.
SpectralBasis laplacian_basis(const Graph& graph);

}  // namespace gmn
