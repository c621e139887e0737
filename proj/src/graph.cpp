#include "graphmarkov/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gmn {

Graph build_graph(const Matrix& adjacency_input) {
  if (adjacency_input.rows() != adjacency_input.cols()) {
    throw std::invalid_argument("adjacency must be square, got " +
                                std::to_string(adjacency_input.rows()) + "x" +
                                std::to_string(adjacency_input.cols()));
  }
  const Index size = adjacency_input.rows();
  if (size == 0) {
    throw std::invalid_argument("adjacency must have at least one vertex");
  }
  if (!adjacency_input.allFinite()) {
    throw std::invalid_argument("adjacency contains non-finite entries");
  }
  if ((adjacency_input.array() < 0.0).any()) {
    throw std::invalid_argument("adjacency contains negative entries");
  }

  Graph graph;
  graph.adjacency_ = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) {
      if (i != j && std::max(adjacency_input(i, j), adjacency_input(j, i)) > 0.0) {
        graph.adjacency_(i, j) = 1.0;
      }
    }
  }
  graph.self_adjacency_ = graph.adjacency_ + Matrix::Identity(size, size);
  graph.degree_ = graph.adjacency_.rowwise().sum().cast<int>();
  return graph;
}

HopMaskSet hop_masks(const Graph& graph, int n) {
  if (n < 1) {
    throw std::invalid_argument("hop mask order must be >= 1, got " + std::to_string(n));
  }
  std::vector<Matrix> masks;
  masks.reserve(static_cast<std::size_t>(n));
  masks.push_back(graph.self_adjacency());
  for (int k = 1; k < n; ++k) {
    // Binarize after every product so entries stay 0/1.
    Matrix next = masks.back() * graph.self_adjacency();
    masks.push_back((next.array() > 0.0).cast<double>().matrix());
  }
  return HopMaskSet(std::move(masks));
}

Matrix normalized_laplacian(const Graph& graph) {
  const Index size = graph.size();
  Vector inv_sqrt_degree(size);
  for (Index i = 0; i < size; ++i) {
    const int d = graph.degree()(i);
    inv_sqrt_degree(i) = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 0.0;
  }
  Matrix laplacian = -(inv_sqrt_degree.asDiagonal() * graph.adjacency() * inv_sqrt_degree.asDiagonal());
  laplacian.diagonal().array() += 1.0;
  return laplacian;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

void rotate(Matrix& a, Matrix& v, Index p, Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Index n = a.rows();
  for (Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

SpectralBasis spectral_basis(const Matrix& symmetric, const EigenSolverOptions& options) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw std::invalid_argument("spectral_basis requires a non-empty square matrix");
  }
  if (!symmetric.allFinite()) {
    throw std::invalid_argument("spectral_basis input contains non-finite entries");
  }
  const double asymmetry = (symmetric - symmetric.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > 1e-10) {
    throw std::invalid_argument("spectral_basis input is not symmetric (max |A - A^T| = " +
                                std::to_string(asymmetry) + ")");
  }

  const Index n = symmetric.rows();
  Matrix a = 0.5 * (symmetric + symmetric.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = std::max(1.0, a.norm());

  bool converged = off_diagonal_norm(a) <= options.off_diagonal_tolerance * scale;
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        rotate(a, v, p, q);
      }
    }
    converged = off_diagonal_norm(a) <= options.off_diagonal_tolerance * scale;
  }
  if (!converged) {
    throw std::runtime_error("Jacobi eigensolver did not converge within " +
                             std::to_string(options.max_sweeps) + " sweeps");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index lhs, Index rhs) { return a(lhs, lhs) < a(rhs, rhs); });

  SpectralBasis basis;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    double lambda = a(src, src);
    if (std::abs(lambda) < 1e-12) lambda = 0.0;
    basis.eigenvalues(k) = lambda;

    Vector column = v.col(src);
    Index pivot = 0;
    column.cwiseAbs().maxCoeff(&pivot);
    if (column(pivot) < 0.0) column = -column;
    basis.eigenvectors.col(k) = column;
  }
  return basis;
}

SpectralBasis laplacian_basis(const Graph& graph) {
  return spectral_basis(normalized_laplacian(graph));
}

}  // namespace gmn
