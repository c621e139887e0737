#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace gmn;

TEST_CASE("build_graph binarizes and adds self loops") {
  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  const Graph g = build_graph(two);
  CHECK(g.self_adjacency() == Matrix::Ones(2, 2));
  CHECK(g.degree()(0) == 1);
  CHECK(g.degree()(1) == 1);

  const Graph empty = build_graph(Matrix::Zero(2, 2));
  CHECK(empty.self_adjacency() == Matrix::Identity(2, 2));
  CHECK(empty.degree().sum() == 0);

  Matrix weighted(2, 2);
  weighted << 0, 0.3, 0.3, 0;
  CHECK(build_graph(weighted).adjacency() == g.adjacency());
}

TEST_CASE("build_graph symmetrizes one-sided weights and ignores the diagonal") {
  Matrix m(3, 3);
  m << 5, 0.2, 0, 0, 0, 0, 0, 4, 7;
  const Graph g = build_graph(m);
  Matrix expected(3, 3);
  expected << 0, 1, 0, 1, 0, 1, 0, 1, 0;
  CHECK(g.adjacency() == expected);
  CHECK(build_graph(g.adjacency()).adjacency() == g.adjacency());
}

TEST_CASE("build_graph rejects malformed input") {
  CHECK_THROWS_AS(build_graph(Matrix::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(Matrix()), std::invalid_argument);
  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 1) = -1;
  CHECK_THROWS_AS(build_graph(negative), std::invalid_argument);
  Matrix nan = Matrix::Zero(2, 2);
  nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(build_graph(nan), std::invalid_argument);
}

TEST_CASE("hop masks on small graphs") {
  const Graph path = build_graph(oracle::path_adjacency(3));
  const HopMaskSet masks = hop_masks(path, 2);
  CHECK(masks.order() == 2);
  CHECK(masks.mask(1) == path.self_adjacency());
  CHECK(masks.mask(2) == Matrix::Ones(3, 3));

  const HopMaskSet isolated = hop_masks(build_graph(Matrix::Zero(2, 2)), 3);
  for (int k = 1; k <= 3; ++k) CHECK(isolated.mask(k) == Matrix::Identity(2, 2));

  CHECK_THROWS_AS(hop_masks(path, 0), std::invalid_argument);
}

TEST_CASE("hop masks agree with BFS distances on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index s = 3 + trial % 9;
    const Graph g = build_graph(oracle::random_adjacency(rng, s, 0.15));
    const auto dist = oracle::hop_distance(g.adjacency());
    const HopMaskSet masks = hop_masks(g, 6);
    for (int k = 1; k <= 6; ++k) {
      for (Index i = 0; i < s; ++i) {
        for (Index j = 0; j < s; ++j) {
          CHECK(masks.mask(k)(i, j) == (dist[i][j] <= k ? 1.0 : 0.0));
        }
      }
    }
  }
}

TEST_CASE("hop masks saturate at the diameter") {
  const Graph path = build_graph(oracle::path_adjacency(5));  // diameter 4
  const HopMaskSet masks = hop_masks(path, 7);
  for (int k = 4; k <= 7; ++k) CHECK(masks.mask(k) == masks.mask(4));
  CHECK(masks.mask(3) != masks.mask(4));
}

TEST_CASE("normalized Laplacian hand values") {
  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((normalized_laplacian(build_graph(two)) - expected).cwiseAbs().maxCoeff() < 1e-15);

  CHECK(normalized_laplacian(build_graph(Matrix::Zero(4, 4))) == Matrix::Identity(4, 4));

  const double r = 1.0 / std::sqrt(2.0);
  Matrix path(3, 3);
  path << 1, -r, 0, -r, 1, -r, 0, -r, 1;
  CHECK((normalized_laplacian(build_graph(oracle::path_adjacency(3))) - path).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("Jacobi eigensolver hand examples") {
  Matrix l(2, 2);
  l << 1, -1, -1, 1;
  const SpectralBasis b = spectral_basis(l);
  CHECK(b.eigenvalues(0) == 0.0);
  CHECK(b.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(b.eigenvectors(0, 0)) - r) < 1e-14);
  CHECK(std::abs(b.eigenvectors(0, 0) - b.eigenvectors(1, 0)) < 1e-14);
  CHECK(std::abs(b.eigenvectors(0, 1) + b.eigenvectors(1, 1)) < 1e-14);

  const SpectralBasis path = laplacian_basis(build_graph(oracle::path_adjacency(3)));
  CHECK(path.eigenvalues(0) == 0.0);
  CHECK(path.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(path.eigenvalues(2) == doctest::Approx(2.0).epsilon(1e-13));

  const SpectralBasis id = spectral_basis(Matrix::Identity(4, 4));
  CHECK((id.eigenvalues.array() == 1.0).all());
  CHECK((id.eigenvectors.transpose() * id.eigenvectors - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Jacobi eigensolver agrees with Eigen on random symmetric matrices") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const Index s = 2 + trial % 12;
    Matrix m(s, s);
    for (Index i = 0; i < s; ++i) {
      for (Index j = 0; j < s; ++j) m(i, j) = normal(rng);
    }
    m = (m + m.transpose()).eval();
    const SpectralBasis ours = spectral_basis(m);
    const Eigen::SelfAdjointEigenSolver<Matrix> reference(m);
    CHECK((ours.eigenvalues - reference.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ours.eigenvectors * ours.eigenvalues.asDiagonal() * ours.eigenvectors.transpose() - m)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((ours.eigenvectors.transpose() * ours.eigenvectors - Matrix::Identity(s, s)).cwiseAbs().maxCoeff() <
          1e-12);
    for (Index c = 0; c < s; ++c) {
      Index arg = 0;
      ours.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(ours.eigenvectors(arg, c) > 0.0);
    }
  }
}

TEST_CASE("Laplacian reconstruction for random graphs") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = build_graph(oracle::random_adjacency(rng, 3 + trial, 0.3));
    const Matrix l = normalized_laplacian(g);
    const SpectralBasis b = laplacian_basis(g);
    CHECK((b.eigenvectors * b.eigenvalues.asDiagonal() * b.eigenvectors.transpose() - l).cwiseAbs().maxCoeff() <
          1e-6);
    CHECK(b.eigenvalues.minCoeff() >= 0.0);
    CHECK(b.eigenvalues.maxCoeff() <= 2.0 + 1e-12);
  }
}

TEST_CASE("eigensolver input checks") {
  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(spectral_basis(asym), std::invalid_argument);
  CHECK_THROWS_AS(spectral_basis(Matrix::Zero(2, 3)), std::invalid_argument);

  Matrix hard(3, 3);
  hard << 2, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 1;
  EigenSolverOptions options;
  options.max_sweeps = 0;
  CHECK_THROWS_AS(spectral_basis(hard, options), std::runtime_error);
}
