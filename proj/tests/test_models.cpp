#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace gmn;

namespace {

Batch batch_of(const std::vector<Sample>& samples) { return make_batch(samples); }

Sample single(const Matrix& inputs, const Matrix& mask) {
  Sample s;
  s.inputs = inputs;
  s.input_mask = mask;
  s.label = Vector::Zero(inputs.cols());
  s.label_mask = Vector::Ones(inputs.cols());
  return s;
}

GmnParams random_gmn(std::mt19937_64& rng, const Graph& g, int n, double gamma) {
  std::normal_distribution<double> normal;
  GmnParams p = init_gmn(g, n, gamma);
  for (auto& w : p.weights) {
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) w(i, j) = normal(rng);
    }
  }
  apply_support(p);
  return p;
}

SgmnParams random_sgmn(std::mt19937_64& rng, const Graph& g, int n, double gamma) {
  std::normal_distribution<double> normal;
  SgmnParams p = init_sgmn(laplacian_basis(g), n, gamma);
  for (auto& l : p.spectral_weights) {
    for (Index i = 0; i < l.size(); ++i) l(i) = normal(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("cumulative mask examples") {
  CHECK(cumulative_mask(Matrix::Ones(3, 2)).row(0) == Matrix::Ones(1, 2));
  CHECK(cumulative_mask(Matrix::Ones(3, 2)).bottomRows(2) == Matrix::Zero(2, 2));

  Matrix newest_missing = Matrix::Ones(3, 2);
  newest_missing.row(2).setZero();
  CHECK(cumulative_mask(newest_missing).row(1) == Matrix::Ones(1, 2));

  Matrix one(3, 1);
  one << 1, 0, 0;  // oldest first, so newest-to-oldest reads 0, 0, 1
  CHECK(cumulative_mask(one) == Matrix::Ones(3, 1));
}

TEST_CASE("GMN forward hand examples") {
  Matrix two(2, 2);
  two << 0, 1, 1, 0;
  const Graph g = build_graph(two);
  GmnParams p = init_gmn(g, 1, 0.5);
  p.gamma = 1.0;
  p.weights[0] = Matrix::Ones(2, 2);
  Matrix x(1, 2);
  x << 1, 0;
  const Batch b = batch_of({single(x, Matrix::Ones(1, 2))});
  CHECK(forward(p, b) == Matrix::Ones(1, 2));

  p.weights[0].setZero();
  CHECK(forward(p, b) == Matrix::Zero(1, 2));

  const GmnParams fresh = init_gmn(g, 3, 0.9);
  Matrix xs = Matrix::Constant(3, 2, 0.5);
  const Matrix out = forward(fresh, batch_of({single(xs, Matrix::Ones(3, 2))}));
  CHECK(out(0, 0) == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(out(0, 1) == doctest::Approx(0.45).epsilon(1e-15));
}

TEST_CASE("SGMN forward hand examples") {
  std::mt19937_64 rng(1);
  const Graph g = build_graph(oracle::random_adjacency(rng, 6, 0.3));
  SgmnParams p = init_sgmn(laplacian_basis(g), 4, 0.9);
  const auto samples = oracle::random_samples(rng, 6, 4, 3, 0.0);
  const Batch b = make_batch(samples);
  CHECK((forward(p, b) - 0.9 * b.inputs.back()).cwiseAbs().maxCoeff() < 1e-10);
  for (auto& l : p.spectral_weights) l.setZero();
  CHECK(forward(p, b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward agrees with the scalar-loop oracle under random masks") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const Index s = 3 + trial % 6;
    const int n = 1 + trial % 4;
    const Graph g = build_graph(oracle::random_adjacency(rng, s));
    const auto samples = oracle::random_samples(rng, s, n, 4, 0.4);
    const Batch b = make_batch(samples);
    const GmnParams gp = random_gmn(rng, g, n, 0.8);
    const SgmnParams sp = random_sgmn(rng, g, n, 0.8);
    const Matrix gout = forward(gp, b);
    const Matrix sout = forward(sp, b);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const Vector gref = oracle::naive_forward(oracle::gmn_effective(gp), 0.8, samples[k].inputs,
                                                samples[k].input_mask);
      const Vector sref = oracle::naive_forward(oracle::sgmn_effective(sp), 0.8, samples[k].inputs,
                                                samples[k].input_mask);
      CHECK((gout.row(static_cast<Index>(k)).transpose() - gref).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((sout.row(static_cast<Index>(k)).transpose() - sref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("complete data reduces to the newest term") {
  std::mt19937_64 rng(4);
  const Graph g = build_graph(oracle::random_adjacency(rng, 7));
  const GmnParams p = random_gmn(rng, g, 4, 0.9);
  const auto samples = oracle::random_samples(rng, 7, 4, 3, 0.0);
  const Batch b = make_batch(samples);
  const Matrix expected = 0.9 * b.inputs.back() * effective_weight(p, 1).transpose();
  CHECK(forward(p, b) == expected);
}

TEST_CASE("one missing entry only moves terms that see it") {
  std::mt19937_64 rng(6);
  const Graph g = build_graph(oracle::random_adjacency(rng, 5));
  const GmnParams p = random_gmn(rng, g, 3, 0.9);
  auto samples = oracle::random_samples(rng, 5, 3, 1, 0.0);
  const double newest = samples[0].inputs(2, 2);
  const double previous = samples[0].inputs(1, 2);
  const Matrix before = forward(p, make_batch(samples));
  // Hide the newest reading of sensor 2: term 0 loses it and term 1 now
  // sees x_{t-1} of that sensor. Term 2 stays gated because x_{t-1} is observed.
  samples[0].input_mask(2, 2) = 0.0;
  samples[0].inputs(2, 2) = 0.0;
  const Matrix after = forward(p, make_batch(samples));
  const Matrix h1 = effective_weight(p, 1);
  const Matrix h2 = effective_weight(p, 2);
  for (Index a = 0; a < 5; ++a) {
    const double expected = -0.9 * h1(a, 2) * newest + 0.81 * h2(a, 2) * previous;
    CHECK(after(0, a) - before(0, a) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("gradients vanish for zero upstream gradient") {
  std::mt19937_64 rng(2);
  const Graph g = build_graph(oracle::random_adjacency(rng, 5));
  const Batch b = make_batch(oracle::random_samples(rng, 5, 3, 2));
  const GmnGradients gg = backward(random_gmn(rng, g, 3, 0.9), b, Matrix::Zero(2, 5));
  for (const auto& w : gg.weights) CHECK(w.cwiseAbs().maxCoeff() == 0.0);
  const SgmnGradients sg = backward(random_sgmn(rng, g, 3, 0.9), b, Matrix::Zero(2, 5));
  for (const auto& l : sg.spectral_weights) CHECK(l.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SGMN is linear in the inputs") {
  std::mt19937_64 rng(12);
  const Graph g = build_graph(oracle::random_adjacency(rng, 6));
  const SgmnParams p = random_sgmn(rng, g, 3, 0.9);
  auto s1 = oracle::random_samples(rng, 6, 3, 3, 0.3);
  auto s2 = s1;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& s : s2) s.inputs = s.inputs.unaryExpr([&](double v) { return v == 0.0 ? 0.0 : unit(rng); });
  auto mixed = s1;
  for (std::size_t k = 0; k < mixed.size(); ++k) mixed[k].inputs = 2.0 * s1[k].inputs - 0.5 * s2[k].inputs;
  const Matrix lhs = forward(p, make_batch(mixed));
  const Matrix rhs = 2.0 * forward(p, make_batch(s1)) - 0.5 * forward(p, make_batch(s2));
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("init and validation") {
  const Graph g = build_graph(oracle::path_adjacency(4));
  const GmnParams p = init_gmn(g, 3, 0.9);
  CHECK(p.weights[0] == Matrix::Identity(4, 4));
  CHECK(p.weights[2] == Matrix::Zero(4, 4));
  CHECK(p.hop_masks.order() == 3);
  const SgmnParams s = init_sgmn(laplacian_basis(g), 3, 0.9);
  CHECK(s.spectral_weights[0] == Vector::Ones(4));
  CHECK(s.spectral_weights[1] == Vector::Zero(4));
  CHECK((effective_weight(s, 1) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(init_gmn(g, 0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(init_gmn(g, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(init_params(ModelKind::sgmn, g, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(effective_weight(p, 4), std::out_of_range);
  CHECK(parse_model_kind("sgmn") == ModelKind::sgmn);
  CHECK_THROWS_AS(parse_model_kind("gru"), std::invalid_argument);

  std::mt19937_64 rng(1);
  const Batch wrong = make_batch(oracle::random_samples(rng, 5, 3, 1));
  CHECK_THROWS_AS(forward(p, wrong), std::invalid_argument);
  const Batch short_history = make_batch(oracle::random_samples(rng, 4, 2, 1));
  CHECK_THROWS_AS(forward(p, short_history), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Index s = 3 + trial % 4;
    const int n = 1 + trial % 3;
    const Graph g = build_graph(oracle::random_adjacency(rng, s));
    const Batch b = make_batch(oracle::random_samples(rng, s, n, 1 + trial % 3));
    CHECK(oracle::gmn_gradient_error(random_gmn(rng, g, n, 0.9), b) < 1e-6);
    CHECK(oracle::sgmn_gradient_error(random_sgmn(rng, g, n, 0.9), b) < 1e-6);
  }
}

TEST_CASE("GMN gradients stay on the hop support") {
  std::mt19937_64 rng(17);
  const Graph g = build_graph(oracle::path_adjacency(6));
  const GmnParams p = random_gmn(rng, g, 2, 0.9);
  const Batch b = make_batch(oracle::random_samples(rng, 6, 2, 3));
  const GmnGradients grads = backward(p, b, Matrix::Ones(3, 6));
  for (int k = 1; k <= 2; ++k) {
    const Matrix outside = Matrix::Ones(6, 6) - p.hop_masks.mask(k);
    CHECK(grads.weights[static_cast<std::size_t>(k - 1)].cwiseProduct(outside).cwiseAbs().maxCoeff() == 0.0);
  }
}
