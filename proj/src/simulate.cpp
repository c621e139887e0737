#include "graphmarkov/simulate.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace gmn {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TransitionSpec random_transition(const Graph& graph, std::uint64_t seed, double gamma, double noise_std) {
  std::mt19937_64 rng(seed);
  const Index size = graph.size();
  TransitionSpec spec;
  spec.gamma = gamma;
  spec.noise_std = noise_std;
  spec.transition = Matrix::Zero(size, size);
  for (Index i = 0; i < size; ++i) {
    for (Index j = 0; j < size; ++j) {
      if (graph.self_adjacency()(i, j) != 0.0) {
        // Strictly positive so every row sum is nonzero.
        spec.transition(i, j) = 1e-3 + unit_uniform(rng);
      }
    }
    spec.transition.row(i) /= spec.transition.row(i).sum();
  }
  spec.x0.resize(size);
  for (Index i = 0; i < size; ++i) spec.x0(i) = unit_uniform(rng);
  return spec;
}

StateSeries simulate_gmp(const Graph& graph, const TransitionSpec& spec, Index steps, std::uint64_t seed) {
  if (steps < 2) throw std::invalid_argument("simulation needs at least 2 steps, got " + std::to_string(steps));
  const Index size = graph.size();
  if (spec.transition.rows() != size || spec.transition.cols() != size || spec.x0.size() != size) {
    throw std::invalid_argument("transition spec does not match graph size");
  }
  if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (!(spec.noise_std >= 0.0)) throw std::invalid_argument("noise std must be nonnegative");

  const Matrix step_map = spec.gamma * graph.self_adjacency().cwiseProduct(spec.transition);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Matrix values(steps, size);
  values.row(0) = spec.x0.transpose();
  Vector state = spec.x0;
  for (Index t = 1; t < steps; ++t) {
    Vector next = step_map * state;
    if (spec.noise_std > 0.0) {
      for (Index i = 0; i < size; ++i) next(i) += spec.noise_std * noise(rng);
    }
    state = next.cwiseMax(0.0).cwiseMin(1.0);
    values.row(t) = state.transpose();
  }
  return make_series(std::move(values));
}

Graph random_ring_graph(Index nodes, double chord_probability, std::uint64_t seed) {
  if (nodes < 1) throw std::invalid_argument("graph needs at least one node");
  if (!(chord_probability >= 0.0 && chord_probability <= 1.0)) {
    throw std::invalid_argument("chord probability must lie in [0, 1]");
  }
  Matrix adjacency = Matrix::Zero(nodes, nodes);
  if (nodes > 1) {
    for (Index i = 0; i < nodes; ++i) {
      const Index j = (i + 1) % nodes;
      if (i != j) adjacency(i, j) = adjacency(j, i) = 1.0;
    }
  }
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < nodes; ++i) {
    for (Index j = i + 1; j < nodes; ++j) {
      if (adjacency(i, j) == 0.0 && unit_uniform(rng) < chord_probability) {
        adjacency(i, j) = adjacency(j, i) = 1.0;
      }
    }
  }
  return build_graph(adjacency);
}

}  // namespace gmn
