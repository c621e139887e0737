#pragma once

#include "graphmarkov/graph.hpp"
#include "graphmarkov/series.hpp"

#include <cstdint>

namespace gmn {

/// Time-invariant graph Markov transition x_{t+1} = gamma (A o P) x_t + noise.
struct TransitionSpec {
  Matrix transition;  // P, zero off the self-connected adjacency
  double gamma = 0.9;
  double noise_std = 0.01;
  Vector x0;
};

/// Random nonnegative P on the self-connected support with unit row sums,
/// and x0 drawn uniformly from [0, 1]. Deterministic given `seed`.
TransitionSpec random_transition(const Graph& graph, std::uint64_t seed, double gamma = 0.9,
                                 double noise_std = 0.01);

/// Rolls the process forward for `steps` rows, clamping each state to [0, 1].
/// The returned series is fully observed.
StateSeries simulate_gmp(const Graph& graph, const TransitionSpec& spec, Index steps, std::uint64_t seed);

/// Ring over `nodes` vertices plus random chords with the given probability.
Graph random_ring_graph(Index nodes, double chord_probability, std::uint64_t seed);

}  // namespace gmn
