#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hypernp/engines/engine.hpp"

namespace hypernp {

struct MirrorChoice {
  int sign_x = 1;
  int sign_y = 1;
  double mse = 0.0;
};

/// Candidate order; earlier entries win ties.
inline constexpr std::array<std::array<int, 2>, 4> kMirrorOrder{{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};

/// Mean of squared coordinate differences over all 2N entries.
double mirror_mse(const Matrix<double>& current, const Matrix<double>& reference, int sign_x, int sign_y);

/// Picks the axis flip of `current` closest (MSE) to `reference` and applies it.
std::pair<Embedding2D, MirrorChoice> align_mirror(const Embedding2D& current, const Embedding2D& reference);
MirrorChoice align_mirror_in_place(Matrix<double>& current, const Matrix<double>& reference);

/// Projections over `h_values` where each step starts from the previous
/// aligned layout (engines that accept an initial layout) and is then
/// mirror-aligned to it. Scalar h values must be strictly ascending.
std::vector<Embedding2D> seeded_chain(const ProjectionEngine& engine, const Matrix<double>& data,
                                      const std::vector<HyperValue>& h_values, std::uint64_t seed);

}  // namespace hypernp
