#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hypernp/engines/embedding.hpp"

namespace hypernp::tsne {

struct Calibration {
  double beta = 0.0;   ///< precision, 1 / (2 sigma^2)
  double sigma = 0.0;  ///< Gaussian bandwidth
  std::vector<double> probabilities;
  double perplexity = 0.0;  ///< 2^H of the returned distribution
  double residual = 0.0;    ///< |perplexity - target|
  bool converged = false;
  int iterations = 0;
};

/// Finds the Gaussian bandwidth for which the conditional neighbor
/// distribution over `squared_distances` has the requested perplexity.
/// Bisection on the precision; reports the residual when the target is out
/// of reach (e.g. all neighbors equidistant).
Calibration calibrate_perplexity(std::span<const double> squared_distances, double target,
                                 double tolerance = 1e-5, int max_iter = 200);

struct Settings {
  int iterations = 1000;
  double exaggeration = 12.0;
  int exaggeration_iterations = 250;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch_iteration = 250;
  double learning_rate = 0.0;  ///< <= 0 selects N / 12 clamped to [50, 200]
  double init_stddev = 1e-4;
  std::size_t max_points = 5000;
  double perplexity_tolerance = 1e-5;
  int perplexity_max_iter = 200;
};

/// Symmetrized joint affinities (P_cond + P_cond^T) / 2N, dense N x N.
Matrix<double> joint_probabilities(const Matrix<double>& data, double perplexity,
                                   const Settings& settings = {});

/// KL(P || Q) with Student-t affinities Q of the layout.
double kl_divergence(const Matrix<double>& joint, const Matrix<double>& layout);

/// Exact t-SNE. When `init` is given it is the starting layout (seeding
/// chains); otherwise the start is N(0, init_stddev^2) drawn from `seed`.
Embedding2D project(const Matrix<double>& data, double perplexity, const Settings& settings,
                    std::uint64_t seed, const Matrix<double>* init = nullptr);

}  // namespace hypernp::tsne
