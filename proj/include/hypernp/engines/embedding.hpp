#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hypernp/common.hpp"

namespace hypernp {

/// A hyperparameter value: one entry for scalar hyperparameters
/// (perplexity, k), one per feature for weight vectors.
using HyperValue = std::vector<double>;

std::string format_hyper(const HyperValue& h);

struct Embedding2D {
  Matrix<double> coords;  ///< N x 2
  std::string engine;
  HyperValue hyperparameter;
  std::uint64_t seed = 0;
  /// KL divergence (t-SNE), residual eigenvalue share (MDS), explained
  /// variance ratio (PCA).
  double objective = std::numeric_limits<double>::quiet_NaN();
  /// Objective of the starting layout; only iterative engines set it.
  double initial_objective = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  std::string warning;
};

/// Throws unless every coordinate is finite and there are `rows` of them.
void check_embedding(const Embedding2D& e, std::size_t rows);

}  // namespace hypernp
