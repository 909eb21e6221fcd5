#pragma once

#include <span>

#include "hypernp/engines/embedding.hpp"

namespace hypernp::pca {

/// Scales column j by weights[j], centers, and projects on the top two
/// principal directions (first non-negligible loading positive).
/// All-zero weights give an all-zero, degenerate embedding.
Embedding2D weighted_project(const Matrix<double>& data, std::span<const double> weights);

Embedding2D project(const Matrix<double>& data);

}  // namespace hypernp::pca
