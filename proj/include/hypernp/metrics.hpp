#pragma once

#include <cstddef>

#include "hypernp/common.hpp"

namespace hypernp::metrics {

inline constexpr std::size_t kDefaultNeighbors = 7;

/// 1 - 2 / (N K (2N - 3K - 1)) * sum_i sum_{j in U_i} (r(i, j) - K)
/// U_i: K nearest of i in the layout that are not among its K nearest in the
/// original space; r: rank in the original space. Ties broken by index.
/// Requires 1 <= K < N / 2, which keeps 2N - 3K - 1 positive.
double trustworthiness(const Matrix<double>& high, const Matrix<double>& low, std::size_t k = kDefaultNeighbors);

/// Counterpart of trustworthiness: original-space neighbors missing from the
/// layout neighborhood, penalized by their layout rank.
double continuity(const Matrix<double>& high, const Matrix<double>& low, std::size_t k = kDefaultNeighbors);

/// Throws invalid_argument unless K is usable for N points.
void check_neighbors(std::size_t n, std::size_t k);

}  // namespace hypernp::metrics
