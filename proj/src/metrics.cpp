#include "hypernp/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace hypernp::metrics {

void check_neighbors(std::size_t n, std::size_t k) {
  if (k < 1 || 2 * k >= n) {
    fail(ErrorKind::invalid_argument, "neighborhood size K = " + std::to_string(k) + " invalid for N = " +
                                          std::to_string(n) + " (need 1 <= K < N/2)");
  }
}

namespace {

void squared_distances_from(const Matrix<double>& x, std::size_t i, std::vector<double>& out) {
  const auto a = x.row(i);
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const auto b = x.row(j);
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double d = a[c] - b[c];
      s += d * d;
    }
    out[j] = s;
  }
}

// Penalizes points in the K-neighborhood of `neighborhood_space` that are not
// in the K-neighborhood of `rank_space`, by their rank in `rank_space`.
double rank_penalty(const Matrix<double>& rank_space, const Matrix<double>& neighborhood_space, std::size_t k) {
  const std::size_t n = rank_space.rows();
  if (neighborhood_space.rows() != n) {
    fail(ErrorKind::dimension_mismatch, "metric inputs have " + std::to_string(n) + " and " +
                                            std::to_string(neighborhood_space.rows()) + " rows");
  }
  check_neighbors(n, k);

  std::vector<double> d_rank(n), d_hood(n);
  std::vector<std::size_t> order(n), rank(n), hood(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    squared_distances_from(rank_space, i, d_rank);
    squared_distances_from(neighborhood_space, i, d_hood);
    const auto by = [&](const std::vector<double>& d) {
      return [&d](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); };
    };

    // Full ranking in rank_space: rank 1 is the nearest other point.
    std::iota(order.begin(), order.end(), 0);
    std::swap(order[i], order[n - 1]);
    std::sort(order.begin(), order.end() - 1, by(d_rank));
    for (std::size_t r = 0; r + 1 < n; ++r) rank[order[r]] = r + 1;

    std::iota(hood.begin(), hood.end(), 0);
    std::swap(hood[i], hood[n - 1]);
    std::nth_element(hood.begin(), hood.begin() + static_cast<std::ptrdiff_t>(k - 1), hood.end() - 1, by(d_hood));
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t r = rank[hood[t]];
      if (r > k) total += static_cast<double>(r - k);
    }
  }
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return 1.0 - 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0)) * total;
}

}  // namespace

double trustworthiness(const Matrix<double>& high, const Matrix<double>& low, std::size_t k) {
  return rank_penalty(high, low, k);
}

double continuity(const Matrix<double>& high, const Matrix<double>& low, std::size_t k) {
  return rank_penalty(low, high, k);
}

}  // namespace hypernp::metrics
