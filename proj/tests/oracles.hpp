#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hypernp/engines/isomap.hpp"
#include "hypernp/nn/network.hpp"

namespace testing {

// All-pairs shortest paths by dynamic programming.
inline hypernp::Matrix<double> floyd_warshall(const hypernp::isomap::NeighborGraph& g) {
  const std::size_t n = g.vertex_count();
  hypernp::Matrix<double> d(n, n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (const auto& [j, w] : g.adjacency[i]) d(i, j) = std::min(d(i, j), w);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return d;
}

inline hypernp::Matrix<double> euclidean(const hypernp::Matrix<double>& x) {
  hypernp::Matrix<double> d(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      d(i, j) = std::sqrt(s);
    }
  return d;
}

// RMSD after the best rotation or reflection (orthogonal Procrustes).
inline double procrustes_rmsd(const hypernp::Matrix<double>& a, const hypernp::Matrix<double>& b) {
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd x(n, 2), y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 2; ++c) {
      x(i, c) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
      y(i, c) = b(static_cast<std::size_t>(i), static_cast<std::size_t>(c));
    }
  x.rowwise() -= x.colwise().mean();
  y.rowwise() -= y.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.transpose() * y, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd r = svd.matrixU() * svd.matrixV().transpose();
  return std::sqrt((x * r - y).squaredNorm() / static_cast<double>(n));
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-6) over all parameters.
// The default step is close to cbrt(machine epsilon), where truncation and
// rounding errors of a central difference balance.
inline double gradient_check(hypernp::nn::Network<double> net, const hypernp::Matrix<double>& x,
                             const hypernp::Matrix<double>& y, double step = 1e-5) {
  using hypernp::nn::Mode;
  const auto analytic = net.backward(x, y, Mode::train).values;
  double worst = 0.0;
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + step;
    const double up = net.backward(x, y, Mode::train).loss;
    params[i] = keep - step;
    const double down = net.backward(x, y, Mode::train).loss;
    params[i] = keep;
    const double numeric = (up - down) / (2 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

// All four mirrorings, first minimum wins.
inline std::pair<int, int> exhaustive_mirror(const hypernp::Matrix<double>& cur, const hypernp::Matrix<double>& ref) {
  const int order[4][2] = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
  double best = std::numeric_limits<double>::infinity();
  std::pair<int, int> choice{1, 1};
  for (const auto& o : order) {
    double s = 0.0;
    for (std::size_t i = 0; i < cur.rows(); ++i) {
      const double dx = o[0] * cur(i, 0) - ref(i, 0);
      const double dy = o[1] * cur(i, 1) - ref(i, 1);
      s += dx * dx + dy * dy;
    }
    s /= static_cast<double>(2 * cur.rows());
    if (s < best) {
      best = s;
      choice = {o[0], o[1]};
    }
  }
  return choice;
}

}  // namespace testing
