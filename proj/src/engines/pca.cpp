#include "hypernp/engines/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

namespace hypernp::pca {

Embedding2D weighted_project(const Matrix<double>& data, std::span<const double> weights) {
  const std::size_t n = data.rows(), d = data.cols();
  if (weights.size() != d) {
    fail(ErrorKind::dimension_mismatch, "weight vector has " + std::to_string(weights.size()) +
                                            " entries, data has " + std::to_string(d) + " columns");
  }
  for (double w : weights) {
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::invalid_argument, "PCA weights must lie in [0, 1]");
  }
  if (n < 2) fail(ErrorKind::invalid_argument, "PCA needs at least 2 points");

  Embedding2D out;
  out.engine = "weighted_pca";
  out.hyperparameter.assign(weights.begin(), weights.end());
  out.coords = Matrix<double>(n, 2);
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    out.degenerate = true;
    out.warning = "all weights are zero";
    out.objective = 0.0;
    return out;
  }

  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(i, j) = data(i, j) * weights[j];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(ErrorKind::numeric, "PCA eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double top = values[static_cast<Eigen::Index>(d) - 1];
  const double cutoff = 1e-12 * std::max(top, 1e-300);

  double total = 0.0, kept = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) total += std::max(values[i], 0.0);
  int components = 0;
  for (int c = 0; c < 2 && c < static_cast<int>(d); ++c) {
    const Eigen::Index idx = static_cast<Eigen::Index>(d) - 1 - c;
    if (values[idx] <= cutoff) continue;
    ++components;
    kept += values[idx];
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    const double threshold = 1e-12 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (std::abs(v[j]) > threshold) {
        if (v[j] < 0.0) v = -v;
        break;
      }
    }
    const Eigen::VectorXd proj = x * v;
    for (std::size_t i = 0; i < n; ++i) out.coords(i, static_cast<std::size_t>(c)) = proj[static_cast<Eigen::Index>(i)];
  }
  out.objective = total > 0.0 ? kept / total : 0.0;
  if (components < 2) {
    out.degenerate = true;
    out.warning = "fewer than two nonzero principal components";
  }
  return out;
}

Embedding2D project(const Matrix<double>& data) {
  const std::vector<double> ones(data.cols(), 1.0);
  Embedding2D out = weighted_project(data, ones);
  return out;
}

}  // namespace hypernp::pca
