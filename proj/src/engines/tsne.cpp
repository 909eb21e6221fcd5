#include "hypernp/engines/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hypernp {

std::string format_hyper(const HyperValue& h) {
  std::string out;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", h[i]);
    out += buf;
  }
  return out;
}

void check_embedding(const Embedding2D& e, std::size_t rows) {
  if (e.coords.rows() != rows || e.coords.cols() != 2) {
    fail(ErrorKind::dimension_mismatch, "embedding has shape " + std::to_string(e.coords.rows()) +
                                            "x" + std::to_string(e.coords.cols()) + ", expected " +
                                            std::to_string(rows) + "x2");
  }
  for (double v : e.coords.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::numeric, "embedding contains non-finite coordinates");
  }
}

}  // namespace hypernp

namespace hypernp::tsne {

namespace {

// Entropy (nats) of p_j ∝ exp(-beta (d_j - d_min)); fills probabilities.
double entropy_at(std::span<const double> d, double d_min, double beta, std::vector<double>& p) {
  double sum = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    p[j] = std::exp(-beta * (d[j] - d_min));
    sum += p[j];
  }
  double weighted = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    p[j] /= sum;
    weighted += p[j] * (d[j] - d_min);
  }
  return std::log(sum) + beta * weighted;
}

}  // namespace

Calibration calibrate_perplexity(std::span<const double> squared_distances, double target,
                                 double tolerance, int max_iter) {
  const std::size_t m = squared_distances.size();
  if (m < 2) fail(ErrorKind::invalid_argument, "perplexity calibration needs at least 2 neighbors");
  if (!(target > 0.0) || !(target <= static_cast<double>(m))) {
    fail(ErrorKind::invalid_argument, "perplexity " + std::to_string(target) + " outside (0, " +
                                          std::to_string(m) + "]");
  }
  const auto [lo_it, hi_it] = std::minmax_element(squared_distances.begin(), squared_distances.end());
  const double d_min = *lo_it, d_max = *hi_it;
  if (!(d_min >= 0.0) || !std::isfinite(d_max)) {
    fail(ErrorKind::invalid_argument, "squared distances must be finite and non-negative");
  }
  if (d_max == 0.0) {
    fail(ErrorKind::invalid_argument, "all neighbor distances are zero (duplicate points)");
  }

  Calibration out;
  out.probabilities.assign(m, 0.0);
  if (d_min == d_max) {
    // Uniform for every bandwidth: perplexity is pinned at m.
    std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0 / static_cast<double>(m));
    out.beta = 1.0 / d_max;
    out.perplexity = static_cast<double>(m);
    out.residual = std::abs(out.perplexity - target);
    out.converged = out.residual <= tolerance;
    out.sigma = std::sqrt(1.0 / (2.0 * out.beta));
    return out;
  }

  const double inf = std::numeric_limits<double>::infinity();
  double beta = 1.0 / (d_max - d_min), beta_lo = 0.0, beta_hi = inf;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const double h = entropy_at(squared_distances, d_min, beta, out.probabilities);
    out.iterations = iter;
    out.beta = beta;
    out.perplexity = std::exp(h);
    out.residual = std::abs(out.perplexity - target);
    if (out.residual <= tolerance) {
      out.converged = true;
      break;
    }
    double next;
    if (out.perplexity > target) {  // too flat: sharpen
      beta_lo = beta;
      next = beta_hi == inf ? beta * 2.0 : 0.5 * (beta + beta_hi);
    } else {
      beta_hi = beta;
      next = 0.5 * (beta + beta_lo);
    }
    if (next == beta) break;  // bracket collapsed to one double
    beta = next;
  }
  out.sigma = std::sqrt(1.0 / (2.0 * out.beta));
  return out;
}

Matrix<double> joint_probabilities(const Matrix<double>& data, double perplexity, const Settings& settings) {
  const std::size_t n = data.rows();
  if (n < 3) fail(ErrorKind::invalid_argument, "t-SNE needs at least 3 points");
  if (!(perplexity > 0.0 && perplexity < static_cast<double>(n - 1))) {
    fail(ErrorKind::invalid_argument, "perplexity " + std::to_string(perplexity) +
                                          " outside (0, " + std::to_string(n - 1) + ")");
  }
  Matrix<double> sq(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = data.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto b = data.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) {
        const double d = a[c] - b[c];
        s += d * d;
      }
      sq(i, j) = sq(j, i) = s;
    }
  }
  Matrix<double> cond(n, n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0, t = 0; j < n; ++j) {
      if (j != i) row[t++] = sq(i, j);
    }
    const Calibration cal =
        calibrate_perplexity(row, perplexity, settings.perplexity_tolerance, settings.perplexity_max_iter);
    for (std::size_t j = 0, t = 0; j < n; ++j) {
      if (j != i) cond(i, j) = cal.probabilities[t++];
    }
  }
  Matrix<double> joint(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      joint(i, j) = joint(j, i) = (cond(i, j) + cond(j, i)) * scale;
    }
  }
  return joint;
}

double kl_divergence(const Matrix<double>& joint, const Matrix<double>& layout) {
  const std::size_t n = layout.rows();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = layout(i, 0) - layout(j, 0), dy = layout(i, 1) - layout(j, 1);
      z += 2.0 / (1.0 + dx * dx + dy * dy);
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = joint(i, j);
      if (i == j || p <= 0.0) continue;
      const double dx = layout(i, 0) - layout(j, 0), dy = layout(i, 1) - layout(j, 1);
      const double q = 1.0 / ((1.0 + dx * dx + dy * dy) * z);
      kl += p * std::log(p / q);
    }
  }
  return kl;
}

Embedding2D project(const Matrix<double>& data, double perplexity, const Settings& settings,
                    std::uint64_t seed, const Matrix<double>* init) {
  const std::size_t n = data.rows();
  if (n > settings.max_points) {
    fail(ErrorKind::invalid_argument, "exact t-SNE is limited to " + std::to_string(settings.max_points) +
                                          " points, got " + std::to_string(n));
  }
  const Matrix<double> joint = joint_probabilities(data, perplexity, settings);

  Matrix<double> y(n, 2);
  if (init != nullptr) {
    if (init->rows() != n || init->cols() != 2) {
      fail(ErrorKind::dimension_mismatch, "initial layout must be " + std::to_string(n) + "x2");
    }
    y = *init;
  } else {
    Rng rng(seed);
    for (auto& v : y.values()) v = settings.init_stddev * rng.normal();
  }

  Embedding2D out;
  out.engine = "tsne";
  out.hyperparameter = {perplexity};
  out.seed = seed;
  out.initial_objective = kl_divergence(joint, y);

  const double lr = settings.learning_rate > 0.0
                        ? settings.learning_rate
                        : std::clamp(static_cast<double>(n) / 12.0, 50.0, 200.0);
  Matrix<double> update(n, 2), gains(n, 2, 1.0), grad(n, 2);
  std::vector<double> num(n * (n - 1) / 2);

  for (int iter = 0; iter < settings.iterations; ++iter) {
    const double exaggeration = iter < settings.exaggeration_iterations ? settings.exaggeration : 1.0;
    const double momentum =
        iter < settings.momentum_switch_iteration ? settings.initial_momentum : settings.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0, t = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++t) {
        const double dx = y(i, 0) - y(j, 0), dy = y(i, 1) - y(j, 1);
        num[t] = 1.0 / (1.0 + dx * dx + dy * dy);
        z += 2.0 * num[t];
      }
    }
    std::fill(grad.values().begin(), grad.values().end(), 0.0);
    const double inv_z = 1.0 / z;
    for (std::size_t i = 0, t = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j, ++t) {
        const double w = (exaggeration * joint(i, j) - num[t] * inv_z) * num[t];
        const double gx = w * (y(i, 0) - y(j, 0)), gy = w * (y(i, 1) - y(j, 1));
        grad(i, 0) += gx;
        grad(i, 1) += gy;
        grad(j, 0) -= gx;
        grad(j, 1) -= gy;
      }
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
      const double g = 4.0 * grad.data()[k];
      double& gain = gains.data()[k];
      double& u = update.data()[k];
      gain = (g > 0.0) != (u > 0.0) ? gain + 0.2 : gain * 0.8;
      gain = std::max(gain, 0.01);
      u = momentum * u - lr * gain * g;
      y.data()[k] += u;
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y(i, 0);
      my += y(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y(i, 0) -= mx;
      y(i, 1) -= my;
      if (!std::isfinite(y(i, 0)) || !std::isfinite(y(i, 1))) {
        fail(ErrorKind::numeric, "t-SNE diverged at iteration " + std::to_string(iter));
      }
    }
  }
  out.objective = kl_divergence(joint, y);
  out.coords = std::move(y);
  return out;
}

}  // namespace hypernp::tsne
