#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "hypernp/common.hpp"

namespace testing {

inline hypernp::Matrix<double> random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                             double scale = 1.0) {
  hypernp::Rng rng(seed);
  hypernp::Matrix<double> m(rows, cols);
  for (auto& v : m.values()) v = scale * rng.normal();
  return m;
}

inline double max_abs_diff(const hypernp::Matrix<double>& a, const hypernp::Matrix<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// Flips each column of `m` so it best matches `reference`.
inline hypernp::Matrix<double> sign_align_columns(hypernp::Matrix<double> m, const hypernp::Matrix<double>& reference) {
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double dot = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) dot += m(r, c) * reference(r, c);
    if (dot < 0) {
      for (std::size_t r = 0; r < m.rows(); ++r) m(r, c) = -m(r, c);
    }
  }
  return m;
}

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() / ("hypernp-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
