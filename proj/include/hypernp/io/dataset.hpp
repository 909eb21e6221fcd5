#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypernp/common.hpp"

namespace hypernp {

struct Dataset {
  Matrix<double> features;  ///< N x n
  std::vector<int> labels;  ///< empty or one per row
  std::vector<std::string> feature_names;
  std::string fingerprint;  ///< content hash, hex

  std::size_t size() const { return features.rows(); }
  std::size_t dims() const { return features.cols(); }
  bool has_labels() const { return !labels.empty(); }

  /// Throws unless N >= 2, n >= 1, everything finite, labels sized right.
  void validate() const;
  Dataset subset(std::span<const std::size_t> rows) const;
};

struct DelimitedOptions {
  char delimiter = ',';
  std::optional<std::size_t> label_column;  ///< 0-based, excluded from features
  bool header = false;
};

Dataset load_delimited(const std::filesystem::path& path, const DelimitedOptions& options = {});

/// IDX image + label archives (MNIST layout). Pixels scaled by 1/255.
/// `labels_path` may be empty. `limit` caps the number of records read.
Dataset load_idx_images(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path, std::size_t limit);

/// Gaussian clusters around random centers at least 6 * spread apart.
Dataset synth_blobs(std::size_t clusters, std::size_t points_per_cluster, std::size_t dims,
                    double spread, std::uint64_t seed);

/// Column-wise z-score, in place. Constant columns become 0.
void standardize(Dataset& dataset);

/// Fingerprint of in-memory content (used for generated data).
std::string content_fingerprint(const Matrix<double>& features, const std::vector<int>& labels);

}  // namespace hypernp
