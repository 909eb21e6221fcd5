#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hypernp/engines/embedding.hpp"
#include "hypernp/nn/network.hpp"

namespace hypernp {

/// Everything needed to map raw (features, h) to network inputs and network
/// outputs back to layout coordinates.
struct Normalization {
  std::vector<double> feature_min, feature_max;  ///< per feature, from the training subset
  std::vector<double> hyper_min, hyper_max;      ///< per hyperparameter component, from the grid
  double target_min_x = 0.0, target_min_y = 0.0;
  double target_scale = 1.0;  ///< one scale for both axes, preserves aspect

  std::size_t feature_count() const { return feature_min.size(); }
  std::size_t hyper_count() const { return hyper_min.size(); }

  /// Writes [x_norm; h_norm] into `out` (length feature_count + hyper_count).
  /// Constant features map to 0.5, a degenerate h range to 0.
  void normalize_row(std::span<const double> features, std::span<const double> h, std::span<float> out) const;
  double normalize_feature(std::size_t j, double v) const;
  double denormalize_feature(std::size_t j, double v) const;
  double normalize_hyper(std::size_t j, double v) const;
  /// Inverse of the joint target scaling.
  void denormalize_target(float x, float y, double& out_x, double& out_y) const;

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// A trained projection network plus the preprocessing that produced its
/// training corpus.
struct NetworkModel {
  static constexpr std::uint32_t kFormatVersion = 1;

  nn::Network<float> network;
  Normalization normalization;
  std::string engine;
  std::vector<std::string> hyperparameter_names;
  std::vector<HyperValue> trained_values;  ///< the grid the targets came from
  std::string dataset_fingerprint;

  bool is_trained_value(const HyperValue& h) const;
  /// True when every component of h lies inside the trained grid bounds.
  bool within_bounds(const HyperValue& h) const;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// Binary archive, little-endian:
///   "HNPM" | u32 version | str engine | str fingerprint
///   | spec: u32 input, u32 hidden count, per hidden (u32 width, u8 bn, f64 dropout), u32 output
///   | normalization: u32 n, f64 min/max pairs | u32 m, f64 min/max pairs | f64 x0, y0, scale
///   | u32 names, str... | u32 values, per value u32 dims, f64...
///   | u32 params, f32... | u32 buffers, f32...
std::string encode_model(const NetworkModel& model);
NetworkModel decode_model(std::string_view bytes, const std::string& context = "model");
void save_model(const std::filesystem::path& path, const NetworkModel& model);
NetworkModel load_model(const std::filesystem::path& path);

}  // namespace hypernp
