#include "hypernp/model.hpp"

#include <algorithm>
#include <cmath>

#include "hypernp/io/binary.hpp"

namespace hypernp {

double Normalization::normalize_feature(std::size_t j, double v) const {
  const double range = feature_max[j] - feature_min[j];
  return range > 0.0 ? (v - feature_min[j]) / range : 0.5;
}

double Normalization::denormalize_feature(std::size_t j, double v) const {
  const double range = feature_max[j] - feature_min[j];
  return range > 0.0 ? feature_min[j] + v * range : feature_min[j];
}

double Normalization::normalize_hyper(std::size_t j, double v) const {
  const double range = hyper_max[j] - hyper_min[j];
  return range > 0.0 ? (v - hyper_min[j]) / range : 0.0;
}

void Normalization::normalize_row(std::span<const double> features, std::span<const double> h,
                                  std::span<float> out) const {
  const std::size_t n = feature_count();
  for (std::size_t j = 0; j < n; ++j) out[j] = static_cast<float>(normalize_feature(j, features[j]));
  for (std::size_t j = 0; j < h.size(); ++j) out[n + j] = static_cast<float>(normalize_hyper(j, h[j]));
}

void Normalization::denormalize_target(float x, float y, double& out_x, double& out_y) const {
  out_x = target_min_x + static_cast<double>(x) * target_scale;
  out_y = target_min_y + static_cast<double>(y) * target_scale;
}

bool NetworkModel::is_trained_value(const HyperValue& h) const {
  return std::find(trained_values.begin(), trained_values.end(), h) != trained_values.end();
}

bool NetworkModel::within_bounds(const HyperValue& h) const {
  if (h.size() != normalization.hyper_count()) return false;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (!(h[j] >= normalization.hyper_min[j] && h[j] <= normalization.hyper_max[j])) return false;
  }
  return true;
}

std::string encode_model(const NetworkModel& model) {
  binary::Writer w;
  w.raw("HNPM");
  w.u32(NetworkModel::kFormatVersion);
  w.str(model.engine);
  w.str(model.dataset_fingerprint);

  const auto& spec = model.network.spec();
  w.u32(static_cast<std::uint32_t>(spec.input_width));
  w.u32(static_cast<std::uint32_t>(spec.hidden_widths.size()));
  for (std::size_t i = 0; i < spec.hidden_widths.size(); ++i) {
    w.u32(static_cast<std::uint32_t>(spec.hidden_widths[i]));
    w.u8(spec.batch_norm[i] ? 1 : 0);
    w.f64(spec.dropout[i]);
  }
  w.u32(static_cast<std::uint32_t>(spec.output_width));

  const auto& norm = model.normalization;
  w.u32(static_cast<std::uint32_t>(norm.feature_min.size()));
  for (std::size_t j = 0; j < norm.feature_min.size(); ++j) {
    w.f64(norm.feature_min[j]);
    w.f64(norm.feature_max[j]);
  }
  w.u32(static_cast<std::uint32_t>(norm.hyper_min.size()));
  for (std::size_t j = 0; j < norm.hyper_min.size(); ++j) {
    w.f64(norm.hyper_min[j]);
    w.f64(norm.hyper_max[j]);
  }
  w.f64(norm.target_min_x);
  w.f64(norm.target_min_y);
  w.f64(norm.target_scale);

  w.u32(static_cast<std::uint32_t>(model.hyperparameter_names.size()));
  for (const auto& name : model.hyperparameter_names) w.str(name);
  w.u32(static_cast<std::uint32_t>(model.trained_values.size()));
  for (const auto& h : model.trained_values) {
    w.u32(static_cast<std::uint32_t>(h.size()));
    for (double v : h) w.f64(v);
  }
  const auto params = model.network.parameters();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (float v : params) w.f32(v);
  const auto buffers = model.network.buffers();
  w.u32(static_cast<std::uint32_t>(buffers.size()));
  for (float v : buffers) w.f32(v);
  return w.take();
}

NetworkModel decode_model(std::string_view bytes, const std::string& context) {
  binary::Reader r(bytes, context);
  if (r.raw(4) != "HNPM") fail(ErrorKind::format, context + ": not a model file (bad magic)");
  const auto version = r.u32();
  if (version != NetworkModel::kFormatVersion) {
    fail(ErrorKind::format, context + ": unsupported model version " + std::to_string(version));
  }
  NetworkModel model;
  model.engine = r.str();
  model.dataset_fingerprint = r.str();

  nn::NetworkSpec spec;
  spec.input_width = r.u32();
  const auto hidden = r.u32();
  if (hidden > 64) fail(ErrorKind::format, context + ": implausible hidden layer count");
  for (std::uint32_t i = 0; i < hidden; ++i) {
    spec.hidden_widths.push_back(r.u32());
    spec.batch_norm.push_back(r.u8() != 0);
    spec.dropout.push_back(r.f64());
  }
  spec.output_width = r.u32();

  auto& norm = model.normalization;
  const auto features = r.u32();
  if (features > r.remaining() / 16) fail(ErrorKind::format, context + ": corrupt feature count");
  for (std::uint32_t j = 0; j < features; ++j) {
    norm.feature_min.push_back(r.f64());
    norm.feature_max.push_back(r.f64());
  }
  const auto hypers = r.u32();
  if (hypers > r.remaining() / 16) fail(ErrorKind::format, context + ": corrupt hyperparameter count");
  for (std::uint32_t j = 0; j < hypers; ++j) {
    norm.hyper_min.push_back(r.f64());
    norm.hyper_max.push_back(r.f64());
  }
  norm.target_min_x = r.f64();
  norm.target_min_y = r.f64();
  norm.target_scale = r.f64();

  const auto names = r.u32();
  for (std::uint32_t i = 0; i < names; ++i) model.hyperparameter_names.push_back(r.str());
  const auto values = r.u32();
  for (std::uint32_t i = 0; i < values; ++i) {
    HyperValue h(r.u32());
    for (auto& v : h) v = r.f64();
    model.trained_values.push_back(std::move(h));
  }

  try {
    spec.validate();
    if (spec.output_width != 2) fail(ErrorKind::invalid_argument, "output width must be 2");
  } catch (const Error& e) {
    fail(ErrorKind::format, context + ": " + e.what());
  }
  if (spec.input_width != features + hypers) {
    fail(ErrorKind::format, context + ": network input width does not match normalization metadata");
  }
  model.network = nn::Network<float>::zeros(spec);
  auto params = model.network.parameters();
  if (r.u32() != params.size()) fail(ErrorKind::format, context + ": parameter count does not match spec");
  for (auto& v : params) v = r.f32();
  auto buffers = model.network.buffers();
  if (r.u32() != buffers.size()) fail(ErrorKind::format, context + ": buffer count does not match spec");
  for (auto& v : buffers) v = r.f32();
  if (r.remaining() != 0) fail(ErrorKind::format, context + ": trailing bytes");
  return model;
}

void save_model(const std::filesystem::path& path, const NetworkModel& model) {
  binary::write_file(path, encode_model(model));
}

NetworkModel load_model(const std::filesystem::path& path) {
  return decode_model(binary::read_file(path), path.string());
}

}  // namespace hypernp
