#include "hypernp/inference.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "hypernp/io/binary.hpp"

namespace hypernp {

bool check_query(const NetworkModel& model, const HyperValue& h, bool allow_extrapolation) {
  const std::size_t arity = model.normalization.hyper_count();
  if (h.size() != arity) {
    fail(ErrorKind::invalid_argument, "model expects " + std::to_string(arity) + " hyperparameter value(s), got " +
                                          std::to_string(h.size()));
  }
  for (double v : h) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "hyperparameter value is not finite");
  }
  const bool outside = !model.within_bounds(h);
  if (outside && !allow_extrapolation) {
    std::string bounds;
    for (std::size_t j = 0; j < arity; ++j) {
      bounds += (j ? ", [" : "[") + format_hyper({model.normalization.hyper_min[j]}) + ", " +
                format_hyper({model.normalization.hyper_max[j]}) + "]";
    }
    fail(ErrorKind::invalid_argument,
         "h = " + format_hyper(h) + " outside trained bounds " + bounds + " (extrapolation not enabled)");
  }
  return outside;
}

PreparedInputs::PreparedInputs(const NetworkModel& model, const Matrix<double>& rows)
    : feature_count_(model.normalization.feature_count()) {
  if (rows.cols() != feature_count_) {
    fail(ErrorKind::dimension_mismatch, "model expects " + std::to_string(feature_count_) + " features, got " +
                                            std::to_string(rows.cols()));
  }
  const std::size_t width = feature_count_ + model.normalization.hyper_count();
  inputs_ = Matrix<float>(rows.rows(), width);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    const auto src = rows.row(i);
    auto dst = inputs_.row(i);
    for (std::size_t j = 0; j < feature_count_; ++j) {
      if (!std::isfinite(src[j])) {
        fail(ErrorKind::invalid_argument, "non-finite feature at row " + std::to_string(i) + ", column " +
                                              std::to_string(j));
      }
      dst[j] = static_cast<float>(model.normalization.normalize_feature(j, src[j]));
    }
  }
}

InferenceResult run_inference(const NetworkModel& model, PreparedInputs& prepared, const HyperValue& h,
                              const InferenceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (options.batch_size == 0) fail(ErrorKind::invalid_argument, "batch size must be positive");
  InferenceResult result;
  result.hyperparameter = h;
  result.extrapolated = check_query(model, h, options.allow_extrapolation);

  auto& inputs = prepared.inputs_;
  const std::size_t n = inputs.rows(), width = inputs.cols(), nf = prepared.feature_count_;
  std::vector<float> h_norm(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) h_norm[j] = static_cast<float>(model.normalization.normalize_hyper(j, h[j]));
  for (std::size_t i = 0; i < n; ++i) {
    auto row = inputs.row(i);
    std::copy(h_norm.begin(), h_norm.end(), row.begin() + static_cast<std::ptrdiff_t>(nf));
  }

  result.coords = Matrix<float>(n, 2);
  for (std::size_t s = 0; s < n; s += options.batch_size) {
    const std::size_t count = std::min(options.batch_size, n - s);
    Matrix<float> batch(count, width);
    std::memcpy(batch.data(), inputs.data() + s * width, sizeof(float) * count * width);
    const Matrix<float> out = model.network.infer(batch);
    std::memcpy(result.coords.data() + s * 2, out.data(), sizeof(float) * count * 2);
  }
  if (options.denormalize) {
    for (std::size_t i = 0; i < n; ++i) {
      double x, y;
      model.normalization.denormalize_target(result.coords(i, 0), result.coords(i, 1), x, y);
      result.coords(i, 0) = static_cast<float>(x);
      result.coords(i, 1) = static_cast<float>(y);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.timing.rows = n;
  result.timing.seconds = std::max(seconds, 1e-9);
  result.timing.rows_per_second = static_cast<double>(n) / result.timing.seconds;
  return result;
}

InferenceResult infer(const NetworkModel& model, const Matrix<double>& rows, const HyperValue& h,
                      const InferenceOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  check_query(model, h, options.allow_extrapolation);
  PreparedInputs prepared(model, rows);
  InferenceResult result = run_inference(model, prepared, h, options);
  result.timing.seconds =
      std::max(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1e-9);
  result.timing.rows_per_second = static_cast<double>(result.timing.rows) / result.timing.seconds;
  return result;
}

std::vector<InferenceResult> sweep(const NetworkModel& model, const Matrix<double>& rows,
                                   const std::vector<HyperValue>& h_values, const InferenceOptions& options) {
  if (h_values.empty()) fail(ErrorKind::invalid_argument, "sweep needs at least one h value");
  for (const auto& h : h_values) check_query(model, h, options.allow_extrapolation);
  PreparedInputs prepared(model, rows);
  std::vector<InferenceResult> out;
  out.reserve(h_values.size());
  for (const auto& h : h_values) out.push_back(run_inference(model, prepared, h, options));
  return out;
}

double linear_fit_r2(const std::vector<TimingRecord>& records) {
  const std::size_t n = records.size();
  if (n < 2) fail(ErrorKind::invalid_argument, "a linear fit needs at least two timings");
  double mx = 0.0, my = 0.0;
  for (const auto& r : records) {
    mx += static_cast<double>(r.rows);
    my += r.seconds;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& r : records) {
    const double dx = static_cast<double>(r.rows) - mx, dy = r.seconds - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 1.0;
  return (sxy * sxy) / (sxx * syy);
}

namespace {

void write_sidecar(const std::filesystem::path& path, const InferenceResult& result, const char* format) {
  const nlohmann::json meta = {
      {"format", format},
      {"rows", result.coords.rows()},
      {"cols", 2},
      {"hyperparameter", result.hyperparameter},
      {"extrapolated", result.extrapolated},
  };
  auto sidecar = path;
  sidecar += ".json";
  binary::write_file(sidecar, meta.dump(2) + "\n");
}

}  // namespace

void write_layout_binary(const std::filesystem::path& path, const InferenceResult& result) {
  binary::Writer w;
  for (float v : result.coords.values()) w.f32(v);
  binary::write_file(path, w.bytes());
  write_sidecar(path, result, "float32-le");
}

void write_layout_text(const std::filesystem::path& path, const InferenceResult& result, char delimiter) {
  std::string text = std::string("x") + delimiter + "y\n";
  char buf[64];
  for (std::size_t i = 0; i < result.coords.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g%c%.9g\n", result.coords(i, 0), delimiter, result.coords(i, 1));
    text += buf;
  }
  binary::write_file(path, text);
  write_sidecar(path, result, "delimited");
}

}  // namespace hypernp
