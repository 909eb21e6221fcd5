#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "hypernp/model.hpp"

namespace hypernp {

struct TimingRecord {
  std::size_t rows = 0;
  double seconds = 0.0;
  double rows_per_second = 0.0;
};

struct InferenceOptions {
  std::size_t batch_size = 20000;
  bool denormalize = false;          ///< map outputs back to the training layout's frame
  bool allow_extrapolation = false;  ///< accept h outside the trained grid bounds
};

struct InferenceResult {
  Matrix<float> coords;  ///< N x 2
  HyperValue hyperparameter;
  bool extrapolated = false;
  TimingRecord timing;
};

/// Raw samples normalized once; only the h columns change between queries.
class PreparedInputs {
 public:
  PreparedInputs(const NetworkModel& model, const Matrix<double>& rows);
  std::size_t rows() const { return inputs_.rows(); }

 private:
  friend InferenceResult run_inference(const NetworkModel&, PreparedInputs&, const HyperValue&,
                                       const InferenceOptions&);
  Matrix<float> inputs_;
  std::size_t feature_count_ = 0;
};

/// Forward pass over prepared inputs at hyperparameter h, batch by batch.
InferenceResult run_inference(const NetworkModel& model, PreparedInputs& prepared, const HyperValue& h,
                              const InferenceOptions& options = {});

/// Normalize, concatenate h, forward in infer mode. Deterministic; results do
/// not depend on batch size.
InferenceResult infer(const NetworkModel& model, const Matrix<double>& rows, const HyperValue& h,
                      const InferenceOptions& options = {});

/// One layout per h, reusing the normalized inputs.
std::vector<InferenceResult> sweep(const NetworkModel& model, const Matrix<double>& rows,
                                   const std::vector<HyperValue>& h_values, const InferenceOptions& options = {});

/// Throws unless h has the model's arity and (without extrapolation) lies in
/// the trained bounds. Returns true when h is outside the bounds.
bool check_query(const NetworkModel& model, const HyperValue& h, bool allow_extrapolation);

/// Least-squares line through (rows, seconds); returns R^2.
double linear_fit_r2(const std::vector<TimingRecord>& records);

/// Layout export: raw little-endian float32 N x 2, or delimited text, each
/// with a JSON sidecar (`<path>.json`) holding shape, h and flags.
void write_layout_binary(const std::filesystem::path& path, const InferenceResult& result);
void write_layout_text(const std::filesystem::path& path, const InferenceResult& result, char delimiter = ',');

}  // namespace hypernp
