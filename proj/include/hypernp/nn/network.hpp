#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hypernp/common.hpp"

namespace hypernp::nn {

enum class Mode { train, infer };

/// Shape of a fully connected regressor. Hidden layers are
/// dense -> ReLU -> [batch norm] -> [dropout]; the output layer is linear.
struct NetworkSpec {
  std::size_t input_width = 0;
  std::vector<std::size_t> hidden_widths;
  std::size_t output_width = 2;
  std::vector<bool> batch_norm;  ///< one flag per hidden layer
  std::vector<double> dropout;   ///< one probability per hidden layer, in [0, 1)

  /// The tuned projection network: hidden widths 320, 256, 352, batch norm
  /// and dropout 0.25 after every hidden layer.
  static NetworkSpec tuned(std::size_t input_width);
  static NetworkSpec uniform(std::size_t input_width, std::vector<std::size_t> hidden_widths,
                             bool batch_norm, double dropout);

  /// input, hidden..., output
  std::vector<std::size_t> layer_widths() const;
  void validate() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Per-hidden-layer batch statistics observed during a training pass.
/// Entries for layers without batch norm are empty.
template <typename T>
struct BatchStatistics {
  std::vector<std::vector<T>> mean;
  std::vector<std::vector<T>> variance;
};

template <typename T>
struct Gradients {
  T loss{};
  std::vector<T> values;  ///< aligned with Network::parameters()
  BatchStatistics<T> statistics;
};

/// Mean of |prediction - target| over every entry.
template <typename T>
T mean_absolute_error(const Matrix<T>& predictions, const Matrix<T>& targets);

template <typename T>
class Network {
 public:
  /// Variance floor inside batch norm: x_hat = (x - mean) / sqrt(max(var, floor)).
  static constexpr T kVarianceFloor = static_cast<T>(1e-5);

  Network() = default;
  /// He-uniform weights (limit sqrt(6 / fan_in)), zero biases, identity batch norm.
  Network(NetworkSpec spec, std::uint64_t seed);
  /// All parameters zero except batch-norm scale (1) and running variance (1).
  static Network zeros(NetworkSpec spec);

  const NetworkSpec& spec() const noexcept { return spec_; }
  std::size_t input_width() const noexcept { return spec_.input_width; }
  std::size_t output_width() const noexcept { return spec_.output_width; }
  std::size_t dense_layer_count() const noexcept { return layers_.size(); }

  std::span<T> parameters() noexcept { return params_; }
  std::span<const T> parameters() const noexcept { return params_; }
  /// Non-trainable state: running means and variances.
  std::span<T> buffers() noexcept { return buffers_; }
  std::span<const T> buffers() const noexcept { return buffers_; }

  /// Weights of dense layer `layer`, row-major (fan_in x fan_out).
  std::span<T> weights(std::size_t layer);
  std::span<T> bias(std::size_t layer);
  /// Batch-norm views for hidden layer `layer`; empty when disabled.
  std::span<T> bn_scale(std::size_t layer);
  std::span<T> bn_shift(std::size_t layer);
  std::span<T> running_mean(std::size_t layer);
  std::span<T> running_variance(std::size_t layer);
  std::span<const T> running_variance(std::size_t layer) const;

  /// Infer mode uses running statistics and no dropout. Train mode uses batch
  /// statistics and samples dropout masks from `dropout_rng` (no dropout when null).
  Matrix<T> forward(const Matrix<T>& batch, Mode mode, Rng* dropout_rng = nullptr) const;
  Matrix<T> infer(const Matrix<T>& batch) const { return forward(batch, Mode::infer); }

  /// Loss and its gradient w.r.t. every trainable parameter for one training
  /// pass. Dropout masks drawn here are used for both directions.
  Gradients<T> backward(const Matrix<T>& batch, const Matrix<T>& targets, Mode mode,
                        Rng* dropout_rng = nullptr) const;

  /// running = momentum * running + (1 - momentum) * batch
  void update_running_statistics(const BatchStatistics<T>& stats, double momentum);

  friend bool operator==(const Network&, const Network&) = default;

 private:
  struct Layout {
    std::size_t fan_in = 0, fan_out = 0;
    std::size_t weights = 0, bias = 0;
    bool batch_norm = false;
    std::size_t scale = 0, shift = 0;   // into params_
    std::size_t mean = 0, variance = 0;  // into buffers_
    double dropout = 0.0;
    friend bool operator==(const Layout&, const Layout&) = default;
  };
  struct Trace;

  explicit Network(NetworkSpec spec);
  Matrix<T> run(const Matrix<T>& batch, Mode mode, Rng* dropout_rng, Trace* trace) const;
  void check_batch(const Matrix<T>& batch) const;

  NetworkSpec spec_;
  std::vector<Layout> layers_;
  std::vector<T> params_;
  std::vector<T> buffers_;
};

extern template class Network<float>;
extern template class Network<double>;

}  // namespace hypernp::nn
