#include "hypernp/nn/network.hpp"

#include <cmath>
#include <string>

#include "kernels.hpp"

namespace hypernp::nn {

NetworkSpec NetworkSpec::tuned(std::size_t input_width) {
  return uniform(input_width, {320, 256, 352}, true, 0.25);
}

NetworkSpec NetworkSpec::uniform(std::size_t input_width, std::vector<std::size_t> hidden_widths,
                                 bool batch_norm, double dropout) {
  NetworkSpec spec;
  spec.input_width = input_width;
  spec.batch_norm.assign(hidden_widths.size(), batch_norm);
  spec.dropout.assign(hidden_widths.size(), dropout);
  spec.hidden_widths = std::move(hidden_widths);
  return spec;
}

std::vector<std::size_t> NetworkSpec::layer_widths() const {
  std::vector<std::size_t> widths{input_width};
  widths.insert(widths.end(), hidden_widths.begin(), hidden_widths.end());
  widths.push_back(output_width);
  return widths;
}

void NetworkSpec::validate() const {
  if (input_width == 0) fail(ErrorKind::invalid_argument, "network input width must be positive");
  if (output_width == 0) fail(ErrorKind::invalid_argument, "network output width must be positive");
  if (batch_norm.size() != hidden_widths.size() || dropout.size() != hidden_widths.size()) {
    fail(ErrorKind::invalid_argument, "batch_norm and dropout need one entry per hidden layer");
  }
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    if (hidden_widths[i] == 0) fail(ErrorKind::invalid_argument, "hidden layer widths must be positive");
    if (!(dropout[i] >= 0.0 && dropout[i] < 1.0)) {
      fail(ErrorKind::invalid_argument, "dropout probability must lie in [0, 1)");
    }
  }
}

template <typename T>
T mean_absolute_error(const Matrix<T>& predictions, const Matrix<T>& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    fail(ErrorKind::dimension_mismatch, "predictions and targets differ in shape");
  }
  if (predictions.rows() == 0) return T{};
  T total{};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::abs(predictions.data()[i] - targets.data()[i]);
  }
  return total / static_cast<T>(predictions.size());
}

template float mean_absolute_error(const Matrix<float>&, const Matrix<float>&);
template double mean_absolute_error(const Matrix<double>&, const Matrix<double>&);

template <typename T>
struct Network<T>::Trace {
  std::vector<Matrix<T>> inputs;      // input to each dense layer
  std::vector<Matrix<T>> pre;         // hidden pre-activations
  std::vector<Matrix<T>> normalized;  // x_hat, when batch norm is on
  std::vector<std::vector<T>> inv_std;
  std::vector<std::vector<bool>> floored;
  std::vector<Matrix<T>> mask;        // dropout multipliers, empty when off
  BatchStatistics<T> stats;
};

template <typename T>
Network<T>::Network(NetworkSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const auto widths = spec_.layer_widths();
  std::size_t p = 0, b = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Layout layer;
    layer.fan_in = widths[l];
    layer.fan_out = widths[l + 1];
    layer.weights = p;
    p += layer.fan_in * layer.fan_out;
    layer.bias = p;
    p += layer.fan_out;
    const bool hidden = l < spec_.hidden_widths.size();
    if (hidden && spec_.batch_norm[l]) {
      layer.batch_norm = true;
      layer.scale = p;
      p += layer.fan_out;
      layer.shift = p;
      p += layer.fan_out;
      layer.mean = b;
      b += layer.fan_out;
      layer.variance = b;
      b += layer.fan_out;
    }
    if (hidden) layer.dropout = spec_.dropout[l];
    layers_.push_back(layer);
  }
  params_.assign(p, T{});
  buffers_.assign(b, T{});
  for (const auto& layer : layers_) {
    if (!layer.batch_norm) continue;
    std::fill_n(params_.begin() + layer.scale, layer.fan_out, T{1});
    std::fill_n(buffers_.begin() + layer.variance, layer.fan_out, T{1});
  }
}

template <typename T>
Network<T>::Network(NetworkSpec spec, std::uint64_t seed) : Network(std::move(spec)) {
  Rng rng(seed);
  for (const auto& layer : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.fan_in));
    for (std::size_t i = 0; i < layer.fan_in * layer.fan_out; ++i) {
      params_[layer.weights + i] = static_cast<T>(rng.uniform(-limit, limit));
    }
  }
}

template <typename T>
Network<T> Network<T>::zeros(NetworkSpec spec) {
  return Network(std::move(spec));
}

template <typename T>
std::span<T> Network<T>::weights(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.weights, l.fan_in * l.fan_out};
}

template <typename T>
std::span<T> Network<T>::bias(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + l.bias, l.fan_out};
}

template <typename T>
std::span<T> Network<T>::bn_scale(std::size_t layer) {
  const auto& l = layers_.at(layer);
  if (!l.batch_norm) return {};
  return {params_.data() + l.scale, l.fan_out};
}

template <typename T>
std::span<T> Network<T>::bn_shift(std::size_t layer) {
  const auto& l = layers_.at(layer);
  if (!l.batch_norm) return {};
  return {params_.data() + l.shift, l.fan_out};
}

template <typename T>
std::span<T> Network<T>::running_mean(std::size_t layer) {
  const auto& l = layers_.at(layer);
  if (!l.batch_norm) return {};
  return {buffers_.data() + l.mean, l.fan_out};
}

template <typename T>
std::span<T> Network<T>::running_variance(std::size_t layer) {
  const auto& l = layers_.at(layer);
  if (!l.batch_norm) return {};
  return {buffers_.data() + l.variance, l.fan_out};
}

template <typename T>
std::span<const T> Network<T>::running_variance(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  if (!l.batch_norm) return {};
  return {buffers_.data() + l.variance, l.fan_out};
}

template <typename T>
void Network<T>::check_batch(const Matrix<T>& batch) const {
  if (layers_.empty()) fail(ErrorKind::invalid_argument, "network has no layers");
  if (batch.cols() != spec_.input_width) {
    fail(ErrorKind::dimension_mismatch, "input width mismatch: expected " +
                                            std::to_string(spec_.input_width) + " columns, got " +
                                            std::to_string(batch.cols()));
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!std::isfinite(batch.data()[i])) {
      fail(ErrorKind::invalid_argument,
           "non-finite input at row " + std::to_string(i / batch.cols()) + ", column " +
               std::to_string(i % batch.cols()));
    }
  }
}

template <typename T>
Matrix<T> Network<T>::run(const Matrix<T>& batch, Mode mode, Rng* dropout_rng, Trace* trace) const {
  check_batch(batch);
  const std::size_t n = batch.rows();
  const std::size_t hidden = spec_.hidden_widths.size();
  if (trace) {
    trace->inputs.assign(layers_.size(), {});
    trace->pre.assign(hidden, {});
    trace->normalized.assign(hidden, {});
    trace->inv_std.assign(hidden, {});
    trace->floored.assign(hidden, {});
    trace->mask.assign(hidden, {});
    trace->stats.mean.assign(hidden, {});
    trace->stats.variance.assign(hidden, {});
  }

  Matrix<T> current = batch;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layout& layer = layers_[l];
    Matrix<T> z(n, layer.fan_out);
    kernels::gemm_nn(current.data(), params_.data() + layer.weights, z.data(), n, layer.fan_in,
                     layer.fan_out);
    const T* bias = params_.data() + layer.bias;
    for (std::size_t i = 0; i < n; ++i) {
      T* row = z.data() + i * layer.fan_out;
      for (std::size_t j = 0; j < layer.fan_out; ++j) row[j] += bias[j];
    }
    if (trace) trace->inputs[l] = std::move(current);

    if (l == hidden) {  // linear output layer
      current = std::move(z);
      break;
    }

    Matrix<T> act = z;
    for (auto& v : act.values()) v = v > T{} ? v : T{};
    if (trace) trace->pre[l] = std::move(z);

    if (layer.batch_norm) {
      const std::size_t w = layer.fan_out;
      const T* scale = params_.data() + layer.scale;
      const T* shift = params_.data() + layer.shift;
      if (mode == Mode::infer) {
        std::vector<T> a(w), c(w);
        for (std::size_t j = 0; j < w; ++j) {
          const T var = std::max(buffers_[layer.variance + j], kVarianceFloor);
          a[j] = scale[j] / std::sqrt(var);
          c[j] = shift[j] - buffers_[layer.mean + j] * a[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
          T* row = act.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) row[j] = row[j] * a[j] + c[j];
        }
      } else {
        std::vector<T> mean(w, T{}), var(w, T{}), inv_std(w);
        std::vector<bool> floored(w, false);
        for (std::size_t i = 0; i < n; ++i) {
          const T* row = act.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) mean[j] += row[j];
        }
        for (auto& m : mean) m /= static_cast<T>(n);
        for (std::size_t i = 0; i < n; ++i) {
          const T* row = act.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) {
            const T d = row[j] - mean[j];
            var[j] += d * d;
          }
        }
        for (std::size_t j = 0; j < w; ++j) {
          var[j] /= static_cast<T>(n);
          floored[j] = var[j] < kVarianceFloor;
          inv_std[j] = T{1} / std::sqrt(std::max(var[j], kVarianceFloor));
        }
        Matrix<T> xhat(n, w);
        for (std::size_t i = 0; i < n; ++i) {
          T* row = act.data() + i * w;
          T* xr = xhat.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) {
            xr[j] = (row[j] - mean[j]) * inv_std[j];
            row[j] = scale[j] * xr[j] + shift[j];
          }
        }
        if (trace) {
          trace->normalized[l] = std::move(xhat);
          trace->inv_std[l] = std::move(inv_std);
          trace->floored[l] = std::move(floored);
          trace->stats.mean[l] = std::move(mean);
          trace->stats.variance[l] = std::move(var);
        }
      }
    }

    if (mode == Mode::train && layer.dropout > 0.0 && dropout_rng != nullptr) {
      const T keep = static_cast<T>(1.0 - layer.dropout);
      Matrix<T> mask(n, layer.fan_out);
      for (auto& m : mask.values()) m = dropout_rng->uniform() < layer.dropout ? T{} : T{1} / keep;
      for (std::size_t i = 0; i < act.size(); ++i) act.data()[i] *= mask.data()[i];
      if (trace) trace->mask[l] = std::move(mask);
    }
    current = std::move(act);
  }
  return current;
}

template <typename T>
Matrix<T> Network<T>::forward(const Matrix<T>& batch, Mode mode, Rng* dropout_rng) const {
  return run(batch, mode, dropout_rng, nullptr);
}

template <typename T>
Gradients<T> Network<T>::backward(const Matrix<T>& batch, const Matrix<T>& targets, Mode mode,
                                  Rng* dropout_rng) const {
  if (mode != Mode::train) fail(ErrorKind::invalid_argument, "backward requires train mode");
  if (targets.rows() != batch.rows() || targets.cols() != spec_.output_width) {
    fail(ErrorKind::dimension_mismatch,
         "targets must be " + std::to_string(batch.rows()) + "x" + std::to_string(spec_.output_width) +
             ", got " + std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()));
  }
  if (batch.rows() == 0) fail(ErrorKind::invalid_argument, "backward on an empty batch");

  Trace trace;
  const Matrix<T> output = run(batch, mode, dropout_rng, &trace);
  const std::size_t n = batch.rows();
  const T inv_n = T{1} / static_cast<T>(n);

  Gradients<T> grads;
  grads.loss = mean_absolute_error(output, targets);
  grads.values.assign(params_.size(), T{});

  // d loss / d output; sign(0) is taken as 0
  Matrix<T> delta(n, spec_.output_width);
  const T inv_count = T{1} / static_cast<T>(output.size());
  for (std::size_t i = 0; i < output.size(); ++i) {
    const T diff = output.data()[i] - targets.data()[i];
    delta.data()[i] = diff > T{} ? inv_count : (diff < T{} ? -inv_count : T{});
  }

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Layout& layer = layers_[li];
    const std::size_t w = layer.fan_out;
    const bool is_hidden = li < spec_.hidden_widths.size();

    if (is_hidden) {
      if (!trace.mask[li].empty()) {
        for (std::size_t i = 0; i < delta.size(); ++i) delta.data()[i] *= trace.mask[li].data()[i];
      }
      if (layer.batch_norm) {
        const T* scale = params_.data() + layer.scale;
        T* dscale = grads.values.data() + layer.scale;
        T* dshift = grads.values.data() + layer.shift;
        const Matrix<T>& xhat = trace.normalized[li];
        std::vector<T> sum_dx(w, T{}), sum_dx_xhat(w, T{});
        for (std::size_t i = 0; i < n; ++i) {
          T* d = delta.data() + i * w;
          const T* xr = xhat.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) {
            dscale[j] += d[j] * xr[j];
            dshift[j] += d[j];
            d[j] *= scale[j];  // now d x_hat
            sum_dx[j] += d[j];
            sum_dx_xhat[j] += d[j] * xr[j];
          }
        }
        const auto& inv_std = trace.inv_std[li];
        const auto& floored = trace.floored[li];
        for (std::size_t i = 0; i < n; ++i) {
          T* d = delta.data() + i * w;
          const T* xr = xhat.data() + i * w;
          for (std::size_t j = 0; j < w; ++j) {
            const T centered = d[j] - sum_dx[j] * inv_n;
            d[j] = floored[j] ? inv_std[j] * centered
                              : inv_std[j] * (centered - xr[j] * sum_dx_xhat[j] * inv_n);
          }
        }
      }
      const Matrix<T>& pre = trace.pre[li];
      for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(pre.data()[i] > T{})) delta.data()[i] = T{};
      }
    }

    const Matrix<T>& input = trace.inputs[li];
    kernels::gemm_tn(input.data(), delta.data(), grads.values.data() + layer.weights, n,
                     layer.fan_in, w);
    T* dbias = grads.values.data() + layer.bias;
    for (std::size_t i = 0; i < n; ++i) {
      const T* d = delta.data() + i * w;
      for (std::size_t j = 0; j < w; ++j) dbias[j] += d[j];
    }
    if (li > 0) {
      Matrix<T> prev(n, layer.fan_in);
      kernels::gemm_nt(delta.data(), params_.data() + layer.weights, prev.data(), n, w,
                       layer.fan_in);
      delta = std::move(prev);
    }
  }
  grads.statistics = std::move(trace.stats);
  return grads;
}

template <typename T>
void Network<T>::update_running_statistics(const BatchStatistics<T>& stats, double momentum) {
  const T keep = static_cast<T>(momentum);
  const T take = static_cast<T>(1.0 - momentum);
  for (std::size_t l = 0; l < spec_.hidden_widths.size(); ++l) {
    const Layout& layer = layers_[l];
    if (!layer.batch_norm || l >= stats.mean.size() || stats.mean[l].empty()) continue;
    for (std::size_t j = 0; j < layer.fan_out; ++j) {
      T& m = buffers_[layer.mean + j];
      T& v = buffers_[layer.variance + j];
      m = keep * m + take * stats.mean[l][j];
      v = keep * v + take * stats.variance[l][j];
    }
  }
}

template class Network<float>;
template class Network<double>;

}  // namespace hypernp::nn
