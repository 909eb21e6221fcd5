#include "hypernp/nn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace hypernp::nn {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_validation(
    std::size_t rows, double fraction, std::uint64_t seed, std::span<const std::size_t> strata) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    fail(ErrorKind::invalid_argument, "validation fraction must lie in [0, 1)");
  }
  if (!strata.empty() && strata.size() != rows) {
    fail(ErrorKind::dimension_mismatch, "strata must have one entry per row");
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows; ++i) groups[strata.empty() ? 0 : strata[i]].push_back(i);

  Rng rng(mix_seed(seed, 0x5a17));
  std::vector<std::size_t> train, validation;
  for (auto& [group, members] : groups) {
    rng.shuffle(members.begin(), members.end());
    auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    if (take >= members.size()) take = members.size() - 1;
    validation.insert(validation.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    train.insert(train.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return {std::move(train), std::move(validation)};
}

namespace {

template <typename T>
double evaluate(const Network<T>& model, const Matrix<T>& inputs, const Matrix<T>& targets,
                std::span<const std::size_t> rows) {
  if (rows.empty()) return std::numeric_limits<double>::quiet_NaN();
  constexpr std::size_t kChunk = 4096;
  double total = 0.0;
  for (std::size_t start = 0; start < rows.size(); start += kChunk) {
    const auto chunk = rows.subspan(start, std::min(kChunk, rows.size() - start));
    const Matrix<T> x = select_rows(inputs, chunk);
    const Matrix<T> y = select_rows(targets, chunk);
    const Matrix<T> pred = model.infer(x);
    total += static_cast<double>(mean_absolute_error(pred, y)) * static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

template <typename T>
FitResult<T> fit(Network<T> model, const Matrix<T>& inputs, const Matrix<T>& targets,
                 const FitConfig& config, std::span<const std::size_t> strata) {
  if (inputs.rows() != targets.rows()) {
    fail(ErrorKind::dimension_mismatch, "fit: inputs have " + std::to_string(inputs.rows()) +
                                            " rows, targets " + std::to_string(targets.rows()));
  }
  if (config.batch_size == 0) fail(ErrorKind::invalid_argument, "batch size must be positive");

  auto [train_rows, val_rows] =
      split_validation(inputs.rows(), config.validation_fraction, config.seed, strata);
  if (train_rows.size() < 2) {
    fail(ErrorKind::invalid_argument, "fit needs at least two training rows");
  }

  FitResult<T> result;
  const auto monitor = [&](const EpochRecord& r) {
    return val_rows.empty() ? r.train_loss : r.validation_loss;
  };
  EpochRecord initial{0, evaluate(model, inputs, targets, train_rows),
                      evaluate(model, inputs, targets, val_rows)};
  result.history.push_back(initial);
  double best = monitor(initial);
  Network<T> best_model = model;

  OptimizerState<T> optimizer(model.parameters().size(), config.adam);
  Rng shuffle_rng(mix_seed(config.seed, 0x5f));
  Rng dropout_rng(mix_seed(config.seed, 0xd809));
  std::size_t since_improvement = 0;
  std::vector<std::size_t> order = train_rows;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t loss_rows = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      if (count < 2) continue;  // batch statistics need at least two rows
      const std::span<const std::size_t> rows(order.data() + start, count);
      const Matrix<T> x = select_rows(inputs, rows);
      const Matrix<T> y = select_rows(targets, rows);
      Gradients<T> grads = model.backward(x, y, Mode::train, &dropout_rng);
      if (!std::isfinite(static_cast<double>(grads.loss))) {
        fail(ErrorKind::numeric, "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batch_index));
      }
      adam_step<T>(optimizer, model.parameters(), grads.values);
      model.update_running_statistics(grads.statistics, config.batch_norm_momentum);
      loss_sum += static_cast<double>(grads.loss) * static_cast<double>(count);
      loss_rows += count;
    }
    EpochRecord record{epoch, loss_rows ? loss_sum / static_cast<double>(loss_rows) : 0.0,
                       evaluate(model, inputs, targets, val_rows)};
    result.history.push_back(record);
    const double score = monitor(record);
    if (!std::isfinite(score)) {
      fail(ErrorKind::numeric, "non-finite monitored loss after epoch " + std::to_string(epoch));
    }
    if (score < best) {
      best = score;
      best_model = model;
      result.best_epoch = epoch;
      since_improvement = 0;
    } else if (config.patience > 0 && ++since_improvement >= config.patience) {
      break;
    }
  }
  result.model = std::move(best_model);
  return result;
}

template FitResult<float> fit(Network<float>, const Matrix<float>&, const Matrix<float>&,
                              const FitConfig&, std::span<const std::size_t>);
template FitResult<double> fit(Network<double>, const Matrix<double>&, const Matrix<double>&,
                               const FitConfig&, std::span<const std::size_t>);

}  // namespace hypernp::nn
