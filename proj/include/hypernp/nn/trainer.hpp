#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hypernp/nn/adam.hpp"
#include "hypernp/nn/network.hpp"

namespace hypernp::nn {

struct FitConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 120;
  double validation_fraction = 0.1;
  std::size_t patience = 10;  ///< 0 disables early stopping
  std::uint64_t seed = 0;
  AdamSettings adam;
  double batch_norm_momentum = 0.99;
};

struct EpochRecord {
  std::size_t epoch = 0;  ///< 0 is the evaluation before any update
  double train_loss = 0.0;
  double validation_loss = 0.0;  ///< NaN when there is no validation split
};

template <typename T>
struct FitResult {
  Network<T> model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// Mini-batch Adam on the mean-absolute-error loss with keep-best early
/// stopping on the validation loss (training loss when no split is held out).
///
/// `strata`, when non-empty, assigns each row a group; the validation split
/// then takes the same fraction from every group.
template <typename T>
FitResult<T> fit(Network<T> model, const Matrix<T>& inputs, const Matrix<T>& targets,
                 const FitConfig& config, std::span<const std::size_t> strata = {});

/// Splits row indices into (train, validation), stratified when strata is non-empty.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_validation(
    std::size_t rows, double fraction, std::uint64_t seed, std::span<const std::size_t> strata);

}  // namespace hypernp::nn
