#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypernp/engines/engine.hpp"
#include "hypernp/io/archive.hpp"
#include "hypernp/io/dataset.hpp"
#include "hypernp/model.hpp"
#include "hypernp/nn/trainer.hpp"

namespace hypernp {

/// lo, lo + gap, ... up to hi; hi is appended when the lattice misses it.
std::vector<double> sample_hyperparameter_grid(double lo, double hi, double gap);

/// The all-ones vector, then other nonzero vertices of {0,1}^dims (all of
/// them when max_vertices is 0, else a seeded sample up to that total), then
/// `interior` uniform points of [0,1]^dims.
std::vector<HyperValue> sample_weight_vectors(std::size_t dims, std::size_t max_vertices, std::size_t interior,
                                              std::uint64_t seed);

struct HyperparameterGrid {
  enum class Kind { range, list, weights };
  Kind kind = Kind::range;
  double lo = 0.0, hi = 0.0, gap = 1.0;  ///< range
  std::vector<double> list;              ///< list
  std::size_t max_vertices = 0;          ///< weights
  std::size_t interior = 0;              ///< weights

  static HyperparameterGrid range(double lo, double hi, double gap);
  static HyperparameterGrid values(std::vector<double> list);
  static HyperparameterGrid weights(std::size_t max_vertices, std::size_t interior);

  std::vector<HyperValue> expand(std::size_t feature_count, std::uint64_t seed) const;
};

/// round(f * N) distinct rows, sorted. With `stratify` and labels present,
/// each label keeps its share (largest-remainder rounding).
std::vector<std::size_t> sample_training_subset(const Dataset& dataset, double fraction, std::uint64_t seed,
                                                bool stratify);

struct TrainingCorpus {
  Matrix<float> inputs;               ///< (|D'| * |H'|) x (n + |h|), block per h value
  Matrix<float> targets;              ///< same rows x 2, in [0,1]^2
  std::vector<std::size_t> h_index;   ///< grid position of each row
  Normalization normalization;
  std::vector<Embedding2D> chain;     ///< aligned raw projections, one per h
  std::vector<std::size_t> subset;    ///< D' as dataset rows
  std::vector<HyperValue> grid;
  std::vector<std::string> hyperparameter_names;
  std::string dataset_fingerprint;
  std::string engine;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

/// Seeded, mirror-aligned chain over the grid on D', then normalized and
/// stacked: one block of |D'| rows per grid value.
TrainingCorpus build_corpus(const Dataset& dataset, std::span<const std::size_t> subset,
                            const std::vector<HyperValue>& grid, const ProjectionEngine& engine, std::uint64_t seed);

/// The corpus targets (raw, aligned) as an interchange archive.
ProjectionArchive corpus_archive(const TrainingCorpus& corpus);

struct TrainedModel {
  NetworkModel model;
  std::vector<nn::EpochRecord> history;
  std::size_t best_epoch = 0;
};

/// Trains a network on the corpus; validation rows are stratified by h.
/// `spec.input_width` is filled from the corpus when zero.
TrainedModel train_hypernp(const TrainingCorpus& corpus, nn::NetworkSpec spec, const nn::FitConfig& config);

}  // namespace hypernp
