#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hypernp/engines/engine.hpp"
#include "hypernp/io/dataset.hpp"
#include "hypernp/nn/network.hpp"
#include "hypernp/nn/trainer.hpp"
#include "hypernp/pipeline.hpp"

namespace hypernp::cli {

inline constexpr const char* kOutputRootVariable = "HYPERNP_OUTPUT_ROOT";

struct DatasetConfig {
  std::string source = "blobs";  ///< blobs | delimited | idx
  std::string path;
  std::string labels_path;  ///< idx only
  int label_column = -1;    ///< delimited; -1 for none
  std::string delimiter = ",";
  bool header = false;
  bool standardize = false;
  std::size_t limit = 0;  ///< idx record cap, 0 for all
  std::size_t clusters = 3;
  std::size_t points = 2000;
  std::size_t dims = 10;
  double spread = 1.0;
  std::uint64_t seed = 0;  ///< blobs only
};

struct GridConfig {
  std::string kind = "range";  ///< range | list | weights
  double lo = 5.0, hi = 45.0, gap = 10.0;
  std::vector<double> values;
  std::size_t max_vertices = 0;
  std::size_t interior = 0;
};

struct NetworkConfig {
  std::vector<std::size_t> hidden{320, 256, 352};
  bool batch_norm = true;
  double dropout = 0.25;
};

struct TrainingConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 120;
  double validation_fraction = 0.1;
  std::size_t patience = 10;
  double learning_rate = 1e-3;
  double batch_norm_momentum = 0.99;
};

struct TsneConfig {
  int iterations = 1000;
  double learning_rate = 0.0;
};

/// One training run, readable from a JSON file. Every field can be
/// overridden on the command line as `--set section.field=value`.
struct RunConfig {
  DatasetConfig dataset;
  std::string engine = "tsne";  ///< tsne | isomap | weighted_pca | archive
  std::string archive;          ///< precomputed projections when engine is archive
  GridConfig grid;
  double fraction = 0.2;
  bool stratify = true;
  std::uint64_t seed = 0;
  NetworkConfig network;
  TrainingConfig training;
  TsneConfig tsne;
  std::string output = "run";

  /// Canonical JSON (sorted keys, fixed formatting).
  std::string dump() const;
  static RunConfig parse(const std::string& json_text);

  HyperparameterGrid hyperparameter_grid() const;
  nn::NetworkSpec network_spec() const;  ///< input width left at 0
  nn::FitConfig fit_config() const;
  tsne::Settings tsne_settings() const;
};

/// Defaults, then the file (if any), then each `path=value` override.
/// Values parse as JSON when they can, otherwise as strings.
RunConfig load_run_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

/// `output` resolved against $HYPERNP_OUTPUT_ROOT when relative and set.
std::filesystem::path resolve_output(const std::string& output);

Dataset load_dataset(const DatasetConfig& config);

/// Engine for the config; the archive engine reads its file.
std::unique_ptr<ProjectionEngine> make_config_engine(const RunConfig& config);

}  // namespace hypernp::cli
