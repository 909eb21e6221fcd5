#include "hypernp/cli/run_config.hpp"

#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "hypernp/io/archive.hpp"
#include "hypernp/io/binary.hpp"

namespace hypernp::cli {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(DatasetConfig, source, path, labels_path, label_column, delimiter, header,
                                   standardize, limit, clusters, points, dims, spread, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GridConfig, kind, lo, hi, gap, values, max_vertices, interior)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NetworkConfig, hidden, batch_norm, dropout)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainingConfig, batch_size, epochs, validation_fraction, patience, learning_rate,
                                   batch_norm_momentum)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TsneConfig, iterations, learning_rate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunConfig, dataset, engine, archive, grid, fraction, stratify, seed, network,
                                   training, tsne, output)

namespace {

// Keys in `given` must exist in `reference`, recursively.
void check_keys(const json& given, const json& reference, const std::string& prefix) {
  for (const auto& [key, value] : given.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    const auto it = reference.find(key);
    if (it == reference.end()) fail(ErrorKind::invalid_argument, "config: unknown field '" + path + "'");
    if (value.is_object() && it->is_object()) check_keys(value, *it, path);
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorKind::invalid_argument, "override '" + assignment + "' is not path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) {
      fail(ErrorKind::invalid_argument, "override: unknown field '" + path + "'");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  // Keep the declared type where the text is ambiguous ("1" for a string field).
  if (node->is_string() && !value.is_string()) value = text;
  *node = std::move(value);
}

}  // namespace

std::string RunConfig::dump() const { return json(*this).dump(2) + "\n"; }

RunConfig RunConfig::parse(const std::string& json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(ErrorKind::format, "config is not a JSON object");
  json merged = json(RunConfig{});
  check_keys(doc, merged, "");
  merged.merge_patch(doc);
  try {
    return merged.get<RunConfig>();
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  json doc = json(RunConfig{});
  if (file) {
    const json given = json::parse(binary::read_file(*file), nullptr, false);
    if (given.is_discarded() || !given.is_object()) {
      fail(ErrorKind::format, "config " + file->string() + " is not a JSON object");
    }
    check_keys(given, doc, "");
    doc.merge_patch(given);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return RunConfig::parse(doc.dump());
}

std::filesystem::path resolve_output(const std::string& output) {
  std::filesystem::path path(output);
  if (path.is_relative()) {
    if (const char* root = std::getenv(kOutputRootVariable); root && *root) path = std::filesystem::path(root) / path;
  }
  return path;
}

HyperparameterGrid RunConfig::hyperparameter_grid() const {
  if (grid.kind == "range") return HyperparameterGrid::range(grid.lo, grid.hi, grid.gap);
  if (grid.kind == "list") return HyperparameterGrid::values(grid.values);
  if (grid.kind == "weights") return HyperparameterGrid::weights(grid.max_vertices, grid.interior);
  fail(ErrorKind::invalid_argument, "grid.kind must be range, list or weights, got '" + grid.kind + "'");
}

nn::NetworkSpec RunConfig::network_spec() const {
  return nn::NetworkSpec::uniform(0, network.hidden, network.batch_norm, network.dropout);
}

nn::FitConfig RunConfig::fit_config() const {
  nn::FitConfig fit;
  fit.batch_size = training.batch_size;
  fit.epochs = training.epochs;
  fit.validation_fraction = training.validation_fraction;
  fit.patience = training.patience;
  fit.seed = seed;
  fit.adam.learning_rate = training.learning_rate;
  fit.batch_norm_momentum = training.batch_norm_momentum;
  return fit;
}

tsne::Settings RunConfig::tsne_settings() const {
  tsne::Settings s;
  s.iterations = tsne.iterations;
  s.learning_rate = tsne.learning_rate;
  return s;
}

Dataset load_dataset(const DatasetConfig& config) {
  Dataset dataset;
  if (config.source == "blobs") {
    if (config.clusters == 0 || config.points < config.clusters) {
      fail(ErrorKind::invalid_argument, "blobs need at least one point per cluster");
    }
    const std::size_t per_cluster = (config.points + config.clusters - 1) / config.clusters;
    dataset = synth_blobs(config.clusters, per_cluster, config.dims, config.spread, config.seed);
    if (dataset.size() != config.points) {
      std::vector<std::size_t> rows(config.points);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      dataset = dataset.subset(rows);
    }
  } else if (config.source == "delimited") {
    if (config.delimiter.size() != 1) fail(ErrorKind::invalid_argument, "dataset.delimiter must be one character");
    DelimitedOptions options;
    options.delimiter = config.delimiter[0];
    options.header = config.header;
    if (config.label_column >= 0) options.label_column = static_cast<std::size_t>(config.label_column);
    dataset = load_delimited(config.path, options);
  } else if (config.source == "idx") {
    dataset = load_idx_images(config.path, config.labels_path, config.limit == 0 ? SIZE_MAX : config.limit);
  } else {
    fail(ErrorKind::invalid_argument, "dataset.source must be blobs, delimited or idx, got '" + config.source + "'");
  }
  if (config.standardize) standardize(dataset);
  dataset.validate();
  return dataset;
}

std::unique_ptr<ProjectionEngine> make_config_engine(const RunConfig& config) {
  if (config.engine == "archive") {
    if (config.archive.empty()) fail(ErrorKind::invalid_argument, "engine 'archive' needs an archive path");
    return std::make_unique<ArchiveEngine>(read_archive(config.archive));
  }
  return make_engine(config.engine, config.tsne_settings());
}

}  // namespace hypernp::cli
