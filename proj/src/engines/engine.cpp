#include "hypernp/engines/engine.hpp"

#include <cmath>

#include "hypernp/engines/isomap.hpp"
#include "hypernp/engines/pca.hpp"

namespace hypernp {

namespace {

void expect_scalar(const HyperValue& h, const char* name) {
  if (h.size() != 1) {
    fail(ErrorKind::invalid_argument, std::string(name) + " takes one value, got " + std::to_string(h.size()));
  }
}

}  // namespace

void TsneEngine::check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t) const {
  expect_scalar(h, "perplexity");
  if (!(h[0] > 0.0 && h[0] < static_cast<double>(rows) - 1.0)) {
    fail(ErrorKind::invalid_argument, "perplexity " + format_hyper(h) + " outside (0, " +
                                          std::to_string(rows == 0 ? 0 : rows - 1) + ")");
  }
}

Embedding2D TsneEngine::project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                                std::uint64_t seed) const {
  check_hyperparameter(h, data.rows(), data.cols());
  return tsne::project(data, h[0], settings_, seed, init);
}

void IsomapEngine::check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t) const {
  expect_scalar(h, "k");
  if (h[0] != std::floor(h[0]) || h[0] < 1.0 || h[0] > static_cast<double>(rows) - 1.0) {
    fail(ErrorKind::invalid_argument, "Isomap k = " + format_hyper(h) + " must be an integer in [1, " +
                                          std::to_string(rows == 0 ? 0 : rows - 1) + "]");
  }
}

Embedding2D IsomapEngine::project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>*,
                                  std::uint64_t seed) const {
  check_hyperparameter(h, data.rows(), data.cols());
  Embedding2D out = isomap::project(data, static_cast<std::size_t>(h[0]));
  out.seed = seed;
  return out;
}

std::vector<std::string> WeightedPcaEngine::hyperparameter_names(std::size_t feature_count) const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < feature_count; ++j) names.push_back("w" + std::to_string(j));
  return names;
}

void WeightedPcaEngine::check_hyperparameter(const HyperValue& h, std::size_t, std::size_t features) const {
  if (h.size() != features) {
    fail(ErrorKind::invalid_argument, "weight vector needs " + std::to_string(features) + " entries, got " +
                                          std::to_string(h.size()));
  }
  for (double w : h) {
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::invalid_argument, "weights must lie in [0, 1]");
  }
}

Embedding2D WeightedPcaEngine::project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>*,
                                       std::uint64_t seed) const {
  check_hyperparameter(h, data.rows(), data.cols());
  Embedding2D out = pca::weighted_project(data, h);
  out.seed = seed;
  return out;
}

ArchiveEngine::ArchiveEngine(ProjectionArchive archive) : archive_(std::move(archive)) {
  archive_.validate();
  if (archive_.records.empty()) fail(ErrorKind::invalid_argument, "archive has no records");
}

std::vector<std::size_t> ArchiveEngine::subset() const {
  const auto& idx = archive_.records.front().indices;
  return {idx.begin(), idx.end()};
}

std::vector<HyperValue> ArchiveEngine::hyperparameter_values() const {
  std::vector<HyperValue> out;
  for (const auto& rec : archive_.records) out.push_back(rec.hyperparameter);
  return out;
}

const ProjectionRecord* ArchiveEngine::find(const HyperValue& h) const {
  for (const auto& rec : archive_.records) {
    if (rec.hyperparameter == h) return &rec;
  }
  return nullptr;
}

void ArchiveEngine::check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t) const {
  const auto* rec = find(h);
  if (rec == nullptr) fail(ErrorKind::invalid_argument, "archive has no projection for h = " + format_hyper(h));
  if (rec->indices.size() != rows) {
    fail(ErrorKind::dimension_mismatch, "archive projection has " + std::to_string(rec->indices.size()) +
                                            " rows, data has " + std::to_string(rows));
  }
}

Embedding2D ArchiveEngine::project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>*,
                                   std::uint64_t seed) const {
  check_hyperparameter(h, data.rows(), data.cols());
  const auto* rec = find(h);
  Embedding2D out;
  out.engine = archive_.engine;
  out.hyperparameter = h;
  out.seed = seed;
  out.coords = matrix_cast<double>(rec->coords);
  return out;
}

std::unique_ptr<ProjectionEngine> make_engine(std::string_view id, const tsne::Settings& tsne_settings) {
  if (id == "tsne") return std::make_unique<TsneEngine>(tsne_settings);
  if (id == "isomap") return std::make_unique<IsomapEngine>();
  if (id == "weighted_pca") return std::make_unique<WeightedPcaEngine>();
  fail(ErrorKind::invalid_argument, "unknown engine '" + std::string(id) + "'");
}

}  // namespace hypernp
