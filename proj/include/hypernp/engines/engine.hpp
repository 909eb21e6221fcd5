#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hypernp/engines/embedding.hpp"
#include "hypernp/engines/tsne.hpp"
#include "hypernp/io/archive.hpp"

namespace hypernp {

/// A ground-truth projection P(D, h).
class ProjectionEngine {
 public:
  virtual ~ProjectionEngine() = default;

  virtual std::string id() const = 0;
  virtual std::vector<std::string> hyperparameter_names(std::size_t feature_count) const = 0;
  /// True when project() uses `init` as its starting layout.
  virtual bool supports_seeding() const = 0;
  /// Throws invalid_argument when h is not a legal value for `rows` samples.
  virtual void check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t features) const = 0;
  virtual Embedding2D project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                              std::uint64_t seed) const = 0;
};

class TsneEngine final : public ProjectionEngine {
 public:
  explicit TsneEngine(tsne::Settings settings = {}) : settings_(settings) {}
  std::string id() const override { return "tsne"; }
  std::vector<std::string> hyperparameter_names(std::size_t) const override { return {"perplexity"}; }
  bool supports_seeding() const override { return true; }
  void check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t features) const override;
  Embedding2D project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                      std::uint64_t seed) const override;
  const tsne::Settings& settings() const { return settings_; }

 private:
  tsne::Settings settings_;
};

class IsomapEngine final : public ProjectionEngine {
 public:
  std::string id() const override { return "isomap"; }
  std::vector<std::string> hyperparameter_names(std::size_t) const override { return {"k"}; }
  bool supports_seeding() const override { return false; }
  void check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t features) const override;
  Embedding2D project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                      std::uint64_t seed) const override;
};

class WeightedPcaEngine final : public ProjectionEngine {
 public:
  std::string id() const override { return "weighted_pca"; }
  std::vector<std::string> hyperparameter_names(std::size_t feature_count) const override;
  bool supports_seeding() const override { return false; }
  void check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t features) const override;
  Embedding2D project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                      std::uint64_t seed) const override;
};

/// Serves projections computed elsewhere (e.g. UMAP) from an archive. The
/// data passed to project() must be the archive's subset, in archive order.
class ArchiveEngine final : public ProjectionEngine {
 public:
  explicit ArchiveEngine(ProjectionArchive archive);
  std::string id() const override { return archive_.engine; }
  std::vector<std::string> hyperparameter_names(std::size_t) const override {
    return archive_.hyperparameter_names;
  }
  bool supports_seeding() const override { return false; }
  void check_hyperparameter(const HyperValue& h, std::size_t rows, std::size_t features) const override;
  Embedding2D project(const Matrix<double>& data, const HyperValue& h, const Matrix<double>* init,
                      std::uint64_t seed) const override;
  const ProjectionArchive& archive() const { return archive_; }
  /// Subset row indices shared by every record.
  std::vector<std::size_t> subset() const;
  std::vector<HyperValue> hyperparameter_values() const;

 private:
  const ProjectionRecord* find(const HyperValue& h) const;
  ProjectionArchive archive_;
};

/// "tsne", "isomap" or "weighted_pca".
std::unique_ptr<ProjectionEngine> make_engine(std::string_view id, const tsne::Settings& tsne_settings = {});

}  // namespace hypernp
