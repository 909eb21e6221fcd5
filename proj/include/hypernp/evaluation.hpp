#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypernp/engines/engine.hpp"
#include "hypernp/metrics.hpp"
#include "hypernp/model.hpp"

namespace hypernp {

struct MetricRow {
  HyperValue hyperparameter;
  std::string source;  ///< "ground_truth" or "hypernp"
  double trustworthiness = 0.0;
  double continuity = 0.0;
  bool interpolated = false;  ///< h was not one of the model's training values
};

struct MetricReport {
  std::size_t neighbors = metrics::kDefaultNeighbors;
  std::string dataset;  ///< fingerprint
  std::string split;
  std::string engine;
  std::vector<MetricRow> rows;

  double mean(const std::string& source, bool trust) const;
  /// |mean(hypernp) - mean(ground_truth)|
  double gap(bool trust) const;

  /// Tab-separated, one line per h per source.
  void write_tsv(std::ostream& out) const;
  std::string summary() const;
};

/// Maps (samples, h) to a layout; lets evaluation run against anything that
/// predicts, not only a NetworkModel.
using Predictor = std::function<Matrix<double>(const Matrix<double>& data, const HyperValue& h)>;

/// For each h: ground truth from a seeded chain over the sorted h list,
/// the predictor's layout, and both metrics for both, using only `data` for
/// neighborhoods.
MetricReport evaluate_predictor(const Predictor& predict, const Matrix<double>& data, const ProjectionEngine& engine,
                                std::vector<HyperValue> h_values, std::size_t k, std::uint64_t seed,
                                const std::function<bool(const HyperValue&)>& is_trained = {});

MetricReport evaluate_model(const NetworkModel& model, const Matrix<double>& data, const ProjectionEngine& engine,
                            std::vector<HyperValue> h_values, std::size_t k = metrics::kDefaultNeighbors,
                            std::uint64_t seed = 0);

}  // namespace hypernp
