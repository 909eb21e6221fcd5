#include "hypernp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "hypernp/inference.hpp"
#include "hypernp/stability.hpp"

namespace hypernp {

double MetricReport::mean(const std::string& source, bool trust) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.source != source) continue;
    sum += trust ? r.trustworthiness : r.continuity;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : std::nan("");
}

double MetricReport::gap(bool trust) const { return std::abs(mean("hypernp", trust) - mean("ground_truth", trust)); }

void MetricReport::write_tsv(std::ostream& out) const {
  out << "h\tsource\tmetric\tvalue\tinterpolated\tK\tsplit\n";
  char buf[64];
  for (const auto& r : rows) {
    for (const bool trust : {true, false}) {
      std::snprintf(buf, sizeof buf, "%.10f", trust ? r.trustworthiness : r.continuity);
      out << format_hyper(r.hyperparameter) << '\t' << r.source << '\t'
          << (trust ? "trustworthiness" : "continuity") << '\t' << buf << '\t' << (r.interpolated ? 1 : 0) << '\t'
          << neighbors << '\t' << split << '\n';
    }
  }
}

std::string MetricReport::summary() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%-14s %10s %10s\n%-14s %10.4f %10.4f\n%-14s %10.4f %10.4f\n%-14s %10.4f %10.4f\n", "source",
                "trust", "continuity", "ground_truth", mean("ground_truth", true), mean("ground_truth", false),
                "hypernp", mean("hypernp", true), mean("hypernp", false), "|gap|", gap(true), gap(false));
  return buf;
}

MetricReport evaluate_predictor(const Predictor& predict, const Matrix<double>& data, const ProjectionEngine& engine,
                                std::vector<HyperValue> h_values, std::size_t k, std::uint64_t seed,
                                const std::function<bool(const HyperValue&)>& is_trained) {
  if (h_values.empty()) fail(ErrorKind::invalid_argument, "evaluation needs at least one h value");
  metrics::check_neighbors(data.rows(), k);
  std::sort(h_values.begin(), h_values.end());
  h_values.erase(std::unique(h_values.begin(), h_values.end()), h_values.end());

  MetricReport report;
  report.neighbors = k;
  report.engine = engine.id();
  const auto truth = seeded_chain(engine, data, h_values, seed);
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    const bool interpolated = is_trained ? !is_trained(h_values[i]) : false;
    MetricRow gt{h_values[i], "ground_truth", metrics::trustworthiness(data, truth[i].coords, k),
                 metrics::continuity(data, truth[i].coords, k), interpolated};
    const Matrix<double> layout = predict(data, h_values[i]);
    MetricRow pred{h_values[i], "hypernp", metrics::trustworthiness(data, layout, k),
                   metrics::continuity(data, layout, k), interpolated};
    report.rows.push_back(std::move(gt));
    report.rows.push_back(std::move(pred));
  }
  return report;
}

MetricReport evaluate_model(const NetworkModel& model, const Matrix<double>& data, const ProjectionEngine& engine,
                            std::vector<HyperValue> h_values, std::size_t k, std::uint64_t seed) {
  if (h_values.empty()) fail(ErrorKind::invalid_argument, "evaluation needs at least one h value");
  metrics::check_neighbors(data.rows(), k);
  for (const auto& h : h_values) check_query(model, h, false);
  const Predictor predict = [&model](const Matrix<double>& x, const HyperValue& h) {
    return matrix_cast<double>(infer(model, x, h).coords);
  };
  MetricReport report = evaluate_predictor(predict, data, engine, std::move(h_values), k, seed,
                                           [&model](const HyperValue& h) { return model.is_trained_value(h); });
  report.dataset = model.dataset_fingerprint;
  return report;
}

}  // namespace hypernp
