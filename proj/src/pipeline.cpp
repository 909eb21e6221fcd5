#include "hypernp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hypernp/stability.hpp"

namespace hypernp {

std::vector<double> sample_hyperparameter_grid(double lo, double hi, double gap) {
  if (!(lo <= hi)) fail(ErrorKind::invalid_argument, "grid needs lo <= hi");
  if (!(gap > 0.0)) fail(ErrorKind::invalid_argument, "grid gap must be positive");
  const double slack = 1e-9 * std::max({1.0, std::abs(lo), std::abs(hi)});
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * gap;
    if (v > hi + slack) break;
    out.push_back(std::min(v, hi));
  }
  if (out.back() < hi - slack) out.push_back(hi);
  return out;
}

std::vector<HyperValue> sample_weight_vectors(std::size_t dims, std::size_t max_vertices, std::size_t interior,
                                              std::uint64_t seed) {
  if (dims == 0 || dims > 30) fail(ErrorKind::invalid_argument, "weight vectors need 1..30 dimensions");
  Rng rng(seed);
  std::vector<HyperValue> out{HyperValue(dims, 1.0)};
  const std::uint64_t all = (std::uint64_t{1} << dims) - 1;
  std::vector<std::uint64_t> masks;
  for (std::uint64_t m = 1; m < all; ++m) masks.push_back(m);
  if (max_vertices > 0 && masks.size() + 1 > max_vertices) {
    rng.shuffle(masks.begin(), masks.end());
    masks.resize(max_vertices > 0 ? max_vertices - 1 : 0);
    std::sort(masks.begin(), masks.end());
  }
  for (const auto m : masks) {
    HyperValue w(dims);
    for (std::size_t j = 0; j < dims; ++j) w[j] = (m >> j) & 1 ? 1.0 : 0.0;
    out.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < interior; ++i) {
    HyperValue w(dims);
    for (auto& v : w) v = rng.uniform();
    out.push_back(std::move(w));
  }
  return out;
}

HyperparameterGrid HyperparameterGrid::range(double lo, double hi, double gap) {
  HyperparameterGrid g;
  g.kind = Kind::range;
  g.lo = lo;
  g.hi = hi;
  g.gap = gap;
  return g;
}

HyperparameterGrid HyperparameterGrid::values(std::vector<double> list) {
  HyperparameterGrid g;
  g.kind = Kind::list;
  g.list = std::move(list);
  return g;
}

HyperparameterGrid HyperparameterGrid::weights(std::size_t max_vertices, std::size_t interior) {
  HyperparameterGrid g;
  g.kind = Kind::weights;
  g.max_vertices = max_vertices;
  g.interior = interior;
  return g;
}

std::vector<HyperValue> HyperparameterGrid::expand(std::size_t feature_count, std::uint64_t seed) const {
  std::vector<HyperValue> out;
  switch (kind) {
    case Kind::range:
      for (double v : sample_hyperparameter_grid(lo, hi, gap)) out.push_back({v});
      break;
    case Kind::list: {
      if (list.empty()) fail(ErrorKind::invalid_argument, "explicit grid is empty");
      auto sorted = list;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        fail(ErrorKind::invalid_argument, "explicit grid has duplicate values");
      }
      for (double v : sorted) out.push_back({v});
      break;
    }
    case Kind::weights:
      out = sample_weight_vectors(feature_count, max_vertices, interior, seed);
      break;
  }
  return out;
}

std::vector<std::size_t> sample_training_subset(const Dataset& dataset, double fraction, std::uint64_t seed,
                                                bool stratify) {
  if (!(fraction > 0.0 && fraction <= 1.0)) fail(ErrorKind::invalid_argument, "fraction must lie in (0, 1]");
  const std::size_t n = dataset.size();
  const auto total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (total == 0) {
    fail(ErrorKind::invalid_argument, "fraction " + std::to_string(fraction) + " of " + std::to_string(n) +
                                          " samples selects nothing");
  }
  Rng rng(seed);
  std::vector<std::size_t> out;
  if (!stratify || !dataset.has_labels()) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    // partial Fisher-Yates
    for (std::size_t i = 0; i < total; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(total));
  } else {
    std::map<int, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < n; ++i) classes[dataset.labels[i]].push_back(i);
    // largest remainder apportionment of `total` across classes
    struct Share {
      int label;
      std::size_t take;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, members] : classes) {
      const double exact = fraction * static_cast<double>(members.size());
      const auto base = static_cast<std::size_t>(std::floor(exact));
      shares.push_back({label, base, exact - static_cast<double>(base)});
      assigned += base;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t t = 0; assigned < total && t < order.size(); ++t, ++assigned) ++shares[order[t]].take;
    for (const auto& share : shares) {
      auto members = classes[share.label];
      const std::size_t take = std::min(share.take, members.size());
      for (std::size_t i = 0; i < take; ++i) std::swap(members[i], members[i + rng.below(members.size() - i)]);
      out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TrainingCorpus build_corpus(const Dataset& dataset, std::span<const std::size_t> subset,
                            const std::vector<HyperValue>& grid, const ProjectionEngine& engine, std::uint64_t seed) {
  if (subset.empty()) fail(ErrorKind::invalid_argument, "training subset is empty");
  if (grid.empty()) fail(ErrorKind::invalid_argument, "hyperparameter grid is empty");
  const std::size_t dims = grid.front().size();
  for (const auto& h : grid) {
    if (h.size() != dims) fail(ErrorKind::invalid_argument, "grid values differ in dimension");
  }
  for (std::size_t idx : subset) {
    if (idx >= dataset.size()) fail(ErrorKind::invalid_argument, "subset index out of range");
  }

  TrainingCorpus corpus;
  corpus.subset.assign(subset.begin(), subset.end());
  corpus.grid = grid;
  corpus.engine = engine.id();
  corpus.seed = seed;
  corpus.dataset_fingerprint = dataset.fingerprint;
  corpus.hyperparameter_names = engine.hyperparameter_names(dataset.dims());

  const Matrix<double> data = select_rows(dataset.features, subset);
  corpus.chain = seeded_chain(engine, data, grid, seed);

  auto& norm = corpus.normalization;
  const std::size_t n = data.cols(), m = data.rows();
  norm.feature_min.assign(n, std::numeric_limits<double>::infinity());
  norm.feature_max.assign(n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      norm.feature_min[j] = std::min(norm.feature_min[j], data(i, j));
      norm.feature_max[j] = std::max(norm.feature_max[j], data(i, j));
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (norm.feature_min[j] == norm.feature_max[j]) {
      corpus.warnings.push_back("feature " + std::to_string(j) + " is constant on the training subset; mapped to 0.5");
    }
  }
  norm.hyper_min.assign(dims, std::numeric_limits<double>::infinity());
  norm.hyper_max.assign(dims, -std::numeric_limits<double>::infinity());
  for (const auto& h : grid) {
    for (std::size_t j = 0; j < dims; ++j) {
      norm.hyper_min[j] = std::min(norm.hyper_min[j], h[j]);
      norm.hyper_max[j] = std::max(norm.hyper_max[j], h[j]);
    }
  }
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto& e : corpus.chain) {
    for (std::size_t i = 0; i < m; ++i) {
      min_x = std::min(min_x, e.coords(i, 0));
      max_x = std::max(max_x, e.coords(i, 0));
      min_y = std::min(min_y, e.coords(i, 1));
      max_y = std::max(max_y, e.coords(i, 1));
    }
  }
  norm.target_min_x = min_x;
  norm.target_min_y = min_y;
  const double span = std::max(max_x - min_x, max_y - min_y);
  norm.target_scale = span > 0.0 ? span : 1.0;

  const std::size_t width = n + dims;
  corpus.inputs = Matrix<float>(m * grid.size(), width);
  corpus.targets = Matrix<float>(m * grid.size(), 2);
  corpus.h_index.resize(m * grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t row = g * m + i;
      norm.normalize_row(data.row(i), grid[g], corpus.inputs.row(row));
      corpus.targets(row, 0) = static_cast<float>((corpus.chain[g].coords(i, 0) - min_x) / norm.target_scale);
      corpus.targets(row, 1) = static_cast<float>((corpus.chain[g].coords(i, 1) - min_y) / norm.target_scale);
      corpus.h_index[row] = g;
    }
  }
  return corpus;
}

ProjectionArchive corpus_archive(const TrainingCorpus& corpus) {
  ProjectionArchive archive;
  archive.dataset_fingerprint = corpus.dataset_fingerprint;
  archive.engine = corpus.engine;
  archive.hyperparameter_names = corpus.hyperparameter_names;
  archive.seed = corpus.seed;
  archive.aligned = true;
  std::vector<std::uint32_t> indices(corpus.subset.begin(), corpus.subset.end());
  for (std::size_t g = 0; g < corpus.grid.size(); ++g) {
    ProjectionRecord rec;
    rec.hyperparameter = corpus.grid[g];
    rec.indices = indices;
    rec.coords = matrix_cast<float>(corpus.chain[g].coords);
    archive.records.push_back(std::move(rec));
  }
  archive.validate();
  return archive;
}

TrainedModel train_hypernp(const TrainingCorpus& corpus, nn::NetworkSpec spec, const nn::FitConfig& config) {
  if (corpus.inputs.rows() == 0) fail(ErrorKind::invalid_argument, "training corpus is empty");
  if (spec.input_width == 0) spec.input_width = corpus.inputs.cols();
  if (spec.output_width != 2) fail(ErrorKind::invalid_argument, "projection networks have two outputs");
  if (spec.input_width != corpus.inputs.cols()) {
    fail(ErrorKind::dimension_mismatch, "network input width " + std::to_string(spec.input_width) +
                                            " does not match corpus width " + std::to_string(corpus.inputs.cols()));
  }
  nn::Network<float> network(spec, mix_seed(config.seed, 0x1417));
  auto result = nn::fit(std::move(network), corpus.inputs, corpus.targets, config, corpus.h_index);

  TrainedModel trained;
  trained.model.network = std::move(result.model);
  trained.model.normalization = corpus.normalization;
  trained.model.engine = corpus.engine;
  trained.model.hyperparameter_names = corpus.hyperparameter_names;
  trained.model.trained_values = corpus.grid;
  trained.model.dataset_fingerprint = corpus.dataset_fingerprint;
  trained.history = std::move(result.history);
  trained.best_epoch = result.best_epoch;
  return trained;
}

}  // namespace hypernp
