#include "hypernp/engines/isomap.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace hypernp::isomap {

std::size_t NeighborGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

bool NeighborGraph::has_edge(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency.at(a);
  const auto it = std::lower_bound(adj.begin(), adj.end(), b,
                                   [](const auto& e, std::size_t v) { return e.first < v; });
  return it != adj.end() && it->first == b;
}

void NeighborGraph::add_edge(std::size_t a, std::size_t b, double weight) {
  if (a == b || has_edge(a, b)) return;
  const auto insert = [&](std::size_t from, std::size_t to) {
    auto& adj = adjacency[from];
    const auto it = std::lower_bound(adj.begin(), adj.end(), to,
                                     [](const auto& e, std::size_t v) { return e.first < v; });
    adj.insert(it, {to, weight});
  };
  insert(a, b);
  insert(b, a);
}

std::vector<std::size_t> NeighborGraph::components() const {
  const std::size_t n = vertex_count();
  constexpr auto unset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(n, unset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (const auto& [u, w] : adjacency[v]) {
        if (label[u] == unset) {
          label[u] = next;
          stack.push_back(u);
        }
      }
    }
    ++next;
  }
  return label;
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

NeighborGraph knn_graph(const Matrix<double>& data, std::size_t k) {
  const std::size_t n = data.rows();
  if (k < 1 || k + 1 > n) {
    fail(ErrorKind::invalid_argument,
         "k = " + std::to_string(k) + " outside [1, " + std::to_string(n == 0 ? 0 : n - 1) + "]");
  }
  NeighborGraph graph;
  graph.adjacency.resize(n);
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.emplace_back(euclidean(data.row(i), data.row(j)), j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    for (std::size_t t = 0; t < k; ++t) graph.add_edge(i, order[t].second, order[t].first);
  }
  return graph;
}

std::size_t bridge_components(NeighborGraph& graph, const Matrix<double>& data) {
  const std::size_t n = graph.vertex_count();
  const auto label = graph.components();
  if (n == 0 || *std::max_element(label.begin(), label.end()) == 0) return 0;

  // Prim on the complete Euclidean graph, O(N^2).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, inf);
  std::vector<std::size_t> parent(n, 0);
  std::vector<bool> in_tree(n, false);
  best[0] = 0.0;
  std::size_t added = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t v = n;
    for (std::size_t u = 0; u < n; ++u) {
      if (!in_tree[u] && (v == n || best[u] < best[v])) v = u;
    }
    in_tree[v] = true;
    if (step > 0 && label[v] != label[parent[v]]) {
      graph.add_edge(v, parent[v], best[v]);
      ++added;
    }
    for (std::size_t u = 0; u < n; ++u) {
      if (in_tree[u]) continue;
      const double d = euclidean(data.row(v), data.row(u));
      if (d < best[u]) {
        best[u] = d;
        parent[u] = v;
      }
    }
  }
  return added;
}

Matrix<double> geodesic_distances(const NeighborGraph& graph) {
  const std::size_t n = graph.vertex_count();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix<double> dist(n, n, inf);
  using Item = std::pair<double, std::size_t>;
  std::vector<double> d(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(d.begin(), d.end(), inf);
    d[s] = 0.0;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [dv, v] = heap.top();
      heap.pop();
      if (dv > d[v]) continue;
      for (const auto& [u, w] : graph.adjacency[v]) {
        const double cand = dv + w;
        if (cand < d[u]) {
          d[u] = cand;
          heap.emplace(cand, u);
        }
      }
    }
    // Row s fills the upper triangle; the lower mirrors it so the result is
    // exactly symmetric.
    for (std::size_t t = s; t < n; ++t) dist(s, t) = dist(t, s) = d[t];
  }
  return dist;
}

namespace {

// Flip so the first loading above `threshold` in magnitude is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double threshold = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > threshold) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

Embedding2D classical_mds(const Matrix<double>& distances) {
  const std::size_t n = distances.rows();
  if (n < 2 || distances.cols() != n) {
    fail(ErrorKind::invalid_argument, "MDS needs a square distance matrix with at least 2 points");
  }
  double scale = 0.0;
  for (double v : distances.values()) {
    if (!std::isfinite(v)) fail(ErrorKind::invalid_argument, "MDS distance matrix has non-finite entries");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (distances(i, i) != 0.0) fail(ErrorKind::invalid_argument, "MDS distance matrix has nonzero diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(distances(i, j) - distances(j, i)) > 1e-9 * std::max(scale, 1.0)) {
        fail(ErrorKind::invalid_argument, "MDS distance matrix is not symmetric");
      }
    }
  }

  Eigen::MatrixXd b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = 0.5 * (distances(i, j) + distances(j, i));
      b(i, j) = d * d;
    }
  }
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const double grand = row_mean.mean();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) b(i, j) = -0.5 * (b(i, j) - row_mean[i] - row_mean[j] + grand);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) fail(ErrorKind::numeric, "MDS eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const double top = values[n - 1];
  const double cutoff = 1e-9 * std::max(std::abs(top), 1e-300);

  Embedding2D out;
  out.engine = "mds";
  out.coords = Matrix<double>(n, 2);
  int positive = 0;
  for (int c = 0; c < 2; ++c) {
    const Eigen::Index idx = static_cast<Eigen::Index>(n) - 1 - c;
    if (idx < 0 || values[idx] <= cutoff) continue;
    ++positive;
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    fix_sign(v);
    const double root = std::sqrt(values[idx]);
    for (std::size_t i = 0; i < n; ++i) out.coords(i, static_cast<std::size_t>(c)) = v[static_cast<Eigen::Index>(i)] * root;
  }
  double total = 0.0, kept = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > cutoff) total += values[i];
  }
  for (int c = 0; c < positive; ++c) kept += values[static_cast<Eigen::Index>(n) - 1 - c];
  out.objective = total > 0.0 ? 1.0 - kept / total : 0.0;
  if (positive < 2) {
    out.degenerate = true;
    out.warning = positive == 1 ? "only one positive eigenvalue; second axis is zero"
                                : "no positive eigenvalues; embedding collapsed to the origin";
  }
  return out;
}

Embedding2D project(const Matrix<double>& data, std::size_t k) {
  NeighborGraph graph = knn_graph(data, k);
  const std::size_t bridges = bridge_components(graph, data);
  Embedding2D out = classical_mds(geodesic_distances(graph));
  out.engine = "isomap";
  out.hyperparameter = {static_cast<double>(k)};
  if (bridges > 0) {
    const std::string note = "kNN graph disconnected; joined with " + std::to_string(bridges) + " MST edges";
    out.warning = out.warning.empty() ? note : out.warning + "; " + note;
  }
  return out;
}

}  // namespace hypernp::isomap
