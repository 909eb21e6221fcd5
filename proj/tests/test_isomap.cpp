#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hypernp/engines/isomap.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hypernp;
using isomap::NeighborGraph;
using testing::euclidean;
using testing::floyd_warshall;
using testing::procrustes_rmsd;

namespace {

// Edge set from sorting all pairs per point, ties by index, then union.
std::vector<std::pair<std::size_t, std::size_t>> knn_oracle(const Matrix<double>& x, std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
      order.emplace_back(s, j);
    }
    std::sort(order.begin(), order.end());
    for (std::size_t m = 0; m < k; ++m) edges.emplace_back(std::min(i, order[m].second), std::max(i, order[m].second));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_list(const NeighborGraph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < g.vertex_count(); ++i)
    for (const auto& [j, w] : g.adjacency[i])
      if (i < j) edges.emplace_back(i, j);
  return edges;
}

}  // namespace

TEST_CASE("collinear points with k = 1 form a path") {
  Matrix<double> x(4, 1);
  for (std::size_t i = 0; i < 4; ++i) x(i, 0) = static_cast<double>(i);
  const auto g = isomap::knn_graph(x, 1);
  CHECK(g.edge_count() == 3);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 3));
  CHECK(g.adjacency[0].size() == 1);
  CHECK(g.adjacency[3].size() == 1);
}

TEST_CASE("knn graph equals the brute-force oracle") {
  const auto x = testing::random_matrix(30, 3, 7);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(edge_list(isomap::knn_graph(x, k)) == knn_oracle(x, k));
}

TEST_CASE("knn ties break by index") {
  // Points 1 and 2 are equally far from 0; 2 and 3 pair up.
  Matrix<double> x(4, 1);
  x(0, 0) = 0.0, x(1, 0) = -1.0, x(2, 0) = 1.0, x(3, 0) = 1.2;
  const auto g = isomap::knn_graph(x, 1);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(edge_list(g) == knn_oracle(x, 1));
}

TEST_CASE("k = N - 1 gives the complete graph") {
  const auto x = testing::random_matrix(9, 2, 1);
  CHECK(isomap::knn_graph(x, 8).edge_count() == 36);
  CHECK_THROWS_AS(isomap::knn_graph(x, 9), Error);
  CHECK_THROWS_AS(isomap::knn_graph(x, 0), Error);
}

TEST_CASE("path graph distances") {
  NeighborGraph g;
  g.adjacency.resize(6);
  for (std::size_t i = 0; i + 1 < 6; ++i) g.add_edge(i, i + 1, 1.0);
  const auto d = isomap::geodesic_distances(g);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(d(i, j) == std::abs(static_cast<double>(i) - static_cast<double>(j)));
}

TEST_CASE("triangle shortcut") {
  NeighborGraph g;
  g.adjacency.resize(3);
  g.add_edge(0, 1, 3.0);
  g.add_edge(1, 2, 4.0);
  g.add_edge(0, 2, 5.0);
  const auto d = isomap::geodesic_distances(g);
  CHECK(d(0, 2) == 5.0);
  CHECK(d(2, 0) == 5.0);
}

TEST_CASE("geodesics equal Floyd-Warshall on random graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    NeighborGraph g;
    g.adjacency.resize(25);
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t j = i + 1; j < 25; ++j)
        if (rng.uniform() < 0.15) g.add_edge(i, j, static_cast<double>(1 + rng.below(20)));
    CHECK(isomap::geodesic_distances(g) == floyd_warshall(g));
  }
}

TEST_CASE("components and bridging") {
  Matrix<double> x(7, 1);
  const double pos[] = {0.0, 0.1, 0.2, 10.0, 10.1, 30.0, 30.1};
  for (std::size_t i = 0; i < 7; ++i) x(i, 0) = pos[i];
  auto g = isomap::knn_graph(x, 1);
  const auto before = g.components();
  CHECK(before[0] == before[2]);
  CHECK(before[0] != before[3]);
  CHECK(before[3] != before[5]);
  CHECK(isomap::bridge_components(g, x) == 2);
  // MST bridges: 0.2 - 10.0 and 10.1 - 30.0
  CHECK(g.has_edge(2, 3));
  CHECK(g.has_edge(4, 5));
  for (const auto c : g.components()) CHECK(c == 0);
}

TEST_CASE("classical MDS recovers planar configurations") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = testing::random_matrix(10, 2, 100 + seed, 3.0);
    const auto e = isomap::classical_mds(euclidean(x));
    CHECK(procrustes_rmsd(e.coords, x) <= 1e-6);
  }
}

TEST_CASE("MDS of collinear points has a flat second axis") {
  Matrix<double> x(3, 1);
  for (std::size_t i = 0; i < 3; ++i) x(i, 0) = static_cast<double>(i);
  const auto e = isomap::classical_mds(euclidean(x));
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(e.coords(i, 1)) < 1e-9);
  CHECK(e.degenerate);
}

TEST_CASE("MDS of a single pair") {
  Matrix<double> d(2, 2);
  d(0, 1) = d(1, 0) = 2.0;
  const auto e = isomap::classical_mds(d);
  CHECK(std::abs(e.coords(0, 0)) == doctest::Approx(1.0));
  CHECK(e.coords(1, 0) == doctest::Approx(-e.coords(0, 0)));
}

TEST_CASE("MDS rejects malformed distance matrices") {
  Matrix<double> d(3, 3);
  d(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS(isomap::classical_mds(d), Error);
  CHECK_THROWS_AS(isomap::classical_mds(Matrix<double>(2, 3)), Error);
}

TEST_CASE("isomap unrolls a spiral strip") {
  const std::size_t n = 400;
  Rng rng(11);
  Matrix<double> x(n, 3);
  std::vector<double> arc(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 1.5 * M_PI * (1.0 + 2.0 * rng.uniform());
    x(i, 0) = t * std::cos(t);
    x(i, 1) = t * std::sin(t);
    x(i, 2) = 5.0 * rng.uniform();
    // arc length of r = t from 0: (t sqrt(1+t^2) + asinh t) / 2
    arc[i] = 0.5 * (t * std::sqrt(1 + t * t) + std::asinh(t));
  }
  const auto e = isomap::project(x, 8);
  double ma = 0, mx = 0;
  for (std::size_t i = 0; i < n; ++i) ma += arc[i], mx += e.coords(i, 0);
  ma /= n, mx /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (arc[i] - ma) * (e.coords(i, 0) - mx);
    saa += (arc[i] - ma) * (arc[i] - ma);
    sbb += (e.coords(i, 0) - mx) * (e.coords(i, 0) - mx);
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) > 0.95);
}

TEST_CASE("isomap on convex planar data with a complete graph is MDS") {
  const auto x = testing::random_matrix(25, 2, 4);
  const auto iso = isomap::project(x, 24);
  const auto mds = isomap::classical_mds(euclidean(x));
  CHECK(testing::max_abs_diff(iso.coords, mds.coords) < 1e-9);
  CHECK(iso.coords == isomap::project(x, 24).coords);
}

TEST_CASE("isomap warns when it bridges components") {
  Matrix<double> x(8, 1);
  for (std::size_t i = 0; i < 8; ++i) x(i, 0) = (i < 4 ? 0.0 : 100.0) + static_cast<double>(i % 4);
  const auto e = isomap::project(x, 1);
  CHECK_FALSE(e.warning.empty());
  check_embedding(e, 8);
}
