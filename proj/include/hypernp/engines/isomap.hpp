#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hypernp/engines/embedding.hpp"

namespace hypernp::isomap {

/// Undirected weighted graph; adjacency lists sorted by neighbor index.
struct NeighborGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency;

  std::size_t vertex_count() const { return adjacency.size(); }
  std::size_t edge_count() const;
  bool has_edge(std::size_t a, std::size_t b) const;
  void add_edge(std::size_t a, std::size_t b, double weight);
  /// Connected component id per vertex, numbered in order of first vertex.
  std::vector<std::size_t> components() const;
};

/// Each point linked to its k nearest Euclidean neighbors (ties by index),
/// symmetrized by union; weights are Euclidean distances.
NeighborGraph knn_graph(const Matrix<double>& data, std::size_t k);

/// Adds the edges of the full Euclidean minimum spanning tree that join
/// different components. Returns how many were added.
std::size_t bridge_components(NeighborGraph& graph, const Matrix<double>& data);

/// All-pairs shortest paths (Dijkstra per source). Unreachable pairs are +inf.
Matrix<double> geodesic_distances(const NeighborGraph& graph);

/// Torgerson MDS onto the top two eigenvectors of -1/2 J D^2 J. Each
/// eigenvector's first non-negligible loading is made positive.
Embedding2D classical_mds(const Matrix<double>& distances);

/// knn_graph -> bridge_components -> geodesic_distances -> classical_mds
Embedding2D project(const Matrix<double>& data, std::size_t k);

}  // namespace hypernp::isomap
