#include "hypernp/stability.hpp"

#include <string>

namespace hypernp {

double mirror_mse(const Matrix<double>& current, const Matrix<double>& reference, int sign_x, int sign_y) {
  const std::size_t n = current.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = sign_x * current(i, 0) - reference(i, 0);
    const double dy = sign_y * current(i, 1) - reference(i, 1);
    total += dx * dx + dy * dy;
  }
  return n ? total / static_cast<double>(2 * n) : 0.0;
}

MirrorChoice align_mirror_in_place(Matrix<double>& current, const Matrix<double>& reference) {
  if (current.rows() != reference.rows() || current.cols() != 2 || reference.cols() != 2) {
    fail(ErrorKind::dimension_mismatch, "align_mirror: layouts have " + std::to_string(current.rows()) + " and " +
                                            std::to_string(reference.rows()) + " rows");
  }
  MirrorChoice best{1, 1, mirror_mse(current, reference, 1, 1)};
  for (std::size_t c = 1; c < kMirrorOrder.size(); ++c) {
    const auto [sx, sy] = kMirrorOrder[c];
    const double mse = mirror_mse(current, reference, sx, sy);
    if (mse < best.mse) best = {sx, sy, mse};
  }
  if (best.sign_x < 0 || best.sign_y < 0) {
    for (std::size_t i = 0; i < current.rows(); ++i) {
      current(i, 0) *= best.sign_x;
      current(i, 1) *= best.sign_y;
    }
  }
  return best;
}

std::pair<Embedding2D, MirrorChoice> align_mirror(const Embedding2D& current, const Embedding2D& reference) {
  Embedding2D aligned = current;
  const MirrorChoice choice = align_mirror_in_place(aligned.coords, reference.coords);
  return {std::move(aligned), choice};
}

std::vector<Embedding2D> seeded_chain(const ProjectionEngine& engine, const Matrix<double>& data,
                                      const std::vector<HyperValue>& h_values, std::uint64_t seed) {
  for (std::size_t i = 1; i < h_values.size(); ++i) {
    if (h_values[i].size() == 1 && h_values[i - 1].size() == 1 && !(h_values[i - 1][0] < h_values[i][0])) {
      fail(ErrorKind::invalid_argument, "seeded_chain: hyperparameter values must be strictly ascending");
    }
  }
  std::vector<Embedding2D> chain;
  chain.reserve(h_values.size());
  for (const auto& h : h_values) {
    const Matrix<double>* init = nullptr;
    if (!chain.empty() && engine.supports_seeding()) init = &chain.back().coords;
    Embedding2D e;
    try {
      e = engine.project(data, h, init, seed);
    } catch (const Error& err) {
      throw Error(err.kind(), "at h = " + format_hyper(h) + ": " + err.what());
    }
    check_embedding(e, data.rows());
    if (!chain.empty()) align_mirror_in_place(e.coords, chain.back().coords);
    chain.push_back(std::move(e));
  }
  return chain;
}

}  // namespace hypernp
