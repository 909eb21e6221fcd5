#include <doctest.h>

#include <Eigen/Dense>

#include "hypernp/engines/pca.hpp"
#include "support.hpp"

using namespace hypernp;

namespace {

// Top-two principal scores via SVD of the centered, weighted data.
Matrix<double> svd_oracle(const Matrix<double>& data, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto m = static_cast<Eigen::Index>(data.cols());
  Eigen::MatrixXd x(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = w[static_cast<std::size_t>(j)] * data(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  x.rowwise() -= x.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::MatrixXd scores = x * svd.matrixV().leftCols(2);
  Matrix<double> out(data.rows(), 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < 2; ++c) out(static_cast<std::size_t>(i), static_cast<std::size_t>(c)) = scores(i, c);
  return out;
}

}  // namespace

TEST_CASE("all-ones weights give standard PCA") {
  const auto x = testing::random_matrix(40, 5, 2);
  const std::vector<double> ones(5, 1.0);
  const auto w = pca::weighted_project(x, ones);
  const auto p = pca::project(x);
  CHECK(w.coords == p.coords);
  CHECK(testing::max_abs_diff(testing::sign_align_columns(p.coords, svd_oracle(x, ones)), svd_oracle(x, ones)) < 1e-8);
}

TEST_CASE("zero weight equals dropping the column") {
  const auto x = testing::random_matrix(50, 4, 3);
  for (std::size_t drop = 0; drop < 4; ++drop) {
    std::vector<double> w(4, 1.0);
    w[drop] = 0.0;
    Matrix<double> reduced(50, 3);
    for (std::size_t i = 0; i < 50; ++i)
      for (std::size_t j = 0, c = 0; j < 4; ++j)
        if (j != drop) reduced(i, c++) = x(i, j);
    const auto a = pca::weighted_project(x, w).coords;
    const auto b = pca::project(reduced).coords;
    CHECK(testing::max_abs_diff(testing::sign_align_columns(a, b), b) < 1e-8);
  }
}

TEST_CASE("weighted PCA matches an SVD oracle") {
  Rng rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto x = testing::random_matrix(50, 6, 40 + seed);
    std::vector<double> w(6);
    for (auto& v : w) v = rng.uniform();
    const auto oracle = svd_oracle(x, w);
    const auto got = pca::weighted_project(x, w).coords;
    CHECK(testing::max_abs_diff(testing::sign_align_columns(got, oracle), oracle) < 1e-8);
  }
}

TEST_CASE("sign convention makes the first loading positive") {
  const auto x = testing::random_matrix(30, 3, 5);
  auto flipped = x;
  for (auto& v : flipped.values()) v = -v;
  // Negating the data negates the scores, and the convention undoes that.
  CHECK(testing::max_abs_diff(pca::project(x).coords, pca::project(flipped).coords) > 1e-3);
  const auto a = pca::project(x).coords;
  CHECK(a == pca::project(x).coords);
}

TEST_CASE("weights are validated") {
  const auto x = testing::random_matrix(10, 3, 1);
  CHECK_THROWS_AS(pca::weighted_project(x, std::vector<double>{1.0, 2.0, 1.0}), Error);
  CHECK_THROWS_AS(pca::weighted_project(x, std::vector<double>{1.0, 1.0}), Error);
  const auto zero = pca::weighted_project(x, std::vector<double>{0.0, 0.0, 0.0});
  CHECK(zero.degenerate);
  for (const double v : zero.coords.values()) CHECK(v == 0.0);
}

TEST_CASE("explained variance ratio") {
  // Data on a line: the first axis explains everything.
  Matrix<double> x(20, 3);
  for (std::size_t i = 0; i < 20; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 1) = 2.0 * static_cast<double>(i);
    x(i, 2) = -static_cast<double>(i);
  }
  const auto e = pca::project(x);
  CHECK(e.objective == doctest::Approx(1.0));
}
