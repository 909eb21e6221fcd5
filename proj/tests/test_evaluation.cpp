#include <doctest.h>

#include <sstream>

#include "hypernp/engines/isomap.hpp"
#include "hypernp/evaluation.hpp"
#include "hypernp/stability.hpp"
#include "support.hpp"

using namespace hypernp;

TEST_CASE("a predictor that reproduces ground truth scores identically") {
  const auto x = testing::random_matrix(60, 4, 3);
  const IsomapEngine engine;
  const std::vector<HyperValue> h{{4.0}, {6.0}, {8.0}};
  const auto truth = seeded_chain(engine, x, h, 0);
  const Predictor memorized = [&](const Matrix<double>&, const HyperValue& v) {
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] == v) return truth[i].coords;
    FAIL("unexpected h");
    return Matrix<double>();
  };
  const auto report = evaluate_predictor(memorized, x, engine, h, 7, 0);
  REQUIRE(report.rows.size() == 6);
  for (std::size_t i = 0; i < 6; i += 2) {
    CHECK(report.rows[i].source == "ground_truth");
    CHECK(report.rows[i + 1].source == "hypernp");
    CHECK(report.rows[i].trustworthiness == report.rows[i + 1].trustworthiness);
    CHECK(report.rows[i].continuity == report.rows[i + 1].continuity);
  }
  CHECK(report.gap(true) == 0.0);
  CHECK(report.gap(false) == 0.0);
}

TEST_CASE("untrained values are flagged") {
  const auto x = testing::random_matrix(40, 3, 4);
  const IsomapEngine engine;
  const Predictor pred = [&](const Matrix<double>& d, const HyperValue&) { return isomap::project(d, 5).coords; };
  const auto report = evaluate_predictor(pred, x, engine, {{5.0}, {6.0}}, 5, 0,
                                         [](const HyperValue& v) { return v[0] == 5.0; });
  CHECK_FALSE(report.rows[0].interpolated);
  CHECK(report.rows[2].interpolated);
  std::ostringstream tsv;
  report.write_tsv(tsv);
  CHECK(tsv.str().find("interpolated") != std::string::npos);
  CHECK(tsv.str().find("6\thypernp\tcontinuity") != std::string::npos);
}

TEST_CASE("empty h lists and bad K are rejected") {
  const auto x = testing::random_matrix(20, 3, 4);
  const IsomapEngine engine;
  const Predictor pred = [](const Matrix<double>& d, const HyperValue&) { return Matrix<double>(d.rows(), 2); };
  CHECK_THROWS_AS(evaluate_predictor(pred, x, engine, {}, 3, 0), Error);
  CHECK_THROWS_AS(evaluate_predictor(pred, x, engine, {{4.0}}, 10, 0), Error);
}
