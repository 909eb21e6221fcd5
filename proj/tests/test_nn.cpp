#include <doctest.h>

#include <cmath>

#include "hypernp/nn/adam.hpp"
#include "hypernp/nn/network.hpp"
#include "hypernp/nn/trainer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hypernp;
using namespace hypernp::nn;

using testing::gradient_check;

TEST_CASE("tuned architecture") {
  const auto spec = NetworkSpec::tuned(11);
  CHECK(spec.layer_widths() == std::vector<std::size_t>{11, 320, 256, 352, 2});
  CHECK(spec.batch_norm == std::vector<bool>{true, true, true});
  CHECK(spec.dropout == std::vector<double>{0.25, 0.25, 0.25});
  auto bad = spec;
  bad.output_width = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = spec;
  bad.dropout.pop_back();
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero network outputs zeros") {
  const auto net = Network<float>::zeros(NetworkSpec::tuned(5));
  const auto x = matrix_cast<float>(testing::random_matrix(9, 5, 1, 10.0));
  const auto y = net.infer(x);
  REQUIRE(y.rows() == 9);
  for (const float v : y.values()) CHECK(v == 0.0f);
}

TEST_CASE("hand-set toy network matches a hand computation") {
  auto net = Network<double>::zeros(NetworkSpec::uniform(2, {2}, false, 0.0));
  // hidden = relu(x W1 + b1), out = hidden W2 + b2
  const double w1[] = {1.0, -2.0, 0.5, 1.0};
  const double b1[] = {0.1, -0.3};
  const double w2[] = {2.0, 0.0, -1.0, 3.0};
  const double b2[] = {0.25, -0.5};
  std::copy(std::begin(w1), std::end(w1), net.weights(0).begin());
  std::copy(std::begin(b1), std::end(b1), net.bias(0).begin());
  std::copy(std::begin(w2), std::end(w2), net.weights(1).begin());
  std::copy(std::begin(b2), std::end(b2), net.bias(1).begin());

  Matrix<double> x(2, 2);
  x(0, 0) = 1.0, x(0, 1) = 2.0;
  x(1, 0) = -1.0, x(1, 1) = 0.5;
  const auto y = net.infer(x);
  // row 0: pre = (1 + 1 + 0.1, -2 + 2 - 0.3) = (2.1, -0.3) -> (2.1, 0)
  CHECK(y(0, 0) == doctest::Approx(2.1 * 2.0 + 0.25));
  CHECK(y(0, 1) == doctest::Approx(-0.5));
  // row 1: pre = (-1 + 0.25 + 0.1, 2 + 0.5 - 0.3) = (-0.65, 2.2) -> (0, 2.2)
  CHECK(y(1, 0) == doctest::Approx(-2.2 + 0.25));
  CHECK(y(1, 1) == doctest::Approx(6.6 - 0.5));
}

TEST_CASE("inference is deterministic and batch invariant") {
  const Network<float> net(NetworkSpec::tuned(11), 3);
  const auto x = matrix_cast<float>(testing::random_matrix(103, 11, 2));
  const auto full = net.infer(x);
  CHECK(full == net.infer(x));
  // Split into uneven pieces; every row must come out bit-identical.
  std::size_t start = 0;
  for (const std::size_t len : {1, 6, 33, 63}) {
    std::vector<std::size_t> rows(len);
    for (std::size_t i = 0; i < len; ++i) rows[i] = start + i;
    const auto part = net.infer(select_rows(x, std::span<const std::size_t>(rows)));
    for (std::size_t i = 0; i < len; ++i) {
      CHECK(part(i, 0) == full(start + i, 0));
      CHECK(part(i, 1) == full(start + i, 1));
    }
    start += len;
  }
}

TEST_CASE("identity batch norm passes values through") {
  auto plain = Network<double>(NetworkSpec::uniform(3, {4}, false, 0.0), 9);
  auto normed = Network<double>(NetworkSpec::uniform(3, {4}, true, 0.0), 9);
  std::copy(plain.weights(0).begin(), plain.weights(0).end(), normed.weights(0).begin());
  std::copy(plain.weights(1).begin(), plain.weights(1).end(), normed.weights(1).begin());
  const auto x = testing::random_matrix(5, 3, 4);
  CHECK(plain.infer(x) == normed.infer(x));
}

TEST_CASE("loss at an exact fit is zero with zero output bias gradient") {
  const Network<double> net(NetworkSpec::uniform(3, {5}, true, 0.0), 5);
  const auto x = testing::random_matrix(8, 3, 6);
  const auto y = net.forward(x, Mode::train);
  const auto g = net.backward(x, y, Mode::train);
  CHECK(g.loss == 0.0);
  auto copy = net;
  const auto out_bias = copy.bias(1);
  const auto offset = static_cast<std::size_t>(out_bias.data() - copy.parameters().data());
  CHECK(g.values[offset] == 0.0);
  CHECK(g.values[offset + 1] == 0.0);
}

TEST_CASE("mean absolute error averages every entry") {
  Matrix<double> p(2, 2), t(2, 2);
  p(0, 0) = 1, p(0, 1) = 2, p(1, 0) = -1, p(1, 1) = 0;
  t(0, 0) = 0, t(0, 1) = 0, t(1, 0) = 1, t(1, 1) = 1;
  CHECK(mean_absolute_error(p, t) == doctest::Approx((1.0 + 2.0 + 2.0 + 1.0) / 4.0));
}

TEST_CASE("single linear neuron gradient has the sign of the error") {
  auto spec = NetworkSpec::uniform(1, {}, false, 0.0);
  spec.output_width = 1;
  auto net = Network<double>::zeros(spec);
  net.weights(0)[0] = 2.0;
  Matrix<double> x(1, 1, 1.5), y(1, 1, 1.0);  // prediction 3.0 > target 1.0
  const auto g = net.backward(x, y, Mode::train);
  CHECK(g.loss == doctest::Approx(2.0));
  CHECK(g.values[0] == doctest::Approx(1.5));
  CHECK(g.values[1] == doctest::Approx(1.0));  // bias
}

TEST_CASE("toy network gradients match central differences") {
  // 2 -> 3 -> 2 without batch norm: 9 + 8 = 17 parameters.
  const Network<double> net(NetworkSpec::uniform(2, {3}, false, 0.0), 11);
  const auto x = testing::random_matrix(6, 2, 12);
  const auto y = testing::random_matrix(6, 2, 13);
  CHECK(net.parameters().size() <= 20);
  CHECK(gradient_check(net, x, y) < 1e-4);
}

TEST_CASE("batch-normalized network gradients match central differences") {
  const Network<double> net(NetworkSpec::uniform(3, {6, 5}, true, 0.0), 21);
  const auto x = testing::random_matrix(10, 3, 22);
  const auto y = testing::random_matrix(10, 2, 23);
  CHECK(gradient_check(net, x, y) < 1e-4);
}

TEST_CASE("backward refuses infer mode") {
  const Network<double> net(NetworkSpec::uniform(2, {3}, false, 0.0), 1);
  const auto x = testing::random_matrix(4, 2, 2);
  CHECK_THROWS_AS(net.backward(x, x, Mode::infer), Error);
}

TEST_CASE("running statistics update") {
  Network<double> net(NetworkSpec::uniform(2, {3}, true, 0.0), 1);
  BatchStatistics<double> stats;
  stats.mean = {{1.0, 2.0, 3.0}};
  stats.variance = {{4.0, 4.0, 4.0}};
  net.update_running_statistics(stats, 0.99);
  CHECK(net.running_mean(0)[1] == doctest::Approx(0.02));
  CHECK(net.running_variance(0)[0] == doctest::Approx(0.99 + 0.04));
}

TEST_CASE("adam first step moves by the learning rate") {
  OptimizerState<double> state(1);
  std::vector<double> p{0.0};
  const std::vector<double> g{1.0};
  adam_step(state, std::span<double>(p), std::span<const double>(g));
  CHECK(p[0] == doctest::Approx(-0.001).epsilon(1e-6));
  const double after_one = p[0];
  adam_step(state, std::span<double>(p), std::span<const double>(g));
  CHECK(p[0] < after_one);
}

TEST_CASE("adam with zero gradients leaves parameters alone") {
  OptimizerState<double> state(3);
  std::vector<double> p{1.0, -2.0, 3.0};
  const std::vector<double> g(3, 0.0);
  for (int i = 0; i < 10; ++i) adam_step(state, std::span<double>(p), std::span<const double>(g));
  CHECK(p == std::vector<double>{1.0, -2.0, 3.0});
  const std::vector<double> short_g(2, 0.0);
  CHECK_THROWS_AS(adam_step(state, std::span<double>(p), std::span<const double>(short_g)), Error);
}

TEST_CASE("fit learns a linear map") {
  // 200 samples of R^3 -> R^2.
  const auto x = testing::random_matrix(200, 3, 31);
  Matrix<double> y(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    y(i, 0) = 0.5 * x(i, 0) - 1.0 * x(i, 1) + 0.2 * x(i, 2) + 0.3;
    y(i, 1) = -0.4 * x(i, 0) + 0.1 * x(i, 1) + 0.9 * x(i, 2) - 0.1;
  }
  double mean = 0.0;
  for (const double v : y.values()) mean += v;
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (const double v : y.values()) var += (v - mean) * (v - mean);
  const double stddev = std::sqrt(var / static_cast<double>(y.size()));

  FitConfig config;
  config.epochs = 200;
  config.validation_fraction = 0.0;
  config.patience = 0;
  config.seed = 4;
  const auto xf = matrix_cast<float>(x);
  const auto yf = matrix_cast<float>(y);
  const auto result = fit(Network<float>(NetworkSpec::uniform(3, {16}, false, 0.0), 3), xf, yf, config);
  const auto pred = result.model.infer(xf);
  double abs_error = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) abs_error += std::abs(pred.data()[i] - yf.data()[i]);
  abs_error /= static_cast<double>(pred.size());
  CHECK(abs_error < 0.05 * stddev);
}

TEST_CASE("fit with zero epochs only evaluates") {
  const auto x = matrix_cast<float>(testing::random_matrix(20, 3, 1));
  const auto y = matrix_cast<float>(testing::random_matrix(20, 2, 2));
  const Network<float> init(NetworkSpec::uniform(3, {4}, true, 0.25), 8);
  FitConfig config;
  config.epochs = 0;
  const auto result = fit(init, x, y, config);
  CHECK(result.history.size() == 1);
  CHECK(result.history[0].epoch == 0);
  CHECK(result.model == init);
}

TEST_CASE("fit is reproducible for a seed") {
  const auto x = matrix_cast<float>(testing::random_matrix(64, 3, 1));
  const auto y = matrix_cast<float>(testing::random_matrix(64, 2, 2));
  FitConfig config;
  config.epochs = 8;
  config.seed = 17;
  const Network<float> init(NetworkSpec::uniform(3, {8, 8}, true, 0.25), 8);
  const auto a = fit(init, x, y, config);
  const auto b = fit(init, x, y, config);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].validation_loss == b.history[i].validation_loss);
  }
  CHECK(a.model == b.model);
  config.seed = 18;
  const auto c = fit(init, x, y, config);
  CHECK_FALSE(c.model == a.model);
}

TEST_CASE("stratified validation split takes from every group") {
  std::vector<std::size_t> strata;
  for (std::size_t g = 0; g < 4; ++g) {
    for (int i = 0; i < 50; ++i) strata.push_back(g);
  }
  const auto [train, validation] = split_validation(strata.size(), 0.1, 3, strata);
  CHECK(train.size() + validation.size() == 200);
  std::vector<int> per_group(4, 0);
  for (const auto r : validation) ++per_group[strata[r]];
  for (const int c : per_group) CHECK(c == 5);
}
