#include <doctest.h>

#include <set>

#include "hypernp/common.hpp"

using namespace hypernp;

TEST_CASE("rng streams are reproducible and in range") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    differs |= u != c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(differs);
  std::set<std::size_t> seen;
  for (int i = 0; i < 500; ++i) seen.insert(a.below(7));
  CHECK(seen.size() == 7);
  CHECK(*seen.rbegin() == 6);
}

TEST_CASE("normal draws have unit moments") {
  Rng rng(7);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("mix_seed separates streams") {
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
  CHECK(mix_seed(5, 9) == mix_seed(5, 9));
}

TEST_CASE("fingerprint is FNV-1a 64") {
  Fingerprint empty;
  CHECK(empty.value() == 0xcbf29ce484222325ULL);
  Fingerprint fp;
  fp.update("a");
  CHECK(fp.value() == 0xaf63dc4c8601ec8cULL);
  CHECK(fp.hex() == "af63dc4c8601ec8c");
}

TEST_CASE("matrix helpers") {
  Matrix<double> m(3, 2);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(i);
  const std::size_t rows[] = {2, 0};
  const auto s = select_rows(m, std::span<const std::size_t>(rows));
  CHECK(s.rows() == 2);
  CHECK(s(0, 0) == 4.0);
  CHECK(s(1, 1) == 1.0);
  const auto f = matrix_cast<float>(m);
  CHECK(f(2, 1) == 5.0f);
}

TEST_CASE("errors carry their class") {
  try {
    fail(ErrorKind::format, "bad bytes");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::format);
    CHECK(std::string(e.what()) == "bad bytes");
    CHECK(error_kind_name(e.kind()) == "format_error");
  }
  CHECK(error_kind_name(ErrorKind::io) == "io_error");
}
