#include <doctest.h>

#include <fstream>
#include <set>

#include "hypernp/io/archive.hpp"
#include "hypernp/io/binary.hpp"
#include "hypernp/io/dataset.hpp"
#include "hypernp/model.hpp"
#include "support.hpp"

using namespace hypernp;

namespace {

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

void put_be32(std::string& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// IDX image and label files in the MNIST layout.
void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels, std::size_t count,
               bool blank_first) {
  std::string img, lab;
  put_be32(img, 0x803);
  put_be32(img, static_cast<std::uint32_t>(count));
  put_be32(img, 28);
  put_be32(img, 28);
  put_be32(lab, 0x801);
  put_be32(lab, static_cast<std::uint32_t>(count));
  Rng rng(1);
  for (std::size_t i = 0; i < count; ++i) {
    for (int p = 0; p < 784; ++p) img.push_back(static_cast<char>(blank_first && i == 0 ? 0 : rng.below(256)));
    lab.push_back(static_cast<char>(i % 10));
  }
  write(images, img);
  write(labels, lab);
}

ProjectionArchive sample_archive() {
  ProjectionArchive a;
  a.dataset_fingerprint = "abc123";
  a.engine = "tsne";
  a.hyperparameter_names = {"perplexity"};
  a.seed = 9;
  a.aligned = true;
  for (const double h : {5.0, 15.0}) {
    ProjectionRecord r;
    r.hyperparameter = {h};
    r.indices = {0, 3, 4};
    r.coords = Matrix<float>(3, 2);
    for (std::size_t i = 0; i < 6; ++i) r.coords.data()[i] = static_cast<float>(h * 0.1 + i);
    a.records.push_back(r);
  }
  return a;
}

}  // namespace

TEST_CASE("delimited numbers") {
  testing::TempDir dir("io-csv");
  write(dir / "a.csv", "1,2\n3,4\n5,6\n");
  const auto ds = load_delimited(dir / "a.csv");
  REQUIRE(ds.size() == 3);
  REQUIRE(ds.dims() == 2);
  CHECK(ds.features(2, 1) == 6.0);
  CHECK_FALSE(ds.has_labels());
  CHECK(ds.fingerprint.size() == 16);
}

TEST_CASE("label column is split off") {
  testing::TempDir dir("io-label");
  write(dir / "a.tsv", "x\ty\tclass\n0.5\t1\t2\n1.5\t2\t7\n");
  DelimitedOptions o;
  o.delimiter = '\t';
  o.header = true;
  o.label_column = 2;
  const auto ds = load_delimited(dir / "a.tsv", o);
  CHECK(ds.dims() == 2);
  CHECK(ds.labels == std::vector<int>{2, 7});
  CHECK(ds.feature_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("non-finite cells are rejected with their position") {
  testing::TempDir dir("io-nan");
  write(dir / "a.csv", "1,2\n3,NaN\n");
  try {
    load_delimited(dir / "a.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  write(dir / "b.csv", "1,2\n3\n");
  CHECK_THROWS_AS(load_delimited(dir / "b.csv"), Error);
  CHECK_THROWS_AS(load_delimited(dir / "missing.csv"), Error);
}

TEST_CASE("idx images") {
  testing::TempDir dir("io-idx");
  write_idx(dir / "img", dir / "lab", 120, true);
  const auto ds = load_idx_images(dir / "img", dir / "lab", 100);
  REQUIRE(ds.size() == 100);
  CHECK(ds.dims() == 784);
  for (const double v : ds.features.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (const double v : ds.features.row(0)) CHECK(v == 0.0);
  for (const int l : ds.labels) CHECK((l >= 0 && l <= 9));
  CHECK_THROWS_AS(load_idx_images(dir / "img", dir / "lab", 0), Error);
  CHECK(load_idx_images(dir / "img", "", 5).labels.empty());

  // Truncated payload and swapped files.
  auto bytes = binary::read_file(dir / "img");
  bytes.resize(bytes.size() - 10);
  write(dir / "short", bytes);
  CHECK_THROWS_AS(load_idx_images(dir / "short", "", 1000), Error);
  CHECK_THROWS_AS(load_idx_images(dir / "lab", dir / "img", 10), Error);
}

TEST_CASE("synthetic blobs") {
  const auto a = synth_blobs(3, 100, 10, 1.0, 5);
  CHECK(a.size() == 300);
  CHECK(a.dims() == 10);
  CHECK(std::set<int>(a.labels.begin(), a.labels.end()).size() == 3);
  const auto b = synth_blobs(3, 100, 10, 1.0, 5);
  CHECK(a.features == b.features);
  CHECK(a.fingerprint == b.fingerprint);
  CHECK_FALSE(synth_blobs(3, 100, 10, 1.0, 6).features == a.features);

  const auto tight = synth_blobs(3, 50, 4, 1e-9, 5);
  for (std::size_t i = 1; i < 50; ++i)
    for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(tight.features(i, c) - tight.features(0, c)) < 1e-7);
}

TEST_CASE("standardize") {
  Dataset ds;
  ds.features = testing::random_matrix(50, 3, 1, 5.0);
  for (std::size_t i = 0; i < 50; ++i) ds.features(i, 2) = 4.0;
  standardize(ds);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < 50; ++i) mean += ds.features(i, 0), sq += ds.features(i, 0) * ds.features(i, 0);
  CHECK(mean / 50 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(sq / 50 - 1.0) < 0.03);
  for (std::size_t i = 0; i < 50; ++i) CHECK(ds.features(i, 2) == 0.0);
}

TEST_CASE("archive round trip") {
  testing::TempDir dir("io-archive");
  const auto a = sample_archive();
  write_archive(dir / "a.hnpt", a);
  const auto b = read_archive(dir / "a.hnpt");
  CHECK(a == b);
  CHECK(encode_archive(b) == binary::read_file(dir / "a.hnpt"));
  CHECK_THROWS_AS(read_archive(dir / "missing.hnpt"), Error);
  auto bytes = encode_archive(a);
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_archive(bytes), Error);
  CHECK_THROWS_AS(decode_archive(encode_archive(a).substr(0, 40)), Error);
}

TEST_CASE("archive fingerprint check names both sides") {
  auto a = sample_archive();
  Dataset ds;
  ds.features = testing::random_matrix(5, 2, 1);
  ds.fingerprint = "ffff0000";
  try {
    a.check_dataset(ds);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("abc123") != std::string::npos);
    CHECK(msg.find("ffff0000") != std::string::npos);
  }
  CHECK_NOTHROW(a.check_dataset(ds, true));
}

TEST_CASE("archives with unsorted h are rejected on read") {
  // Hand-encoded, since the writer refuses to produce this.
  binary::Writer w;
  w.raw("HNPT");
  w.u8(ProjectionArchive::kVersion);
  w.str("fp");
  w.str("tsne");
  w.u32(1);
  w.str("perplexity");
  w.u64(0);
  w.u8(1);
  w.u32(2);
  for (const double h : {15.0, 5.0}) {
    w.u32(1);
    w.f64(h);
    w.u32(2);
    w.u32(0);
    w.u32(1);
    for (int i = 0; i < 4; ++i) w.f32(0.5f);
  }
  CHECK_THROWS_AS(decode_archive(w.bytes()), Error);
  auto unsorted = sample_archive();
  std::swap(unsorted.records[0], unsorted.records[1]);
  CHECK_THROWS_AS(unsorted.validate(), Error);
}

TEST_CASE("model round trip is bit exact") {
  NetworkModel m;
  m.network = nn::Network<float>(nn::NetworkSpec::tuned(4), 3);
  for (auto& v : m.network.buffers()) v += 0.125f;
  m.normalization.feature_min = {0, -1, 2};
  m.normalization.feature_max = {1, 1, 2};
  m.normalization.hyper_min = {5};
  m.normalization.hyper_max = {45};
  m.normalization.target_min_x = -3.5;
  m.normalization.target_min_y = 1.25;
  m.normalization.target_scale = 7.0;
  m.engine = "tsne";
  m.hyperparameter_names = {"perplexity"};
  m.trained_values = {{5}, {25}, {45}};
  m.dataset_fingerprint = "0123456789abcdef";
  testing::TempDir dir("io-model");
  save_model(dir / "m.hnpm", m);
  const auto back = load_model(dir / "m.hnpm");
  CHECK(back == m);
  CHECK(encode_model(back) == encode_model(m));
  auto bytes = encode_model(m);
  bytes.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_model(bytes), Error);
}
