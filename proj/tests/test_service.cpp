#include <doctest.h>

#include <httplib.h>

#include <json.hpp>

#include "hypernp/service/protocol.hpp"
#include "hypernp/service/server.hpp"
#include "hypernp/service/websocket.hpp"
#include "model_fixture.hpp"
#include "support.hpp"

using namespace hypernp;
namespace proto = hypernp::protocol;

namespace {

Dataset labelled_dataset(std::size_t n, std::size_t dims, std::uint64_t seed) {
  Dataset ds;
  ds.features = testing::random_matrix(n, dims, seed);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = int(i % 3);
  ds.fingerprint = content_fingerprint(ds.features, ds.labels);
  return ds;
}

std::shared_ptr<const LayoutService> make_service(std::size_t n, bool extrapolate = false) {
  auto model = testing::synthetic_model(10, 1);
  auto ds = labelled_dataset(n, 10, 2);
  model.dataset_fingerprint = ds.fingerprint;
  return std::make_shared<LayoutService>(std::move(model), std::move(ds), extrapolate);
}

std::string request_text(std::uint64_t seq, double h) {
  return nlohmann::json{{"seq", seq}, {"h", h}}.dump();
}

}  // namespace

TEST_CASE("layout frames round trip") {
  Matrix<float> coords(3, 2);
  for (std::size_t i = 0; i < coords.size(); ++i) coords.values()[i] = 0.25f * float(i) - 0.5f;
  const std::string bytes = proto::encode_layout(42, {12.5}, coords, {0, 1, 2});
  REQUIRE(bytes.size() == 4 + 1 + 1 + 2 + 8 + 4 + 4 + 8 + 3 * 8 + 3 * 4);
  CHECK(bytes.substr(0, 4) == "HNPL");
  const auto frame = proto::decode(bytes);
  CHECK(frame.type == proto::FrameType::layout);
  CHECK(frame.seq == 42);
  CHECK(frame.hyperparameter == HyperValue{12.5});
  CHECK(frame.coords == coords);
  CHECK(frame.labels == std::vector<std::int32_t>{0, 1, 2});

  const auto unlabelled = proto::decode(proto::encode_layout(1, {1, 2}, coords, {}));
  CHECK(unlabelled.labels.empty());
  CHECK(unlabelled.hyperparameter == HyperValue{1, 2});
  CHECK_THROWS_AS(proto::encode_layout(1, {1}, coords, {0}), Error);
}

TEST_CASE("error and request frames round trip") {
  const auto err = proto::decode(proto::encode_error(7, "invalid_argument", "h out of range"));
  CHECK(err.type == proto::FrameType::error);
  CHECK(err.seq == 7);
  CHECK(err.error_class == "invalid_argument");
  CHECK(err.message == "h out of range");
  const auto req = proto::decode(proto::encode_request(9, {3.5}));
  CHECK(req.type == proto::FrameType::request);
  CHECK(req.seq == 9);
  CHECK(req.hyperparameter == HyperValue{3.5});
}

TEST_CASE("malformed frames are rejected") {
  const std::string good = proto::encode_request(1, {2.0});
  CHECK_THROWS_AS(proto::decode(""), Error);
  CHECK_THROWS_AS(proto::decode("XXXX" + good.substr(4)), Error);
  CHECK_THROWS_AS(proto::decode(good.substr(0, good.size() - 1)), Error);
  CHECK_THROWS_AS(proto::decode(good + "x"), Error);
  std::string bad_version = good;
  bad_version[4] = 9;
  CHECK_THROWS_AS(proto::decode(bad_version), Error);
  std::string bad_type = good;
  bad_type[5] = 7;
  CHECK_THROWS_AS(proto::decode(bad_type), Error);
}

TEST_CASE("text requests and query lists") {
  std::uint64_t seq = 0;
  CHECK(proto::parse_text_request(R"({"seq": 3, "h": 17.5})", seq) == HyperValue{17.5});
  CHECK(seq == 3);
  CHECK(proto::parse_text_request(R"({"seq": 4, "h": [1, 0.5]})", seq) == HyperValue{1, 0.5});
  CHECK(seq == 4);
  seq = 0;
  CHECK_THROWS_AS(proto::parse_text_request(R"({"seq": 5, "h": "abc"})", seq), Error);
  CHECK(seq == 5);
  CHECK_THROWS_AS(proto::parse_text_request("not json", seq), Error);
  CHECK_THROWS_AS(proto::parse_text_request(R"({"seq": 1})", seq), Error);
  CHECK_THROWS_AS(proto::parse_text_request(R"({"seq": 1, "h": []})", seq), Error);

  CHECK(proto::parse_hyper_list("17.5") == HyperValue{17.5});
  CHECK(proto::parse_hyper_list("1,0.5,0") == HyperValue{1, 0.5, 0});
  CHECK_THROWS_AS(proto::parse_hyper_list(""), Error);
  CHECK_THROWS_AS(proto::parse_hyper_list("1,,2"), Error);
  CHECK_THROWS_AS(proto::parse_hyper_list("1x"), Error);
  CHECK_THROWS_AS(proto::parse_hyper_list("nan"), Error);
  CHECK_THROWS_AS(proto::parse_hyper_list("inf"), Error);
}

TEST_CASE("websocket accept key") {
  CHECK(ws::accept_key("dGhlIHNhbXBsZSBub25jZQ==") == "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
}

TEST_CASE("http metadata and one-shot layouts") {
  const auto service = make_service(500);
  Server server(service, {});
  server.start();
  httplib::Client client("127.0.0.1", server.http_port());

  const auto meta_res = client.Get("/metadata");
  REQUIRE(meta_res);
  CHECK(meta_res->status == 200);
  const auto meta = nlohmann::json::parse(meta_res->body);
  CHECK(meta["engine"] == "tsne");
  CHECK(meta["hyperparameter_names"] == std::vector<std::string>{"perplexity"});
  REQUIRE(meta["bounds"].size() == 1);
  CHECK(meta["bounds"][0]["name"] == "perplexity");
  CHECK(meta["bounds"][0]["lo"] == 5.0);
  CHECK(meta["bounds"][0]["hi"] == 45.0);
  CHECK(meta["dataset_size"] == 500);
  CHECK(meta["labels_present"] == true);
  CHECK(meta["palette"].size() == 3);
  CHECK(meta["stream_port"] == server.stream_port());
  CHECK(meta["trained_values"].size() == 5);

  const auto layout_res = client.Get("/layout?h=20&seq=11");
  REQUIRE(layout_res);
  CHECK(layout_res->status == 200);
  const auto frame = proto::decode(layout_res->body);
  CHECK(frame.type == proto::FrameType::layout);
  CHECK(frame.seq == 11);
  CHECK(frame.hyperparameter == HyperValue{20});
  CHECK(frame.coords == infer(service->model(), service->dataset().features, {20}).coords);
  CHECK(frame.labels.size() == 500);

  for (const char* bad : {"/layout?h=99", "/layout?h=abc", "/layout", "/layout?h=1,2", "/layout?h=20&seq=x"}) {
    CAPTURE(bad);
    const auto res = client.Get(bad);
    REQUIRE(res);
    CHECK(res->status == 400);
    const auto err = proto::decode(res->body);
    CHECK(err.type == proto::FrameType::error);
    CHECK_FALSE(err.message.empty());
  }
  const auto out_of_range = proto::decode(client.Get("/layout?h=99&seq=4")->body);
  CHECK(out_of_range.seq == 4);
  CHECK(out_of_range.error_class == "invalid_argument");
  server.stop();
}

TEST_CASE("extrapolating service accepts out-of-range h") {
  const auto service = make_service(50, true);
  Server server(service, {});
  server.start();
  httplib::Client client("127.0.0.1", server.http_port());
  const auto res = client.Get("/layout?h=60");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(nlohmann::json::parse(client.Get("/metadata")->body)["allow_extrapolation"] == true);
}

TEST_CASE("stream coalesces bursts and survives bad requests") {
  const auto service = make_service(20000);
  Server server(service, {});
  server.start();
  auto conn = ws::connect("127.0.0.1", server.stream_port());

  constexpr std::uint64_t kBurst = 100;
  auto h_of = [](std::uint64_t seq) { return 5.0 + 0.4 * double(seq - 1); };
  for (std::uint64_t seq = 1; seq <= kBurst; ++seq) REQUIRE(conn->send(request_text(seq, h_of(seq)), false));

  std::vector<std::uint64_t> seen;
  proto::Frame last;
  while (seen.empty() || seen.back() != kBurst) {
    const auto msg = conn->receive();
    REQUIRE(msg.has_value());
    CHECK(msg->binary);
    last = proto::decode(msg->payload);
    REQUIRE(last.type == proto::FrameType::layout);
    CHECK(last.hyperparameter == HyperValue{h_of(last.seq)});
    seen.push_back(last.seq);
  }
  MESSAGE(seen.size() << " layouts for " << kBurst << " requests, " << server.stream_computations() << " computed");
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i] > seen[i - 1]);
  CHECK(server.stream_computations() < kBurst);
  CHECK(last.coords == infer(service->model(), service->dataset().features, {h_of(kBurst)}).coords);
  CHECK(last.labels.size() == 20000);

  REQUIRE(conn->send(R"({"seq": 200, "h": "abc"})", false));
  auto msg = conn->receive();
  REQUIRE(msg.has_value());
  auto err = proto::decode(msg->payload);
  CHECK(err.type == proto::FrameType::error);
  CHECK(err.seq == 200);

  REQUIRE(conn->send(proto::encode_request(201, {99}), true));
  msg = conn->receive();
  REQUIRE(msg.has_value());
  err = proto::decode(msg->payload);
  CHECK(err.type == proto::FrameType::error);
  CHECK(err.seq == 201);

  REQUIRE(conn->send(proto::encode_request(202, {25}), true));
  msg = conn->receive();
  REQUIRE(msg.has_value());
  const auto ok = proto::decode(msg->payload);
  CHECK(ok.type == proto::FrameType::layout);
  CHECK(ok.seq == 202);
  conn->close();
  server.stop();
}

TEST_CASE("stop with an open stream returns") {
  const auto service = make_service(100);
  Server server(service, {});
  server.start();
  auto conn = ws::connect("127.0.0.1", server.stream_port());
  REQUIRE(conn->send(request_text(1, 10), false));
  REQUIRE(conn->receive().has_value());
  server.stop();
  CHECK_FALSE(conn->receive().has_value());
}
