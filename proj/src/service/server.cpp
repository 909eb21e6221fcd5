#include "hypernp/service/server.hpp"

#include <condition_variable>
#include <cstdio>
#include <optional>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "hypernp/service/protocol.hpp"
#include "hypernp/service/websocket.hpp"

namespace hypernp {

class StreamListener : public ws::Listener {
  using ws::Listener::Listener;
};

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string error_class(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(error_kind_name(err->kind()));
  return "internal";
}

}  // namespace

LayoutService::LayoutService(NetworkModel model, Dataset dataset, bool allow_extrapolation)
    : model_(std::move(model)),
      dataset_(std::move(dataset)),
      allow_extrapolation_(allow_extrapolation),
      prepared_(model_, dataset_.features) {}

std::string LayoutService::metadata_json(std::uint16_t stream_port) const {
  using nlohmann::json;
  const auto& norm = model_.normalization;
  json bounds = json::array();
  for (std::size_t j = 0; j < norm.hyper_count(); ++j) {
    bounds.push_back({{"name", model_.hyperparameter_names.at(j)}, {"lo", norm.hyper_min[j]}, {"hi", norm.hyper_max[j]}});
  }
  json palette = json::array();
  std::set<int> labels(dataset_.labels.begin(), dataset_.labels.end());
  std::size_t i = 0;
  for (const int l : labels) palette.push_back({{"label", l}, {"color", kPalette[i++ % std::size(kPalette)]}});
  json trained = json::array();
  for (const auto& h : model_.trained_values) trained.push_back(h);
  const json doc = {
      {"engine", model_.engine},
      {"hyperparameter_names", model_.hyperparameter_names},
      {"bounds", bounds},
      {"trained_values", trained},
      {"allow_extrapolation", allow_extrapolation_},
      {"dataset_size", dataset_.size()},
      {"dataset_fingerprint", dataset_.fingerprint},
      {"labels_present", dataset_.has_labels()},
      {"palette", palette},
      {"stream_port", stream_port},
      {"frame_version", protocol::kVersion},
  };
  return doc.dump();
}

std::string LayoutService::layout_frame(std::uint64_t seq, const HyperValue& h, PreparedInputs& session) const {
  InferenceOptions options;
  options.allow_extrapolation = allow_extrapolation_;
  const auto result = run_inference(model_, session, h, options);
  return protocol::encode_layout(seq, result.hyperparameter, result.coords, dataset_.labels);
}

struct Server::Session {
  explicit Session(int fd, PreparedInputs inputs) : conn(fd, false), inputs(std::move(inputs)) {}
  ws::Connection conn;
  PreparedInputs inputs;
  std::mutex mutex;
  std::condition_variable wake;
  std::optional<std::pair<std::uint64_t, HyperValue>> pending;
  bool closing = false;
  std::atomic<bool> finished{false};
};

Server::Server(std::shared_ptr<const LayoutService> service, ServiceOptions options)
    : service_(std::move(service)), options_(std::move(options)) {}

Server::~Server() { stop(); }

void Server::start() {
  http_ = std::make_unique<httplib::Server>();
  http_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  http_->Get("/metadata", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(service_->metadata_json(stream_port_), "application/json");
  });
  http_->Get("/layout", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t seq = 0;
    try {
      if (req.has_param("seq")) {
        const std::string text = req.get_param_value("seq");
        std::size_t used = 0;
        seq = std::stoull(text, &used);
        if (used != text.size()) fail(ErrorKind::invalid_argument, "malformed seq");
      }
      if (!req.has_param("h")) fail(ErrorKind::invalid_argument, "missing h");
      const HyperValue h = protocol::parse_hyper_list(req.get_param_value("h"));
      PreparedInputs inputs = service_->prepare();
      res.set_content(service_->layout_frame(seq, h, inputs), "application/octet-stream");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(protocol::encode_error(seq, error_class(e), e.what()), "application/octet-stream");
    }
  });

  if (options_.http_port == 0) {
    const int port = http_->bind_to_any_port(options_.host);
    if (port < 0) fail(ErrorKind::io, "cannot bind HTTP on " + options_.host);
    http_port_ = static_cast<std::uint16_t>(port);
  } else {
    if (!http_->bind_to_port(options_.host, options_.http_port)) {
      fail(ErrorKind::io, "cannot bind HTTP on " + options_.host + ":" + std::to_string(options_.http_port));
    }
    http_port_ = options_.http_port;
  }
  listener_ = std::make_unique<StreamListener>(options_.host, options_.stream_port);
  stream_port_ = listener_->port();
  running_ = true;
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  accept_thread_ = std::thread([this] { accept_loop(); });
  http_->wait_until_ready();
}

void Server::wait() {
  while (running_) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

void Server::stop() {
  std::lock_guard stop_lock(stop_mutex_);
  if (stopped_ || !http_) return;
  stopped_ = true;
  running_ = false;
  http_->stop();
  listener_->shutdown();
  if (http_thread_.joinable()) http_thread_.join();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::lock_guard lock(sessions_mutex_);
  for (auto& [session, thread] : sessions_) {
    {
      std::lock_guard session_lock(session->mutex);
      session->closing = true;
    }
    session->wake.notify_all();
    session->conn.shutdown();
  }
  for (auto& [session, thread] : sessions_) {
    if (thread.joinable()) thread.join();
  }
  sessions_.clear();
}

void Server::accept_loop() {
  while (running_) {
    const int fd = listener_->accept();
    if (fd < 0) break;
    auto session = std::make_shared<Session>(fd, service_->prepare());
    std::lock_guard lock(sessions_mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->first->finished) {
        it->second.join();
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
    if (!running_) break;
    sessions_.emplace_back(session, std::thread([this, session] { run_session(session); }));
  }
}

void Server::run_session(const std::shared_ptr<Session>& session) {
  if (!session->conn.accept_upgrade()) {
    session->finished = true;
    return;
  }
  // The worker computes whatever request is newest when it becomes free.
  std::thread worker([this, session] {
    for (;;) {
      std::pair<std::uint64_t, HyperValue> job;
      {
        std::unique_lock lock(session->mutex);
        session->wake.wait(lock, [&] { return session->closing || session->pending.has_value(); });
        if (session->closing) return;
        job = std::move(*session->pending);
        session->pending.reset();
      }
      std::string frame;
      try {
        frame = service_->layout_frame(job.first, job.second, session->inputs);
        ++computations_;
      } catch (const std::exception& e) {
        frame = protocol::encode_error(job.first, error_class(e), e.what());
      }
      if (!session->conn.send(frame, true)) return;
    }
  });

  std::uint64_t ordinal = 0;
  while (auto message = session->conn.receive()) {
    ++ordinal;
    std::uint64_t seq = ordinal;
    try {
      HyperValue h;
      if (message->binary) {
        const auto frame = protocol::decode(message->payload);
        seq = frame.seq;
        if (frame.type != protocol::FrameType::request) fail(ErrorKind::invalid_argument, "expected a request frame");
        h = frame.hyperparameter;
      } else {
        h = protocol::parse_text_request(message->payload, seq);
      }
      check_query(service_->model(), h, true);  // arity only; bounds are checked when computed
      {
        std::lock_guard lock(session->mutex);
        session->pending.emplace(seq, std::move(h));
      }
      session->wake.notify_one();
    } catch (const std::exception& e) {
      session->conn.send(protocol::encode_error(seq, error_class(e), e.what()), true);
    }
  }
  {
    std::lock_guard lock(session->mutex);
    session->closing = true;
  }
  session->wake.notify_all();
  worker.join();
  session->finished = true;
}

}  // namespace hypernp
