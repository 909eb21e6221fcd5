#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "hypernp/inference.hpp"
#include "hypernp/io/dataset.hpp"
#include "hypernp/model.hpp"

namespace httplib {
class Server;
}

namespace hypernp {

/// An immutable model + dataset pair shared by every session.
class LayoutService {
 public:
  LayoutService(NetworkModel model, Dataset dataset, bool allow_extrapolation = false);

  const NetworkModel& model() const { return model_; }
  const Dataset& dataset() const { return dataset_; }

  /// Fresh copy of the normalized inputs for one session.
  PreparedInputs prepare() const { return prepared_; }

  /// Bounds, names, dataset size, label palette and endpoint details.
  std::string metadata_json(std::uint16_t stream_port) const;

  /// Layout frame for h (echoed in the frame). Throws hypernp::Error.
  std::string layout_frame(std::uint64_t seq, const HyperValue& h, PreparedInputs& session) const;

 private:
  NetworkModel model_;
  Dataset dataset_;
  bool allow_extrapolation_;
  PreparedInputs prepared_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  std::uint16_t http_port = 0;    ///< 0 picks a free port
  std::uint16_t stream_port = 0;  ///< 0 picks a free port
};

/// HTTP for metadata and one-shot layouts, a WebSocket port for streaming.
///
///   GET /metadata          JSON
///   GET /layout?h=..&seq=  binary layout frame, or an error frame with 400
///   ws://host:stream_port/ text {"seq":n,"h":..} or binary request frames in,
///                          layout / error frames out, latest request wins
class Server {
 public:
  Server(std::shared_ptr<const LayoutService> service, ServiceOptions options);
  ~Server();

  /// Binds both ports and starts serving in background threads.
  void start();
  /// Blocks until stop() is called from another thread.
  void wait();
  void stop();

  std::uint16_t http_port() const { return http_port_; }
  std::uint16_t stream_port() const { return stream_port_; }
  /// Layouts computed on streams so far (coalesced requests are not counted).
  std::uint64_t stream_computations() const { return computations_.load(); }

 private:
  struct Session;
  void accept_loop();
  void run_session(const std::shared_ptr<Session>& session);

  std::shared_ptr<const LayoutService> service_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> http_;
  std::unique_ptr<class StreamListener> listener_;
  std::thread http_thread_, accept_thread_;
  std::mutex sessions_mutex_;
  std::list<std::pair<std::shared_ptr<Session>, std::thread>> sessions_;
  std::uint16_t http_port_ = 0, stream_port_ = 0;
  std::atomic<std::uint64_t> computations_{0};
  std::atomic<bool> running_{false};
  std::mutex stop_mutex_;
  bool stopped_ = false;
};

}  // namespace hypernp
