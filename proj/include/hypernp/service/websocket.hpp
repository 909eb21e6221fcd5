#pragma once

// Minimal RFC 6455 endpoint over blocking POSIX sockets: enough for one
// browser or scripted client per connection. No extensions, no TLS.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace hypernp::ws {

/// Sec-WebSocket-Accept for a client key.
std::string accept_key(std::string_view client_key);

struct Message {
  bool binary = false;
  std::string payload;
};

class Connection;
std::unique_ptr<Connection> connect(const std::string& host, std::uint16_t port, const std::string& path);

class Connection {
 public:
  /// Takes ownership of a connected socket. `client` selects outgoing masking.
  Connection(int fd, bool client);
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  /// Server side: reads the upgrade request and answers 101 (or 400 and false).
  bool accept_upgrade(std::string* path = nullptr);

  /// Next data message; pings are answered in passing. nullopt on close or EOF.
  std::optional<Message> receive();

  /// Thread-safe. Returns false when the peer is gone.
  bool send(std::string_view payload, bool binary);
  void close(std::uint16_t code = 1000);
  /// Unblocks a pending receive() from another thread.
  void shutdown();

 private:
  friend std::unique_ptr<Connection> connect(const std::string&, std::uint16_t, const std::string&);
  bool read_exact(char* out, std::size_t n);
  bool write_frame(std::uint8_t opcode, std::string_view payload);

  int fd_;
  bool client_;
  bool closed_ = false;
  std::mutex send_mutex_;
  std::string buffered_;  // bytes read past the HTTP header
};

/// Opens a client connection and performs the handshake; throws io on failure.
inline std::unique_ptr<Connection> connect(const std::string& host, std::uint16_t port) {
  return connect(host, port, "/");
}

class Listener {
 public:
  /// Port 0 picks a free port.
  Listener(const std::string& host, std::uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  std::uint16_t port() const { return port_; }
  /// Blocks for the next connection; -1 after shutdown().
  int accept();
  void shutdown();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace hypernp::ws
