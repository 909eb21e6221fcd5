#include "hypernp/service/websocket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <random>

#include "hypernp/common.hpp"

namespace hypernp::ws {
namespace {

constexpr std::string_view kGuid = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr std::size_t kMaxHeader = 16 * 1024;
constexpr std::uint64_t kMaxPayload = 64ull << 20;

enum : std::uint8_t { op_continuation = 0, op_text = 1, op_binary = 2, op_close = 8, op_ping = 9, op_pong = 10 };

std::string base64(const unsigned char* data, std::size_t n) {
  std::string out(4 * ((n + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data, static_cast<int>(n));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Header value by case-insensitive name; empty when absent.
std::string header_value(std::string_view head, std::string_view name) {
  const std::string key = lower(name);
  std::size_t pos = head.find("\r\n");
  while (pos != std::string_view::npos && pos + 2 < head.size()) {
    const std::size_t start = pos + 2;
    const std::size_t end = head.find("\r\n", start);
    const auto line = head.substr(start, end == std::string_view::npos ? head.size() - start : end - start);
    const auto colon = line.find(':');
    if (colon != std::string_view::npos && lower(trim(line.substr(0, colon))) == key) {
      return std::string(trim(line.substr(colon + 1)));
    }
    pos = end;
  }
  return {};
}

bool send_all(int fd, const char* data, std::size_t n) {
  while (n > 0) {
    const ssize_t sent = ::send(fd, data, n, MSG_NOSIGNAL);
    if (sent < 0 && errno == EINTR) continue;
    if (sent <= 0) return false;
    data += sent;
    n -= static_cast<std::size_t>(sent);
  }
  return true;
}

// Reads up to the blank line; anything after it goes to `rest`.
bool read_http_head(int fd, std::string& head, std::string& rest) {
  std::array<char, 2048> buf;
  std::string data;
  while (data.size() < kMaxHeader) {
    const ssize_t got = ::recv(fd, buf.data(), buf.size(), 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) return false;
    data.append(buf.data(), static_cast<std::size_t>(got));
    if (const auto end = data.find("\r\n\r\n"); end != std::string::npos) {
      head = data.substr(0, end + 2);
      rest = data.substr(end + 4);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string accept_key(std::string_view client_key) {
  std::string joined(client_key);
  joined.append(kGuid);
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(joined.data()), joined.size(), digest);
  return base64(digest, sizeof digest);
}

Connection::Connection(int fd, bool client) : fd_(fd), client_(client) {
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

Connection::~Connection() {
  if (fd_ >= 0) ::close(fd_);
}

bool Connection::accept_upgrade(std::string* path) {
  std::string head;
  if (!read_http_head(fd_, head, buffered_)) return false;
  const auto line_end = head.find("\r\n");
  const std::string_view request_line(head.data(), line_end);
  const auto sp1 = request_line.find(' ');
  const auto sp2 = request_line.find(' ', sp1 + 1);
  const std::string key = header_value(head, "Sec-WebSocket-Key");
  const bool ok = request_line.substr(0, sp1) == "GET" && sp2 != std::string_view::npos &&
                  lower(header_value(head, "Upgrade")) == "websocket" && !key.empty();
  if (!ok) {
    static constexpr std::string_view reply =
        "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";
    send_all(fd_, reply.data(), reply.size());
    return false;
  }
  if (path) *path = std::string(request_line.substr(sp1 + 1, sp2 - sp1 - 1));
  const std::string reply = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                            "Sec-WebSocket-Accept: " + accept_key(key) + "\r\n\r\n";
  return send_all(fd_, reply.data(), reply.size());
}

bool Connection::read_exact(char* out, std::size_t n) {
  const std::size_t from_buffer = std::min(n, buffered_.size());
  if (from_buffer) {
    std::memcpy(out, buffered_.data(), from_buffer);
    buffered_.erase(0, from_buffer);
    out += from_buffer;
    n -= from_buffer;
  }
  while (n > 0) {
    const ssize_t got = ::recv(fd_, out, n, 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) return false;
    out += got;
    n -= static_cast<std::size_t>(got);
  }
  return true;
}

bool Connection::write_frame(std::uint8_t opcode, std::string_view payload) {
  std::string frame;
  frame.reserve(payload.size() + 14);
  frame.push_back(static_cast<char>(0x80 | opcode));
  const std::uint8_t mask_bit = client_ ? 0x80 : 0;
  const std::size_t n = payload.size();
  if (n < 126) {
    frame.push_back(static_cast<char>(mask_bit | n));
  } else if (n <= 0xffff) {
    frame.push_back(static_cast<char>(mask_bit | 126));
    frame.push_back(static_cast<char>(n >> 8));
    frame.push_back(static_cast<char>(n & 0xff));
  } else {
    frame.push_back(static_cast<char>(mask_bit | 127));
    for (int i = 7; i >= 0; --i) frame.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> (8 * i)) & 0xff));
  }
  if (client_) {
    static thread_local std::mt19937 gen{std::random_device{}()};
    std::array<char, 4> mask;
    for (auto& m : mask) m = static_cast<char>(gen() & 0xff);
    frame.append(mask.data(), 4);
    const std::size_t start = frame.size();
    frame.append(payload);
    for (std::size_t i = 0; i < n; ++i) frame[start + i] ^= mask[i % 4];
  } else {
    frame.append(payload);
  }
  std::lock_guard lock(send_mutex_);
  if (closed_) return false;
  return send_all(fd_, frame.data(), frame.size());
}

std::optional<Message> Connection::receive() {
  Message message;
  bool in_message = false;
  for (;;) {
    unsigned char head[2];
    if (!read_exact(reinterpret_cast<char*>(head), 2)) return std::nullopt;
    const bool fin = head[0] & 0x80;
    const std::uint8_t opcode = head[0] & 0x0f;
    const bool masked = head[1] & 0x80;
    std::uint64_t length = head[1] & 0x7f;
    if (length == 126) {
      unsigned char ext[2];
      if (!read_exact(reinterpret_cast<char*>(ext), 2)) return std::nullopt;
      length = (std::uint64_t{ext[0]} << 8) | ext[1];
    } else if (length == 127) {
      unsigned char ext[8];
      if (!read_exact(reinterpret_cast<char*>(ext), 8)) return std::nullopt;
      length = 0;
      for (const unsigned char b : ext) length = (length << 8) | b;
    }
    if (length > kMaxPayload) {
      close(1009);
      return std::nullopt;
    }
    std::array<char, 4> mask{};
    if (masked && !read_exact(mask.data(), 4)) return std::nullopt;
    std::string payload(static_cast<std::size_t>(length), '\0');
    if (length && !read_exact(payload.data(), payload.size())) return std::nullopt;
    if (masked) {
      for (std::size_t i = 0; i < payload.size(); ++i) payload[i] ^= mask[i % 4];
    }

    switch (opcode) {
      case op_ping:
        write_frame(op_pong, payload);
        continue;
      case op_pong:
        continue;
      case op_close:
        close(1000);
        return std::nullopt;
      case op_text:
      case op_binary:
        if (in_message) {
          close(1002);
          return std::nullopt;
        }
        message.binary = opcode == op_binary;
        message.payload = std::move(payload);
        in_message = true;
        break;
      case op_continuation:
        if (!in_message) {
          close(1002);
          return std::nullopt;
        }
        message.payload += payload;
        break;
      default:
        close(1002);
        return std::nullopt;
    }
    if (fin) return message;
  }
}

bool Connection::send(std::string_view payload, bool binary) {
  return write_frame(binary ? op_binary : op_text, payload);
}

void Connection::close(std::uint16_t code) {
  const char body[2] = {static_cast<char>(code >> 8), static_cast<char>(code & 0xff)};
  write_frame(op_close, std::string_view(body, 2));
  std::lock_guard lock(send_mutex_);
  closed_ = true;
}

void Connection::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

std::unique_ptr<Connection> connect(const std::string& host, std::uint16_t port, const std::string& path) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found) != 0 || !found) {
    fail(ErrorKind::io, "cannot resolve " + host);
  }
  int fd = -1;
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) fail(ErrorKind::io, "cannot connect to " + host + ":" + std::to_string(port));

  auto conn = std::make_unique<Connection>(fd, true);
  std::mt19937 gen{std::random_device{}()};
  unsigned char nonce[16];
  for (auto& b : nonce) b = static_cast<unsigned char>(gen() & 0xff);
  const std::string key = base64(nonce, sizeof nonce);
  const std::string request = "GET " + path + " HTTP/1.1\r\nHost: " + host + ":" + std::to_string(port) +
                              "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Key: " + key +
                              "\r\nSec-WebSocket-Version: 13\r\n\r\n";
  if (!send_all(fd, request.data(), request.size())) fail(ErrorKind::io, "handshake send failed");
  std::string head;
  if (!read_http_head(fd, head, conn->buffered_)) fail(ErrorKind::io, "handshake: no response");
  if (head.rfind("HTTP/1.1 101", 0) != 0) fail(ErrorKind::io, "handshake rejected: " + head.substr(0, head.find('\r')));
  if (header_value(head, "Sec-WebSocket-Accept") != accept_key(key)) fail(ErrorKind::io, "handshake: bad accept key");
  return conn;
}

Listener::Listener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) fail(ErrorKind::io, "socket() failed");
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    fail(ErrorKind::invalid_argument, "listener needs an IPv4 address, got " + host);
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 16) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(fd_);
    fail(ErrorKind::io, "cannot listen on " + host + ":" + std::to_string(port) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  if (fd_ >= 0) ::close(fd_);
}

int Listener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return fd;
    if (errno != EINTR) return -1;
  }
}

void Listener::shutdown() { ::shutdown(fd_, SHUT_RDWR); }

}  // namespace hypernp::ws
