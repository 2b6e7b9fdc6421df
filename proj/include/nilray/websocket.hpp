#pragma once

// Minimal RFC 6455 WebSocket endpoint for a single interactive session, plus
// a blocking client used by tests and scripts. Text frames only; ping/pong and
// close are handled, fragmented messages are reassembled.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

namespace nilray::ws {

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sec-WebSocket-Accept value for a client key.
std::string accept_key(const std::string& client_key);

struct Handler {
  /// Called once a client completes the handshake.
  std::function<std::vector<std::string>()> on_open;
  /// Called for every text message; replies are sent in order.
  std::function<std::vector<std::string>(const std::string&)> on_message;
};

class Server {
 public:
  /// Binds to host:port (port 0 picks a free port).
  explicit Server(std::uint16_t port, const std::string& host = "127.0.0.1");
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return port_; }

  /// Serves until the stop token fires. One session at a time; further
  /// connections receive HTTP 409 with an explanation and are closed.
  void run(const Handler& handler, std::stop_token stop);

 private:
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
};

class Client {
 public:
  /// Connects and performs the opening handshake. Throws SocketError when
  /// refused; the message includes the server's explanation if any.
  Client(const std::string& host, std::uint16_t port, const std::string& path = "/");
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  void send_text(const std::string& text);
  /// Next text message, or nullopt on close/timeout.
  std::optional<std::string> receive(int timeout_ms = 10000);
  void close();

 private:
  int fd_ = -1;
  std::vector<std::uint8_t> buffer_;
};

}  // namespace nilray::ws
