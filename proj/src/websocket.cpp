#include "nilray/websocket.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <openssl/evp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>

#include "nilray/image.hpp"

namespace nilray::ws {

namespace {

constexpr char kGuid[] = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
constexpr std::size_t kMaxHeader = 16384;
constexpr std::uint64_t kMaxPayload = 16u << 20;

enum Opcode : std::uint8_t { Continuation = 0, Text = 1, Binary = 2, Close = 8, Ping = 9, Pong = 10 };

struct Frame {
  bool fin = true;
  std::uint8_t opcode = Text;
  std::string payload;
};

void send_all(int fd, const void* data, std::size_t n) {
  const auto* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw SocketError(std::string("send: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void send_all(int fd, const std::string& s) { send_all(fd, s.data(), s.size()); }

// Appends available bytes; false on EOF, error or timeout.
bool read_more(int fd, std::vector<std::uint8_t>& buf, int timeout_ms) {
  pollfd p{fd, POLLIN, 0};
  const int r = ::poll(&p, 1, timeout_ms);
  if (r <= 0) return false;
  std::uint8_t tmp[8192];
  const ssize_t n = ::recv(fd, tmp, sizeof tmp, 0);
  if (n <= 0) return false;
  buf.insert(buf.end(), tmp, tmp + n);
  return true;
}

std::optional<std::string> read_http_head(int fd, std::vector<std::uint8_t>& buf, int timeout_ms) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  static constexpr char kEnd[] = "\r\n\r\n";
  for (;;) {
    const auto it = std::search(buf.begin(), buf.end(), kEnd, kEnd + 4);
    if (it != buf.end()) {
      std::string head(buf.begin(), it + 4);
      buf.erase(buf.begin(), it + 4);
      return head;
    }
    if (buf.size() > kMaxHeader) return std::nullopt;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !read_more(fd, buf, static_cast<int>(left.count()))) return std::nullopt;
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Header lookup (case-insensitive name).
std::string header_value(const std::string& head, const std::string& name) {
  std::size_t pos = head.find("\r\n");
  while (pos != std::string::npos && pos + 2 < head.size()) {
    const std::size_t end = head.find("\r\n", pos + 2);
    const std::string line = head.substr(pos + 2, end - pos - 2);
    const auto colon = line.find(':');
    if (colon != std::string::npos && lower(trim(line.substr(0, colon))) == lower(name))
      return trim(line.substr(colon + 1));
    pos = end;
  }
  return {};
}

std::string encode_frame(std::uint8_t opcode, const std::string& payload, bool mask) {
  std::string out;
  out.push_back(static_cast<char>(0x80 | opcode));
  const std::uint8_t mbit = mask ? 0x80 : 0x00;
  const std::uint64_t n = payload.size();
  if (n < 126) {
    out.push_back(static_cast<char>(mbit | n));
  } else if (n <= 0xFFFF) {
    out.push_back(static_cast<char>(mbit | 126));
    out.push_back(static_cast<char>(n >> 8));
    out.push_back(static_cast<char>(n & 0xFF));
  } else {
    out.push_back(static_cast<char>(mbit | 127));
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((n >> (8 * i)) & 0xFF));
  }
  if (!mask) return out + payload;
  const std::uint8_t key[4] = {0x37, 0xfa, 0x21, 0x3d};
  out.append(reinterpret_cast<const char*>(key), 4);
  for (std::size_t i = 0; i < payload.size(); ++i) out.push_back(static_cast<char>(payload[i] ^ key[i % 4]));
  return out;
}

// Parses one frame from the front of buf. Throws on protocol violations.
std::optional<Frame> take_frame(std::vector<std::uint8_t>& buf) {
  if (buf.size() < 2) return std::nullopt;
  Frame f;
  f.fin = buf[0] & 0x80;
  f.opcode = buf[0] & 0x0F;
  if (buf[0] & 0x70) throw SocketError("reserved bits set");
  const bool masked = buf[1] & 0x80;
  std::uint64_t n = buf[1] & 0x7F;
  std::size_t off = 2;
  if (n == 126) {
    if (buf.size() < 4) return std::nullopt;
    n = (std::uint64_t(buf[2]) << 8) | buf[3];
    off = 4;
  } else if (n == 127) {
    if (buf.size() < 10) return std::nullopt;
    n = 0;
    for (int i = 0; i < 8; ++i) n = (n << 8) | buf[2 + i];
    off = 10;
  }
  if (n > kMaxPayload) throw SocketError("frame too large");
  std::uint8_t key[4] = {0, 0, 0, 0};
  if (masked) {
    if (buf.size() < off + 4) return std::nullopt;
    std::memcpy(key, &buf[off], 4);
    off += 4;
  }
  if (buf.size() < off + n) return std::nullopt;
  f.payload.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) f.payload[i] = static_cast<char>(buf[off + i] ^ key[i % 4]);
  buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(off + n));
  return f;
}

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

std::string http_response(int code, const std::string& reason, const std::string& body) {
  return "HTTP/1.1 " + std::to_string(code) + " " + reason +
         "\r\nContent-Type: text/plain\r\nConnection: close\r\nContent-Length: " + std::to_string(body.size()) +
         "\r\n\r\n" + body;
}

// Assembles messages for one connection.
struct Connection {
  int fd = -1;
  std::vector<std::uint8_t> buf;
  std::string partial;
  std::uint8_t partial_op = 0;

  // Returns complete text messages; sets `closed` on close or error.
  std::vector<std::string> drain(bool masked_peer, bool& closed) {
    std::vector<std::string> out;
    while (auto f = take_frame(buf)) {
      switch (f->opcode) {
        case Ping: send_all(fd, encode_frame(Pong, f->payload, !masked_peer)); break;
        case Pong: break;
        case Close:
          try {
            send_all(fd, encode_frame(Close, f->payload.substr(0, 2), !masked_peer));
          } catch (const SocketError&) {
          }
          closed = true;
          return out;
        case Text:
        case Binary:
          partial = f->payload;
          partial_op = f->opcode;
          if (f->fin && partial_op == Text) out.push_back(std::move(partial));
          break;
        case Continuation:
          partial += f->payload;
          if (f->fin && partial_op == Text) out.push_back(std::move(partial));
          break;
        default: throw SocketError("unknown opcode");
      }
    }
    return out;
  }
};

}  // namespace

std::string accept_key(const std::string& client_key) {
  const std::string in = client_key + kGuid;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(in.data(), in.size(), md, &len, EVP_sha1(), nullptr) != 1) throw SocketError("SHA-1 failed");
  return base64_encode(std::vector<std::uint8_t>(md, md + len));
}

Server::Server(std::uint16_t port, const std::string& host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw SocketError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    close_fd(listen_fd_);
    throw SocketError("bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 8) < 0) {
    const std::string err = std::strerror(errno);
    close_fd(listen_fd_);
    throw SocketError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Server::~Server() { close_fd(listen_fd_); }

void Server::run(const Handler& handler, std::stop_token stop) {
  Connection conn;
  auto drop = [&] {
    close_fd(conn.fd);
    conn = Connection{};
  };
  while (!stop.stop_requested()) {
    pollfd fds[2] = {{listen_fd_, POLLIN, 0}, {conn.fd, POLLIN, 0}};
    const int r = ::poll(fds, conn.fd >= 0 ? 2 : 1, 100);
    if (r < 0 && errno != EINTR) throw SocketError(std::string("poll: ") + std::strerror(errno));
    if (r <= 0) continue;

    if (fds[0].revents & POLLIN) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd >= 0) {
        std::vector<std::uint8_t> buf;
        const auto head = read_http_head(fd, buf, 2000);
        try {
          if (conn.fd >= 0) {
            send_all(fd, http_response(409, "Conflict",
                                       "another session is active; this server handles one session at a time\n"));
            close_fd(fd);
          } else if (!head || lower(header_value(*head, "Upgrade")) != "websocket" ||
                     header_value(*head, "Sec-WebSocket-Key").empty()) {
            send_all(fd, http_response(400, "Bad Request", "expected a WebSocket upgrade\n"));
            close_fd(fd);
          } else {
            const std::string key = header_value(*head, "Sec-WebSocket-Key");
            send_all(fd, "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                         "Sec-WebSocket-Accept: " + accept_key(key) + "\r\n\r\n");
            const int nodelay = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &nodelay, sizeof nodelay);
            conn.fd = fd;
            conn.buf = std::move(buf);
            if (handler.on_open)
              for (const std::string& m : handler.on_open()) send_all(conn.fd, encode_frame(Text, m, false));
          }
        } catch (const SocketError&) {
          if (fd != conn.fd) close_fd(fd);
          else drop();
        }
      }
    }

    if (conn.fd >= 0 && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
      try {
        if (!read_more(conn.fd, conn.buf, 0)) {
          drop();
          continue;
        }
        bool closed = false;
        for (const std::string& msg : conn.drain(true, closed)) {
          for (const std::string& reply : handler.on_message(msg)) send_all(conn.fd, encode_frame(Text, reply, false));
        }
        if (closed) drop();
      } catch (const SocketError&) {
        drop();
      }
    }
  }
  drop();
}

Client::Client(const std::string& host, std::uint16_t port, const std::string& path) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
    throw SocketError("cannot resolve " + host);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc < 0) {
    const std::string err = std::strerror(errno);
    close_fd(fd_);
    throw SocketError("connect: " + err);
  }
  const std::string key = "bmlscmF5LWNsaWVudC1rZXk=";
  send_all(fd_, "GET " + path + " HTTP/1.1\r\nHost: " + host + ":" + std::to_string(port) +
                    "\r\nUpgrade: websocket\r\nConnection: Upgrade\r\nSec-WebSocket-Key: " + key +
                    "\r\nSec-WebSocket-Version: 13\r\n\r\n");
  const auto head = read_http_head(fd_, buffer_, 5000);
  if (!head) {
    close_fd(fd_);
    throw SocketError("no handshake response");
  }
  const std::string status = head->substr(0, head->find("\r\n"));
  if (status.find(" 101") == std::string::npos) {
    while (read_more(fd_, buffer_, 200)) {
    }
    const std::string body(buffer_.begin(), buffer_.end());
    close_fd(fd_);
    throw SocketError(status + (body.empty() ? "" : ": " + trim(body)));
  }
  if (header_value(*head, "Sec-WebSocket-Accept") != accept_key(key)) {
    close_fd(fd_);
    throw SocketError("bad Sec-WebSocket-Accept");
  }
}

Client::~Client() { close(); }

void Client::send_text(const std::string& text) {
  if (fd_ < 0) throw SocketError("not connected");
  send_all(fd_, encode_frame(Text, text, true));
}

std::optional<std::string> Client::receive(int timeout_ms) {
  if (fd_ < 0) return std::nullopt;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  std::string partial;
  for (;;) {
    while (auto f = take_frame(buffer_)) {
      if (f->opcode == Ping) {
        send_all(fd_, encode_frame(Pong, f->payload, true));
      } else if (f->opcode == Close) {
        close_fd(fd_);
        return std::nullopt;
      } else if (f->opcode == Text || f->opcode == Continuation) {
        partial += f->payload;
        if (f->fin) return partial;
      }
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !read_more(fd_, buffer_, static_cast<int>(left.count()))) return std::nullopt;
  }
}

void Client::close() {
  if (fd_ < 0) return;
  try {
    send_all(fd_, encode_frame(Close, std::string("\x03\xe8", 2), true));
  } catch (const SocketError&) {
  }
  close_fd(fd_);
}

}  // namespace nilray::ws
