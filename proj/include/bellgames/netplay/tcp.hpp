#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

// Minimal line-oriented TCP plumbing for loopback/LAN matches. Reads are
// deadline-based (poll + buffered recv); writes are blocking send loops.

namespace bellgames::netplay {

using Clock = std::chrono::steady_clock;

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { reset(); }

  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

enum class ReadStatus { Line, Timeout, Closed };

struct ReadResult {
  ReadStatus status = ReadStatus::Closed;
  std::string line;
};

class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(Socket sock) : sock_(std::move(sock)) {
    int one = 1;
    ::setsockopt(sock_.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  static TcpStream connect(const std::string& host, int port) {
    Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock.valid()) throw NetError("socket: " + std::string(std::strerror(errno)));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
      throw NetError("connect: bad address " + host);
    if (::connect(sock.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      throw NetError("connect " + host + ":" + std::to_string(port) + ": " +
                     std::strerror(errno));
    return TcpStream(std::move(sock));
  }

  bool valid() const { return sock_.valid(); }
  void close() { sock_.reset(); }

  // Sends `line` plus a terminating newline. Returns false if the peer is gone.
  bool send_line(const std::string& line) {
    std::string framed = line;
    framed.push_back('\n');
    std::size_t sent = 0;
    while (sent < framed.size()) {
      const ssize_t n =
          ::send(sock_.fd(), framed.data() + sent, framed.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  // Next newline-terminated line (without the newline), waiting until
  // `deadline` at most.
  ReadResult read_line(Clock::time_point deadline) {
    for (;;) {
      if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
        ReadResult r{ReadStatus::Line, buffer_.substr(0, pos)};
        buffer_.erase(0, pos + 1);
        return r;
      }
      if (closed_) return {ReadStatus::Closed, {}};
      const auto now = Clock::now();
      if (now >= deadline) return {ReadStatus::Timeout, {}};
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd pfd{sock_.fd(), POLLIN, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 100)));
      if (pr < 0 && errno != EINTR) return {ReadStatus::Closed, {}};
      if (pr <= 0) continue;
      char chunk[4096];
      const ssize_t n = ::recv(sock_.fd(), chunk, sizeof(chunk), 0);
      if (n <= 0) {
        closed_ = true;  // flush whatever is buffered first
        continue;
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  ReadResult read_line_for(int timeout_ms) {
    return read_line(Clock::now() + std::chrono::milliseconds(timeout_ms));
  }

 private:
  Socket sock_;
  std::string buffer_;
  bool closed_ = false;
};

class TcpListener {
 public:
  TcpListener(const std::string& host, int port) {
    sock_ = Socket(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock_.valid()) throw NetError("socket: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(sock_.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
      throw NetError("listen: bad address " + host);
    if (::bind(sock_.fd(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
      throw NetError("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    if (::listen(sock_.fd(), 8) != 0) throw NetError("listen: " + std::string(std::strerror(errno)));
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(sock_.fd(), reinterpret_cast<sockaddr*>(&bound), &len);
    port_ = ntohs(bound.sin_port);
  }

  int port() const { return port_; }

  // Accepts one connection or returns nullopt at the deadline.
  std::optional<TcpStream> accept(Clock::time_point deadline) {
    for (;;) {
      const auto now = Clock::now();
      if (now >= deadline) return std::nullopt;
      const auto remaining =
          std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      pollfd pfd{sock_.fd(), POLLIN, 0};
      const int pr = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining, 100)));
      if (pr < 0 && errno != EINTR) throw NetError("poll: " + std::string(std::strerror(errno)));
      if (pr <= 0) continue;
      const int fd = ::accept(sock_.fd(), nullptr, nullptr);
      if (fd < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        throw NetError("accept: " + std::string(std::strerror(errno)));
      }
      return TcpStream(Socket(fd));
    }
  }

 private:
  Socket sock_;
  int port_ = 0;
};

}  // namespace bellgames::netplay
