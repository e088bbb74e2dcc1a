#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>

#include "tmcc/transport.hpp"

namespace tmcc {

/// Connected TCP socket carrying length-prefixed frames.
class TcpStream final : public FrameTransport {
 public:
  /// Retries until the peer accepts or the timeout runs out; throws
  /// TransportError after that.
  static TcpStream connect(const std::string& host, std::uint16_t port,
                           std::chrono::milliseconds timeout = std::chrono::seconds(10));

  explicit TcpStream(int fd) : fd_(fd) {}
  TcpStream(TcpStream&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  TcpStream& operator=(TcpStream&& other) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;
  ~TcpStream() override;

  void write_frame(std::span<const std::uint8_t> frame) override;
  Bytes read_frame() override;

 private:
  void read_exact(std::uint8_t* dst, std::size_t size);
  int fd_ = -1;
};

class TcpListener {
 public:
  /// Port 0 binds an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  TcpListener(TcpListener&& other) noexcept : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  std::uint16_t port() const { return port_; }
  TcpStream accept(std::chrono::milliseconds timeout = std::chrono::seconds(30));

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Splits "host:port"; throws std::invalid_argument when malformed.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

}  // namespace tmcc
