#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "qia/wire.hpp"

namespace qia {

/// Reliable, ordered byte stream. read_some returns 0 at end of stream.
/// One reader thread and one writer thread may use a stream concurrently.
class ByteStream {
 public:
  virtual ~ByteStream() = default;
  virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
  virtual std::size_t read_some(std::span<std::uint8_t> buffer) = 0;
  /// Ends the stream in both directions and unblocks pending reads.
  virtual void shutdown() = 0;
};

class TcpStream final : public ByteStream {
 public:
  explicit TcpStream(int fd) noexcept : fd_(fd) {}
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;
  TcpStream(TcpStream&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  ~TcpStream() override;

  static TcpStream connect(const std::string& host, std::uint16_t port);

  void write_all(std::span<const std::uint8_t> bytes) override;
  std::size_t read_some(std::span<std::uint8_t> buffer) override;
  void shutdown() override;

 private:
  int fd_;
};

class TcpListener {
 public:
  /// Port 0 binds an ephemeral port; see port().
  TcpListener(const std::string& host, std::uint16_t port);
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  std::uint16_t port() const noexcept { return port_; }
  TcpStream accept();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

/// Two connected in-memory endpoints.
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>> make_memory_duplex();

/// Length-prefixed frames over a byte stream.
class FrameChannel {
 public:
  explicit FrameChannel(ByteStream& stream) : stream_(stream) {}

  void send_frame(const Frame& f) { stream_.write_all(encode_frame(f)); }
  void send(const Message& m) { send_frame(to_frame(m)); }
  /// nullopt on a clean end of stream at a frame boundary; FramingError on a
  /// stream that ends mid-frame or carries a malformed frame.
  std::optional<Frame> recv_frame();
  /// Like recv_frame but treats end of stream as a TransportError.
  Message recv();

  ByteStream& stream() noexcept { return stream_; }

 private:
  bool read_exact(std::span<std::uint8_t> out);

  ByteStream& stream_;
};

}  // namespace qia
