#pragma once

// The classical public channel. Messages travel as length-prefixed frames:
//
//   u32 BE  length of everything after this field
//   u8      kind (1 hello, 2 xor_halfcode, 3 verdict, 4 abort)
//   16 B    session id
//   u64 BE  sequence number
//   ...     payload
//
// Bit strings inside payloads carry a u32 BE bit count followed by the bits
// packed most-significant-bit first, zero padded to a whole byte.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tmcc/bits.hpp"

namespace tmcc {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The peer sent an abort message; what() carries its reason.
class PeerAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MessageKind : std::uint8_t { hello = 1, xor_halfcode = 2, verdict = 3, abort = 4 };

using SessionId = std::array<std::uint8_t, 16>;
using Bytes = std::vector<std::uint8_t>;

struct PublicMessage {
  MessageKind kind = MessageKind::hello;
  SessionId session_id{};
  std::uint64_t sequence_number = 0;
  Bytes payload;

  friend bool operator==(const PublicMessage&, const PublicMessage&) = default;
};

inline constexpr std::size_t kFrameHeaderSize = 4 + 1 + 16 + 8;
inline constexpr std::size_t kMaxFrameSize = 64u << 20;

Bytes encode_frame(const PublicMessage& message);
/// Decodes one complete frame. Throws ProtocolViolation on malformed input.
PublicMessage decode_frame(std::span<const std::uint8_t> frame);

Bytes encode_bits(const Bits& bits);
Bits decode_bits(std::span<const std::uint8_t> payload);

struct HelloPayload {
  std::uint32_t key_bits = 0;
  friend bool operator==(const HelloPayload&, const HelloPayload&) = default;
};

/// Sender's view after the exchange: the XOR comparison (meaningful from
/// Alice) and the outcome of the sender's own distribution test.
struct VerdictPayload {
  bool match = false;
  std::uint32_t differing_count = 0;
  bool distribution_passed = true;
  friend bool operator==(const VerdictPayload&, const VerdictPayload&) = default;
};

Bytes encode_hello(const HelloPayload& hello);
HelloPayload decode_hello(std::span<const std::uint8_t> payload);
Bytes encode_verdict(const VerdictPayload& verdict);
VerdictPayload decode_verdict(std::span<const std::uint8_t> payload);

/// Moves whole frames between two endpoints, in order.
class FrameTransport {
 public:
  virtual ~FrameTransport() = default;
  virtual void write_frame(std::span<const std::uint8_t> frame) = 0;
  /// Blocks for the next frame; throws TransportError if the link is gone.
  virtual Bytes read_frame() = 0;
};

/// Two connected in-process endpoints. Safe to drive from one thread as long
/// as nothing reads before the matching write, or from two threads.
std::pair<std::unique_ptr<FrameTransport>, std::unique_ptr<FrameTransport>> make_loopback_pair();

/// One endpoint of a session over a FrameTransport. Enforces the session id,
/// strictly increasing sequence numbers in each direction, and that nothing
/// but hello travels before hellos have been exchanged both ways.
class PublicChannel {
 public:
  PublicChannel(FrameTransport& transport, SessionId session_id)
      : transport_(&transport), session_id_(session_id) {}

  const SessionId& session_id() const { return session_id_; }

  /// A message of the given kind carrying the next outgoing sequence number.
  PublicMessage make(MessageKind kind, Bytes payload) const;

  void send(const PublicMessage& message);
  PublicMessage receive();
  /// receive(), then ProtocolViolation unless the kind matches. An abort
  /// from the peer surfaces as PeerAborted.
  PublicMessage expect(MessageKind kind);

  bool established() const { return hello_sent_ && hello_received_; }

 private:
  FrameTransport* transport_;
  SessionId session_id_;
  std::optional<std::uint64_t> last_sent_;
  std::optional<std::uint64_t> last_received_;
  bool hello_sent_ = false;
  bool hello_received_ = false;
};

std::string to_string(MessageKind kind);

}  // namespace tmcc
