#include "tmcc/transport.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>

namespace tmcc {

namespace {

void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
  return v;
}

std::uint64_t get_u64(std::span<const std::uint8_t> in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

bool valid_kind(std::uint8_t tag) { return tag >= 1 && tag <= 4; }

}  // namespace

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::hello: return "hello";
    case MessageKind::xor_halfcode: return "xor_halfcode";
    case MessageKind::verdict: return "verdict";
    case MessageKind::abort: return "abort";
  }
  return "unknown";
}

Bytes encode_frame(const PublicMessage& message) {
  const std::size_t body = kFrameHeaderSize - 4 + message.payload.size();
  if (body + 4 > kMaxFrameSize) throw ProtocolViolation("frame exceeds maximum size");
  Bytes out;
  out.reserve(body + 4);
  put_u32(out, static_cast<std::uint32_t>(body));
  out.push_back(static_cast<std::uint8_t>(message.kind));
  out.insert(out.end(), message.session_id.begin(), message.session_id.end());
  put_u64(out, message.sequence_number);
  out.insert(out.end(), message.payload.begin(), message.payload.end());
  return out;
}

PublicMessage decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderSize) throw ProtocolViolation("frame shorter than its header");
  const std::uint32_t length = get_u32(frame);
  if (length + 4ull != frame.size()) throw ProtocolViolation("frame length prefix does not match");
  if (!valid_kind(frame[4])) throw ProtocolViolation("unknown message kind");

  PublicMessage message;
  message.kind = static_cast<MessageKind>(frame[4]);
  std::copy(frame.begin() + 5, frame.begin() + 21, message.session_id.begin());
  message.sequence_number = get_u64(frame.subspan(21));
  message.payload.assign(frame.begin() + kFrameHeaderSize, frame.end());
  return message;
}

Bytes encode_bits(const Bits& bits) {
  Bytes out;
  out.reserve(4 + (bits.size() + 7) / 8);
  put_u32(out, static_cast<std::uint32_t>(bits.size()));
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) acc |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    if (i % 8 == 7) {
      out.push_back(acc);
      acc = 0;
    }
  }
  if (bits.size() % 8 != 0) out.push_back(acc);
  return out;
}

Bits decode_bits(std::span<const std::uint8_t> payload) {
  if (payload.size() < 4) throw ProtocolViolation("bit string missing its length");
  const std::uint32_t count = get_u32(payload);
  if (payload.size() != 4 + (static_cast<std::size_t>(count) + 7) / 8) {
    throw ProtocolViolation("bit string length does not match its payload");
  }
  Bits bits(count);
  for (std::size_t i = 0; i < count; ++i) {
    bits[i] = (payload[4 + i / 8] >> (7 - i % 8)) & 1u;
  }
  return bits;
}

Bytes encode_hello(const HelloPayload& hello) {
  Bytes out;
  put_u32(out, hello.key_bits);
  return out;
}

HelloPayload decode_hello(std::span<const std::uint8_t> payload) {
  if (payload.size() != 4) throw ProtocolViolation("malformed hello payload");
  return {get_u32(payload)};
}

// u8 status (0 match, 1 mismatch), u32 BE differing count, u8 distribution
// test (1 passed, 0 rejected).
Bytes encode_verdict(const VerdictPayload& verdict) {
  Bytes out;
  out.push_back(verdict.match ? 0 : 1);
  put_u32(out, verdict.differing_count);
  out.push_back(verdict.distribution_passed ? 1 : 0);
  return out;
}

VerdictPayload decode_verdict(std::span<const std::uint8_t> payload) {
  if (payload.size() != 6 || payload[0] > 1 || payload[5] > 1) {
    throw ProtocolViolation("malformed verdict payload");
  }
  return {payload[0] == 0, get_u32(payload.subspan(1)), payload[5] == 1};
}

namespace {

struct LoopbackState {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<Bytes> queues[2];
  bool closed[2] = {false, false};
};

class LoopbackEndpoint final : public FrameTransport {
 public:
  LoopbackEndpoint(std::shared_ptr<LoopbackState> state, int side)
      : state_(std::move(state)), side_(side) {}

  ~LoopbackEndpoint() override {
    std::lock_guard lock(state_->mutex);
    state_->closed[side_] = true;
    state_->ready.notify_all();
  }

  void write_frame(std::span<const std::uint8_t> frame) override {
    std::lock_guard lock(state_->mutex);
    if (state_->closed[1 - side_]) throw TransportError("loopback peer closed");
    state_->queues[1 - side_].emplace_back(frame.begin(), frame.end());
    state_->ready.notify_all();
  }

  Bytes read_frame() override {
    std::unique_lock lock(state_->mutex);
    auto& inbox = state_->queues[side_];
    const bool arrived = state_->ready.wait_for(lock, std::chrono::seconds(30), [&] {
      return !inbox.empty() || state_->closed[1 - side_];
    });
    if (!arrived || inbox.empty()) throw TransportError("loopback peer sent nothing");
    Bytes frame = std::move(inbox.front());
    inbox.pop_front();
    return frame;
  }

 private:
  std::shared_ptr<LoopbackState> state_;
  int side_;
};

}  // namespace

std::pair<std::unique_ptr<FrameTransport>, std::unique_ptr<FrameTransport>> make_loopback_pair() {
  auto state = std::make_shared<LoopbackState>();
  return {std::make_unique<LoopbackEndpoint>(state, 0), std::make_unique<LoopbackEndpoint>(state, 1)};
}

PublicMessage PublicChannel::make(MessageKind kind, Bytes payload) const {
  PublicMessage message;
  message.kind = kind;
  message.session_id = session_id_;
  message.sequence_number = last_sent_ ? *last_sent_ + 1 : 0;
  message.payload = std::move(payload);
  return message;
}

void PublicChannel::send(const PublicMessage& message) {
  if (message.session_id != session_id_) {
    throw ProtocolViolation("outgoing message belongs to another session");
  }
  if (last_sent_ && message.sequence_number <= *last_sent_) {
    throw ProtocolViolation("sequence number " + std::to_string(message.sequence_number) +
                            " does not advance past " + std::to_string(*last_sent_));
  }
  const bool control = message.kind == MessageKind::hello || message.kind == MessageKind::abort;
  if (!control && !established()) {
    throw ProtocolViolation("cannot send " + to_string(message.kind) + " before hello exchange");
  }
  transport_->write_frame(encode_frame(message));
  last_sent_ = message.sequence_number;
  if (message.kind == MessageKind::hello) hello_sent_ = true;
}

PublicMessage PublicChannel::receive() {
  PublicMessage message = decode_frame(transport_->read_frame());
  if (message.session_id != session_id_) {
    throw ProtocolViolation("incoming message belongs to another session");
  }
  if (last_received_ && message.sequence_number <= *last_received_) {
    throw ProtocolViolation("incoming sequence number " + std::to_string(message.sequence_number) +
                            " does not advance past " + std::to_string(*last_received_));
  }
  last_received_ = message.sequence_number;
  const bool control = message.kind == MessageKind::hello || message.kind == MessageKind::abort;
  if (!control && !established()) {
    throw ProtocolViolation("received " + to_string(message.kind) + " before hello exchange");
  }
  if (message.kind == MessageKind::hello) hello_received_ = true;
  return message;
}

PublicMessage PublicChannel::expect(MessageKind kind) {
  PublicMessage message = receive();
  if (message.kind == MessageKind::abort) {
    throw PeerAborted(std::string(message.payload.begin(), message.payload.end()));
  }
  if (message.kind != kind) {
    throw ProtocolViolation("expected " + to_string(kind) + ", received " + to_string(message.kind));
  }
  return message;
}

}  // namespace tmcc
