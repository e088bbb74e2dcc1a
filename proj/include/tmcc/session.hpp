#pragma once

// A key-distribution session run as two party state machines that talk only
// through a PublicChannel. Each party derives its key from its own counts;
// the per-bit records come from the shared-seed source simulation, which
// stands in for the physical twin beam reaching both detectors.

#include <span>

#include "tmcc/protocol.hpp"
#include "tmcc/transport.hpp"

namespace tmcc {

/// Holds the verification data and answers. Steps: accept(), verify().
class AliceParty {
 public:
  AliceParty(const SessionConfig& config, std::span<const BitRecord> records,
             PublicChannel& channel);

  /// Receives Bob's hello and answers it.
  void accept();
  /// Receives the XOR half-code and Bob's test result, checks, replies.
  void verify();

  const Bits& key() const { return key_; }
  const std::optional<VerificationOutcome>& verification() const { return verification_; }
  bool own_test_passed() const { return !detection_ || detection_->passed; }
  bool peer_test_passed() const { return peer_passed_; }

 private:
  PublicChannel& channel_;
  Bits key_;
  std::optional<DetectionReport> detection_;
  std::optional<VerificationOutcome> verification_;
  bool peer_passed_ = true;
};

/// Sends the XOR half-code. Steps: open(), on_hello(), exchange(), conclude().
class BobParty {
 public:
  BobParty(const SessionConfig& config, std::span<const BitRecord> records,
           PublicChannel& channel);

  void open();
  void on_hello();
  void exchange();
  void conclude();

  const Bits& key() const { return key_; }
  const std::optional<VerificationOutcome>& verification() const { return verification_; }
  bool own_test_passed() const { return !detection_ || detection_->passed; }
  bool peer_test_passed() const { return peer_passed_; }

 private:
  PublicChannel& channel_;
  Bits key_;
  std::optional<DetectionReport> detection_;
  std::optional<VerificationOutcome> verification_;
  bool peer_passed_ = true;
};

/// Runs both parties in this thread over an in-process loopback.
SessionTranscript run_session(const SessionConfig& config);

/// Runs one end of a session over an already connected transport, e.g. a
/// TcpStream. Both ends produce the same transcript as run_session().
SessionTranscript run_alice(const SessionConfig& config, FrameTransport& transport);
SessionTranscript run_bob(const SessionConfig& config, FrameTransport& transport);

}  // namespace tmcc
