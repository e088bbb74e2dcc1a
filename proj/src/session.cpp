#include "tmcc/session.hpp"

namespace tmcc {

namespace {

std::vector<std::uint32_t> alice_counts(std::span<const BitRecord> records) {
  std::vector<std::uint32_t> counts;
  counts.reserve(records.size());
  for (const auto& r : records) counts.push_back(r.counts.alice_count);
  return counts;
}

std::vector<std::uint32_t> bob_counts(std::span<const BitRecord> records) {
  std::vector<std::uint32_t> counts;
  counts.reserve(records.size());
  for (const auto& r : records) counts.push_back(r.counts.bob_count);
  return counts;
}

[[noreturn]] void abort_and_throw(PublicChannel& channel, const std::string& reason) {
  try {
    channel.send(channel.make(MessageKind::abort, Bytes(reason.begin(), reason.end())));
  } catch (const std::exception&) {
    // The link may already be gone; the local error still stands.
  }
  throw ProtocolViolation(reason);
}

SessionOutcome decide_outcome(bool alice_passed, bool bob_passed,
                              const std::optional<VerificationOutcome>& verification) {
  SessionOutcome outcome;
  if (!alice_passed || !bob_passed) {
    outcome.reason = AbortReason::eavesdropping_suspected;
    outcome.detail = std::string("count distribution rejected by ") +
                     (!alice_passed && !bob_passed ? "both parties"
                      : !alice_passed              ? "Alice"
                                                   : "Bob");
  } else if (!verification || !verification->match) {
    outcome.reason = AbortReason::verification;
    outcome.detail = verification ? std::to_string(verification->differing_count) +
                                        " half-code positions differ"
                                  : "no verification result";
  } else {
    outcome.accepted = true;
  }
  return outcome;
}

SessionTranscript base_transcript(const SessionConfig& config, std::vector<BitRecord> records) {
  SessionTranscript t;
  t.config = config;
  t.session_id = session_id_for_seed(config.seed);
  t.threshold = decision_threshold(config.lambda);
  t.records = std::move(records);
  for (const auto& r : t.records) {
    t.alice_key.push_back(r.alice_bit);
    t.bob_key.push_back(r.bob_bit);
  }
  // Each report is a function of that party's counts alone; both ends of a
  // networked session hold the same records and so the same reports.
  t.alice_detection = detect_on_counts(config, alice_counts(t.records));
  t.bob_detection = detect_on_counts(config, bob_counts(t.records));
  return t;
}

SessionOutcome failure(AbortReason reason, const std::exception& e) {
  SessionOutcome outcome;
  outcome.reason = reason;
  outcome.detail = e.what();
  return outcome;
}

template <class Body>
SessionOutcome guarded(Body body) {
  try {
    return body();
  } catch (const TransportError& e) {
    return failure(AbortReason::transport, e);
  } catch (const ProtocolViolation& e) {
    return failure(AbortReason::protocol_violation, e);
  } catch (const PeerAborted& e) {
    return failure(AbortReason::protocol_violation, e);
  }
}

}  // namespace

AliceParty::AliceParty(const SessionConfig& config, std::span<const BitRecord> records,
                       PublicChannel& channel)
    : channel_(channel) {
  for (const auto& r : records) key_.push_back(r.alice_bit);
  detection_ = detect_on_counts(config, alice_counts(records));
}

void AliceParty::accept() {
  const auto hello = decode_hello(channel_.expect(MessageKind::hello).payload);
  if (hello.key_bits != key_.size()) {
    abort_and_throw(channel_, "key length mismatch: Bob has " +
                                  std::to_string(hello.key_bits) + " bits, Alice " +
                                  std::to_string(key_.size()));
  }
  channel_.send(channel_.make(MessageKind::hello,
                              encode_hello({static_cast<std::uint32_t>(key_.size())})));
}

void AliceParty::verify() {
  const Bits bob_xor = decode_bits(channel_.expect(MessageKind::xor_halfcode).payload);
  peer_passed_ = decode_verdict(channel_.expect(MessageKind::verdict).payload).distribution_passed;
  verification_ = verify_keys(key_, bob_xor);
  VerdictPayload verdict;
  verdict.match = verification_->match;
  verdict.differing_count = static_cast<std::uint32_t>(verification_->differing_count);
  verdict.distribution_passed = own_test_passed();
  channel_.send(channel_.make(MessageKind::verdict, encode_verdict(verdict)));
}

BobParty::BobParty(const SessionConfig& config, std::span<const BitRecord> records,
                   PublicChannel& channel)
    : channel_(channel) {
  for (const auto& r : records) key_.push_back(r.bob_bit);
  detection_ = detect_on_counts(config, bob_counts(records));
}

void BobParty::open() {
  channel_.send(channel_.make(MessageKind::hello,
                              encode_hello({static_cast<std::uint32_t>(key_.size())})));
}

void BobParty::on_hello() {
  const auto hello = decode_hello(channel_.expect(MessageKind::hello).payload);
  if (hello.key_bits != key_.size()) {
    abort_and_throw(channel_, "key length mismatch in hello reply");
  }
}

void BobParty::exchange() {
  channel_.send(channel_.make(MessageKind::xor_halfcode,
                              encode_bits(xor_half_codes(key_).xor_code)));
  VerdictPayload own;
  own.match = true;
  own.distribution_passed = own_test_passed();
  channel_.send(channel_.make(MessageKind::verdict, encode_verdict(own)));
}

void BobParty::conclude() {
  const auto verdict = decode_verdict(channel_.expect(MessageKind::verdict).payload);
  peer_passed_ = verdict.distribution_passed;
  verification_ = VerificationOutcome{verdict.match, verdict.differing_count, {}};
}

SessionTranscript run_session(const SessionConfig& config) {
  SessionTranscript t = base_transcript(config, simulate_records(config));
  auto [alice_end, bob_end] = make_loopback_pair();
  PublicChannel alice_channel(*alice_end, t.session_id);
  PublicChannel bob_channel(*bob_end, t.session_id);
  AliceParty alice(config, t.records, alice_channel);
  BobParty bob(config, t.records, bob_channel);

  t.outcome = guarded([&] {
    bob.open();
    alice.accept();
    bob.on_hello();
    bob.exchange();
    alice.verify();
    bob.conclude();
    t.verification = alice.verification();
    return decide_outcome(alice.own_test_passed(), alice.peer_test_passed(), t.verification);
  });
  return t;
}

SessionTranscript run_alice(const SessionConfig& config, FrameTransport& transport) {
  SessionTranscript t = base_transcript(config, simulate_records(config));
  PublicChannel channel(transport, t.session_id);
  AliceParty alice(config, t.records, channel);
  t.outcome = guarded([&] {
    alice.accept();
    alice.verify();
    t.verification = alice.verification();
    return decide_outcome(alice.own_test_passed(), alice.peer_test_passed(), t.verification);
  });
  return t;
}

SessionTranscript run_bob(const SessionConfig& config, FrameTransport& transport) {
  SessionTranscript t = base_transcript(config, simulate_records(config));
  PublicChannel channel(transport, t.session_id);
  BobParty bob(config, t.records, channel);
  t.outcome = guarded([&] {
    bob.open();
    bob.on_hello();
    bob.exchange();
    bob.conclude();
    t.verification = bob.verification();
    return decide_outcome(bob.peer_test_passed(), bob.own_test_passed(), t.verification);
  });
  return t;
}

}  // namespace tmcc
