#pragma once

// Key generation by thresholding twin counts, half-code XOR verification,
// and the closed-form error analysis of the noisy channel.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tmcc/attacks.hpp"
#include "tmcc/bits.hpp"
#include "tmcc/channel.hpp"
#include "tmcc/detection.hpp"
#include "tmcc/photon_statistics.hpp"
#include "tmcc/transport.hpp"

namespace tmcc {

/// floor(<N>): counts at or below it read as 0, above it as 1.
std::uint32_t decision_threshold(Amplitude lambda);

constexpr std::uint8_t decide_bit(std::uint32_t count, std::uint32_t threshold) {
  return count <= threshold ? 0 : 1;
}

struct HalfCodes {
  Bits first_half;
  Bits second_half;
  Bits xor_code;
};

/// Splits the key at its midpoint and XORs the halves. Throws
/// std::invalid_argument for an empty or odd-length key.
HalfCodes xor_half_codes(std::span<const std::uint8_t> key);

struct VerificationOutcome {
  bool match = false;
  std::size_t differing_count = 0;
  // Positions within the half-code. Only the verifying party knows them; the
  // other side learns the count from the verdict message.
  std::vector<std::size_t> differing_positions;

  friend bool operator==(const VerificationOutcome&, const VerificationOutcome&) = default;
};

/// Alice's check: first_half XOR bob_xor must reproduce her second half.
/// Throws ProtocolViolation when bob_xor is not half the key length.
VerificationOutcome verify_keys(std::span<const std::uint8_t> alice_key,
                                std::span<const std::uint8_t> bob_xor);

/// Probability that a count reads as 0: the pmf summed up to the threshold.
double prob_zero(Amplitude lambda);

/// P_threshold / P(0): chance a 0 sits right at the threshold, where one
/// noise photon flips it.
double error_factor(Amplitude lambda);

/// epsilon * error_factor, the first-order rate of Bob reading 1 when Alice
/// reads 0.
double error_probability(Amplitude lambda, double epsilon);

/// Exact unconditional per-bit mismatch rate under the single-photon noise
/// model: 2 eps (1 - eps) P_threshold.
double mismatch_rate(Amplitude lambda, double epsilon);

/// Exact P(Bob reads 1 | Alice reads 0) under the same noise model.
double conditional_error_exact(Amplitude lambda, double epsilon);

struct SessionConfig {
  Amplitude lambda{2.0};
  double epsilon = 0.0;
  std::size_t key_bits = 1024;
  std::uint64_t seed = 1;
  double detection_significance = kDefaultSignificance;
  AttackModel attack;

  /// Throws std::invalid_argument on an odd, zero, or oversized key length,
  /// or out-of-range probabilities.
  void validate() const;
};

struct BitRecord {
  std::uint64_t index = 0;
  CountPair counts;
  std::uint8_t alice_bit = 0;
  std::uint8_t bob_bit = 0;
  std::uint32_t threshold = 0;

  friend bool operator==(const BitRecord&, const BitRecord&) = default;
};

enum class AbortReason { transport, protocol_violation, verification, eavesdropping_suspected };

std::string to_string(AbortReason reason);

struct SessionOutcome {
  bool accepted = false;
  std::optional<AbortReason> reason;
  std::string detail;
};

struct SessionTranscript {
  SessionConfig config;
  SessionId session_id{};
  std::uint32_t threshold = 0;
  std::vector<BitRecord> records;
  Bits alice_key;
  Bits bob_key;
  std::optional<VerificationOutcome> verification;
  std::optional<DetectionReport> alice_detection;
  std::optional<DetectionReport> bob_detection;
  SessionOutcome outcome;
};

/// Deterministic session identifier derived from the shared source seed.
SessionId session_id_for_seed(std::uint64_t seed);

/// Draws the per-bit records both parties observe: twin draw, optional
/// eavesdropper on Bob's mode, detector noise, bit decisions.
std::vector<BitRecord> simulate_records(const SessionConfig& config);

/// Expected count law at one detector: TMCC pmf plus the noise photon.
PhotonDistribution expected_observation_law(const SessionConfig& config);

/// Distribution test on one party's observed counts. Returns nullopt when the
/// sample is too small to test (fewer than 50 bits or one populated bin).
std::optional<DetectionReport> detect_on_counts(const SessionConfig& config,
                                                std::span<const std::uint32_t> counts);

}  // namespace tmcc
