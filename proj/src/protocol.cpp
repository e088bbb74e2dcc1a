#include "tmcc/protocol.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmcc {

std::uint32_t decision_threshold(Amplitude lambda) {
  return static_cast<std::uint32_t>(std::floor(mean_photons(lambda)));
}

HalfCodes xor_half_codes(std::span<const std::uint8_t> key) {
  if (key.empty() || key.size() % 2 != 0) {
    throw std::invalid_argument("half-code split needs a nonempty even-length key, got " +
                                std::to_string(key.size()) + " bits");
  }
  const std::size_t half = key.size() / 2;
  HalfCodes codes;
  codes.first_half.assign(key.begin(), key.begin() + half);
  codes.second_half.assign(key.begin() + half, key.end());
  codes.xor_code.resize(half);
  for (std::size_t i = 0; i < half; ++i) {
    codes.xor_code[i] = codes.first_half[i] ^ codes.second_half[i];
  }
  return codes;
}

VerificationOutcome verify_keys(std::span<const std::uint8_t> alice_key,
                                std::span<const std::uint8_t> bob_xor) {
  if (alice_key.size() % 2 != 0 || bob_xor.size() * 2 != alice_key.size()) {
    throw ProtocolViolation("XOR half-code has " + std::to_string(bob_xor.size()) +
                            " bits for a key of " + std::to_string(alice_key.size()));
  }
  const std::size_t half = bob_xor.size();
  VerificationOutcome outcome;
  for (std::size_t i = 0; i < half; ++i) {
    const std::uint8_t decoded = alice_key[i] ^ bob_xor[i];
    if (decoded != alice_key[half + i]) outcome.differing_positions.push_back(i);
  }
  outcome.differing_count = outcome.differing_positions.size();
  outcome.match = outcome.differing_count == 0;
  return outcome;
}

double prob_zero(Amplitude lambda) {
  return tmcc_pmf(lambda).cdf()[decision_threshold(lambda)];
}

double error_factor(Amplitude lambda) {
  const auto dist = tmcc_pmf(lambda);
  const auto threshold = decision_threshold(lambda);
  return dist.probability(threshold) / dist.cdf()[threshold];
}

double error_probability(Amplitude lambda, double epsilon) {
  return epsilon * error_factor(lambda);
}

double mismatch_rate(Amplitude lambda, double epsilon) {
  const auto dist = tmcc_pmf(lambda);
  return 2.0 * epsilon * (1.0 - epsilon) * dist.probability(decision_threshold(lambda));
}

double conditional_error_exact(Amplitude lambda, double epsilon) {
  const auto dist = tmcc_pmf(lambda);
  const auto threshold = decision_threshold(lambda);
  const double at = dist.probability(threshold);
  const double zero = dist.cdf()[threshold];
  // Alice reads 0 unless her count sits at the threshold and gains a photon.
  return epsilon * (1.0 - epsilon) * at / (zero - epsilon * at);
}

std::string to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::transport: return "transport";
    case AbortReason::protocol_violation: return "protocol-violation";
    case AbortReason::verification: return "verification";
    case AbortReason::eavesdropping_suspected: return "eavesdropping-suspected";
  }
  return "unknown";
}

void SessionConfig::validate() const {
  if (key_bits < 2 || key_bits % 2 != 0) {
    throw std::invalid_argument("key length must be an even number of at least 2 bits, got " +
                                std::to_string(key_bits));
  }
  if (key_bits > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("key length does not fit the wire format");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("noise factor must lie in [0, 1]");
  }
  if (!(detection_significance > 0.0 && detection_significance <= 0.5)) {
    throw std::invalid_argument("detection significance must lie in (0, 0.5]");
  }
}

SessionId session_id_for_seed(std::uint64_t seed) {
  const CounterRng rng(seed);
  SessionId id{};
  const std::uint64_t hi = rng.bits(std::numeric_limits<std::uint64_t>::max(), 0x5e55);
  const std::uint64_t lo = rng.bits(std::numeric_limits<std::uint64_t>::max(), 0x5e56);
  for (int i = 0; i < 8; ++i) {
    id[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    id[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  return id;
}

std::vector<BitRecord> simulate_records(const SessionConfig& config) {
  config.validate();
  const TmccSource source(config.lambda, config.seed);
  const NoiseModel noise(config.epsilon);
  Eavesdropper eve(config.attack);
  const std::uint32_t threshold = decision_threshold(config.lambda);

  std::vector<BitRecord> records(config.key_bits);
  for (std::size_t i = 0; i < config.key_bits; ++i) {
    CountPair pair = source.pair_at(i, noise);
    if (config.attack.active()) {
      pair = eve.intercept(pair, source.variate(i, DrawLane::transit));
    }
    auto& rec = records[i];
    rec.index = i;
    rec.counts = pair;
    rec.threshold = threshold;
    rec.alice_bit = decide_bit(pair.alice_count, threshold);
    rec.bob_bit = decide_bit(pair.bob_count, threshold);
  }
  return records;
}

PhotonDistribution expected_observation_law(const SessionConfig& config) {
  return noisy_marginal(tmcc_pmf(config.lambda), NoiseModel(config.epsilon));
}

std::optional<DetectionReport> detect_on_counts(const SessionConfig& config,
                                                std::span<const std::uint32_t> counts) {
  try {
    return fit_test(counts, expected_observation_law(config), config.detection_significance);
  } catch (const InsufficientData&) {
    return std::nullopt;
  }
}

}  // namespace tmcc
