#include "tmcc/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tmcc/rng.hpp"
#include "tmcc/session.hpp"

namespace tmcc {
namespace {

Bits bits_of(const std::string& text) {
  Bits out;
  for (char c : text) out.push_back(c == '1');
  return out;
}

Bits random_key(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(seed);
  Bits key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = rng.bits(i, 0) & 1u;
  return key;
}

TEST(ThresholdTest, IntegerPartOfMean) {
  EXPECT_EQ(decision_threshold(Amplitude(0.0)), 0u);
  EXPECT_EQ(decision_threshold(Amplitude(1.0)), 0u);
  EXPECT_EQ(decision_threshold(Amplitude(2.0)), 1u);
  EXPECT_EQ(decision_threshold(Amplitude(4.0)), static_cast<std::uint32_t>(std::floor(oracle::kMeanAt4)));
  EXPECT_EQ(decision_threshold(Amplitude(4.0)), 3u);
}

TEST(DecideBitTest, TieReadsZero) {
  EXPECT_EQ(decide_bit(3, 3), 0);
  EXPECT_EQ(decide_bit(4, 3), 1);
  EXPECT_EQ(decide_bit(0, 0), 0);
  EXPECT_EQ(decide_bit(1, 0), 1);
}

TEST(HalfCodeTest, Examples) {
  EXPECT_EQ(xor_half_codes(bits_of("10100110")).xor_code, bits_of("1100"));
  EXPECT_EQ(xor_half_codes(bits_of("00000000")).xor_code, bits_of("0000"));
  const auto doubled = bits_of("1011010110");
  EXPECT_EQ(xor_half_codes(doubled).xor_code, bits_of("00000"));
  const auto codes = xor_half_codes(bits_of("10100110"));
  EXPECT_EQ(codes.first_half, bits_of("1010"));
  EXPECT_EQ(codes.second_half, bits_of("0110"));
  EXPECT_THROW(xor_half_codes(bits_of("101")), std::invalid_argument);
  EXPECT_THROW(xor_half_codes(Bits{}), std::invalid_argument);
}

TEST(VerifyKeysTest, Examples) {
  const auto key = bits_of("10100110");
  EXPECT_TRUE(verify_keys(key, xor_half_codes(key).xor_code).match);

  // Bob's first half differs at position 1.
  const auto bob = bits_of("11100110");
  const auto first = verify_keys(key, xor_half_codes(bob).xor_code);
  EXPECT_FALSE(first.match);
  EXPECT_EQ(first.differing_count, 1u);
  EXPECT_EQ(first.differing_positions, std::vector<std::size_t>{1});

  // Alice's second half differs at position 2 (index 6):
  // bob xor = 1010^0110 = 1100; alice first ^ bob xor = 0110 vs alice second 0100.
  const auto alice = bits_of("10100100");
  const auto second = verify_keys(alice, xor_half_codes(key).xor_code);
  EXPECT_FALSE(second.match);
  EXPECT_EQ(second.differing_positions, std::vector<std::size_t>{2});

  EXPECT_THROW(verify_keys(key, bits_of("101")), ProtocolViolation);
}

TEST(VerifyKeysTest, RoundTripProperty) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 2 * (1 + seed % 64);
    const auto key = random_key(n, seed);
    EXPECT_TRUE(verify_keys(key, xor_half_codes(key).xor_code).match) << seed;
  }
}

TEST(VerifyKeysTest, AnySingleFlipIsDetected) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto key = random_key(64, seed);
    for (std::size_t pos = 0; pos < key.size(); ++pos) {
      auto flipped = key;
      flipped[pos] ^= 1;
      // Flip on Bob's side.
      const auto by_bob = verify_keys(key, xor_half_codes(flipped).xor_code);
      EXPECT_FALSE(by_bob.match);
      EXPECT_EQ(by_bob.differing_count, 1u);
      // Flip on Alice's side.
      EXPECT_FALSE(verify_keys(flipped, xor_half_codes(key).xor_code).match);
    }
  }
}

TEST(ErrorAnalysisTest, ProbZero) {
  EXPECT_EQ(prob_zero(Amplitude(0.0)), 1.0);
  EXPECT_NEAR(prob_zero(Amplitude(1.0)), oracle::kP0At1, 1e-14);
  EXPECT_NEAR(prob_zero(Amplitude(4.0)), oracle::kProbZeroAt4, 1e-13);
  for (double lambda : {0.5, 2.0, 4.0, 7.5, 12.0}) {
    const auto dist = tmcc_pmf(Amplitude(lambda));
    double sum = 0.0;
    for (std::size_t n = 0; n <= decision_threshold(Amplitude(lambda)); ++n) sum += dist.probability(n);
    EXPECT_NEAR(prob_zero(Amplitude(lambda)), sum, 1e-12);
  }
}

TEST(ErrorAnalysisTest, ErrorFactor) {
  EXPECT_EQ(error_factor(Amplitude(0.0)), 1.0);
  EXPECT_DOUBLE_EQ(error_factor(Amplitude(1.0)), 1.0);
  EXPECT_NEAR(error_factor(Amplitude(4.0)), oracle::kErrorFactorAt4, 1e-13);
  EXPECT_LT(error_factor(Amplitude(6.0)), error_factor(Amplitude(3.0)));
  for (int lambda = 1; lambda <= 20; ++lambda) {
    const double f = error_factor(Amplitude(lambda));
    EXPECT_GT(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(ErrorAnalysisTest, ErrorProbability) {
  for (double lambda : {0.0, 1.0, 4.0}) EXPECT_EQ(error_probability(Amplitude(lambda), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(error_probability(Amplitude(0.0), 0.05), 0.05);
  EXPECT_DOUBLE_EQ(error_probability(Amplitude(4.0), 0.02), 0.02 * error_factor(Amplitude(4.0)));
  // The exact conditional rate differs from the first-order one by O(eps^2).
  for (double eps : {0.01, 0.05, 0.1}) {
    const double diff = conditional_error_exact(Amplitude(4.0), eps) - error_probability(Amplitude(4.0), eps);
    EXPECT_LE(std::abs(diff), eps * eps);
  }
}

TEST(ErrorAnalysisTest, MonteCarloConditionalError) {
  const Amplitude lambda(4.0);
  const double eps = 0.02;
  SessionConfig config;
  config.lambda = lambda;
  config.epsilon = eps;
  config.key_bits = 1'000'000;
  config.seed = 99;
  const auto records = simulate_records(config);
  std::size_t alice_zero = 0, flipped = 0, mismatched = 0;
  for (const auto& r : records) {
    if (r.alice_bit == 0) {
      ++alice_zero;
      flipped += r.bob_bit == 1;
    }
    if (r.alice_bit != r.bob_bit) {
      ++mismatched;
      // The only way to disagree: twin count at the threshold and exactly one noise photon.
      EXPECT_EQ(r.counts.base_count, r.threshold);
      EXPECT_EQ(r.counts.alice_noise + r.counts.bob_noise, 1);
    }
  }
  const double rate = double(flipped) / alice_zero;
  const double predicted = error_probability(lambda, eps);
  const double se = std::sqrt(predicted * (1 - predicted) / alice_zero);
  EXPECT_NEAR(rate, predicted, 5 * se + eps * eps);

  const double mismatch = mismatch_rate(lambda, eps);
  const double mse = std::sqrt(mismatch * (1 - mismatch) / records.size());
  EXPECT_NEAR(double(mismatched) / records.size(), mismatch, 5 * mse);
}

TEST(SessionConfigTest, Validation) {
  SessionConfig config;
  EXPECT_NO_THROW(config.validate());
  config.key_bits = 7;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.key_bits = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.key_bits = 8;
  config.epsilon = 1.5;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.epsilon = 0.0;
  config.detection_significance = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

TEST(RunSessionTest, NoiselessSessionAccepts) {
  SessionConfig config;
  config.lambda = Amplitude(2.0);
  config.key_bits = 1024;
  config.seed = 5;
  const auto t = run_session(config);
  EXPECT_TRUE(t.outcome.accepted) << t.outcome.detail;
  EXPECT_EQ(t.alice_key, t.bob_key);
  ASSERT_TRUE(t.verification);
  EXPECT_TRUE(t.verification->match);
  EXPECT_EQ(t.records.size(), 1024u);
  EXPECT_EQ(t.alice_key.size(), 1024u);
  ASSERT_TRUE(t.alice_detection && t.bob_detection);
  EXPECT_TRUE(t.alice_detection->passed);
  for (const auto& r : t.records) {
    EXPECT_EQ(r.alice_bit, decide_bit(r.counts.alice_count, r.threshold));
    EXPECT_EQ(r.bob_bit, decide_bit(r.counts.bob_count, r.threshold));
  }
}

TEST(RunSessionTest, VacuumTwoBitSession) {
  SessionConfig config;
  config.lambda = Amplitude(0.0);
  config.key_bits = 2;
  const auto t = run_session(config);
  EXPECT_EQ(t.alice_key, bits_of("00"));
  EXPECT_EQ(t.bob_key, bits_of("00"));
  EXPECT_TRUE(t.outcome.accepted);
  EXPECT_FALSE(t.alice_detection.has_value());  // too few bits to test
}

TEST(RunSessionTest, DeterministicGivenSeed) {
  SessionConfig config;
  config.epsilon = 0.05;
  config.seed = 31;
  const auto a = run_session(config);
  const auto b = run_session(config);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.outcome.accepted, b.outcome.accepted);
}

TEST(RunSessionTest, CloneAttackIsCaughtByDistributionTest) {
  SessionConfig config;
  config.key_bits = 4096;
  config.seed = 8;
  config.attack = AttackModel::clone(ResendLaw::poisson);
  const auto t = run_session(config);
  EXPECT_FALSE(t.outcome.accepted);
  EXPECT_EQ(t.outcome.reason, AbortReason::eavesdropping_suspected);
  ASSERT_TRUE(t.bob_detection);
  EXPECT_FALSE(t.bob_detection->passed);
  EXPECT_TRUE(t.alice_detection->passed);
}

TEST(RunSessionTest, BeamSplitBreaksCorrelation) {
  SessionConfig config;
  config.key_bits = 10'000;
  config.seed = 10;
  config.attack = AttackModel::beam_split(0.5);
  const auto t = run_session(config);
  EXPECT_FALSE(t.outcome.accepted);
  std::vector<CountPair> pairs;
  for (const auto& r : t.records) pairs.push_back(r.counts);
  const auto c = empirical_correlation(pairs);
  ASSERT_TRUE(c.rho_ab);
  EXPECT_LT(*c.rho_ab, 0.9);
}

TEST(RunSessionTest, NoiseCausesVerificationAbort) {
  SessionConfig config;
  config.epsilon = 0.1;
  config.key_bits = 1024;
  config.seed = 12;
  const auto t = run_session(config);
  EXPECT_NE(t.alice_key, t.bob_key);
  EXPECT_FALSE(t.outcome.accepted);
  EXPECT_EQ(t.outcome.reason, AbortReason::verification);
}

}  // namespace
}  // namespace tmcc
