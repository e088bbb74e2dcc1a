#include "tmcc/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tmcc/detection.hpp"

namespace tmcc {
namespace {

std::vector<CountPair> draw(TmccSource& source, const NoiseModel& noise, std::size_t n) {
  std::vector<CountPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pairs.push_back(source.draw_pair(noise));
  return pairs;
}

TEST(NoiseModelTest, RangeChecked) {
  EXPECT_NO_THROW(NoiseModel(0.0));
  EXPECT_NO_THROW(NoiseModel(1.0));
  EXPECT_THROW(NoiseModel(-0.01), std::domain_error);
  EXPECT_THROW(NoiseModel(1.01), std::domain_error);
  EXPECT_THROW(NoiseModel(NAN), std::domain_error);
}

TEST(DrawPairTest, VacuumWithoutNoise) {
  TmccSource source(Amplitude(0.0), 7);
  for (int i = 0; i < 1000; ++i) {
    const auto p = source.draw_pair(NoiseModel(0.0));
    EXPECT_EQ(p.alice_count, 0u);
    EXPECT_EQ(p.bob_count, 0u);
  }
}

TEST(DrawPairTest, NoiselessPairsAreTwins) {
  for (double lambda : {0.5, 2.0, 6.0}) {
    TmccSource source(Amplitude(lambda), 99);
    for (const auto& p : draw(source, NoiseModel(0.0), 5000)) {
      EXPECT_EQ(p.alice_count, p.bob_count);
      EXPECT_EQ(p.alice_count, p.base_count);
    }
  }
}

TEST(DrawPairTest, CountsDecomposeIntoBasePlusNoise) {
  TmccSource source(Amplitude(2.0), 3);
  for (const auto& p : draw(source, NoiseModel(0.3), 5000)) {
    EXPECT_EQ(p.alice_count, p.base_count + p.alice_noise);
    EXPECT_EQ(p.bob_count, p.bob_base + p.bob_noise);
    EXPECT_EQ(p.bob_base, p.base_count);
    EXPECT_LE(p.alice_noise, 1);
    EXPECT_LE(p.bob_noise, 1);
  }
}

TEST(DrawPairTest, DeterministicAndAddressable) {
  TmccSource a(Amplitude(2.0), 12345);
  TmccSource b(Amplitude(2.0), 12345);
  const NoiseModel noise(0.1);
  const auto first = draw(a, noise, 200);
  EXPECT_EQ(first, draw(b, noise, 200));
  EXPECT_EQ(a.draw_counter(), 200u);
  // Random access reproduces the sequential stream.
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(a.pair_at(i, noise), first[i]);

  TmccSource c(Amplitude(2.0), 54321);
  EXPECT_NE(first, draw(c, noise, 200));
}

// Pinned from an independent reimplementation of the generator and inverse CDF.
TEST(DrawPairTest, StreamIsPinned) {
  TmccSource source(Amplitude(2.0), 1);
  std::vector<std::uint32_t> bases;
  for (int i = 0; i < 12; ++i) bases.push_back(source.draw_pair(NoiseModel(0.0)).base_count);
  const std::vector<std::uint32_t> expected = {2, 1, 3, 2, 2, 2, 2, 0, 0, 0, 2, 0};
  EXPECT_EQ(bases, expected);
}

TEST(DrawPairTest, NoisyDisagreementRate) {
  // Pairs differ iff exactly one party got a noise photon: 2 eps (1 - eps).
  TmccSource source(Amplitude(2.0), 2024);
  constexpr std::size_t n = 100'000;
  std::size_t differ = 0;
  for (const auto& p : draw(source, NoiseModel(0.1), n)) differ += p.alice_count != p.bob_count;
  const double expected = 2 * 0.1 * 0.9;
  const double se = std::sqrt(expected * (1 - expected) / n);
  EXPECT_NEAR(double(differ) / n, expected, 5 * se);
}

TEST(CorrelationTest, HandComputedCovariance) {
  const std::vector<CountPair> pairs = {CountPair::make(0, false, false),
                                        CountPair::make(1, false, false)};
  const auto c = empirical_correlation(pairs);
  EXPECT_DOUBLE_EQ(c.g_ab, 0.5);
  ASSERT_TRUE(c.rho_ab);
  EXPECT_EQ(*c.rho_ab, 1.0);
}

TEST(CorrelationTest, ErrorsAndUndefinedRho) {
  const std::vector<CountPair> one = {CountPair::make(3, false, false)};
  EXPECT_THROW(empirical_correlation(one), std::invalid_argument);

  const std::vector<CountPair> flat = {CountPair::make(2, false, false),
                                       CountPair::make(2, false, false),
                                       CountPair::make(2, false, true)};
  const auto c = empirical_correlation(flat);
  EXPECT_FALSE(c.rho_ab);
  EXPECT_EQ(c.g_ab, 0.0);
}

TEST(CorrelationTest, NoiselessIsExactlyOne) {
  TmccSource source(Amplitude(2.0), 77);
  const auto c = empirical_correlation(draw(source, NoiseModel(0.0), 10'000));
  ASSERT_TRUE(c.rho_ab);
  EXPECT_EQ(*c.rho_ab, 1.0);
}

TEST(CorrelationTest, IndependentSourcesUncorrelated) {
  TmccSource alice(Amplitude(2.0), 1001);
  TmccSource bob(Amplitude(2.0), 2002);
  constexpr std::size_t n = 10'000;
  std::vector<CountPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    CountPair p = alice.draw_pair(NoiseModel(0.0));
    p = p.with_bob_base(bob.draw_pair(NoiseModel(0.0)).base_count);
    pairs.push_back(p);
  }
  const auto c = empirical_correlation(pairs);
  ASSERT_TRUE(c.rho_ab);
  EXPECT_LT(std::abs(*c.rho_ab), 5.0 / std::sqrt(double(n)));
}

TEST(CorrelationTest, NoiseAttenuatesCorrelation) {
  // rho decreases with eps; compare on a common seed so the twins are shared.
  std::vector<double> rhos;
  for (double eps : {0.2, 0.1, 0.05, 0.01}) {
    TmccSource source(Amplitude(1.0), 4242);
    const auto c = empirical_correlation(draw(source, NoiseModel(eps), 10'000));
    ASSERT_TRUE(c.rho_ab);
    EXPECT_LT(*c.rho_ab, 1.0) << eps;
    rhos.push_back(*c.rho_ab);
  }
  for (std::size_t i = 1; i < rhos.size(); ++i) EXPECT_GT(rhos[i], rhos[i - 1]);
}

TEST(ChannelMarginalTest, NoiselessMarginalFitsTmccPmf) {
  TmccSource source(Amplitude(2.0), 31337);
  std::vector<std::uint32_t> alice, bob;
  for (const auto& p : draw(source, NoiseModel(0.0), 10'000)) {
    alice.push_back(p.alice_count);
    bob.push_back(p.bob_count);
  }
  EXPECT_TRUE(fit_test(alice, source.distribution(), 0.01).passed);
  EXPECT_TRUE(fit_test(bob, source.distribution(), 0.01).passed);
}

TEST(ChannelMarginalTest, NoisyMarginalIsConvolution) {
  const auto base = tmcc_pmf(Amplitude(1.0));
  const auto noisy = noisy_marginal(base, NoiseModel(0.25));
  EXPECT_EQ(noisy.n_max(), base.n_max() + 1);
  EXPECT_NEAR(noisy.probability(0), 0.75 * base.probability(0), 1e-15);
  EXPECT_NEAR(noisy.probability(1), 0.75 * base.probability(1) + 0.25 * base.probability(0), 1e-15);
  EXPECT_NEAR(noisy.mean(), base.mean() + 0.25, 1e-12);

  TmccSource source(Amplitude(1.0), 8);
  std::vector<std::uint32_t> alice;
  for (const auto& p : draw(source, NoiseModel(0.25), 10'000)) alice.push_back(p.alice_count);
  EXPECT_TRUE(fit_test(alice, noisy, 0.01).passed);
}

}  // namespace
}  // namespace tmcc
