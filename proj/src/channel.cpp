#include "tmcc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tmcc {

NoiseModel::NoiseModel(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("noise factor must lie in [0, 1]");
  }
}

CountPair CountPair::make(std::uint32_t base, bool alice_noise, bool bob_noise) {
  CountPair pair;
  pair.base_count = base;
  pair.bob_base = base;
  pair.alice_noise = alice_noise ? 1 : 0;
  pair.bob_noise = bob_noise ? 1 : 0;
  pair.alice_count = base + pair.alice_noise;
  pair.bob_count = base + pair.bob_noise;
  return pair;
}

CountPair CountPair::with_bob_base(std::uint32_t value) const {
  CountPair pair = *this;
  pair.bob_base = value;
  pair.bob_count = value + bob_noise;
  return pair;
}

TmccSource::TmccSource(Amplitude lambda, std::uint64_t seed)
    : lambda_(lambda), distribution_(tmcc_pmf(lambda)), rng_(seed) {}

CountPair TmccSource::draw_pair(const NoiseModel& noise) {
  return pair_at(counter_++, noise);
}

CountPair TmccSource::pair_at(std::uint64_t index, const NoiseModel& noise) const {
  const auto base = static_cast<std::uint32_t>(
      sample_count(distribution_, variate(index, DrawLane::base)));
  const bool alice_noise = variate(index, DrawLane::alice_noise) < noise.epsilon();
  const bool bob_noise = variate(index, DrawLane::bob_noise) < noise.epsilon();
  return CountPair::make(base, alice_noise, bob_noise);
}

PhotonDistribution noisy_marginal(const PhotonDistribution& source, const NoiseModel& noise) {
  const double eps = noise.epsilon();
  const auto p = source.probabilities();
  std::vector<double> q(p.size() + 1, 0.0);
  for (std::size_t n = 0; n < p.size(); ++n) {
    q[n] += (1.0 - eps) * p[n];
    q[n + 1] += eps * p[n];
  }
  return PhotonDistribution::from_weights(std::move(q));
}

Correlation empirical_correlation(std::span<const CountPair> pairs) {
  if (pairs.size() < 2) {
    throw std::invalid_argument("correlation needs at least two count pairs");
  }
  // Integer sums keep identical sequences bit-identical through to rho = 1.
  std::int64_t sum_a = 0, sum_b = 0, sum_ab = 0, sum_aa = 0, sum_bb = 0;
  for (const auto& p : pairs) {
    const std::int64_t a = p.alice_count;
    const std::int64_t b = p.bob_count;
    sum_a += a;
    sum_b += b;
    sum_ab += a * b;
    sum_aa += a * a;
    sum_bb += b * b;
  }
  const auto n = static_cast<std::int64_t>(pairs.size());
  const double scale = static_cast<double>(n) * static_cast<double>(n - 1);
  const auto cov_num = static_cast<double>(n * sum_ab - sum_a * sum_b);
  const auto var_a_num = static_cast<double>(n * sum_aa - sum_a * sum_a);
  const auto var_b_num = static_cast<double>(n * sum_bb - sum_b * sum_b);

  Correlation result;
  result.g_ab = cov_num / scale;
  if (var_a_num > 0.0 && var_b_num > 0.0) {
    result.rho_ab = std::clamp(cov_num / std::sqrt(var_a_num * var_b_num), -1.0, 1.0);
  }
  return result;
}

}  // namespace tmcc
