#pragma once

// The quantum channel: one twin count per bit interval, delivered to both
// parties, plus independent single-photon noise at each detector.

#include <cstdint>
#include <optional>
#include <span>

#include "tmcc/photon_statistics.hpp"
#include "tmcc/rng.hpp"

namespace tmcc {

/// Per-mode, per-bit probability of exactly one extra photon.
class NoiseModel {
 public:
  constexpr NoiseModel() = default;
  explicit NoiseModel(double epsilon);

  constexpr double epsilon() const { return epsilon_; }

 private:
  double epsilon_ = 0.0;
};

/// Counts registered by Alice and Bob in one bit interval.
///
/// base_count is the twin value emitted by the source. bob_base is what
/// reaches Bob's detector before noise: equal to base_count unless an
/// eavesdropper altered Bob's mode.
struct CountPair {
  std::uint32_t alice_count = 0;
  std::uint32_t bob_count = 0;
  std::uint32_t base_count = 0;
  std::uint32_t bob_base = 0;
  std::uint8_t alice_noise = 0;
  std::uint8_t bob_noise = 0;

  static CountPair make(std::uint32_t base, bool alice_noise, bool bob_noise);

  /// Same pair with Bob's pre-noise count replaced.
  CountPair with_bob_base(std::uint32_t value) const;

  friend bool operator==(const CountPair&, const CountPair&) = default;
};

/// Variates of one bit interval, in the fixed order base, Alice noise,
/// Bob noise. Lane 3 is reserved for whatever acts on Bob's mode in transit.
enum class DrawLane : std::uint32_t { base = 0, alice_noise = 1, bob_noise = 2, transit = 3 };

class TmccSource {
 public:
  TmccSource(Amplitude lambda, std::uint64_t seed);

  Amplitude lambda() const { return lambda_; }
  const PhotonDistribution& distribution() const { return distribution_; }
  std::uint64_t seed() const { return rng_.seed(); }
  std::uint64_t draw_counter() const { return counter_; }

  /// Draws the pair for the current bit interval and advances the counter.
  CountPair draw_pair(const NoiseModel& noise);

  /// The pair for an arbitrary bit index; does not touch the counter.
  CountPair pair_at(std::uint64_t index, const NoiseModel& noise) const;

  double variate(std::uint64_t index, DrawLane lane) const {
    return rng_.uniform(index, static_cast<std::uint32_t>(lane));
  }

 private:
  Amplitude lambda_;
  PhotonDistribution distribution_;
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

/// Free-function form of TmccSource::draw_pair.
inline CountPair draw_pair(TmccSource& source, const NoiseModel& noise) {
  return source.draw_pair(noise);
}

/// Marginal law of one detector's count: the source pmf convolved with the
/// 0-or-1 noise photon.
PhotonDistribution noisy_marginal(const PhotonDistribution& source, const NoiseModel& noise);

struct Correlation {
  double g_ab = 0.0;  // sample covariance, n - 1 convention
  std::optional<double> rho_ab;  // empty when either margin has zero variance
};

/// Sample covariance and Pearson correlation of (alice_count, bob_count).
/// Throws std::invalid_argument for fewer than two pairs.
Correlation empirical_correlation(std::span<const CountPair> pairs);

}  // namespace tmcc
