#pragma once

// Eavesdropper models acting on Bob's mode between the source and his
// detector. Both work at the level of photon counts.

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "tmcc/channel.hpp"
#include "tmcc/photon_statistics.hpp"

namespace tmcc {

/// Law Eve uses to re-emit a beam whose mean equals the count she measured.
enum class ResendLaw { poisson, tmcc_mean_matched };

struct NoAttack {
  friend bool operator==(const NoAttack&, const NoAttack&) = default;
};

/// Eve splits off part of Bob's beam; transmittance is the fraction Bob keeps.
struct BeamSplit {
  double transmittance = 0.5;
  friend bool operator==(const BeamSplit&, const BeamSplit&) = default;
};

/// Eve measures Bob's count m and resends a fresh beam with mean m.
struct Clone {
  ResendLaw law = ResendLaw::poisson;
  friend bool operator==(const Clone&, const Clone&) = default;
};

class AttackModel {
 public:
  using Kind = std::variant<NoAttack, BeamSplit, Clone>;

  AttackModel() = default;

  static AttackModel none() { return AttackModel(); }
  /// Throws std::domain_error unless 0 < transmittance < 1.
  static AttackModel beam_split(double transmittance);
  static AttackModel clone(ResendLaw law);

  const Kind& kind() const { return kind_; }
  bool active() const { return !std::holds_alternative<NoAttack>(kind_); }

  /// "none", "beam_split:<t>", "clone:poisson" or "clone:tmcc".
  std::string describe() const;
  /// Inverse of describe(); also accepts "beam_split" (t = 0.5) and "clone"
  /// (Poisson resend). Throws std::invalid_argument on anything else.
  static AttackModel parse(const std::string& text);

  friend bool operator==(const AttackModel&, const AttackModel&) = default;

 private:
  explicit AttackModel(Kind kind) : kind_(kind) {}
  Kind kind_;
};

struct BeamSplitResult {
  CountPair bob_pair;
  std::uint32_t eve_count = 0;
};

/// Binomial(bob_base, transmittance) thinning of Bob's mode, drawn by inverse
/// CDF from the single variate u. Eve keeps the complement; Alice's count is
/// untouched.
BeamSplitResult apply_beam_split(const CountPair& pair, double transmittance, double u);

/// Resend distributions for each measured count, built on first use.
/// Not thread-safe; owned by one session at a time.
class ResendCache {
 public:
  const PhotonDistribution& law(ResendLaw law, std::uint32_t mean);

 private:
  std::map<std::pair<ResendLaw, std::uint32_t>, PhotonDistribution> cache_;
};

/// Replaces Bob's pre-noise count m with a draw from the resend law of mean m.
CountPair apply_clone(const CountPair& pair, ResendLaw law, double u, ResendCache& cache);

/// Applies any attack model to one pair; u is the transit variate of the bit.
class Eavesdropper {
 public:
  explicit Eavesdropper(AttackModel model) : model_(std::move(model)) {}

  const AttackModel& model() const { return model_; }
  CountPair intercept(const CountPair& pair, double u);

 private:
  AttackModel model_;
  ResendCache cache_;
};

}  // namespace tmcc
