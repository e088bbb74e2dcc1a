#include "tmcc/attacks.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace tmcc {

AttackModel AttackModel::beam_split(double transmittance) {
  if (!(transmittance > 0.0 && transmittance < 1.0)) {
    throw std::domain_error("beam-split transmittance must lie strictly inside (0, 1)");
  }
  return AttackModel(BeamSplit{transmittance});
}

AttackModel AttackModel::clone(ResendLaw law) { return AttackModel(Clone{law}); }

std::string AttackModel::describe() const {
  if (const auto* split = std::get_if<BeamSplit>(&kind_)) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, split->transmittance);
    return "beam_split:" + std::string(buf, res.ptr);
  }
  if (const auto* clone = std::get_if<Clone>(&kind_)) {
    return clone->law == ResendLaw::poisson ? "clone:poisson" : "clone:tmcc";
  }
  return "none";
}

AttackModel AttackModel::parse(const std::string& text) {
  if (text.empty() || text == "none") return none();
  if (text == "clone" || text == "clone:poisson") return clone(ResendLaw::poisson);
  if (text == "clone:tmcc") return clone(ResendLaw::tmcc_mean_matched);
  if (text == "beam_split") return beam_split(0.5);
  const std::string prefix = "beam_split:";
  if (text.rfind(prefix, 0) == 0) {
    const char* first = text.data() + prefix.size();
    const char* last = text.data() + text.size();
    double t = 0.0;
    const auto res = std::from_chars(first, last, t);
    if (res.ec == std::errc() && res.ptr == last) return beam_split(t);
  }
  throw std::invalid_argument("unknown attack '" + text +
                              "' (expected none, beam_split[:t], clone[:poisson|:tmcc])");
}

BeamSplitResult apply_beam_split(const CountPair& pair, double transmittance, double u) {
  const std::uint32_t k = pair.bob_base;
  const double t = transmittance;
  if (t >= 1.0) return {pair, 0};
  if (t <= 0.0) return {pair.with_bob_base(0), k};
  double p = std::pow(1.0 - t, static_cast<double>(k));
  double cdf = p;
  std::uint32_t kept = 0;
  while (kept < k && cdf <= u) {
    p *= static_cast<double>(k - kept) / static_cast<double>(kept + 1) * t / (1.0 - t);
    ++kept;
    cdf += p;
  }
  return {pair.with_bob_base(kept), k - kept};
}

const PhotonDistribution& ResendCache::law(ResendLaw law, std::uint32_t mean) {
  const auto key = std::make_pair(law, mean);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    const double m = static_cast<double>(mean);
    auto dist = law == ResendLaw::poisson ? poisson_pmf(m) : tmcc_pmf(amplitude_for_mean(m));
    it = cache_.emplace(key, std::move(dist)).first;
  }
  return it->second;
}

CountPair apply_clone(const CountPair& pair, ResendLaw law, double u, ResendCache& cache) {
  const auto& dist = cache.law(law, pair.bob_base);
  return pair.with_bob_base(static_cast<std::uint32_t>(sample_count(dist, u)));
}

CountPair Eavesdropper::intercept(const CountPair& pair, double u) {
  if (const auto* split = std::get_if<BeamSplit>(&model_.kind())) {
    return apply_beam_split(pair, split->transmittance, u).bob_pair;
  }
  if (const auto* clone = std::get_if<Clone>(&model_.kind())) {
    return apply_clone(pair, clone->law, u, cache_);
  }
  return pair;
}

}  // namespace tmcc
