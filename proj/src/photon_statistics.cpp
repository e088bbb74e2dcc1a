#include "tmcc/photon_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tmcc {

namespace {

// Builds P_0..P_{n_max} from P_0 and the term ratio P_{n+1}/P_n, which must
// be nonincreasing in n once it drops below one. Stops once a geometric bound
// on the neglected second moment, sum m^2 P_m over m > n_max, is below the
// tolerance; that also bounds the neglected probability and first moment.
template <class Ratio>
std::vector<double> truncated_series(double p0, Ratio ratio,
                                     const TruncationPolicy& policy) {
  std::vector<double> terms{p0};
  if (policy.fixed_n_max) {
    for (std::size_t n = 0; n < *policy.fixed_n_max; ++n) {
      terms.push_back(terms.back() * ratio(n));
    }
    return terms;
  }
  for (std::size_t n = 0;; ++n) {
    const double next = terms.back() * ratio(n);
    const double m = static_cast<double>(n + 1);
    // Ratio of successive m^2 P_m terms from m = n + 1 on.
    const double r = ratio(n + 1) * ((m + 1.0) / m) * ((m + 1.0) / m);
    if (n >= policy.min_n_max && r < 1.0 &&
        m * m * next / (1.0 - r) < policy.tail_tolerance) {
      return terms;
    }
    terms.push_back(next);
  }
}

void check_amplitude(double magnitude) {
  if (!std::isfinite(magnitude) || magnitude < 0.0) {
    throw std::domain_error("amplitude must be finite and nonnegative, got " +
                            std::to_string(magnitude));
  }
}

}  // namespace

Amplitude::Amplitude(double magnitude) : magnitude_(magnitude) {
  check_amplitude(magnitude);
}

Amplitude Amplitude::from_complex(std::complex<double> lambda) {
  return Amplitude(std::abs(lambda));
}

PhotonDistribution PhotonDistribution::from_weights(std::vector<double> weights) {
  if (weights.empty()) {
    throw std::invalid_argument("photon distribution needs at least one weight");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("photon distribution weights must be finite and nonnegative");
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    throw std::invalid_argument("photon distribution weights sum to zero");
  }

  PhotonDistribution dist;
  dist.probabilities_ = std::move(weights);
  for (double& p : dist.probabilities_) p /= total;

  dist.cdf_.resize(dist.probabilities_.size());
  double running = 0.0;
  for (std::size_t n = 0; n < dist.probabilities_.size(); ++n) {
    running += dist.probabilities_[n];
    dist.cdf_[n] = std::min(running, 1.0);
  }
  dist.cdf_.back() = 1.0;

  for (std::size_t n = 0; n < dist.probabilities_.size(); ++n) {
    dist.mean_ += static_cast<double>(n) * dist.probabilities_[n];
  }
  for (std::size_t n = 0; n < dist.probabilities_.size(); ++n) {
    const double d = static_cast<double>(n) - dist.mean_;
    dist.variance_ += d * d * dist.probabilities_[n];
  }
  return dist;
}

double bessel_i(int order, double argument) {
  if (order != 0 && order != 1) {
    throw std::domain_error("bessel_i supports orders 0 and 1 only");
  }
  if (!std::isfinite(argument) || argument < 0.0) {
    throw std::domain_error("bessel_i argument must be finite and nonnegative");
  }
  const double half = 0.5 * argument;
  const double quarter_sq = half * half;
  double term = order == 0 ? 1.0 : half;
  double sum = term;
  // All terms are positive; stop once past the peak and negligible.
  for (int m = 0; term > 0.0; ++m) {
    term *= quarter_sq / (static_cast<double>(m + 1) * static_cast<double>(m + 1 + order));
    sum += term;
    if (m + 1 > half && term < 1e-16 * sum) break;
  }
  return sum;
}

PhotonDistribution tmcc_pmf(Amplitude lambda, const TruncationPolicy& policy) {
  const double x = lambda.magnitude();
  const double x_sq = x * x;
  const double p0 = 1.0 / bessel_i(0, 2.0 * x);
  auto ratio = [x_sq](std::size_t n) {
    const double k = static_cast<double>(n + 1);
    return x_sq / (k * k);
  };
  return PhotonDistribution::from_weights(truncated_series(p0, ratio, policy));
}

PhotonDistribution poisson_pmf(double mean, const TruncationPolicy& policy) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::domain_error("poisson mean must be finite and nonnegative");
  }
  auto ratio = [mean](std::size_t n) { return mean / static_cast<double>(n + 1); };
  return PhotonDistribution::from_weights(truncated_series(std::exp(-mean), ratio, policy));
}

double mean_photons(Amplitude lambda) {
  const double x = lambda.magnitude();
  if (x == 0.0) return 0.0;
  return x * bessel_i(1, 2.0 * x) / bessel_i(0, 2.0 * x);
}

double mean_square_photons(Amplitude lambda) {
  return lambda.magnitude() * lambda.magnitude();
}

double variance(Amplitude lambda) {
  const double x = lambda.magnitude();
  if (x == 0.0) return 0.0;
  const double r = bessel_i(1, 2.0 * x) / bessel_i(0, 2.0 * x);
  return x * x * (1.0 - r * r);
}

Amplitude amplitude_for_mean(double mean) {
  if (!std::isfinite(mean) || mean < 0.0) {
    throw std::domain_error("target mean photon number must be finite and nonnegative");
  }
  if (mean == 0.0) return Amplitude(0.0);
  // mean_photons(x) <= x and mean_photons(x) >= x - 1/2.
  double lo = mean;
  double hi = mean + 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_photons(Amplitude(mid)) < mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Amplitude(0.5 * (lo + hi));
}

double FockAmplitudes::norm_squared() const {
  double sum = 0.0;
  for (double c : coefficients_) sum += c * c;
  return sum;
}

FockAmplitudes build_fock_amplitudes(Amplitude lambda, std::size_t n_max) {
  const double x = lambda.magnitude();
  std::vector<double> c(n_max + 1);
  c[0] = 1.0 / std::sqrt(bessel_i(0, 2.0 * x));
  for (std::size_t n = 0; n < n_max; ++n) {
    c[n + 1] = c[n] * x / static_cast<double>(n + 1);
  }

  // Neglected probability, bounded geometrically like the pmf tail.
  const double next = c[n_max] * x / static_cast<double>(n_max + 1);
  const double k = static_cast<double>(n_max + 2);
  const double r = x * x / (k * k);
  if (r >= 1.0 || next * next / (1.0 - r) >= 1e-12) {
    throw TruncationError("n_max = " + std::to_string(n_max) +
                          " leaves more than 1e-12 of the state unrepresented");
  }
  return FockAmplitudes(std::move(c));
}

FockAmplitudes apply_pair_annihilation(const FockAmplitudes& state) {
  const auto c = state.coefficients();
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t n = 0; n + 1 < c.size(); ++n) {
    out[n] = static_cast<double>(n + 1) * c[n + 1];
  }
  return FockAmplitudes(std::move(out));
}

std::size_t sample_count(const PhotonDistribution& dist, double u) {
  const auto cdf = dist.cdf();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return dist.n_max();
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace tmcc
