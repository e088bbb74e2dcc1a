#pragma once

// Photon-number statistics of a two-mode coherently correlated (TMCC) beam.
//
// A TMCC state expands over equal-number pairs |n,n> with amplitudes
// lambda^n / n!, normalized by sqrt(I0(2|lambda|)). Each mode taken alone
// shows the pmf P_n = |lambda|^(2n) / (n!^2 I0(2|lambda|)), which is much
// narrower than the Poisson law of a coherent beam with the same mean.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tmcc {

/// Raised when a requested truncation cannot hold the neglected tail below
/// the configured tolerance.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field amplitude |lambda| of the TMCC state. The phase is accepted by
/// from_complex() and dropped: nothing downstream depends on it.
class Amplitude {
 public:
  constexpr Amplitude() = default;
  explicit Amplitude(double magnitude);

  static Amplitude from_complex(std::complex<double> lambda);

  constexpr double magnitude() const { return magnitude_; }

  friend constexpr bool operator==(Amplitude, Amplitude) = default;

 private:
  double magnitude_ = 0.0;
};

struct TruncationPolicy {
  // Bound on the neglected tail sum of n^2 P_n (hence also of P_n).
  double tail_tolerance = 1e-12;
  std::size_t min_n_max = 20;
  // Forces n_max instead of searching for it. The pmf is still renormalized.
  std::optional<std::size_t> fixed_n_max;
};

/// Truncated, renormalized pmf over photon numbers 0..n_max with its first
/// two moments and CDF precomputed.
class PhotonDistribution {
 public:
  /// Builds from nonnegative weights; they are renormalized to sum to one.
  static PhotonDistribution from_weights(std::vector<double> weights);

  std::span<const double> probabilities() const { return probabilities_; }
  std::span<const double> cdf() const { return cdf_; }
  std::size_t n_max() const { return probabilities_.size() - 1; }
  double mean() const { return mean_; }
  double variance() const { return variance_; }

  /// P_n, zero beyond the truncation bound.
  double probability(std::size_t n) const {
    return n < probabilities_.size() ? probabilities_[n] : 0.0;
  }

 private:
  PhotonDistribution() = default;

  std::vector<double> probabilities_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// Modified Bessel function of the first kind, I_0 or I_1, by power series.
/// Throws std::domain_error for a negative or non-finite argument or an
/// order other than 0 or 1.
double bessel_i(int order, double argument);

PhotonDistribution tmcc_pmf(Amplitude lambda, const TruncationPolicy& policy = {});

/// Coherent-beam reference law with the given mean.
PhotonDistribution poisson_pmf(double mean, const TruncationPolicy& policy = {});

/// <N> = |lambda| I1(2|lambda|) / I0(2|lambda|).
double mean_photons(Amplitude lambda);

/// <N^2> = |lambda|^2.
double mean_square_photons(Amplitude lambda);

/// sigma^2 = |lambda|^2 (1 - (I1/I0)^2), always below the mean for lambda > 0.
double variance(Amplitude lambda);

/// Inverse of mean_photons on [0, inf): the amplitude whose TMCC beam has the
/// requested mean photon number.
Amplitude amplitude_for_mean(double mean);

/// Coefficients c_n of |n,n> for n = 0..n_max.
class FockAmplitudes {
 public:
  explicit FockAmplitudes(std::vector<double> coefficients)
      : coefficients_(std::move(coefficients)) {}

  std::span<const double> coefficients() const { return coefficients_; }
  std::size_t n_max() const { return coefficients_.size() - 1; }
  double norm_squared() const;

 private:
  std::vector<double> coefficients_;
};

/// c_n = lambda^n / (n! sqrt(I0(2 lambda))). Throws TruncationError when the
/// probability mass beyond n_max is not below 1e-12.
FockAmplitudes build_fock_amplitudes(Amplitude lambda, std::size_t n_max);

/// Applies a1 a2 to the truncated state: out[n] = (n+1) c_{n+1}. The result
/// is left unnormalized and its last coefficient is zero.
FockAmplitudes apply_pair_annihilation(const FockAmplitudes& state);

/// Inverse-CDF draw: the smallest n with cdf[n] > u, for u in [0, 1).
std::size_t sample_count(const PhotonDistribution& dist, double u);

}  // namespace tmcc
