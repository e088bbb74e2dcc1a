#pragma once

// Goodness-of-fit comparison of observed photon counts with an expected pmf,
// used both to identify a TMCC beam and to catch an eavesdropper who has
// changed the count distribution.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tmcc/photon_statistics.hpp"

namespace tmcc {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Contiguous count range [low, high]; high is empty for the open upper tail.
struct FitBin {
  std::uint32_t low = 0;
  std::optional<std::uint32_t> high;
  std::uint64_t observed = 0;
  double expected = 0.0;
};

struct DetectionReport {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  double significance = 0.01;
  bool passed = true;
  std::vector<FitBin> bins;
};

inline constexpr double kDefaultSignificance = 0.01;
inline constexpr double kMinExpectedPerBin = 5.0;
inline constexpr std::size_t kMinObservations = 50;

/// Pearson chi-square test of the counts against `expected`. Neighbouring
/// bins are merged until each expects at least five counts; the last bin is
/// open-ended. Throws InsufficientData for fewer than 50 observations or
/// fewer than two bins, std::invalid_argument for significance outside
/// (0, 0.5].
DetectionReport fit_test(std::span<const std::uint32_t> observed_counts,
                         const PhotonDistribution& expected,
                         double significance = kDefaultSignificance);

struct StateIdentification {
  DetectionReport tmcc;
  DetectionReport poisson;  // against the Poisson law of equal mean
  double sample_mean = 0.0;
  double sample_variance = 0.0;  // n - 1 convention
};

StateIdentification identify_state(std::span<const std::uint32_t> observed_counts,
                                   Amplitude lambda_hypothesis,
                                   double significance = kDefaultSignificance);

/// Upper tail of the chi-square law, Q(dof/2, x/2).
double chi_square_sf(double x, int dof);

/// Regularized upper incomplete gamma function Q(a, x) for a > 0, x >= 0.
double regularized_gamma_q(double a, double x);

}  // namespace tmcc
