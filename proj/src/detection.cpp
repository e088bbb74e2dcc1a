#include "tmcc/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tmcc {

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::domain_error("regularized_gamma_q needs a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
  constexpr double eps = 1e-16;
  constexpr int max_iter = 10000;

  if (x < a + 1.0) {
    // Series for P(a, x).
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < max_iter; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return 1.0 - sum * std::exp(log_prefactor);
  }

  // Modified Lentz continued fraction for Q(a, x).
  constexpr double tiny = std::numeric_limits<double>::min() / eps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < max_iter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::exp(log_prefactor) * h;
}

double chi_square_sf(double x, int dof) {
  if (dof < 1) throw std::domain_error("chi-square needs at least one degree of freedom");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

DetectionReport fit_test(std::span<const std::uint32_t> observed_counts,
                         const PhotonDistribution& expected, double significance) {
  if (!(significance > 0.0 && significance <= 0.5)) {
    throw std::invalid_argument("significance must lie in (0, 0.5]");
  }
  if (observed_counts.size() < kMinObservations) {
    throw InsufficientData("fit test needs at least " + std::to_string(kMinObservations) +
                           " observations, got " + std::to_string(observed_counts.size()));
  }

  const std::size_t n_max = expected.n_max();
  std::vector<std::uint64_t> histogram(n_max + 1, 0);
  for (std::uint32_t count : observed_counts) {
    // Everything past the truncation bound lands in the open top bin.
    ++histogram[std::min<std::size_t>(count, n_max)];
  }

  const auto total = static_cast<double>(observed_counts.size());
  DetectionReport report;
  report.significance = significance;

  FitBin open;
  for (std::size_t n = 0; n <= n_max; ++n) {
    open.observed += histogram[n];
    open.expected += total * expected.probability(n);
    if (open.expected >= kMinExpectedPerBin && n < n_max) {
      open.high = static_cast<std::uint32_t>(n);
      report.bins.push_back(open);
      open = FitBin{};
      open.low = static_cast<std::uint32_t>(n + 1);
    }
  }
  if (open.expected >= kMinExpectedPerBin || report.bins.empty()) {
    report.bins.push_back(open);
  } else {
    report.bins.back().observed += open.observed;
    report.bins.back().expected += open.expected;
  }
  report.bins.back().high.reset();

  if (report.bins.size() < 2) {
    throw InsufficientData("expected distribution fills fewer than two bins of five counts");
  }

  for (const auto& bin : report.bins) {
    const double diff = static_cast<double>(bin.observed) - bin.expected;
    report.statistic += diff * diff / bin.expected;
  }
  report.degrees_of_freedom = static_cast<int>(report.bins.size()) - 1;
  report.p_value = chi_square_sf(report.statistic, report.degrees_of_freedom);
  report.passed = report.p_value >= significance;
  return report;
}

StateIdentification identify_state(std::span<const std::uint32_t> observed_counts,
                                   Amplitude lambda_hypothesis, double significance) {
  StateIdentification id;
  id.tmcc = fit_test(observed_counts, tmcc_pmf(lambda_hypothesis), significance);
  id.poisson = fit_test(observed_counts, poisson_pmf(mean_photons(lambda_hypothesis)),
                        significance);

  double sum = 0.0;
  for (std::uint32_t c : observed_counts) sum += c;
  const auto n = static_cast<double>(observed_counts.size());
  id.sample_mean = sum / n;
  double ss = 0.0;
  for (std::uint32_t c : observed_counts) {
    const double d = c - id.sample_mean;
    ss += d * d;
  }
  id.sample_variance = ss / (n - 1.0);
  return id;
}

}  // namespace tmcc
