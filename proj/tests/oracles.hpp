#pragma once

// Test-only reference values. Nothing here calls into the library.

#include <cmath>
#include <cstddef>

namespace tmcc::oracle {

// Frozen from mpmath at 40 digits.
inline constexpr double kI0At2 = 2.279585302336067267437204440811533353286;
inline constexpr double kI1At2 = 1.590636854637329063382254424999666247954;
inline constexpr double kMeanAt1 = 0.6977746579640079820067905925517525994867;
inline constexpr double kVarianceAt1 = 0.5131105267032116720905876558499434554438;
inline constexpr double kMeanAt2 = 1.727045222049101165709298141741970176233;
inline constexpr double kVarianceAt2 = 1.017314800997370848731841882188091344855;
inline constexpr double kMeanAt4 = 3.740941974117754421198701268911537866575;
inline constexpr double kP0At1 = 0.4386762798370487393788454103603952468319;
inline constexpr double kCdf1At1 = 0.8773525596740974787576908207207904936639;
inline constexpr double kProbZeroAt4 = 0.455552209869057913796516931381628168285;
inline constexpr double kErrorFactorAt4 = 0.5841414717626925270964061608670849971477;

// Full fixed-length series in long double, no stopping rule.
inline long double bessel_series(int order, long double z) {
  const long double half = z / 2;
  long double term = order == 0 ? 1.0L : half;
  long double sum = term;
  for (int m = 0; m < 400; ++m) {
    term *= half * half / ((m + 1.0L) * (m + 1.0L + order));
    sum += term;
  }
  return sum;
}

// |lambda|^(2n) / (n!^2 I0(2|lambda|)) straight from the definition.
inline long double tmcc_probability(std::size_t n, long double x) {
  const long double log_term = 2.0L * n * std::log(x) - 2.0L * std::lgamma(n + 1.0L);
  return (x == 0 ? (n == 0 ? 1.0L : 0.0L) : std::exp(log_term)) / bessel_series(0, 2 * x);
}

struct Moments {
  long double mean = 0, mean_square = 0;
};

inline Moments tmcc_moments(long double x) {
  Moments m;
  for (std::size_t n = 0; n < 400; ++n) {
    const long double p = tmcc_probability(n, x);
    m.mean += n * p;
    m.mean_square += static_cast<long double>(n) * n * p;
  }
  return m;
}

}  // namespace tmcc::oracle
