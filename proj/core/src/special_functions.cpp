#include "elm/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace elm {

namespace {

constexpr double kSeriesLimit = 2.0;

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (1 3 5 ... (2n+1)); all terms positive.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2 * n + 1);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfcx(x) = 1 / (sqrt(pi) (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))), modified Lentz.
double erfcx_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x, d = 0.0;
  for (int j = 1; j < 5000; ++j) {
    const double a = 0.5 * j;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

}  // namespace

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x < kSeriesLimit) return 1.0 - erf_series(x);
  if (x > 27.3) return 0.0;
  return erfcx_continued_fraction(x) * std::exp(-x * x);
}

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.6) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < kSeriesLimit) return std::exp(x * x) * (1.0 - erf_series(x));
  if (x > 1e8) return 1.0 / (std::sqrt(std::numbers::pi) * x);
  return erfcx_continued_fraction(x);
}

}  // namespace elm
