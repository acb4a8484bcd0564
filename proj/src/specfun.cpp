#include "mlebound/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mlebound/errors.hpp"

namespace mlebound::specfun {

namespace {

// B_{2k}, k = 1..12.
constexpr std::array<double, 12> kBernoulliEven = {
    1.0 / 6.0,        -1.0 / 30.0,        1.0 / 42.0,
    -1.0 / 30.0,      5.0 / 66.0,         -691.0 / 2730.0,
    7.0 / 6.0,        -3617.0 / 510.0,    43867.0 / 798.0,
    -174611.0 / 330.0, 854513.0 / 138.0,  -236364091.0 / 2730.0};

// Asymptotic expansions are used once the argument has been shifted past
// this point.
constexpr double kAsymptoticThreshold = 12.0;

// Positive zero of the digamma function, split into a double-double so the
// distance x - x0 is exact for arguments near the root.
constexpr double kDigammaRootHi = 1.4616321449683622;
constexpr double kDigammaRootLo = 9.5499954299656974e-17;
constexpr double kRootSeriesRadius = 0.25;
constexpr int kRootSeriesTerms = 26;

void require_positive_finite(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(fmt::format("{}: argument must be positive and finite, got {}", what, x));
  }
}

double digamma_asymptotic(double y) {
  const double inv2 = 1.0 / (y * y);
  double tail = 0.0;
  double power = inv2;
  for (int k = 1; k <= 10; ++k) {
    tail += kBernoulliEven[k - 1] / (2.0 * k) * power;
    power *= inv2;
  }
  return std::log(y) - 0.5 / y - tail;
}

// Taylor coefficients of psi about its positive root:
// psi(x0 + t) = t * sum_j (-1)^j zeta(j + 2, x0) t^j.
const std::array<double, kRootSeriesTerms>& root_series_coefficients() {
  static const std::array<double, kRootSeriesTerms> coeffs = [] {
    std::array<double, kRootSeriesTerms> c{};
    for (int j = 0; j < kRootSeriesTerms; ++j) {
      const double z = hurwitz_zeta(static_cast<double>(j + 2), kDigammaRootHi);
      c[j] = (j % 2 == 0) ? z : -z;
    }
    return c;
  }();
  return coeffs;
}

double digamma_near_root(double x) {
  const double t = (x - kDigammaRootHi) - kDigammaRootLo;
  const auto& c = root_series_coefficients();
  double acc = 0.0;
  for (int j = kRootSeriesTerms - 1; j >= 0; --j) {
    acc = acc * t + c[j];
  }
  return t * acc;
}

}  // namespace

PolygammaOrder::PolygammaOrder(int m) : m_(m) {
  if (m < 0 || m > 3) {
    throw DomainError(fmt::format("polygamma order must lie in [0, 3], got {}", m));
  }
}

double log_gamma(double x) {
  require_positive_finite(x, "log_gamma");
  double y = x;
  double product = 1.0;
  while (y < kAsymptoticThreshold) {
    product *= y;
    y += 1.0;
  }
  const double inv = 1.0 / y;
  const double inv2 = inv * inv;
  double series = 0.0;
  double power = inv;
  for (int k = 1; k <= 10; ++k) {
    series += kBernoulliEven[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * power;
    power *= inv2;
  }
  const double stirling = (y - 0.5) * std::log(y) - y +
                          0.5 * std::log(2.0 * std::numbers::pi) + series;
  return stirling - std::log(product);
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw DomainError(fmt::format("hurwitz_zeta: order must exceed 1, got {}", s));
  }
  require_positive_finite(q, "hurwitz_zeta");

  const double shift_target = std::max(kAsymptoticThreshold, s + 12.0);
  int shift = 0;
  if (q < shift_target) {
    shift = static_cast<int>(std::ceil(shift_target - q));
  }
  const double a = q + shift;

  // Euler-Maclaurin tail for sum_{k >= shift} (q + k)^{-s}.
  const double a_pow = std::pow(a, -s);
  double tail = a * a_pow / (s - 1.0) + 0.5 * a_pow;
  double rising = s;           // s (s+1) ... (s+2j-2)
  double factorial = 2.0;      // (2j)!
  double a_power = a_pow / a;  // a^{-s-2j+1}
  const double inv_a2 = 1.0 / (a * a);
  for (int j = 1; j <= 12; ++j) {
    const double term = kBernoulliEven[j - 1] / factorial * rising * a_power;
    tail += term;
    if (std::abs(term) < 1e-18 * std::abs(tail)) break;
    rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    a_power *= inv_a2;
  }

  double sum = tail;
  for (int k = shift - 1; k >= 0; --k) {
    sum += std::pow(q + k, -s);
  }
  return sum;
}

double digamma(double x) {
  require_positive_finite(x, "digamma");
  if (std::abs(x - kDigammaRootHi) < kRootSeriesRadius) {
    return digamma_near_root(x);
  }
  double y = x;
  double reciprocal_sum = 0.0;
  int shift = 0;
  while (y < kAsymptoticThreshold) {
    y += 1.0;
    ++shift;
  }
  // Accumulate the recurrence corrections from the smallest term up.
  for (int k = shift - 1; k >= 0; --k) {
    reciprocal_sum += 1.0 / (x + k);
  }
  return digamma_asymptotic(y) - reciprocal_sum;
}

double trigamma(double x) {
  require_positive_finite(x, "trigamma");
  return hurwitz_zeta(2.0, x);
}

double polygamma(PolygammaOrder order, double x) {
  require_positive_finite(x, "polygamma");
  switch (order.value()) {
    case 0:
      return digamma(x);
    case 1:
      return hurwitz_zeta(2.0, x);
    case 2:
      return -2.0 * hurwitz_zeta(3.0, x);
    default:
      return 6.0 * hurwitz_zeta(4.0, x);
  }
}

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation for the lower half, p <= 0.5.
double quantile_initial(double p) {
  constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                       -2.759285104469687e+02, 1.383577518672690e+02,
                                       -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                       -1.556989798598866e+02, 6.680131188771972e+01,
                                       -1.328068155288572e+01};
  constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                       -2.400758277161838e+00, -2.549732539343734e+00,
                                       4.374664141464968e+00,  2.938163982698783e+00};
  constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                       2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double lower_quantile(double p) {
  double x = quantile_initial(p);
  for (int iter = 0; iter < 3; ++iter) {
    const double e = std_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    const double step = u / (1.0 + 0.5 * x * u);
    x -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

}  // namespace

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(fmt::format("std_normal_quantile: p must lie in (0, 1), got {}", p));
  }
  if (p > 0.5) return -lower_quantile(1.0 - p);
  return lower_quantile(p);
}

double normal_expectation(const std::function<double(double)>& h, double sd) {
  if (!(sd >= 0.0) || !std::isfinite(sd)) {
    throw DomainError(fmt::format("normal_expectation: sd must be finite and >= 0, got {}", sd));
  }
  if (sd == 0.0) return h(0.0);
  const auto integrand = [&](double z) { return h(sd * z) * std_normal_pdf(z); };
  return integrate_adaptive(integrand, -12.0, 12.0, 1e-10, 0.0).value;
}

}  // namespace mlebound::specfun
