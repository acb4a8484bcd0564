#include "mlebound/msebound.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlebound/errors.hpp"
#include "mlebound/specfun.hpp"

namespace mlebound::msebound {

namespace {

// Integer shape parameters up to this size use the exact finite-sum form of
// the polygamma differences.
constexpr double kMaxFiniteSumBeta = 64.0;

bool small_integer(double beta) {
  return beta == std::floor(beta) && beta >= 1.0 && beta <= kMaxFiniteSumBeta;
}

// psi(theta + beta) - psi(theta).
double digamma_difference(double theta, double beta) {
  if (small_integer(beta)) {
    double sum = 0.0;
    for (int j = static_cast<int>(beta) - 1; j >= 0; --j) sum += 1.0 / (theta + j);
    return sum;
  }
  return specfun::digamma(theta + beta) - specfun::digamma(theta);
}

// psi_1(theta) - psi_1(theta + beta) > 0.
double trigamma_difference(double theta, double beta) {
  if (small_integer(beta)) {
    double sum = 0.0;
    for (int j = static_cast<int>(beta) - 1; j >= 0; --j) sum += 1.0 / ((theta + j) * (theta + j));
    return sum;
  }
  return specfun::trigamma(theta) - specfun::trigamma(theta + beta);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{} must be positive and finite, got {}", name, v));
  }
}

void require_minimal_n(const ImplicitModelIngredients& ing, long n) {
  const long needed = minimal_n(ing);
  if (n < needed) throw ValidationError(fmt::format("n below minimal n = {}", needed));
}

}  // namespace

void ImplicitModelIngredients::validate() const {
  require_positive(fisher_info, "fisher_info");
  require_positive(epsilon, "epsilon");
  if (!(third_abs_score_moment >= 0.0) || !(var_l2 >= 0.0) || !(c1_const >= 0.0) ||
      !(sup_x_norm >= 0.0) || !(sup_x2_norm >= 0.0)) {
    throw ValidationError("implicit-model moments and support norms must be >= 0");
  }
  for (double v : {third_abs_score_moment, var_l2, c1_const, sup_x_norm, sup_x2_norm}) {
    if (!std::isfinite(v)) throw NumericalError("non-finite implicit-model ingredient");
  }
}

double d1(const ImplicitModelIngredients& ing, long n) {
  ing.validate();
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  const double nd = static_cast<double>(n);
  const double i = ing.fisher_info;
  return 1.0 - 2.0 * ing.sup_x2_norm / (nd * i * ing.epsilon * ing.epsilon) -
         ing.sup_x_norm * ing.c1_const / (std::sqrt(nd) * std::pow(i, 1.5));
}

long minimal_n(const ImplicitModelIngredients& ing) {
  ing.validate();
  const double i = ing.fisher_info;
  const double ce = ing.sup_x_norm * ing.c1_const * ing.epsilon;
  const double root =
      ce + std::sqrt(ce * ce + 8.0 * ing.sup_x2_norm * i * i);
  const double bound = root * root / (4.0 * i * i * i * ing.epsilon * ing.epsilon);
  if (!std::isfinite(bound) || bound > 9.0e15) {
    throw NumericalError(fmt::format("minimal sample size is not representable: {}", bound));
  }
  long n = std::max(1L, static_cast<long>(std::ceil(bound)));
  // The closed form can land on the wrong side of the boundary by rounding.
  while (d1(ing, n) <= 0.0) ++n;
  while (n > 1 && d1(ing, n - 1) > 0.0) --n;
  return n;
}

double mse_upper_bound_a1(const ImplicitModelIngredients& ing, long n) {
  require_minimal_n(ing, n);
  const double nd = static_cast<double>(n);
  const double i = ing.fisher_info;
  const double i32 = std::pow(i, 1.5);
  const double dd = d1(ing, n);
  const double x = ing.sup_x_norm;
  const double linear = 2.0 * x * std::sqrt(ing.var_l2) / (nd * i32);
  const double constant =
      (4.0 * dd / (nd * i)) *
      (1.0 + 2.0 * x / std::sqrt(nd) * (2.0 + ing.third_abs_score_moment / i32));
  const double radical = std::sqrt(4.0 * x * x * ing.var_l2 / (nd * nd * i * i * i) + constant);
  return (linear + radical) / (2.0 * dd);
}

stein::BoundBreakdown implicit_distance_bound(const ImplicitModelIngredients& ing, long n,
                                              double a1, stein::HWeights w) {
  ing.validate();
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  if (!(a1 >= 0.0)) throw ValidationError(fmt::format("A1 must be >= 0, got {}", a1));
  const double nd = static_cast<double>(n);
  const double i = ing.fisher_info;
  const double a1_sq = a1 * a1;

  stein::BoundBreakdown out;
  out.add(std::string(stein::kScore),
          w.lip_norm / std::sqrt(nd) * (2.0 + ing.third_abs_score_moment / std::pow(i, 1.5)));
  out.add(std::string(stein::kMarkovTail), 2.0 * w.sup_norm * a1_sq / (ing.epsilon * ing.epsilon));
  out.add(std::string(stein::kTaylorRemainder),
          w.lip_norm * std::sqrt(nd) * ing.c1_const * a1_sq / (2.0 * std::sqrt(i)));
  out.add(std::string(stein::kR2), w.lip_norm * std::sqrt(ing.var_l2) * a1 / std::sqrt(i));
  return out;
}

void BetaParams::validate() const {
  require_positive(theta0, "Beta theta0");
  require_positive(beta, "Beta shape beta");
}

BetaConstants beta_constants(const BetaParams& p) {
  p.validate();
  using specfun::PolygammaOrder;
  const double t = p.theta0;
  const double tb = t + p.beta;
  const double psi1_t = specfun::polygamma(PolygammaOrder(1), t);
  const double psi1_tb = specfun::polygamma(PolygammaOrder(1), tb);
  BetaConstants c{};
  // Fourth moment of the score via log-Gamma central moments:
  // E[log G - E log G]^4 = psi_3 + 3 psi_1^2.
  c.b1 = 8.0 * (specfun::polygamma(PolygammaOrder(3), t) + specfun::polygamma(PolygammaOrder(3), tb) +
                3.0 * psi1_t * psi1_t + 3.0 * psi1_tb * psi1_tb);
  c.b2 = (96.0 * p.beta + 6.6 * p.beta * t * t * t * t) / (t * t * t * t);
  c.d_psi1 = trigamma_difference(t, p.beta);
  c.minimal_n = minimal_n(beta_ingredients(p));
  return c;
}

ImplicitModelIngredients beta_ingredients(const BetaParams& p, std::optional<double> epsilon) {
  p.validate();
  const double t = p.theta0;
  const double eps = epsilon.value_or(0.5 * t);
  if (!(eps > 0.0 && eps < t)) {
    throw ValidationError(fmt::format("epsilon must lie in (0, theta0 = {}), got {}", t, eps));
  }
  using specfun::PolygammaOrder;
  const double tb = t + p.beta;
  const double psi1_t = specfun::polygamma(PolygammaOrder(1), t);
  const double psi1_tb = specfun::polygamma(PolygammaOrder(1), tb);
  const double b1 = 8.0 * (specfun::polygamma(PolygammaOrder(3), t) +
                           specfun::polygamma(PolygammaOrder(3), tb) + 3.0 * psi1_t * psi1_t +
                           3.0 * psi1_tb * psi1_tb);
  const double gap = t - eps;

  ImplicitModelIngredients ing;
  ing.fisher_info = trigamma_difference(t, p.beta);
  ing.third_abs_score_moment = stein::holder_third_from_fourth(b1);
  // l''(theta; x) = n (psi_1(theta + beta) - psi_1(theta)) carries no data.
  ing.var_l2 = 0.0;
  // beta |psi_3(theta0 - eps)| <= 6 beta / (theta0 - eps)^4 + 6 beta zeta(4), zeta(4) < 1.1.
  ing.c1_const = 6.0 * p.beta / (gap * gap * gap * gap) + 6.6 * p.beta;
  ing.sup_x_norm = 1.0;
  ing.sup_x2_norm = 1.0;
  ing.epsilon = eps;
  return ing;
}

double beta_b3(const BetaParams& p, long n) {
  const auto ing = beta_ingredients(p);
  require_minimal_n(ing, n);

  // Numerator and denominator both cancel heavily just above the minimal n.
  using ld = long double;
  const ld nd = static_cast<ld>(n);
  const ld root_n = std::sqrt(nd);
  const ld t = p.theta0;
  const ld d = ing.fisher_info;
  const ld root_d = std::sqrt(d);
  const ld d32 = d * root_d;
  const ld b1_34 = ing.third_abs_score_moment;
  const ld b2 = ing.c1_const;

  const ld markov = 8.0L / (nd * t * t);
  const ld factor = 4.0L + 8.0L / root_n * (2.0L + b1_34 / d32);
  const ld d1_value = 1.0L - markov / d - b2 / (root_n * d32);
  const ld denominator = 2.0L * (root_d - markov / root_d - b2 / (root_n * d));
  if (!(d1_value > 0.0L) || !(denominator > 0.0L)) {
    throw ValidationError(fmt::format("n below minimal n = {}", minimal_n(ing)));
  }
  return static_cast<double>(std::sqrt(factor * d1_value) / denominator);
}

stein::BoundBreakdown beta_distance_bound(const BetaParams& p, long n) {
  const double b3 = beta_b3(p, n);
  const auto ing = beta_ingredients(p);
  const double nd = static_cast<double>(n);
  const double d = ing.fisher_info;
  const double t = p.theta0;

  stein::BoundBreakdown out;
  out.add(std::string(stein::kScore),
          (2.0 + ing.third_abs_score_moment / std::pow(d, 1.5)) / std::sqrt(nd));
  out.add(std::string(stein::kMarkovTail), 8.0 / (nd * t * t) * b3 * b3);
  out.add(std::string(stein::kTaylorRemainder),
          ing.c1_const * b3 * b3 / (2.0 * std::sqrt(nd) * std::sqrt(d)));
  return out;
}

double beta_mle_unit_beta(std::span<const double> sample) {
  if (sample.empty()) throw ValidationError("Beta MLE of an empty sample");
  double log_sum = 0.0;
  for (double x : sample) {
    if (!(x > 0.0 && x < 1.0)) {
      throw DomainError(fmt::format("Beta observation {} outside (0, 1)", x));
    }
    log_sum += std::log(x);
  }
  return -static_cast<double>(sample.size()) / log_sum;
}

double beta_mle(std::span<const double> sample, double beta) {
  require_positive(beta, "Beta shape beta");
  if (sample.empty()) throw ValidationError("Beta MLE of an empty sample");
  double log_sum = 0.0;
  for (double x : sample) {
    if (!(x > 0.0 && x < 1.0)) {
      throw DomainError(fmt::format("Beta observation {} outside (0, 1)", x));
    }
    log_sum += std::log(x);
  }
  const double nd = static_cast<double>(sample.size());

  // The score is strictly decreasing in theta, so a sign change brackets the
  // unique root.
  const auto score = [&](double theta) { return nd * digamma_difference(theta, beta) + log_sum; };
  double lo = 1e-8;
  double hi = 1e8;
  const double score_lo = score(lo);
  const double score_hi = score(hi);
  if (!(score_lo > 0.0 && score_hi < 0.0)) {
    throw NumericalError(fmt::format(
        "Beta MLE not bracketed: score({}) = {}, score({}) = {}", lo, score_lo, hi, score_hi));
  }

  // Exact for beta = 1 since psi(theta + 1) - psi(theta) = 1 / theta.
  double theta = std::clamp(-nd * beta / log_sum, lo, hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double g = score(theta);
    if (g == 0.0) return theta;
    if (g > 0.0) {
      lo = theta;
    } else {
      hi = theta;
    }
    const double slope = -nd * trigamma_difference(theta, beta);
    double next = theta - g / slope;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::abs(next - theta) <= 1e-14 * theta || (hi - lo) <= 1e-15 * hi) return next;
    theta = next;
  }
  throw NumericalError(fmt::format("Beta MLE did not converge; bracket [{}, {}]", lo, hi));
}

}  // namespace mlebound::msebound
