#include "mlebound/stein.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "mlebound/errors.hpp"
#include "mlebound/specfun.hpp"

namespace mlebound::stein {

namespace {

void require_weights(HWeights w) {
  if (!(w.sup_norm >= 0.0) || !(w.lip_norm >= 0.0) || !std::isfinite(w.sup_norm) ||
      !std::isfinite(w.lip_norm)) {
    throw ValidationError(fmt::format("test-function norms must be finite and >= 0, got ({}, {})",
                                      w.sup_norm, w.lip_norm));
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw NumericalError(fmt::format("non-finite ingredient {} = {}", name, v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (v < 0.0) throw ValidationError(fmt::format("{} must be >= 0, got {}", name, v));
}

double score_term(const BoundIngredients& ing, HWeights w) {
  return w.lip_norm / std::sqrt(static_cast<double>(ing.n)) *
         (2.0 + ing.third_abs_score_moment / std::pow(ing.fisher_info, 1.5));
}

}  // namespace

TestFunction reciprocal_quadratic() {
  return TestFunction{[](double x) { return 1.0 / (x * x + 2.0); }, 0.5,
                      3.0 * std::sqrt(1.5) / 16.0, "1/(x^2+2)"};
}

HWeights table_weights() { return reciprocal_quadratic().weights(); }

void BoundBreakdown::add(std::string label, double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw NumericalError(fmt::format("bound term '{}' is not a finite non-negative value: {}",
                                     label, value));
  }
  terms_.push_back({std::move(label), value});
}

double BoundBreakdown::total() const noexcept {
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.value;
  return sum;
}

double BoundBreakdown::term(std::string_view label) const {
  for (const auto& t : terms_) {
    if (t.label == label) return t.value;
  }
  throw std::out_of_range(fmt::format("no bound term labelled '{}'", label));
}

bool BoundBreakdown::has_term(std::string_view label) const noexcept {
  for (const auto& t : terms_) {
    if (t.label == label) return true;
  }
  return false;
}

void BoundIngredients::validate() const {
  require_finite(theta0, "theta0");
  require_finite(fisher_info, "fisher_info");
  require_finite(third_abs_score_moment, "third_abs_score_moment");
  require_finite(mse, "mse");
  require_finite(fourth_mle_moment, "fourth_mle_moment");
  require_finite(sup_third_deriv, "sup_third_deriv");
  require_finite(r2_conditional_bound, "r2_conditional_bound");
  require_finite(epsilon, "epsilon");
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  if (!(fisher_info > 0.0)) {
    throw ValidationError(fmt::format("fisher_info must be > 0, got {}", fisher_info));
  }
  if (!(epsilon > 0.0)) throw ValidationError(fmt::format("epsilon must be > 0, got {}", epsilon));
  require_nonnegative(third_abs_score_moment, "third_abs_score_moment");
  require_nonnegative(mse, "mse");
  require_nonnegative(fourth_mle_moment, "fourth_mle_moment");
  require_nonnegative(sup_third_deriv, "sup_third_deriv");
  require_nonnegative(r2_conditional_bound, "r2_conditional_bound");
}

BoundBreakdown score_bound(const BoundIngredients& ing, HWeights w) {
  ing.validate();
  require_weights(w);
  BoundBreakdown out;
  out.add(std::string(kScore), score_term(ing, w));
  return out;
}

BoundBreakdown mle_bound_general(const BoundIngredients& ing, HWeights w) {
  ing.validate();
  require_weights(w);
  const double scale = w.lip_norm / std::sqrt(static_cast<double>(ing.n) * ing.fisher_info);
  const double taylor_core = ing.sup_third_is_deterministic
                                 ? ing.sup_third_deriv * ing.mse
                                 : ing.sup_third_deriv * std::sqrt(ing.fourth_mle_moment);

  BoundBreakdown out;
  out.add(std::string(kScore), score_term(ing, w));
  out.add(std::string(kMarkovTail), 2.0 * w.sup_norm * ing.mse / (ing.epsilon * ing.epsilon));
  out.add(std::string(kR2), scale * ing.r2_conditional_bound);
  out.add(std::string(kTaylorRemainder), scale * 0.5 * taylor_core);
  return out;
}

double kolmogorov_from_bw(double bw_bound) {
  if (!(bw_bound >= 0.0)) {
    throw ValidationError(fmt::format("bounded Wasserstein bound must be >= 0, got {}", bw_bound));
  }
  return 2.0 * std::sqrt(bw_bound);
}

ConfidenceInterval conservative_ci(double theta_hat, long n, double fisher_info, double alpha,
                                   double b_k) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  }
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  if (!(fisher_info > 0.0)) {
    throw ValidationError(fmt::format("fisher_info must be > 0, got {}", fisher_info));
  }
  if (!(b_k >= 0.0)) throw ValidationError(fmt::format("B_K must be >= 0, got {}", b_k));

  const double lower_p = 0.5 * alpha - b_k;
  const double upper_p = 1.0 - 0.5 * alpha + b_k;
  if (!(lower_p > 0.0) || !(upper_p < 1.0)) return ConfidenceInterval{};

  const double scale = std::sqrt(static_cast<double>(n) * fisher_info);
  ConfidenceInterval ci;
  ci.lower = theta_hat - specfun::std_normal_quantile(upper_p) / scale;
  ci.upper = theta_hat - specfun::std_normal_quantile(lower_p) / scale;
  ci.bounded = true;
  return ci;
}

double direct_sum_bound(double sigma, double third_abs_moment, long n) {
  if (!(sigma > 0.0)) throw ValidationError(fmt::format("sigma must be > 0, got {}", sigma));
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  require_nonnegative(third_abs_moment, "third_abs_moment");
  return (2.0 + third_abs_moment / (sigma * sigma * sigma)) / std::sqrt(static_cast<double>(n));
}

double holder_third_from_fourth(double fourth_moment) {
  require_nonnegative(fourth_moment, "fourth_moment");
  return std::pow(fourth_moment, 0.75);
}

}  // namespace mlebound::stein
