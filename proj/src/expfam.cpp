#include "mlebound/expfam.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "mlebound/errors.hpp"

namespace mlebound::expfam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double resolve_epsilon(double theta0, std::optional<double> epsilon) {
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
    throw ValidationError(fmt::format("theta0 must be positive and finite, got {}", theta0));
  }
  const double eps = epsilon.value_or(0.5 * theta0);
  // (theta0 - eps, theta0 + eps) must sit inside (0, inf).
  if (!(eps > 0.0 && eps < theta0)) {
    throw ValidationError(fmt::format("epsilon must lie in (0, theta0 = {}), got {}", theta0, eps));
  }
  return eps;
}

double sample_mean(std::span<const double> sample) {
  if (sample.empty()) throw ValidationError("MLE of an empty sample");
  const double sum = std::accumulate(sample.begin(), sample.end(), 0.0);
  return sum / static_cast<double>(sample.size());
}

}  // namespace

double ExpFamilySpec::D(double theta) const { return A_prime(theta) / k_prime(theta); }

void ExpFamilySpec::check_parameter(double theta) const {
  if (!theta_space.contains(theta)) {
    throw ValidationError(fmt::format("theta = {} outside the parameter space ({}, {})", theta,
                                      theta_space.lower, theta_space.upper));
  }
  if (k_prime(theta) == 0.0) {
    throw ValidationError(fmt::format("k'(theta) vanishes at theta = {}", theta));
  }
}

ExpFamilySpec exponential_canonical() {
  return ExpFamilySpec{
      .k = [](double t) { return t; },
      .k_prime = [](double) { return 1.0; },
      .A = [](double t) { return -std::log(t); },
      .A_prime = [](double t) { return -1.0 / t; },
      .T = [](double x) { return -x; },
      .S = [](double) { return 0.0; },
      .support = {0.0, kInf},
      .theta_space = {0.0, kInf},
  };
}

ExpFamilySpec exponential_noncanonical() {
  return ExpFamilySpec{
      .k = [](double t) { return 1.0 / t; },
      .k_prime = [](double t) { return -1.0 / (t * t); },
      .A = [](double t) { return std::log(t); },
      .A_prime = [](double t) { return 1.0 / t; },
      .T = [](double x) { return -x; },
      .S = [](double) { return 0.0; },
      .support = {0.0, kInf},
      .theta_space = {0.0, kInf},
  };
}

double expfam_fisher_info(const ExpFamilySpec& spec, double theta0, double var_T) {
  if (!(var_T > 0.0)) {
    throw ValidationError(fmt::format("degenerate family: Var[T(X)] must be > 0, got {}", var_T));
  }
  spec.check_parameter(theta0);
  const double kp = spec.k_prime(theta0);
  return kp * kp * var_T;
}

double expfam_third_score_moment(const ExpFamilySpec& spec, double theta0,
                                 double third_abs_central_T) {
  if (!(third_abs_central_T >= 0.0) || !std::isfinite(third_abs_central_T)) {
    throw ValidationError(fmt::format("E|T - D|^3 must be finite and >= 0, got {}",
                                      third_abs_central_T));
  }
  spec.check_parameter(theta0);
  const double kp = std::abs(spec.k_prime(theta0));
  return kp * kp * kp * third_abs_central_T;
}

stein::BoundIngredients expfam_ingredients(const ExpFamilySpec& spec,
                                           const GenericFamilyInputs& in) {
  stein::BoundIngredients ing;
  ing.theta0 = in.theta0;
  ing.n = in.n;
  ing.fisher_info = expfam_fisher_info(spec, in.theta0, in.var_T);
  ing.third_abs_score_moment = expfam_third_score_moment(spec, in.theta0, in.third_abs_central_T);
  ing.mse = in.mse;
  ing.fourth_mle_moment = in.fourth_mle_moment;
  ing.sup_third_deriv = in.sup_third_deriv;
  ing.r2_conditional_bound = in.r2_conditional_bound;
  ing.epsilon = in.epsilon;
  ing.sup_third_is_deterministic = in.sup_third_is_deterministic;
  ing.validate();
  return ing;
}

stein::BoundIngredients exp_canonical_ingredients(double theta0, long n,
                                                  std::optional<double> epsilon) {
  if (n < 3) {
    throw ValidationError(fmt::format("exp-canonical needs n >= 3 for a finite MSE, got {}", n));
  }
  const double eps = resolve_epsilon(theta0, epsilon);
  const double nd = static_cast<double>(n);
  const double t3 = theta0 * theta0 * theta0;
  const double gap = theta0 - eps;

  GenericFamilyInputs in;
  in.theta0 = theta0;
  in.n = n;
  in.var_T = 1.0 / (theta0 * theta0);
  in.third_abs_central_T = kExponentialThirdMoment / t3;
  in.mse = (nd + 2.0) * theta0 * theta0 / ((nd - 1.0) * (nd - 2.0));
  // E(1/Xbar - theta0)^4 is not needed on the deterministic-sup route.
  in.fourth_mle_moment = 0.0;
  in.sup_third_deriv = 2.0 * nd / (gap * gap * gap);
  // l''(theta) = -n / theta^2 = -n i(theta): R2 vanishes identically.
  in.r2_conditional_bound = 0.0;
  in.epsilon = eps;
  in.sup_third_is_deterministic = true;
  return expfam_ingredients(exponential_canonical(), in);
}

stein::BoundIngredients exp_noncanonical_ingredients(double theta0, long n,
                                                     std::optional<double> epsilon) {
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  const double eps = resolve_epsilon(theta0, epsilon);
  const double nd = static_cast<double>(n);
  const double t2 = theta0 * theta0;
  const double gap = theta0 - eps;

  GenericFamilyInputs in;
  in.theta0 = theta0;
  in.n = n;
  in.var_T = t2;
  in.third_abs_central_T = kExponentialThirdMoment * t2 * theta0;
  in.mse = t2 / nd;
  in.fourth_mle_moment = 3.0 * t2 * t2 / (nd * nd) * (2.0 / nd + 1.0);
  in.sup_third_deriv = 4.0 * nd * (2.0 * theta0 + eps) / (gap * gap * gap * gap);
  in.r2_conditional_bound = 2.0 / theta0;
  in.epsilon = eps;
  in.sup_third_is_deterministic = false;
  return expfam_ingredients(exponential_noncanonical(), in);
}

ModelDescriptor find_model(const std::string& name, double theta0) {
  if (name == "exp-canonical") {
    return ModelDescriptor{
        .name = name,
        .theta0 = theta0,
        .closed_form_mle = true,
        .mle =
            [](std::span<const double> sample) {
              const double mean = sample_mean(sample);
              if (!(mean > 0.0)) {
                throw NumericalError("degenerate sample: exp-canonical MLE needs a positive mean");
              }
              return 1.0 / mean;
            },
        .ingredients_for = exp_canonical_ingredients,
    };
  }
  if (name == "exp-noncanonical") {
    return ModelDescriptor{
        .name = name,
        .theta0 = theta0,
        .closed_form_mle = true,
        .mle = sample_mean,
        .ingredients_for = exp_noncanonical_ingredients,
    };
  }
  throw ValidationError(fmt::format("unknown exponential-family model '{}'", name));
}

}  // namespace mlebound::expfam
