#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "mlebound/stein.hpp"

namespace mlebound::expfam {

/// Open or closed real interval; endpoints may be infinite.
struct Interval {
  double lower;
  double upper;
  bool contains(double x) const noexcept { return lower < x && x < upper; }
};

/// Density exp{k(theta) T(x) - A(theta) + S(x)} on a theta-free support.
struct ExpFamilySpec {
  std::function<double(double)> k;
  std::function<double(double)> k_prime;
  std::function<double(double)> A;
  std::function<double(double)> A_prime;
  std::function<double(double)> T;
  std::function<double(double)> S;
  Interval support;
  Interval theta_space;

  /// D(theta) = A'(theta) / k'(theta) = E_theta[T(X)].
  double D(double theta) const;
  /// Throws ValidationError if theta is outside the parameter space or
  /// k'(theta) = 0.
  void check_parameter(double theta) const;
};

/// Exp(theta) with rate theta: k(theta) = theta, T(x) = -x, A = -log theta.
ExpFamilySpec exponential_canonical();

/// Exp(1/theta) with mean theta: k(theta) = 1/theta, T(x) = -x, A = log theta.
ExpFamilySpec exponential_noncanonical();

/// i(theta0) = k'(theta0)^2 Var[T(X)]; throws ValidationError if var_T <= 0.
double expfam_fisher_info(const ExpFamilySpec& spec, double theta0, double var_T);

/// E|l'(theta0; X)|^3 = |k'(theta0)|^3 E|T(X) - D(theta0)|^3.
double expfam_third_score_moment(const ExpFamilySpec& spec, double theta0,
                                 double third_abs_central_T);

/// Upper bound on E|1/theta0 - X|^3 theta0^3 for X ~ Exp(theta0).
inline constexpr double kExponentialThirdMoment = 2.41456;

/// Caller-supplied pieces for a general one-parameter family; only the
/// Fisher information and the third score moment are derived from the spec.
struct GenericFamilyInputs {
  double theta0 = 0.0;
  long n = 0;
  double var_T = 0.0;
  double third_abs_central_T = 0.0;
  double mse = 0.0;
  double fourth_mle_moment = 0.0;
  double sup_third_deriv = 0.0;
  double r2_conditional_bound = 0.0;
  double epsilon = 0.0;
  bool sup_third_is_deterministic = false;
};

stein::BoundIngredients expfam_ingredients(const ExpFamilySpec& spec,
                                           const GenericFamilyInputs& in);

/// Canonical exponential model; requires n >= 3 and 0 < epsilon < theta0
/// (default theta0 / 2).
stein::BoundIngredients exp_canonical_ingredients(double theta0, long n,
                                                  std::optional<double> epsilon = {});

/// Mean-parameterised exponential model; 0 < epsilon < theta0 (default
/// theta0 / 2).
stein::BoundIngredients exp_noncanonical_ingredients(double theta0, long n,
                                                     std::optional<double> epsilon = {});

struct ModelDescriptor {
  std::string name;
  double theta0 = 0.0;
  bool closed_form_mle = true;
  std::function<double(std::span<const double>)> mle;
  std::function<stein::BoundIngredients(double theta0, long n, std::optional<double> epsilon)>
      ingredients_for;
};

/// Registry of the closed-form exponential models, keyed by
/// "exp-canonical" and "exp-noncanonical". Throws ValidationError otherwise.
ModelDescriptor find_model(const std::string& name, double theta0);

}  // namespace mlebound::expfam
