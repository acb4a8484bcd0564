#pragma once

#include <optional>
#include <span>

#include "mlebound/stein.hpp"

namespace mlebound::msebound {

/// Inputs of the self-referential MSE bound for models with bounded support
/// and a data-free bound C1 on the per-observation third log-likelihood
/// derivative.
struct ImplicitModelIngredients {
  double fisher_info = 0.0;
  double third_abs_score_moment = 0.0;
  /// Var[l''(theta0; X_1)].
  double var_l2 = 0.0;
  /// sup_{|theta - theta0| <= eps} |l'''(theta; x_1)| <= c1_const.
  double c1_const = 0.0;
  /// ||x|| and ||x^2|| over the support.
  double sup_x_norm = 0.0;
  double sup_x2_norm = 0.0;
  double epsilon = 0.0;

  void validate() const;
};

/// D1 = 1 - 2 ||x^2|| / (n i eps^2) - ||x|| C1 / (sqrt(n) i^{3/2}); the MSE
/// bound needs D1 > 0.
double d1(const ImplicitModelIngredients& ing, long n);

/// Smallest n with D1 > 0 (ceiling of the positive root of the quadratic in
/// sqrt(n)).
long minimal_n(const ImplicitModelIngredients& ing);

/// A1, an upper bound on sqrt(E(theta_hat - theta0)^2). Throws
/// ValidationError if n < minimal_n(ing).
double mse_upper_bound_a1(const ImplicitModelIngredients& ing, long n);

/// Distance bound with the MSE replaced by A1^2: score, markov_tail,
/// taylor_remainder and r2 terms.
stein::BoundBreakdown implicit_distance_bound(const ImplicitModelIngredients& ing, long n,
                                              double a1, stein::HWeights w = {});

struct BetaParams {
  double theta0;
  double beta;

  void validate() const;
};

/// Polygamma-derived constants of the Beta(theta0, beta) bound.
struct BetaConstants {
  double b1;
  double b2;
  double d_psi1;
  long minimal_n;
};

/// B1, B2 (at epsilon = theta0 / 2), D_psi1 and the minimal sample size.
BetaConstants beta_constants(const BetaParams& p);

/// Ingredients for Beta(theta0, beta) with theta0 unknown. epsilon defaults
/// to theta0 / 2; c1_const is evaluated at the chosen epsilon.
ImplicitModelIngredients beta_ingredients(const BetaParams& p,
                                          std::optional<double> epsilon = {});

/// B3 = sqrt(n) A1 for the Beta model; B3^2 / n bounds the MSE. Throws
/// ValidationError below the minimal n.
double beta_b3(const BetaParams& p, long n);

/// Closed-form Beta bound: score, markov_tail and taylor_remainder terms.
stein::BoundBreakdown beta_distance_bound(const BetaParams& p, long n);

/// Root of n [psi(theta + beta) - psi(theta)] + sum log x_i = 0.
///
/// Safeguarded Newton on a bracket that starts at [1e-8, 1e8]; throws
/// DomainError for observations outside (0, 1) and NumericalError if the
/// root is not bracketed or the iteration stalls.
double beta_mle(std::span<const double> sample, double beta);

/// -n / sum log x_i, the closed form for beta = 1.
double beta_mle_unit_beta(std::span<const double> sample);

}  // namespace mlebound::msebound
