#pragma once

#include <optional>
#include <string_view>

#include "mlebound/stein.hpp"

namespace mlebound::boundary {

/// Affine perturbation q pushing an interval's finite endpoints inward by
/// c / n. Endpoints may be infinite.
struct PerturbationSpec {
  double a;
  double b;
  double c;
  long n;

  /// Throws ValidationError unless a < b, c > 0, n >= 1 and, when both
  /// endpoints are finite, c < n (b - a) / 2.
  void validate() const;
};

/// q(x): maps a to a + c/n and b to b - c/n when both are finite; shifts by
/// +c/n (left endpoint only) or -c/n (right endpoint only); identity when
/// both endpoints are infinite. Throws DomainError outside [a, b].
double perturb(const PerturbationSpec& spec, double x);

/// theta0* = q(theta0) for the parameter interval.
double perturbed_theta(double theta0, const PerturbationSpec& spec);

/// Expected Fisher information at theta0, or the degenerate case where it is
/// infinite or undefined and 1 / i(theta0) is taken to be 0.
class FisherInformation {
 public:
  static FisherInformation finite(double value);
  static FisherInformation degenerate() { return FisherInformation{}; }

  bool is_degenerate() const noexcept { return !value_.has_value(); }
  /// Throws std::bad_optional_access when degenerate.
  double value() const { return value_.value(); }
  /// 1 / i(theta0), with 0 in the degenerate case.
  double inverse() const noexcept { return value_ ? 1.0 / *value_ : 0.0; }

 private:
  FisherInformation() = default;
  std::optional<double> value_;
};

/// Mean, variance and third absolute central moment of
/// Y_i = l'(theta0*; q(X_i)) / (sqrt(n) i(theta0*)).
struct PerturbedScoreStats {
  double w1 = 0.0;
  double w2 = 0.0;
  double third_abs_central = 0.0;
};

inline constexpr std::string_view kParamShift = "param_shift";
inline constexpr std::string_view kMleGap = "mle_gap";
inline constexpr std::string_view kScoreMismatch = "score_mismatch";
inline constexpr std::string_view kPerturbedScore = "perturbed_score";
inline constexpr std::string_view kMarkovTail = "markov_tail";
inline constexpr std::string_view kPerturbedTaylor = "perturbed_taylor";

/// Bound on |E h(sqrt(n) (theta_hat - theta0)) - E h(K)|, K ~ N(0, 1/i(theta0)),
/// for a discrete model whose MLE may sit on the parameter boundary.
///
/// perturbed_ingredients describe the model at theta0* with the perturbed
/// data; their fisher_info is i(theta0*). The score-mismatch and perturbed
/// score terms are dropped when 1 / i(theta0) = 0.
stein::BoundBreakdown general_perturbed_bound(double theta0, long n,
                                              const PerturbationSpec& spec_param,
                                              const PerturbedScoreStats& stats,
                                              const FisherInformation& fisher_at_theta0,
                                              double mle_gap_expectation,
                                              const stein::BoundIngredients& perturbed_ingredients,
                                              stein::HWeights w = {});

/// Perturbation constant for the Poisson bound: explicit c > 0, or the value
/// minimising the bound.
struct PoissonC {
  std::optional<double> value;  // empty = auto
  static PoissonC automatic() { return {}; }
  static PoissonC fixed(double c) { return {c}; }
};

/// Poisson(theta0) on [0, inf): zero at theta0 = 0, otherwise the perturbed
/// bound with c1 = c2 = c and epsilon = theta0* / 2.
stein::BoundBreakdown poisson_bound(double theta0, long n, PoissonC c = PoissonC::fixed(1.0),
                                    stein::HWeights w = {});

/// argmin over c > 0 of the Poisson bound total, searched on [1e-6, c_max]
/// with c_max >= n theta0 large enough that no larger c can do better.
double poisson_optimal_c(double theta0, long n, stein::HWeights w = {});

/// Direct Stein bound for sqrt(n)(Xbar - theta0) against N(0, theta0).
double poisson_direct_bound(double theta0, long n);

}  // namespace mlebound::boundary
