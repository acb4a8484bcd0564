#pragma once

#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mlebound::stein {

/// Norms of a test function h that scale the individual bound terms:
/// sup_norm = ||h||, lip_norm = ||h'||. The defaults describe the class of
/// functions with ||h|| + ||h'|| <= 1, i.e. a bounded Wasserstein bound.
struct HWeights {
  double sup_norm = 1.0;
  double lip_norm = 1.0;
};

/// A test function together with its norms.
struct TestFunction {
  std::function<double(double)> evaluator;
  double sup_norm = 0.0;
  double lip_norm = 0.0;
  std::string label;

  double operator()(double x) const { return evaluator(x); }
  HWeights weights() const { return {sup_norm, lip_norm}; }
  bool in_unit_class() const { return sup_norm + lip_norm <= 1.0; }
};

/// h(x) = 1 / (x^2 + 2), with ||h|| = 1/2 and ||h'|| = 3 sqrt(1.5) / 16.
TestFunction reciprocal_quadratic();

/// Norms of reciprocal_quadratic(), as used for table reproduction.
HWeights table_weights();

struct BoundTerm {
  std::string label;
  double value = 0.0;
};

/// Additive decomposition of a bound; total() is the sum of the terms.
class BoundBreakdown {
 public:
  /// Throws NumericalError if value is negative or not finite.
  void add(std::string label, double value);

  const std::vector<BoundTerm>& terms() const noexcept { return terms_; }
  double total() const noexcept;

  /// Value of the term with the given label; throws std::out_of_range.
  double term(std::string_view label) const;
  bool has_term(std::string_view label) const noexcept;

 private:
  std::vector<BoundTerm> terms_;
};

/// Per-model quantities consumed by the general MLE bound.
struct BoundIngredients {
  double theta0 = 0.0;
  long n = 0;
  /// Expected Fisher information for a single observation at theta0.
  double fisher_info = 0.0;
  /// E|d/dtheta log f(X_1 | theta0)|^3, or an upper bound for it.
  double third_abs_score_moment = 0.0;
  /// E(theta_hat - theta0)^2.
  double mse = 0.0;
  /// E(theta_hat - theta0)^4.
  double fourth_mle_moment = 0.0;
  /// Bound on sup_{|theta - theta0| <= eps} |l'''(theta; X)|, already
  /// including any factor of n from the model formula.
  double sup_third_deriv = 0.0;
  /// Bound on E(|R2| given |theta_hat - theta0| <= eps).
  double r2_conditional_bound = 0.0;
  double epsilon = 0.0;
  /// The third-derivative bound does not depend on the data, so the Taylor
  /// term uses sup * mse instead of the Cauchy-Schwarz split with the
  /// fourth moment.
  bool sup_third_is_deterministic = false;

  /// Throws ValidationError for n < 1, non-positive epsilon or Fisher
  /// information, or negative moments; NumericalError for non-finite fields.
  void validate() const;
};

/// Stable term labels of the general bound.
inline constexpr std::string_view kScore = "score";
inline constexpr std::string_view kMarkovTail = "markov_tail";
inline constexpr std::string_view kR2 = "r2";
inline constexpr std::string_view kTaylorRemainder = "taylor_remainder";

/// ||h'|| / sqrt(n) * (2 + E|l'|^3 / i^{3/2}) as a single "score" term.
BoundBreakdown score_bound(const BoundIngredients& ing, HWeights w = {});

/// Score, Markov tail, R2 and Taylor remainder terms of the general bound on
/// |E h(sqrt(n i) (theta_hat - theta0)) - E h(Z)|.
BoundBreakdown mle_bound_general(const BoundIngredients& ing, HWeights w = {});

/// B_K = 2 sqrt(bw_bound): Kolmogorov bound from a bounded Wasserstein bound.
double kolmogorov_from_bw(double bw_bound);

struct ConfidenceInterval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  /// False when B_K >= alpha / 2; the interval is then the whole real line.
  bool bounded = false;

  bool contains(double theta) const noexcept {
    return !bounded || (lower < theta && theta < upper);
  }
};

/// Conservative 100(1 - alpha)% interval for theta0, widened by B_K.
ConfidenceInterval conservative_ci(double theta_hat, long n, double fisher_info,
                                   double alpha, double b_k);

/// (1 / sqrt(n)) (2 + E|Y_1|^3 / sigma^3) for W = n^{-1/2} sum Y_i vs N(0, sigma^2).
double direct_sum_bound(double sigma, double third_abs_moment, long n);

/// Hoelder: E|Y|^3 <= (E Y^4)^{3/4}.
double holder_third_from_fourth(double fourth_moment);

}  // namespace mlebound::stein
