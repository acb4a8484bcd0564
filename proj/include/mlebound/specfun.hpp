#pragma once

#include <functional>

namespace mlebound::specfun {

/// Order m of the polygamma function; m = 0 is the digamma function itself.
class PolygammaOrder {
 public:
  /// Throws DomainError unless 0 <= m <= 3.
  explicit PolygammaOrder(int m);
  int value() const noexcept { return m_; }

 private:
  int m_;
};

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Digamma (order 0) or the m-th derivative of the digamma function, x > 0.
double polygamma(PolygammaOrder order, double x);

double digamma(double x);
double trigamma(double x);

/// Hurwitz zeta function sum_{k>=0} (q + k)^{-s} for s > 1, q > 0.
///
/// Evaluated by direct summation up to a shifted argument followed by the
/// Euler-Maclaurin tail. Polygamma orders m >= 1 are
/// (-1)^{m+1} m! zeta(m + 1, x).
double hurwitz_zeta(double s, double q);

double std_normal_pdf(double x);

/// Phi(x); saturates to 0/1 in the far tails.
double std_normal_cdf(double x);

/// Phi^{-1}(p) for 0 < p < 1, refined by Halley steps on std_normal_cdf.
double std_normal_quantile(double p);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Subdivides the interval with the largest error estimate until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). Throws NumericalError,
/// carrying the achieved estimate, if max_intervals is exhausted first.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    double rel_tol = 0.0,
                                    int max_intervals = 4000);

/// E[h(sd * Z)] for Z ~ N(0, 1), integrated over [-12 sd, 12 sd] to absolute
/// error 1e-8 or better. sd = 0 gives h(0) (point mass).
double normal_expectation(const std::function<double(double)>& h,
                          double sd = 1.0);

}  // namespace mlebound::specfun
