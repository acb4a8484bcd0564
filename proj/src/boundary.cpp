#include "mlebound/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "mlebound/errors.hpp"

namespace mlebound::boundary {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower end of the search range for the automatic Poisson constant.
constexpr double kMinPoissonC = 1e-6;

bool finite_both(const PerturbationSpec& s) { return std::isfinite(s.a) && std::isfinite(s.b); }

stein::BoundBreakdown poisson_breakdown(double theta0, long n, double c, stein::HWeights w) {
  const double nd = static_cast<double>(n);
  const PerturbationSpec spec{0.0, kInf, c, n};
  const double theta_star = perturbed_theta(theta0, spec);

  // Y_i = (X_i - theta0) / sqrt(n), so w1 = 0 and w2 = theta0 / n; the third
  // absolute moment goes through Hoelder with E(X - theta0)^4 = 3 theta0^2 + theta0.
  const double central_fourth = 3.0 * theta0 * theta0 + theta0;
  PerturbedScoreStats stats;
  stats.w1 = 0.0;
  stats.w2 = theta0 / nd;
  stats.third_abs_central = stein::holder_third_from_fourth(central_fourth) / std::pow(nd, 1.5);

  // Both MLEs are sample means and q shifts every observation by c / n.
  const double gap = c / nd;

  stein::BoundIngredients perturbed;
  perturbed.theta0 = theta_star;
  perturbed.n = n;
  perturbed.fisher_info = 1.0 / theta_star;
  perturbed.third_abs_score_moment =
      stein::holder_third_from_fourth(central_fourth) / (theta_star * theta_star * theta_star);
  perturbed.mse = theta0 / nd;
  perturbed.fourth_mle_moment = theta0 / (nd * nd * nd) + 3.0 * theta0 * theta0 / (nd * nd);
  perturbed.epsilon = 0.5 * theta_star;
  // l''' = 2 n thetahat* / theta^3, bounded on the conditioning event.
  perturbed.sup_third_deriv = 24.0 * nd / (theta_star * theta_star);
  // R2 = -n (thetahat* - theta0*)^2 / theta0*^2.
  perturbed.r2_conditional_bound = theta0 / (theta_star * theta_star);
  perturbed.sup_third_is_deterministic = false;

  return general_perturbed_bound(theta0, n, spec, stats, FisherInformation::finite(1.0 / theta0),
                                 gap, perturbed, w);
}

double golden_section(const auto& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 500 && (hi - lo) > 1e-10 * std::max(1.0, std::abs(lo)); ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

void PerturbationSpec::validate() const {
  if (!(a < b)) throw ValidationError(fmt::format("perturbation interval needs a < b, got [{}, {}]", a, b));
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ValidationError(fmt::format("perturbation constant c must be positive, got {}", c));
  }
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  if (finite_both(*this) && !(c < static_cast<double>(n) * (b - a) / 2.0)) {
    throw ValidationError(
        fmt::format("perturbation constant c = {} must be below n (b - a) / 2 = {}", c,
                    static_cast<double>(n) * (b - a) / 2.0));
  }
}

double perturb(const PerturbationSpec& spec, double x) {
  spec.validate();
  if (!(x >= spec.a && x <= spec.b)) {
    throw DomainError(fmt::format("x = {} outside [{}, {}]", x, spec.a, spec.b));
  }
  const double shift = spec.c / static_cast<double>(spec.n);
  const bool left = std::isfinite(spec.a);
  const bool right = std::isfinite(spec.b);
  if (left && right) return x + shift - 2.0 * shift * ((x - spec.a) / (spec.b - spec.a));
  if (left) return x + shift;
  if (right) return x - shift;
  return x;
}

double perturbed_theta(double theta0, const PerturbationSpec& spec) {
  return perturb(spec, theta0);
}

FisherInformation FisherInformation::finite(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(
        fmt::format("finite Fisher information must be positive, got {}; use degenerate()", value));
  }
  FisherInformation f;
  f.value_ = value;
  return f;
}

stein::BoundBreakdown general_perturbed_bound(double theta0, long n,
                                              const PerturbationSpec& spec_param,
                                              const PerturbedScoreStats& stats,
                                              const FisherInformation& fisher_at_theta0,
                                              double mle_gap_expectation,
                                              const stein::BoundIngredients& perturbed_ingredients,
                                              stein::HWeights w) {
  spec_param.validate();
  perturbed_ingredients.validate();
  if (spec_param.n != n) {
    throw ValidationError(fmt::format("perturbation spec built for n = {}, bound requested for n = {}",
                                      spec_param.n, n));
  }
  if (!(theta0 >= spec_param.a && theta0 <= spec_param.b)) {
    throw DomainError(fmt::format("theta0 = {} outside the parameter interval", theta0));
  }
  if (!(mle_gap_expectation >= 0.0)) {
    throw ValidationError(fmt::format("E|thetahat - thetahat*| must be >= 0, got {}",
                                      mle_gap_expectation));
  }
  const bool active = fisher_at_theta0.inverse() > 0.0;
  if (active && !(stats.w2 > 0.0)) {
    throw ValidationError(fmt::format("perturbed score variance w2 must be > 0, got {}", stats.w2));
  }

  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  const double shift_factor = [&] {
    const bool left = std::isfinite(spec_param.a);
    const bool right = std::isfinite(spec_param.b);
    if (left && right) return std::abs(1.0 - 2.0 * (theta0 - spec_param.a) / (spec_param.b - spec_param.a));
    return (left || right) ? 1.0 : 0.0;
  }();

  stein::BoundBreakdown out;
  out.add(std::string(kParamShift), w.lip_norm * spec_param.c / root_n * shift_factor);
  out.add(std::string(kMleGap), w.lip_norm * root_n * mle_gap_expectation);

  double mismatch = 0.0;
  double score = 0.0;
  if (active) {
    const double i0 = fisher_at_theta0.value();
    const double w1 = stats.w1;
    const double w2 = stats.w2;
    mismatch = std::abs(1.0 - 1.0 / std::sqrt(w2 * nd * i0)) * std::sqrt(nd * w2 + (nd * w1) * (nd * w1)) +
               root_n * std::abs(w1) / std::sqrt(w2 * i0);
    score = (2.0 + stats.third_abs_central / std::pow(w2, 1.5)) / root_n;
  }
  out.add(std::string(kScoreMismatch), w.lip_norm * mismatch);
  out.add(std::string(kPerturbedScore), w.lip_norm * score);

  const auto& p = perturbed_ingredients;
  out.add(std::string(kMarkovTail), 2.0 * w.sup_norm * p.mse / (p.epsilon * p.epsilon));
  const double taylor_core = p.sup_third_is_deterministic ? p.sup_third_deriv * p.mse
                                                          : p.sup_third_deriv * std::sqrt(p.fourth_mle_moment);
  out.add(std::string(kPerturbedTaylor),
          w.lip_norm / (root_n * p.fisher_info) * (p.r2_conditional_bound + 0.5 * taylor_core));
  return out;
}

double poisson_optimal_c(double theta0, long n, stein::HWeights w) {
  if (!(theta0 > 0.0)) {
    throw ValidationError(fmt::format("automatic c needs theta0 > 0, got {}", theta0));
  }
  const auto total = [&](double c) { return poisson_breakdown(theta0, n, c, w).total(); };
  // param_shift + mle_gap = 2 ||h'|| c / sqrt(n) alone exceeds total(1) beyond
  // c_cut, so the search range only has to reach past it.
  double upper = static_cast<double>(n) * theta0;
  if (w.lip_norm > 0.0) {
    const double c_cut = std::sqrt(static_cast<double>(n)) * total(1.0) / (2.0 * w.lip_norm);
    upper = std::max(upper, c_cut);
  }
  if (upper <= kMinPoissonC) return upper;

  // Log-spaced scan to bracket the minimum, then golden-section refinement.
  constexpr int kGrid = 241;
  const double log_lo = std::log(kMinPoissonC);
  const double log_hi = std::log(upper);
  std::vector<double> grid(kGrid);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    grid[i] = (i == kGrid - 1) ? upper : std::exp(log_lo + (log_hi - log_lo) * i / (kGrid - 1));
    const double v = total(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = static_cast<std::size_t>(i);
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[best + 1 < grid.size() ? best + 1 : best];
  if (!(lo < hi)) return grid[best];
  const double refined = golden_section(total, lo, hi);
  return total(refined) <= best_value ? refined : grid[best];
}

stein::BoundBreakdown poisson_bound(double theta0, long n, PoissonC c, stein::HWeights w) {
  if (!(theta0 >= 0.0) || !std::isfinite(theta0)) {
    throw ValidationError(fmt::format("Poisson theta0 must be finite and >= 0, got {}", theta0));
  }
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  if (c.value && !(*c.value > 0.0)) {
    throw ValidationError(fmt::format("Poisson perturbation constant c must be > 0, got {}", *c.value));
  }
  if (theta0 == 0.0) {
    // Every observation is 0: sqrt(n) thetahat and K ~ N(0, 0) are both the
    // point mass at 0.
    stein::BoundBreakdown zero;
    for (auto label : {kParamShift, kMleGap, kScoreMismatch, kPerturbedScore, kMarkovTail,
                       kPerturbedTaylor}) {
      zero.add(std::string(label), 0.0);
    }
    return zero;
  }
  const double chosen = c.value ? *c.value : poisson_optimal_c(theta0, n, w);
  return poisson_breakdown(theta0, n, chosen, w);
}

double poisson_direct_bound(double theta0, long n) {
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) {
    throw DomainError(fmt::format("poisson_direct_bound needs theta0 > 0, got {}", theta0));
  }
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  return (2.0 + std::pow(3.0 * theta0 + 1.0, 0.75) / std::pow(theta0, 0.75)) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace mlebound::boundary
