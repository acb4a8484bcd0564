#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlebound/models.hpp"
#include "mlebound/msebound.hpp"
#include "mlebound/rng.hpp"
#include "mlebound/stein.hpp"

namespace mlebound::montecarlo {

inline constexpr long kDefaultTrials = 10000;

struct SimulationConfig {
  models::ModelSpec model;
  long n = 0;
  long trials = kDefaultTrials;
  std::uint64_t seed = 0;
  stein::TestFunction test_function = stein::reciprocal_quadratic();
  /// Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  /// not depend on this value.
  unsigned threads = 1;

  void validate() const;
};

struct SimulationReport {
  std::string model;
  double theta0 = 0.0;
  double beta = 1.0;
  long n = 0;
  long trials = 0;
  std::uint64_t seed = 0;
  std::string rng_algorithm;
  /// What empirical_distance measures: "h-specific discrepancy" for a single
  /// test function, never the supremum over a class.
  std::string quantity;
  /// |mean of h(standardized MLE) - E h(target)|.
  double empirical_distance = 0.0;
  double empirical_mse = 0.0;
  double bound_total = 0.0;
  stein::BoundBreakdown bound_terms;
  /// Standard error of the mean of h; empty when trials == 1.
  std::optional<double> standard_error;
  /// bound_total minus the compared empirical quantity.
  double error = 0.0;
  double standardized_mean = 0.0;
  double standardized_variance = 0.0;
};

SimulationReport run_simulation(const SimulationConfig& cfg);

/// Empirical MSE of the Beta MLE against B3^2 / n for n = n_from, n_from +
/// n_step, ..., <= n_to. Throws ValidationError if n_from is below the
/// minimal n.
std::vector<SimulationReport> run_mse_sweep(const msebound::BetaParams& p, long n_from,
                                            long n_to, long n_step, long trials,
                                            std::uint64_t seed, unsigned threads = 1);

struct ConditionalCheck {
  /// Mean of f(M) over trials with M <= eps.
  double lhs = 0.0;
  /// Mean of f(M) over all trials.
  double rhs = 0.0;
  double lhs_standard_error = 0.0;
  double rhs_standard_error = 0.0;
  long conditioning_count = 0;
  long trials = 0;
};

/// Monte Carlo estimates of E[f(M) | M <= eps] and E[f(M)]. Throws
/// NumericalError if no draw satisfies M <= eps.
ConditionalCheck conditional_expectation_check(const std::function<double(rng::Stream&)>& draw_m,
                                               const std::function<double(double)>& f,
                                               double eps, long trials, std::uint64_t seed);

struct CoverageReport {
  double coverage = 0.0;
  double standard_error = 0.0;
  double b_k = 0.0;
  /// True when B_K >= alpha / 2 and every interval is the whole line.
  bool whole_line = false;
  long trials = 0;
};

/// Fraction of trials whose conservative interval contains theta0. The
/// interval targets N(0, 1), so poisson is rejected.
CoverageReport ci_coverage(const models::ModelSpec& model, long n, double alpha, long trials,
                           std::uint64_t seed, unsigned threads = 1);

}  // namespace mlebound::montecarlo
