#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlebound/boundary.hpp"
#include "mlebound/rng.hpp"
#include "mlebound/stein.hpp"

namespace mlebound::models {

enum class Kind { exp_canonical, exp_noncanonical, poisson, beta };

/// A registered model at a fixed true parameter.
struct ModelSpec {
  std::string name;
  double theta0 = 1.0;
  /// Known second shape parameter; only used by "beta".
  double beta = 1.0;
  std::optional<double> epsilon;
  /// Perturbation constant; only used by "poisson".
  boundary::PoissonC c = boundary::PoissonC::fixed(1.0);

  /// Throws ValidationError for an unknown name or a parameter outside the
  /// model's parameter space.
  void validate() const;
  Kind kind() const;
};

/// exp-canonical, exp-noncanonical, poisson, beta.
const std::vector<std::string>& model_names();

/// Smallest n for which the model's bound is defined.
long minimal_n(const ModelSpec& spec);

/// Bound on |E h(standardized MLE) - E h(target)| for the given norms of h.
stein::BoundBreakdown bound(const ModelSpec& spec, long n, stein::HWeights w = {});

/// Per-observation expected Fisher information at theta0. Throws
/// ValidationError for poisson at theta0 = 0.
double fisher_info(const ModelSpec& spec);

/// Fills out with n draws from the model at theta0.
void sample(const ModelSpec& spec, long n, rng::Stream& stream, std::vector<double>& out);

double mle(const ModelSpec& spec, std::span<const double> sample);

/// sqrt(n i(theta0)) (theta_hat - theta0), or sqrt(n) (theta_hat - theta0)
/// for poisson.
double standardize(const ModelSpec& spec, long n, double theta_hat);

/// Standard deviation of the normal target of standardize(): 1, or
/// sqrt(theta0) for poisson.
double target_sd(const ModelSpec& spec);

}  // namespace mlebound::models
