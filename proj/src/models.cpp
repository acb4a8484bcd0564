#include "mlebound/models.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mlebound/errors.hpp"
#include "mlebound/expfam.hpp"
#include "mlebound/msebound.hpp"

namespace mlebound::models {

namespace {

double mean_of(std::span<const double> sample) {
  if (sample.empty()) throw ValidationError("MLE of an empty sample");
  return std::accumulate(sample.begin(), sample.end(), 0.0) / static_cast<double>(sample.size());
}

msebound::BetaParams beta_params(const ModelSpec& spec) { return {spec.theta0, spec.beta}; }

}  // namespace

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"exp-canonical", "exp-noncanonical", "poisson",
                                              "beta"};
  return names;
}

Kind ModelSpec::kind() const {
  if (name == "exp-canonical") return Kind::exp_canonical;
  if (name == "exp-noncanonical") return Kind::exp_noncanonical;
  if (name == "poisson") return Kind::poisson;
  if (name == "beta") return Kind::beta;
  throw ValidationError(fmt::format("unknown model '{}'; expected one of {}", name,
                                    fmt::join(model_names(), ", ")));
}

void ModelSpec::validate() const {
  const Kind k = kind();
  if (!std::isfinite(theta0)) throw ValidationError(fmt::format("theta0 must be finite, got {}", theta0));
  if (k == Kind::poisson) {
    if (!(theta0 >= 0.0)) throw ValidationError(fmt::format("poisson theta0 must be >= 0, got {}", theta0));
  } else if (!(theta0 > 0.0)) {
    throw ValidationError(fmt::format("{} theta0 must be > 0, got {}", name, theta0));
  }
  if (k == Kind::beta && (!(beta > 0.0) || !std::isfinite(beta))) {
    throw ValidationError(fmt::format("beta shape must be positive, got {}", beta));
  }
  if (epsilon && k == Kind::poisson) {
    throw ValidationError("poisson fixes epsilon = theta0* / 2; --epsilon is not accepted");
  }
  if (epsilon && !(*epsilon > 0.0 && *epsilon < theta0)) {
    throw ValidationError(fmt::format("epsilon must lie in (0, theta0 = {}), got {}", theta0, *epsilon));
  }
}

long minimal_n(const ModelSpec& spec) {
  spec.validate();
  switch (spec.kind()) {
    case Kind::exp_canonical:
      return 3;
    case Kind::beta:
      return msebound::minimal_n(msebound::beta_ingredients(beta_params(spec), spec.epsilon));
    default:
      return 1;
  }
}

stein::BoundBreakdown bound(const ModelSpec& spec, long n, stein::HWeights w) {
  spec.validate();
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  switch (spec.kind()) {
    case Kind::exp_canonical:
      return stein::mle_bound_general(expfam::exp_canonical_ingredients(spec.theta0, n, spec.epsilon), w);
    case Kind::exp_noncanonical:
      return stein::mle_bound_general(
          expfam::exp_noncanonical_ingredients(spec.theta0, n, spec.epsilon), w);
    case Kind::poisson:
      return boundary::poisson_bound(spec.theta0, n, spec.c, w);
    case Kind::beta: {
      const auto p = beta_params(spec);
      const auto ing = msebound::beta_ingredients(p, spec.epsilon);
      // The closed form keeps the extended-precision B3 at the default epsilon.
      const double a1 = spec.epsilon ? msebound::mse_upper_bound_a1(ing, n)
                                     : msebound::beta_b3(p, n) / std::sqrt(static_cast<double>(n));
      return msebound::implicit_distance_bound(ing, n, a1, w);
    }
  }
  throw ValidationError("unreachable model kind");
}

double fisher_info(const ModelSpec& spec) {
  spec.validate();
  const double t = spec.theta0;
  switch (spec.kind()) {
    case Kind::exp_canonical:
      return 1.0 / (t * t);
    case Kind::exp_noncanonical:
      return 1.0 / (t * t);
    case Kind::poisson:
      if (t == 0.0) throw ValidationError("poisson Fisher information is infinite at theta0 = 0");
      return 1.0 / t;
    case Kind::beta:
      return msebound::beta_ingredients(beta_params(spec)).fisher_info;
  }
  throw ValidationError("unreachable model kind");
}

void sample(const ModelSpec& spec, long n, rng::Stream& stream, std::vector<double>& out) {
  if (n < 1) throw ValidationError(fmt::format("n must be >= 1, got {}", n));
  out.resize(static_cast<std::size_t>(n));
  const double t = spec.theta0;
  switch (spec.kind()) {
    case Kind::exp_canonical:
      for (auto& x : out) x = stream.exponential(t);
      return;
    case Kind::exp_noncanonical:
      // Mean theta0: Exp(1) scaled by theta0.
      for (auto& x : out) x = t * stream.exponential(1.0);
      return;
    case Kind::poisson:
      for (auto& x : out) x = stream.poisson(t);
      return;
    case Kind::beta:
      for (auto& x : out) x = stream.beta(t, spec.beta);
      return;
  }
}

double mle(const ModelSpec& spec, std::span<const double> sample) {
  switch (spec.kind()) {
    case Kind::exp_canonical: {
      const double m = mean_of(sample);
      if (!(m > 0.0)) throw NumericalError("degenerate sample: exp-canonical MLE needs a positive mean");
      return 1.0 / m;
    }
    case Kind::exp_noncanonical:
    case Kind::poisson:
      return mean_of(sample);
    case Kind::beta:
      return spec.beta == 1.0 ? msebound::beta_mle_unit_beta(sample)
                              : msebound::beta_mle(sample, spec.beta);
  }
  throw ValidationError("unreachable model kind");
}

double standardize(const ModelSpec& spec, long n, double theta_hat) {
  const double root_n = std::sqrt(static_cast<double>(n));
  if (spec.kind() == Kind::poisson) return root_n * (theta_hat - spec.theta0);
  return root_n * std::sqrt(fisher_info(spec)) * (theta_hat - spec.theta0);
}

double target_sd(const ModelSpec& spec) {
  return spec.kind() == Kind::poisson ? std::sqrt(spec.theta0) : 1.0;
}

}  // namespace mlebound::models
