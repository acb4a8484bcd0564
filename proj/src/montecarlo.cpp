#include "mlebound/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "mlebound/errors.hpp"
#include "mlebound/specfun.hpp"

namespace mlebound::montecarlo {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single value
};

Moments moments(const std::vector<double>& xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  Moments m;
  m.mean = s.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum sq;
    for (double x : xs) sq.add((x - m.mean) * (x - m.mean));
    m.variance = sq.value() / static_cast<double>(xs.size() - 1);
  }
  return m;
}

unsigned resolve_threads(unsigned requested, long trials) {
  unsigned t = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<long>(t, std::max(1L, trials)));
}

// Runs body(trial) for every trial; the exception of the lowest failing
// trial index is rethrown, prefixed with that index.
template <typename Body>
void for_each_trial(long trials, unsigned threads, Body body) {
  std::mutex mu;
  long failed_trial = -1;
  std::exception_ptr failure;

  const auto worker = [&](long begin, long end) {
    for (long t = begin; t < end; ++t) {
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (failed_trial < 0 || t < failed_trial) {
          failed_trial = t;
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  const unsigned workers = resolve_threads(threads, trials);
  if (workers == 1) {
    worker(0, trials);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const long begin = std::min<long>(trials, w * chunk);
      const long end = std::min<long>(trials, begin + chunk);
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("trial {}: {}", failed_trial, e.what()));
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("trial {}: {}", failed_trial, e.what()));
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("trial {}: {}", failed_trial, e.what()));
    }
  }
}

void require_trials(long trials) {
  if (trials < 1) throw ValidationError(fmt::format("trials must be >= 1, got {}", trials));
}

}  // namespace

void SimulationConfig::validate() const {
  model.validate();
  require_trials(trials);
  const long needed = models::minimal_n(model);
  if (n < needed) {
    throw ValidationError(needed > 1 ? fmt::format("n below minimal n = {}", needed)
                                     : fmt::format("n must be >= 1, got {}", n));
  }
  if (!test_function.evaluator) throw ValidationError("simulation needs a test function");
}

SimulationReport run_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  const auto bound = models::bound(cfg.model, cfg.n, cfg.test_function.weights());

  const auto count = static_cast<std::size_t>(cfg.trials);
  std::vector<double> h_values(count);
  std::vector<double> sq_errors(count);
  std::vector<double> standardized(count);

  for_each_trial(cfg.trials, cfg.threads, [&](long trial) {
    // Each worker thread keeps one sample buffer for all of its trials.
    thread_local std::vector<double> local;
    rng::Stream stream(cfg.seed, static_cast<std::uint64_t>(trial));
    models::sample(cfg.model, cfg.n, stream, local);
    const double theta_hat = models::mle(cfg.model, local);
    const double z = models::standardize(cfg.model, cfg.n, theta_hat);
    const auto i = static_cast<std::size_t>(trial);
    h_values[i] = cfg.test_function(z);
    sq_errors[i] = (theta_hat - cfg.model.theta0) * (theta_hat - cfg.model.theta0);
    standardized[i] = z;
  });

  const Moments h = moments(h_values);
  const Moments z = moments(standardized);
  const double target = specfun::normal_expectation(cfg.test_function.evaluator, models::target_sd(cfg.model));

  SimulationReport r;
  r.model = cfg.model.name;
  r.theta0 = cfg.model.theta0;
  r.beta = cfg.model.beta;
  r.n = cfg.n;
  r.trials = cfg.trials;
  r.seed = cfg.seed;
  r.rng_algorithm = std::string(rng::kAlgorithm);
  r.quantity = "h-specific discrepancy";
  r.empirical_distance = std::abs(h.mean - target);
  r.empirical_mse = moments(sq_errors).mean;
  r.bound_total = bound.total();
  r.bound_terms = bound;
  if (cfg.trials > 1) r.standard_error = std::sqrt(h.variance / static_cast<double>(cfg.trials));
  r.error = r.bound_total - r.empirical_distance;
  r.standardized_mean = z.mean;
  r.standardized_variance = z.variance;
  return r;
}

std::vector<SimulationReport> run_mse_sweep(const msebound::BetaParams& p, long n_from, long n_to,
                                            long n_step, long trials, std::uint64_t seed,
                                            unsigned threads) {
  p.validate();
  require_trials(trials);
  if (n_step < 1) throw ValidationError(fmt::format("n step must be >= 1, got {}", n_step));
  if (n_to < n_from) throw ValidationError(fmt::format("empty n range [{}, {}]", n_from, n_to));
  const long needed = msebound::minimal_n(msebound::beta_ingredients(p));
  if (n_from < needed) throw ValidationError(fmt::format("n below minimal n = {}", needed));

  std::vector<SimulationReport> rows;
  for (long n = n_from; n <= n_to; n += n_step) {
    SimulationConfig cfg;
    cfg.model.name = "beta";
    cfg.model.theta0 = p.theta0;
    cfg.model.beta = p.beta;
    cfg.n = n;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    SimulationReport r = run_simulation(cfg);

    const double b3 = msebound::beta_b3(p, n);
    stein::BoundBreakdown mse_bound;
    mse_bound.add("mse_bound", b3 * b3 / static_cast<double>(n));
    r.quantity = "mse";
    r.bound_terms = mse_bound;
    r.bound_total = mse_bound.total();
    r.error = r.bound_total - r.empirical_mse;
    rows.push_back(std::move(r));
  }
  return rows;
}

ConditionalCheck conditional_expectation_check(const std::function<double(rng::Stream&)>& draw_m,
                                               const std::function<double(double)>& f, double eps,
                                               long trials, std::uint64_t seed) {
  require_trials(trials);
  if (!(eps > 0.0)) throw ValidationError(fmt::format("eps must be > 0, got {}", eps));

  std::vector<double> all;
  std::vector<double> conditioned;
  all.reserve(static_cast<std::size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    rng::Stream stream(seed, static_cast<std::uint64_t>(t));
    const double m = draw_m(stream);
    if (!(m >= 0.0)) throw DomainError(fmt::format("trial {}: M must be >= 0, got {}", t, m));
    const double fm = f(m);
    all.push_back(fm);
    if (m <= eps) conditioned.push_back(fm);
  }
  if (conditioned.empty()) {
    throw NumericalError(fmt::format("empty conditioning event: no draw with M <= {} in {} trials", eps, trials));
  }

  const Moments lhs = moments(conditioned);
  const Moments rhs = moments(all);
  ConditionalCheck out;
  out.lhs = lhs.mean;
  out.rhs = rhs.mean;
  out.lhs_standard_error = std::sqrt(lhs.variance / static_cast<double>(conditioned.size()));
  out.rhs_standard_error = std::sqrt(rhs.variance / static_cast<double>(trials));
  out.conditioning_count = static_cast<long>(conditioned.size());
  out.trials = trials;
  return out;
}

CoverageReport ci_coverage(const models::ModelSpec& model, long n, double alpha, long trials,
                           std::uint64_t seed, unsigned threads) {
  model.validate();
  require_trials(trials);
  if (model.kind() == models::Kind::poisson) {
    throw ValidationError("ci coverage needs a unit-normal target; poisson is standardized against N(0, theta0)");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError(fmt::format("alpha must lie in (0, 1), got {}", alpha));
  const long needed = models::minimal_n(model);
  if (n < needed) throw ValidationError(fmt::format("n below minimal n = {}", needed));

  const double b_k = stein::kolmogorov_from_bw(models::bound(model, n).total());
  const double info = models::fisher_info(model);

  CoverageReport out;
  out.b_k = b_k;
  out.trials = trials;
  out.whole_line = !stein::conservative_ci(model.theta0, n, info, alpha, b_k).bounded;

  std::vector<double> covered(static_cast<std::size_t>(trials), 1.0);
  if (!out.whole_line) {
    for_each_trial(trials, threads, [&](long trial) {
      thread_local std::vector<double> local;
      rng::Stream stream(seed, static_cast<std::uint64_t>(trial));
      models::sample(model, n, stream, local);
      const double theta_hat = models::mle(model, local);
      const auto ci = stein::conservative_ci(theta_hat, n, info, alpha, b_k);
      covered[static_cast<std::size_t>(trial)] = ci.contains(model.theta0) ? 1.0 : 0.0;
    });
  }
  out.coverage = moments(covered).mean;
  out.standard_error = std::sqrt(out.coverage * (1.0 - out.coverage) / static_cast<double>(trials));
  return out;
}

}  // namespace mlebound::montecarlo
