#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "mlebound/errors.hpp"
#include "mlebound/msebound.hpp"
#include "mlebound/specfun.hpp"

using namespace mlebound;
using msebound::BetaParams;

namespace {

const BetaParams kPaper{1.5, 1.0};

struct B3Reference {
  long n;
  double b3;
  double mse_bound;
};

// mpmath at 40 digits from the closed-form B3 expression.
constexpr B3Reference kB3[] = {
    {7460, 347.92049828688050953, 16.22636369010606214},
    {7500, 43.478304407529281343, 0.25204839388717068431},
    {7700, 17.977516315116427108, 0.04197286920263341814},
    {7900, 13.366355164362886227, 0.022615120301251949277},
    {8100, 11.15172407940590346, 0.015353203696691536422},
    {8300, 9.7924539426163093195, 0.011553271592561650676},
};

// Log-likelihood of Beta(theta, beta) up to terms free of theta.
double beta_loglik(double theta, double beta, double n, double log_sum) {
  return n * (std::lgamma(theta + beta) - std::lgamma(theta)) + (theta - 1.0) * log_sum;
}

std::vector<double> beta_sample(double a, double b, int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  std::vector<double> xs;
  while (static_cast<int>(xs.size()) < n) {
    const double g1 = ga(gen);
    const double x = g1 / (g1 + gb(gen));
    if (x > 0.0 && x < 1.0) xs.push_back(x);
  }
  return xs;
}

msebound::ImplicitModelIngredients random_ingredients(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.1, 3.0);
  msebound::ImplicitModelIngredients ing;
  ing.fisher_info = u(gen);
  ing.third_abs_score_moment = u(gen) * 5.0;
  ing.var_l2 = u(gen);
  ing.c1_const = u(gen) * 10.0;
  ing.sup_x_norm = u(gen);
  ing.sup_x2_norm = u(gen);
  ing.epsilon = u(gen);
  return ing;
}

}  // namespace

TEST_CASE("Beta(1.5, 1) constants") {
  const auto c = msebound::beta_constants(kPaper);
  CHECK(c.b1 == doctest::Approx(39.807316257217488).epsilon(1e-13));
  CHECK(c.b2 == doctest::Approx(25.562962962962963).epsilon(1e-15));
  CHECK(c.d_psi1 == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(c.minimal_n == 7460);
}

TEST_CASE("minimal n sits exactly at the sign change of D1") {
  const auto ing = msebound::beta_ingredients(kPaper);
  CHECK(msebound::minimal_n(ing) == 7460);
  CHECK(msebound::d1(ing, 7459) <= 0.0);
  CHECK(msebound::d1(ing, 7460) > 0.0);

  std::mt19937_64 gen(11);
  for (int k = 0; k < 200; ++k) {
    const auto r = random_ingredients(gen);
    const long m = msebound::minimal_n(r);
    CHECK(msebound::d1(r, m) > 0.0);
    if (m > 1) CHECK(msebound::d1(r, m - 1) <= 0.0);
  }
}

TEST_CASE("B3^2 / n reproduces the third results table") {
  const double published[] = {0.2517, 0.0416, 0.0223, 0.0151, 0.0112};
  for (int k = 0; k < 5; ++k) {
    const auto& ref = kB3[k + 1];
    CAPTURE(ref.n);
    const double b3 = msebound::beta_b3(kPaper, ref.n);
    const double bound = b3 * b3 / static_cast<double>(ref.n);
    CHECK(bound == doctest::Approx(ref.mse_bound).epsilon(1e-11));
    CHECK(std::abs(bound - published[k]) <= 5e-4);
  }
  // Right at the threshold the cancellation is at its worst.
  CHECK(msebound::beta_b3(kPaper, 7460) == doctest::Approx(kB3[0].b3).epsilon(1e-9));
}

TEST_CASE("below the minimal n is a validation error naming it") {
  try {
    msebound::beta_b3(kPaper, 7000);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()) == "n below minimal n = 7460");
  }
  CHECK_THROWS_AS(msebound::beta_distance_bound(kPaper, 7459), ValidationError);
  CHECK_THROWS_AS(msebound::mse_upper_bound_a1(msebound::beta_ingredients(kPaper), 100), ValidationError);
}

TEST_CASE("A1 is the positive root of D1 x^2 - b x - c") {
  std::mt19937_64 gen(3);
  for (int k = 0; k < 300; ++k) {
    const auto ing = random_ingredients(gen);
    const long n = msebound::minimal_n(ing) + static_cast<long>(gen() % 5000);
    const double nd = static_cast<double>(n);
    const double i = ing.fisher_info;
    const double dd = msebound::d1(ing, n);
    const double b = 2.0 * ing.sup_x_norm * std::sqrt(ing.var_l2) / (nd * std::pow(i, 1.5));
    const double c = (1.0 / (nd * i)) *
                     (1.0 + 2.0 * ing.sup_x_norm / std::sqrt(nd) * (2.0 + ing.third_abs_score_moment / std::pow(i, 1.5)));
    const double x = msebound::mse_upper_bound_a1(ing, n);
    CAPTURE(n);
    CHECK(x > 0.0);
    const double residual = dd * x * x - b * x - c;
    CHECK(std::abs(residual) <= 1e-9 * std::max({dd * x * x, b * x, c}));
  }
}

TEST_CASE("B3 equals sqrt(n) A1 and the bound assembles from A1") {
  const auto ing = msebound::beta_ingredients(kPaper);
  for (long n : {7460L, 7500L, 8300L, 20000L, 1000000L}) {
    CAPTURE(n);
    const double a1 = msebound::mse_upper_bound_a1(ing, n);
    const double b3 = msebound::beta_b3(kPaper, n);
    CHECK(b3 == doctest::Approx(std::sqrt(static_cast<double>(n)) * a1).epsilon(n == 7460 ? 1e-8 : 1e-11));

    const auto closed = msebound::beta_distance_bound(kPaper, n);
    const auto general = msebound::implicit_distance_bound(ing, n, b3 / std::sqrt(static_cast<double>(n)));
    CHECK(closed.total() == doctest::Approx(general.total()).epsilon(1e-12));
    CHECK(general.term(stein::kR2) == 0.0);
  }
}

TEST_CASE("implicit bound terms") {
  msebound::ImplicitModelIngredients ing;
  ing.fisher_info = 4.0;
  ing.third_abs_score_moment = 8.0;
  ing.var_l2 = 9.0;
  ing.c1_const = 2.0;
  ing.sup_x_norm = 1.0;
  ing.sup_x2_norm = 1.0;
  ing.epsilon = 0.5;
  const auto b = msebound::implicit_distance_bound(ing, 100, 0.1, {0.5, 0.25});
  CHECK(b.term(stein::kScore) == doctest::Approx(0.025 * 3.0));
  CHECK(b.term(stein::kMarkovTail) == doctest::Approx(2.0 * 0.5 * 0.01 / 0.25));
  CHECK(b.term(stein::kTaylorRemainder) == doctest::Approx(0.25 * 10.0 * 2.0 * 0.01 / 4.0));
  CHECK(b.term(stein::kR2) == doctest::Approx(0.25 * 3.0 * 0.1 / 2.0));
}

TEST_CASE("Beta ingredients for other shapes") {
  const BetaParams p{1.5, 2.0};
  const auto ing = msebound::beta_ingredients(p);
  using specfun::PolygammaOrder;
  CHECK(ing.fisher_info == doctest::Approx(specfun::trigamma(1.5) - specfun::trigamma(3.5)).epsilon(1e-13));
  CHECK(ing.c1_const == doctest::Approx(6.0 * 2.0 / std::pow(0.75, 4) + 6.6 * 2.0));
  // Unit beta: psi_1(theta) - psi_1(theta + 1) = 1/theta^2.
  for (double t = 0.05; t < 500.0; t *= 1.9) {
    CHECK(msebound::beta_ingredients({t, 1.0}).fisher_info == doctest::Approx(1.0 / (t * t)).epsilon(1e-14));
  }
  const BetaParams frac{2.0, 0.5};
  CHECK(msebound::beta_ingredients(frac).fisher_info ==
        doctest::Approx(specfun::trigamma(2.0) - specfun::trigamma(2.5)).epsilon(1e-14));
  CHECK_THROWS_AS(msebound::beta_ingredients({1.5, 1.0}, 1.5), ValidationError);
  CHECK_THROWS_AS(msebound::beta_ingredients({-1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(msebound::beta_constants({1.5, 0.0}), ValidationError);
}

TEST_CASE("Beta MLE with unit beta matches the closed form") {
  // sum log x = -100 over 150 observations.
  std::vector<double> xs(150, std::exp(-100.0 / 150.0));
  CHECK(msebound::beta_mle_unit_beta(xs) == doctest::Approx(1.5).epsilon(1e-14));
  for (unsigned seed = 1; seed <= 20; ++seed) {
    const auto sample = beta_sample(1.5, 1.0, 500, seed);
    const double closed = msebound::beta_mle_unit_beta(sample);
    CHECK(std::abs(msebound::beta_mle(sample, 1.0) - closed) <= 1e-10 * closed);
  }
}

TEST_CASE("Beta MLE with beta = 2 agrees with a brute-force grid search") {
  const auto sample = beta_sample(1.5, 2.0, 2000, 99);
  double log_sum = 0.0;
  for (double x : sample) log_sum += std::log(x);
  const double nd = static_cast<double>(sample.size());

  constexpr int kGrid = 1000000;
  const double lo = 1e-4;
  const double hi = 50.0;
  const double step = (hi - lo) / (kGrid - 1);
  double best_theta = lo;
  double best = -INFINITY;
  for (int k = 0; k < kGrid; ++k) {
    const double theta = lo + k * step;
    const double ll = beta_loglik(theta, 2.0, nd, log_sum);
    if (ll > best) {
      best = ll;
      best_theta = theta;
    }
  }
  CHECK(std::abs(msebound::beta_mle(sample, 2.0) - best_theta) <= step);
}

TEST_CASE("Beta MLE input errors") {
  const std::vector<double> outside{0.5, 1.0};
  CHECK_THROWS_AS(msebound::beta_mle(outside, 2.0), DomainError);
  CHECK_THROWS_AS(msebound::beta_mle_unit_beta(outside), DomainError);
  CHECK_THROWS_AS(msebound::beta_mle(std::vector<double>{}, 2.0), ValidationError);
  CHECK_THROWS_AS(msebound::beta_mle(std::vector<double>{0.5}, -1.0), ValidationError);
  // Observations crowded against 1 push the root past the bracket.
  const std::vector<double> extreme(10, 1.0 - 1e-15);
  CHECK_THROWS_AS(msebound::beta_mle(extreme, 2.0), NumericalError);
}
