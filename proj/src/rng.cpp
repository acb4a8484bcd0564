#include "mlebound/rng.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mlebound/errors.hpp"

namespace mlebound::rng {

namespace {

constexpr double kInversionLimit = 30.0;

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream),
                       static_cast<std::uint32_t>(stream >> 32)};
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{} must be positive and finite, got {}", what, v));
  }
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::uint64_t stream) {
  auto seq = make_seed_seq(seed, stream);
  engine_.seed(seq);
}

double Stream::uniform_open() {
  // 53 random bits centred in their cell: never 0, never 1.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Stream::exponential(double rate) {
  require_positive(rate, "exponential rate");
  return -std::log(uniform_open()) / rate;
}

double Stream::gamma(double shape) {
  require_positive(shape, "gamma shape");
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_);
}

double Stream::beta(double a, double b) {
  require_positive(a, "beta shape a");
  require_positive(b, "beta shape b");
  for (;;) {
    const double g1 = gamma(a);
    const double g2 = gamma(b);
    const double x = g1 / (g1 + g2);
    // Small shapes can underflow a gamma draw to 0.
    if (x > 0.0 && x < 1.0) return x;
  }
}

double Stream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError(fmt::format("Poisson mean must be finite and >= 0, got {}", mean));
  }
  if (mean == 0.0) return 0.0;
  if (mean <= kInversionLimit) {
    const double u = uniform_open();
    double k = 0.0;
    double p = std::exp(-mean);
    double cdf = p;
    while (u > cdf) {
      k += 1.0;
      p *= mean / k;
      const double next = cdf + p;
      // The cdf stalls once p drops below the rounding of cdf.
      if (next == cdf) break;
      cdf = next;
    }
    return k;
  }
  std::poisson_distribution<long> dist(mean);
  return static_cast<double>(dist(engine_));
}

}  // namespace mlebound::rng
