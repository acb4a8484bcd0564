#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mlebound::rng {

/// Identifier recorded in every simulation report.
inline constexpr std::string_view kAlgorithm = "mt19937_64/seed_seq(seed,stream)/v1";

/// Independent random stream for one (seed, stream index) pair. Trial i of a
/// simulation always draws from Stream(seed, i), whichever thread runs it.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Exp(rate) by inversion.
  double exponential(double rate);
  double gamma(double shape);
  /// G1 / (G1 + G2) with G1 ~ Gamma(a), G2 ~ Gamma(b); never returns 0 or 1.
  double beta(double a, double b);
  /// Sequential inversion for mean <= 30, rejection sampling above.
  double poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mlebound::rng
