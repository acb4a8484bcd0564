#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "mlebound/montecarlo.hpp"

namespace mlebound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable holding the default --seed.
inline constexpr const char* kSeedEnv = "MLEBOUND_SEED";
inline constexpr std::uint64_t kFallbackSeed = 20170101;

struct TableRow {
  long n = 0;
  montecarlo::SimulationReport report;
  /// Direct sum bound for the sample mean; table 2 only.
  std::optional<double> direct_bound;
};

/// Rows of table 1 (Exp(1), canonical), 2 (Exp(0.5) with mean parameter 2)
/// or 3 (Beta(1.5, 1) MSE sweep).
std::vector<TableRow> build_table(int which, long trials, std::uint64_t seed, unsigned threads = 1);

/// Parses argv (argv[0] is the program name), runs one verb and returns the
/// process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mlebound::cli
