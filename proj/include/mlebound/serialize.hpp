#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mlebound/montecarlo.hpp"
#include "mlebound/stein.hpp"

namespace mlebound::serialize {

using nlohmann::json;

inline constexpr std::string_view kBoundSchema = "mlebound.bound/1";
inline constexpr std::string_view kSimulationSchema = "mlebound.simulation/1";
inline constexpr std::string_view kTableSchema = "mlebound.table/1";
inline constexpr std::string_view kCoverageSchema = "mlebound.ci/1";
inline constexpr std::string_view kConstantsSchema = "mlebound.constants/1";
inline constexpr std::string_view kErrorSchema = "mlebound.error/1";

/// {"terms": [{"label", "value"}...], "total"}.
json to_json(const stein::BoundBreakdown& b);
stein::BoundBreakdown breakdown_from_json(const json& j);

json to_json(const montecarlo::SimulationReport& r);
montecarlo::SimulationReport report_from_json(const json& j);

json to_json(const montecarlo::CoverageReport& r);
montecarlo::CoverageReport coverage_from_json(const json& j);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// model,theta0,n,trials,seed,empirical_distance,empirical_mse,bound_total,error
std::string csv_header();
std::string csv_row(const montecarlo::SimulationReport& r);
std::string to_csv(const std::vector<montecarlo::SimulationReport>& rows);

}  // namespace mlebound::serialize
