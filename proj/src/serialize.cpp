#include "mlebound/serialize.hpp"

#include <fmt/format.h>

#include "mlebound/errors.hpp"

namespace mlebound::serialize {

json to_json(const stein::BoundBreakdown& b) {
  json terms = json::array();
  for (const auto& t : b.terms()) terms.push_back({{"label", t.label}, {"value", t.value}});
  return {{"terms", terms}, {"total", b.total()}};
}

stein::BoundBreakdown breakdown_from_json(const json& j) {
  stein::BoundBreakdown b;
  for (const auto& t : j.at("terms")) b.add(t.at("label").get<std::string>(), t.at("value").get<double>());
  return b;
}

json to_json(const montecarlo::SimulationReport& r) {
  json j{
      {"model", r.model},
      {"theta0", r.theta0},
      {"beta", r.beta},
      {"n", r.n},
      {"trials", r.trials},
      {"seed", r.seed},
      {"rng_algorithm", r.rng_algorithm},
      {"quantity", r.quantity},
      {"empirical_distance", r.empirical_distance},
      {"empirical_mse", r.empirical_mse},
      {"bound_total", r.bound_total},
      {"bound_terms", to_json(r.bound_terms)},
      {"standard_error", nullptr},
      {"error", r.error},
      {"standardized_mean", r.standardized_mean},
      {"standardized_variance", r.standardized_variance},
  };
  if (r.standard_error) j["standard_error"] = *r.standard_error;
  return j;
}

montecarlo::SimulationReport report_from_json(const json& j) {
  montecarlo::SimulationReport r;
  r.model = j.at("model").get<std::string>();
  r.theta0 = j.at("theta0").get<double>();
  r.beta = j.at("beta").get<double>();
  r.n = j.at("n").get<long>();
  r.trials = j.at("trials").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rng_algorithm = j.at("rng_algorithm").get<std::string>();
  r.quantity = j.at("quantity").get<std::string>();
  r.empirical_distance = j.at("empirical_distance").get<double>();
  r.empirical_mse = j.at("empirical_mse").get<double>();
  r.bound_total = j.at("bound_total").get<double>();
  r.bound_terms = breakdown_from_json(j.at("bound_terms"));
  if (!j.at("standard_error").is_null()) r.standard_error = j.at("standard_error").get<double>();
  r.error = j.at("error").get<double>();
  r.standardized_mean = j.at("standardized_mean").get<double>();
  r.standardized_variance = j.at("standardized_variance").get<double>();
  return r;
}

json to_json(const montecarlo::CoverageReport& r) {
  return {{"coverage", r.coverage},     {"standard_error", r.standard_error},
          {"b_k", r.b_k},               {"whole_line", r.whole_line},
          {"trials", r.trials}};
}

montecarlo::CoverageReport coverage_from_json(const json& j) {
  montecarlo::CoverageReport r;
  r.coverage = j.at("coverage").get<double>();
  r.standard_error = j.at("standard_error").get<double>();
  r.b_k = j.at("b_k").get<double>();
  r.whole_line = j.at("whole_line").get<bool>();
  r.trials = j.at("trials").get<long>();
  return r;
}

std::string format_double(double x) { return fmt::format("{}", x); }

std::string csv_header() {
  return "model,theta0,n,trials,seed,empirical_distance,empirical_mse,bound_total,error";
}

std::string csv_row(const montecarlo::SimulationReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", r.model, format_double(r.theta0), r.n, r.trials,
                     r.seed, format_double(r.empirical_distance), format_double(r.empirical_mse),
                     format_double(r.bound_total), format_double(r.error));
}

std::string to_csv(const std::vector<montecarlo::SimulationReport>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += csv_row(r) + "\n";
  return out;
}

}  // namespace mlebound::serialize
