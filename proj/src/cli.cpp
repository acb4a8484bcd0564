#include "mlebound/cli.hpp"

#include <cstdlib>
#include <string>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mlebound/errors.hpp"
#include "mlebound/expfam.hpp"
#include "mlebound/models.hpp"
#include "mlebound/msebound.hpp"
#include "mlebound/serialize.hpp"
#include "mlebound/stein.hpp"

namespace mlebound::cli {

namespace {

using serialize::json;

enum class Format { text, csv, json };

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return Format::text;
}

// Scan argv for --format json so that parse errors can be reported as JSON.
bool wants_json(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string_view a = argv[i];
    if (a == "--format=json") return true;
    if (a == "--format" && i + 1 < argc && std::string_view(argv[i + 1]) == "json") return true;
  }
  return false;
}

std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return kFallbackSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 10);
    if (used != std::string_view(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("{} must be an unsigned 64-bit integer, got '{}'", kSeedEnv, env));
  }
}

struct Options {
  std::string format = "text";
  std::string model;
  double theta0 = 1.0;
  double beta = 1.0;
  long n = 0;
  double h_sup = 1.0;
  double h_lip = 1.0;
  std::optional<double> epsilon;
  std::string c = "1";
  long trials = montecarlo::kDefaultTrials;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double alpha = 0.05;
  int which = 1;
  long n_from = 0;
  long n_to = 0;
  long n_step = 1;
};

boundary::PoissonC parse_c(const std::string& s) {
  if (s == "auto") return boundary::PoissonC::automatic();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return boundary::PoissonC::fixed(v);
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("--c must be a number or 'auto', got '{}'", s));
  }
}

models::ModelSpec model_spec(const Options& o) {
  models::ModelSpec spec;
  spec.name = o.model;
  spec.theta0 = o.theta0;
  spec.beta = o.beta;
  spec.epsilon = o.epsilon;
  spec.c = parse_c(o.c);
  spec.validate();
  return spec;
}

std::string fixed(double x, int digits) { return fmt::format("{:.{}f}", x, digits); }

// ---- bound ---------------------------------------------------------------

void cmd_bound(const Options& o, std::ostream& out) {
  const auto spec = model_spec(o);
  if (!(o.h_sup >= 0.0) || !(o.h_lip >= 0.0)) {
    throw ValidationError(fmt::format("--h-sup and --h-lip must be >= 0, got {} and {}", o.h_sup, o.h_lip));
  }
  const long needed = models::minimal_n(spec);
  if (o.n < needed) {
    throw ValidationError(needed > 1 ? fmt::format("n below minimal n = {}", needed)
                                     : fmt::format("n must be >= 1, got {}", o.n));
  }
  const auto b = models::bound(spec, o.n, {o.h_sup, o.h_lip});
  // B_K converts the bounded Wasserstein bound, i.e. the (1, 1) weights.
  const double b_k = stein::kolmogorov_from_bw(models::bound(spec, o.n).total());

  switch (parse_format(o.format)) {
    case Format::json: {
      json j = serialize::to_json(b);
      j["schema"] = serialize::kBoundSchema;
      j["model"] = spec.name;
      j["theta0"] = spec.theta0;
      j["beta"] = spec.beta;
      j["n"] = o.n;
      j["h_sup"] = o.h_sup;
      j["h_lip"] = o.h_lip;
      j["epsilon"] = spec.epsilon ? json(*spec.epsilon) : json(nullptr);
      j["c"] = o.c;
      j["b_k"] = b_k;
      out << j.dump(2) << "\n";
      return;
    }
    case Format::csv:
      out << "label,value\n";
      for (const auto& t : b.terms()) out << t.label << "," << serialize::format_double(t.value) << "\n";
      out << "total," << serialize::format_double(b.total()) << "\n";
      out << "b_k," << serialize::format_double(b_k) << "\n";
      return;
    case Format::text:
      out << fmt::format("{} theta0={} n={} ||h||={} ||h'||={}\n", spec.name, spec.theta0, o.n,
                         o.h_sup, o.h_lip);
      for (const auto& t : b.terms()) out << fmt::format("  {:<18}{:.6g}\n", t.label, t.value);
      out << fmt::format("  {:<18}{:.6g}\n", "total", b.total());
      out << fmt::format("  {:<18}{:.6g}  (Kolmogorov, from the unweighted total)\n", "B_K", b_k);
      return;
  }
}

// ---- simulate ------------------------------------------------------------

void print_report_text(const montecarlo::SimulationReport& r, std::ostream& out) {
  out << fmt::format("{} theta0={} n={} trials={} seed={} rng={}\n", r.model, r.theta0, r.n,
                     r.trials, r.seed, r.rng_algorithm);
  out << fmt::format("  {:<24}{:.6g}\n", r.quantity, r.empirical_distance);
  out << fmt::format("  {:<24}{}\n", "standard error",
                     r.standard_error ? fmt::format("{:.3g}", *r.standard_error) : "unavailable");
  out << fmt::format("  {:<24}{:.6g}\n", "empirical mse", r.empirical_mse);
  out << fmt::format("  {:<24}{:.6g}\n", "bound", r.bound_total);
  for (const auto& t : r.bound_terms.terms()) out << fmt::format("    {:<22}{:.6g}\n", t.label, t.value);
  out << fmt::format("  {:<24}{:.6g}\n", "error", r.error);
  out << fmt::format("  {:<24}{:.4f} / {:.4f}\n", "standardized mean/var", r.standardized_mean,
                     r.standardized_variance);
}

void cmd_simulate(const Options& o, std::ostream& out) {
  montecarlo::SimulationConfig cfg;
  cfg.model = model_spec(o);
  cfg.n = o.n;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto r = montecarlo::run_simulation(cfg);

  switch (parse_format(o.format)) {
    case Format::json: {
      json j = serialize::to_json(r);
      j["schema"] = serialize::kSimulationSchema;
      out << j.dump(2) << "\n";
      return;
    }
    case Format::csv:
      out << serialize::to_csv({r});
      return;
    case Format::text:
      print_report_text(r, out);
      return;
  }
}

// ---- table ---------------------------------------------------------------

void print_table_text(int which, const std::vector<TableRow>& rows, std::ostream& out) {
  if (which == 3) {
    out << "Beta(1.5, 1): empirical MSE of the MLE against B3^2 / n\n";
    out << fmt::format("{:>8}  {:>10}  {:>10}  {:>10}\n", "n", "mse", "bound", "error");
    for (const auto& row : rows) {
      const auto& r = row.report;
      out << fmt::format("{:>8}  {:>10}  {:>10}  {:>10}\n", r.n, fixed(r.empirical_mse, 4),
                         fixed(r.bound_total, 4), fixed(r.error, 4));
    }
    return;
  }
  out << (which == 1 ? "Exp(1), canonical parametrisation"
                     : "Exp(0.5), mean parametrisation (theta0 = 2)")
      << ": |E h(Z_n) - E h(Z)| for h(x) = 1/(x^2+2)\n";
  out << fmt::format("{:>8}  {:>10}  {:>10}  {:>10}", "n", "empirical", "bound", "error");
  if (which == 2) out << fmt::format("  {:>10}", "direct");
  out << "\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << fmt::format("{:>8}  {:>10}  {:>10}  {:>10}", r.n, fixed(r.empirical_distance, 4),
                       fixed(r.bound_total, 3), fixed(r.error, 4));
    if (row.direct_bound) out << fmt::format("  {:>10}", fixed(*row.direct_bound, 3));
    out << "\n";
  }
}

void cmd_table(const Options& o, std::ostream& out) {
  const auto rows = build_table(o.which, o.trials, o.seed, o.threads);
  switch (parse_format(o.format)) {
    case Format::json: {
      json jrows = json::array();
      for (const auto& row : rows) {
        json j = serialize::to_json(row.report);
        if (row.direct_bound) j["direct_bound"] = *row.direct_bound;
        jrows.push_back(j);
      }
      out << json{{"schema", serialize::kTableSchema}, {"table", o.which}, {"rows", jrows}}.dump(2)
          << "\n";
      return;
    }
    case Format::csv: {
      out << serialize::csv_header() << (o.which == 2 ? ",direct_bound" : "") << "\n";
      for (const auto& row : rows) {
        out << serialize::csv_row(row.report);
        if (row.direct_bound) out << "," << serialize::format_double(*row.direct_bound);
        out << "\n";
      }
      return;
    }
    case Format::text:
      print_table_text(o.which, rows, out);
      return;
  }
}

// ---- ci ------------------------------------------------------------------

void cmd_ci(const Options& o, std::ostream& out) {
  const auto spec = model_spec(o);
  const auto r = montecarlo::ci_coverage(spec, o.n, o.alpha, o.trials, o.seed, o.threads);
  switch (parse_format(o.format)) {
    case Format::json: {
      json j = serialize::to_json(r);
      j["schema"] = serialize::kCoverageSchema;
      j["model"] = spec.name;
      j["theta0"] = spec.theta0;
      j["n"] = o.n;
      j["alpha"] = o.alpha;
      j["seed"] = o.seed;
      out << j.dump(2) << "\n";
      return;
    }
    case Format::csv:
      out << "model,theta0,n,alpha,trials,seed,coverage,standard_error,b_k,whole_line\n";
      out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", spec.name,
                         serialize::format_double(spec.theta0), o.n, serialize::format_double(o.alpha),
                         r.trials, o.seed, serialize::format_double(r.coverage),
                         serialize::format_double(r.standard_error), serialize::format_double(r.b_k),
                         r.whole_line ? "true" : "false");
      return;
    case Format::text:
      out << fmt::format("{} theta0={} n={} alpha={} trials={} seed={}\n", spec.name, spec.theta0, o.n,
                         o.alpha, r.trials, o.seed);
      out << fmt::format("  {:<16}{:.4f} (se {:.4f}, nominal {:.4f})\n", "coverage", r.coverage,
                         r.standard_error, 1.0 - o.alpha);
      out << fmt::format("  {:<16}{:.6g}{}\n", "B_K", r.b_k,
                         r.whole_line ? "  (>= alpha/2: interval is the whole line)" : "");
      return;
  }
}

// ---- mse-sweep -----------------------------------------------------------

void cmd_mse_sweep(const Options& o, std::ostream& out) {
  if (o.model != "beta") throw ValidationError("mse-sweep is only defined for --model beta");
  const msebound::BetaParams p{o.theta0, o.beta};
  const auto rows = montecarlo::run_mse_sweep(p, o.n_from, o.n_to, o.n_step, o.trials, o.seed, o.threads);
  switch (parse_format(o.format)) {
    case Format::json: {
      json jrows = json::array();
      for (const auto& r : rows) jrows.push_back(serialize::to_json(r));
      out << json{{"schema", serialize::kSimulationSchema}, {"rows", jrows}}.dump(2) << "\n";
      return;
    }
    case Format::csv:
      out << serialize::to_csv(rows);
      return;
    case Format::text:
      out << fmt::format("Beta({}, {}): empirical MSE against B3^2 / n, {} trials, seed {}\n", p.theta0,
                         p.beta, o.trials, o.seed);
      out << fmt::format("{:>8}  {:>12}  {:>12}  {:>12}\n", "n", "mse", "bound", "error");
      for (const auto& r : rows) {
        out << fmt::format("{:>8}  {:>12.6g}  {:>12.6g}  {:>12.6g}\n", r.n, r.empirical_mse,
                           r.bound_total, r.error);
      }
      return;
  }
}

// ---- constants -----------------------------------------------------------

void cmd_constants(const Options& o, std::ostream& out) {
  if (o.model != "beta") throw ValidationError("constants is only defined for --model beta");
  const msebound::BetaParams p{o.theta0, o.beta};
  const auto c = msebound::beta_constants(p);
  const long n = o.n > 0 ? o.n : c.minimal_n;
  const double b3 = msebound::beta_b3(p, n);

  switch (parse_format(o.format)) {
    case Format::json:
      out << json{{"schema", serialize::kConstantsSchema},
                  {"model", "beta"},
                  {"theta0", p.theta0},
                  {"beta", p.beta},
                  {"B1", c.b1},
                  {"B2", c.b2},
                  {"B3", b3},
                  {"n", n},
                  {"D_psi1", c.d_psi1},
                  {"minimal_n", c.minimal_n}}
                 .dump(2)
          << "\n";
      return;
    case Format::csv:
      out << "theta0,beta,B1,B2,B3,n,D_psi1,minimal_n\n";
      out << fmt::format("{},{},{},{},{},{},{},{}\n", serialize::format_double(p.theta0),
                         serialize::format_double(p.beta), serialize::format_double(c.b1),
                         serialize::format_double(c.b2), serialize::format_double(b3), n,
                         serialize::format_double(c.d_psi1), c.minimal_n);
      return;
    case Format::text:
      out << fmt::format("Beta({}, {})\n", p.theta0, p.beta);
      out << fmt::format("  {:<10}{:.10g}\n", "B1", c.b1);
      out << fmt::format("  {:<10}{:.10g}\n", "B2", c.b2);
      out << fmt::format("  {:<10}{:.10g}  (n = {})\n", "B3", b3, n);
      out << fmt::format("  {:<10}{:.10g}\n", "D_psi1", c.d_psi1);
      out << fmt::format("  {:<10}{}\n", "minimal_n", c.minimal_n);
      return;
  }
}

void report_error(std::ostream& err, bool as_json, std::string_view kind, const std::string& message,
                  int code) {
  if (as_json) {
    err << json{{"schema", serialize::kErrorSchema},
                {"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}}
               .dump()
        << "\n";
  } else {
    err << "error: " << message << "\n";
  }
}

}  // namespace

std::vector<TableRow> build_table(int which, long trials, std::uint64_t seed, unsigned threads) {
  std::vector<TableRow> rows;
  if (which == 3) {
    for (auto& r : montecarlo::run_mse_sweep({1.5, 1.0}, 7500, 8300, 200, trials, seed, threads)) {
      rows.push_back({r.n, std::move(r), std::nullopt});
    }
    return rows;
  }
  if (which != 1 && which != 2) throw ValidationError(fmt::format("--which must be 1, 2 or 3, got {}", which));

  const auto h = stein::reciprocal_quadratic();
  for (long n : {10L, 100L, 1000L, 10000L, 100000L}) {
    montecarlo::SimulationConfig cfg;
    cfg.model.name = which == 1 ? "exp-canonical" : "exp-noncanonical";
    cfg.model.theta0 = which == 1 ? 1.0 : 2.0;
    cfg.n = n;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.test_function = h;
    TableRow row{n, montecarlo::run_simulation(cfg), std::nullopt};
    if (which == 2) {
      // The MLE is the sample mean, so the plain sum bound applies directly.
      const double theta = cfg.model.theta0;
      row.direct_bound = h.lip_norm * stein::direct_sum_bound(
                                          theta, expfam::kExponentialThirdMoment * theta * theta * theta, n);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const bool as_json = wants_json(argc, argv);
  Options o;

  CLI::App app{"Explicit normal-approximation bounds for maximum likelihood estimators", "mlebound"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every verb");

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  };
  const auto add_model = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--model", o.model, "exp-canonical, exp-noncanonical, poisson or beta");
    if (required) opt->required();
    sub->add_option("--theta0", o.theta0, "True parameter")->required();
    sub->add_option("--beta", o.beta, "Known second Beta shape parameter");
  };
  const auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--trials", o.trials, "Monte Carlo trials");
    sub->add_option("--seed", o.seed, fmt::format("Master seed (default ${} or {})", kSeedEnv, kFallbackSeed));
    sub->add_option("--threads", o.threads, "Worker threads, 0 = all cores; results do not depend on it");
  };

  auto* bound = app.add_subcommand("bound", "Term-by-term bound and Kolmogorov conversion");
  add_model(bound, true);
  bound->add_option("--n", o.n, "Sample size")->required();
  bound->add_option("--h-sup", o.h_sup, "||h||");
  bound->add_option("--h-lip", o.h_lip, "||h'||");
  bound->add_option("--epsilon", o.epsilon, "Neighbourhood radius, in (0, theta0)");
  bound->add_option("--c", o.c, "Poisson perturbation constant, or 'auto'");
  add_format(bound);

  auto* simulate = app.add_subcommand("simulate", "Empirical h-discrepancy and MSE against the bound");
  add_model(simulate, true);
  simulate->add_option("--n", o.n, "Sample size")->required();
  simulate->add_option("--epsilon", o.epsilon, "Neighbourhood radius, in (0, theta0)");
  simulate->add_option("--c", o.c, "Poisson perturbation constant, or 'auto'");
  add_sim(simulate);
  add_format(simulate);

  auto* table = app.add_subcommand("table", "Reproduce one of the three result tables");
  table->add_option("--which", o.which, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  add_sim(table);
  add_format(table);

  auto* ci = app.add_subcommand("ci", "Coverage of the conservative confidence interval");
  add_model(ci, true);
  ci->add_option("--n", o.n, "Sample size")->required();
  ci->add_option("--alpha", o.alpha, "1 - nominal coverage");
  add_sim(ci);
  add_format(ci);

  auto* sweep = app.add_subcommand("mse-sweep", "Beta MLE empirical MSE against B3^2 / n");
  o.model = "beta";
  add_model(sweep, false);
  sweep->add_option("--n-from", o.n_from, "First n")->required();
  sweep->add_option("--n-to", o.n_to, "Last n")->required();
  sweep->add_option("--n-step", o.n_step, "Step in n");
  add_sim(sweep);
  add_format(sweep);

  auto* constants = app.add_subcommand("constants", "Dump B1, B2, B3, D_psi1 and the minimal n");
  add_model(constants, false);
  constants->add_option("--n", o.n, "Sample size for B3 (default: minimal n)");
  add_format(constants);

  try {
    o.seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    report_error(err, as_json, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const ValidationError& e) {
    report_error(err, as_json, "validation", e.what(), kExitValidation);
    return kExitValidation;
  }

  try {
    if (bound->parsed()) cmd_bound(o, out);
    if (simulate->parsed()) cmd_simulate(o, out);
    if (table->parsed()) cmd_table(o, out);
    if (ci->parsed()) cmd_ci(o, out);
    if (sweep->parsed()) cmd_mse_sweep(o, out);
    if (constants->parsed()) cmd_constants(o, out);
  } catch (const ValidationError& e) {
    report_error(err, as_json, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const DomainError& e) {
    report_error(err, as_json, "validation", e.what(), kExitValidation);
    return kExitValidation;
  } catch (const NumericalError& e) {
    report_error(err, as_json, "numerical", e.what(), kExitNumerical);
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace mlebound::cli
