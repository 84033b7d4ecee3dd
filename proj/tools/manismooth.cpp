// manismooth: run seeded experiments, property suites and rate fits.
//
// Exit codes: 0 ok, 1 unexpected error, 2 config / usage / input error,
// 3 numerical failure inside a solver, 4 a property check failed.

#include <cstdlib>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manismooth/checks.hpp"
#include "manismooth/errors.hpp"
#include "manismooth/harness.hpp"
#include "manismooth/run_config.hpp"
#include "manismooth/trace_io.hpp"

namespace ms = manismooth;

namespace {

constexpr int kOk = 0;
constexpr int kUnexpected = 1;
constexpr int kConfig = 2;
constexpr int kNumerical = 3;
constexpr int kCheckFailed = 4;

int classify(const std::exception_ptr& err) {
  try {
    std::rethrow_exception(err);
  } catch (const ms::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    // ConfigurationError, ParameterError, DimensionError, InvariantError
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const ms::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::uint64_t>& seeds) {
  ms::RunConfig cfg;
  try {
    cfg = ms::load_run_config(config_path);
  } catch (...) {
    return classify(std::current_exception());
  }
  if (const char* env = std::getenv("MANISMOOTH_OUT"); env && *env) cfg.output_dir = env;

  if (seeds.empty()) {
    try {
      const ms::RunOutcome out = ms::run_to_directory(cfg, cfg.output_dir);
      std::cerr << "wrote " << cfg.output_dir << "/trace.csv (" << out.trace.size() << " rows), certificate "
                << (out.summary.membership_ok ? "valid" : "INVALID") << "\n";
      return kOk;
    } catch (...) {
      return classify(std::current_exception());
    }
  }

  // one worker per seed, each with its own output directory
  std::vector<std::future<void>> jobs;
  for (std::uint64_t seed : seeds) {
    ms::RunConfig c = cfg;
    c.seed = seed;
    const std::filesystem::path dir = std::filesystem::path(cfg.output_dir) / ("seed_" + std::to_string(seed));
    jobs.push_back(std::async(std::launch::async, [c, dir] { ms::run_to_directory(c, dir); }));
  }
  int code = kOk;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      jobs[i].get();
      std::cerr << "seed " << seeds[i] << ": ok\n";
    } catch (...) {
      std::cerr << "seed " << seeds[i] << ": ";
      code = std::max(code, classify(std::current_exception()));
    }
  }
  return code;
}

int cmd_check(const std::string& suite) {
  std::vector<ms::PropertyResult> results;
  try {
    results = ms::run_check_suite(suite);
  } catch (...) {
    return classify(std::current_exception());
  }
  bool all = true;
  for (const ms::PropertyResult& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << "  [" << r.suite << "] " << r.name;
    if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
    std::cout << "\n";
    all = all && r.passed;
  }
  return all ? kOk : kCheckFailed;
}

int cmd_report(const std::string& trace_path, const std::string& field, long k_lo, long k_hi, bool raw) {
  try {
    if (!ms::is_trace_field(field)) throw ms::ConfigurationError("--field: unknown trace column '" + field + "'");
    const std::vector<ms::TraceRecord> trace = ms::read_trace_csv(trace_path);
    const ms::RateFit fit = ms::fit_rate(trace, field, ms::RateWindow{k_lo, k_hi},
                                         raw ? ms::RateMode::Raw : ms::RateMode::RunningMeanSquare);
    std::cout << ms::to_json(fit).dump() << "\n";
    return kOk;
  } catch (const ms::TraceFormatError& e) {
    std::cerr << "malformed trace " << trace_path << ": " << e.what() << "\n";
    return kConfig;
  } catch (...) {
    return classify(std::current_exception());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian stochastic smoothing solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  auto* run = app.add_subcommand("run", "run a seeded experiment from a JSON config");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--seeds", seeds, "run these seeds concurrently into <output_dir>/seed_<s>/")->delimiter(',');

  std::string suite;
  auto* check = app.add_subcommand("check", "run a property suite");
  check->add_option("--suite", suite, "all | manifold | smoothing | lemmas | solver")->required();

  std::string trace_path, field;
  long k_lo = 100, k_hi = 0;
  bool raw = false;
  auto* report = app.add_subcommand("report", "fit a log-log rate to a trace column");
  report->add_option("--trace", trace_path, "trace.csv")->required();
  report->add_option("--field", field, "column name")->required();
  report->add_option("--from", k_lo, "first k of the window")->required();
  report->add_option("--to", k_hi, "last k of the window")->required();
  report->add_flag("--raw", raw, "fit the column itself instead of the running mean of its square");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, seeds);
    if (*check) return cmd_check(suite);
    return cmd_report(trace_path, field, k_lo, k_hi, raw);
  } catch (...) {
    return classify(std::current_exception());
  }
}
