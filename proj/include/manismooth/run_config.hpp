#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "manismooth/problem.hpp"
#include "manismooth/trace.hpp"
#include "manismooth/trace_io.hpp"

namespace manismooth {

struct SetConfig {
  std::string kind = "ball";      ///< ball | box | singleton
  std::vector<double> center;     ///< ball; empty = origin
  double radius = 0.5;            ///< ball
  double lower = -0.5;            ///< box, same bound on every coordinate
  double upper = 0.5;
  std::vector<double> target;     ///< singleton; empty = origin
};

struct ProblemConfig {
  std::string family;  ///< sparse_pca | constrained_sphere
  Eigen::Index n = 20;
  Eigen::Index p = 2;  ///< sparse_pca
  Eigen::Index m = 5;  ///< constrained_sphere
  std::size_t N = 100;
  double lambda = 0.1;  ///< sparse_pca
  SetConfig set;
  ConstrainedSphereOptions sphere;

  nlohmann::json to_json() const;
};

struct SolverConfig {
  std::optional<double> theta, zeta, c_tau, c_a, trunc_radius;
  double safety = 1.0;
  double mu_scale = 1.0;  ///< lipschitz only
  double a_scale = 1.0;
};

struct RunConfig {
  ProblemConfig problem;
  std::string algorithm;  ///< lipschitz | indicator
  std::uint64_t seed = 0;
  long max_iters = 1000;
  long trace_every = 1;
  bool diagnostics = false;
  SolverConfig solver;
  std::string output_dir = "out";
};

/// Throws ConfigurationError naming the offending field (e.g. "solver.theta").
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Problem data drawn from the "data" stream of `seed`.
StochasticProblem build_problem(const ProblemConfig& cfg, std::uint64_t seed);

struct RunOutcome {
  std::vector<TraceRecord> trace;
  RunSummary summary;
};

/// Runs the configured solver from a random start (stream "init").
RunOutcome execute_run(const RunConfig& cfg);

/// execute_run, then trace.csv and summary.json into `output_dir`.
RunOutcome run_to_directory(const RunConfig& cfg, const std::filesystem::path& output_dir);

}  // namespace manismooth
