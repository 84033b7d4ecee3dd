#include <gtest/gtest.h>

#include "manismooth/errors.hpp"
#include "manismooth/run_config.hpp"

using namespace manismooth;
using nlohmann::json;

namespace {

json lipschitz_doc() {
  return json{{"problem", {{"family", "sparse_pca"}, {"n", 6}, {"p", 2}, {"N", 30}, {"lambda", 0.1}}},
              {"algorithm", "lipschitz"},
              {"seed", 3},
              {"max_iters", 100},
              {"trace_every", 7},
              {"output_dir", "unused"}};
}

json indicator_doc() {
  return json{{"problem",
               {{"family", "constrained_sphere"},
                {"n", 8},
                {"m", 3},
                {"N", 40},
                {"set", {{"kind", "ball"}, {"radius", 0.3}}}}},
              {"algorithm", "indicator"},
              {"seed", 4},
              {"max_iters", 50},
              {"solver", {{"theta", 1.0}}}};
}

std::string error_of(const json& doc) {
  try {
    parse_run_config(doc);
  } catch (const ConfigurationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RunConfig, ParsesLipschitz) {
  const RunConfig c = parse_run_config(lipschitz_doc());
  EXPECT_EQ(c.algorithm, "lipschitz");
  EXPECT_EQ(c.problem.n, 6);
  EXPECT_EQ(c.problem.N, 30u);
  EXPECT_EQ(c.trace_every, 7);
  EXPECT_FALSE(c.diagnostics);
}

TEST(RunConfig, IndicatorNeedsTheta) {
  json d = indicator_doc();
  d["solver"].erase("theta");
  EXPECT_NE(error_of(d).find("solver.theta"), std::string::npos);
  d.erase("solver");
  EXPECT_NE(error_of(d).find("solver.theta"), std::string::npos);
}

TEST(RunConfig, AlgorithmMustMatchProblem) {
  json d = lipschitz_doc();
  d["algorithm"] = "indicator";
  d["solver"] = {{"theta", 1}};
  EXPECT_NE(error_of(d).find("algorithm"), std::string::npos);
  json e = indicator_doc();
  e["algorithm"] = "lipschitz";
  EXPECT_NE(error_of(e).find("algorithm"), std::string::npos);
}

TEST(RunConfig, FieldErrorsNameTheField) {
  json d = lipschitz_doc();
  d["max_iters"] = 0;
  EXPECT_NE(error_of(d).find("max_iters"), std::string::npos);
  d = lipschitz_doc();
  d["problem"]["lambda"] = "big";
  EXPECT_NE(error_of(d).find("problem.lambda"), std::string::npos);
  d = lipschitz_doc();
  d["typo"] = 1;
  EXPECT_NE(error_of(d).find("typo"), std::string::npos);
  d = lipschitz_doc();
  d["seed"] = -1;
  EXPECT_NE(error_of(d).find("seed"), std::string::npos);
  json e = indicator_doc();
  e["problem"]["set"]["kind"] = "triangle";
  EXPECT_NE(error_of(e).find("problem.set.kind"), std::string::npos);
  e = indicator_doc();
  e["solver"]["c_tau"] = -1;
  EXPECT_NE(error_of(e).find("solver.c_tau"), std::string::npos);
}

TEST(RunConfig, LargeSeed) {
  json d = lipschitz_doc();
  d["seed"] = 18446744073709551615ull;
  EXPECT_EQ(parse_run_config(d).seed, 18446744073709551615ull);
}

TEST(RunConfig, BuildProblemIsSeeded) {
  const RunConfig c = parse_run_config(indicator_doc());
  const StochasticProblem a = build_problem(c.problem, 4), b = build_problem(c.problem, 4);
  EXPECT_EQ(a.h().kind_name(), "ball");
  EXPECT_EQ(a.manifold(), ManifoldDescriptor::sphere(8));
  Rng rng = named_stream(1, "init");
  const ManifoldPoint x = random_point(a.manifold(), rng);
  EXPECT_EQ(map_c_eval(a, x), map_c_eval(b, x));
}

TEST(ExecuteRun, LipschitzTraceCount) {
  const RunOutcome out = execute_run(parse_run_config(lipschitz_doc()));
  EXPECT_EQ(out.trace.size(), 100u / 7u + 1u);
  EXPECT_EQ(out.summary.algorithm, "lipschitz");
  EXPECT_TRUE(out.summary.membership_ok);
}

TEST(ExecuteRun, IndicatorFillsDefaults) {
  const RunOutcome out = execute_run(parse_run_config(indicator_doc()));
  EXPECT_EQ(out.trace.size(), 51u);
  for (const char* key : {"theta", "zeta", "c_tau", "c_a", "trunc_radius", "omega", "K_tilde"})
    EXPECT_TRUE(out.summary.config.contains(key)) << key;
  EXPECT_TRUE(out.summary.membership_ok);
}

TEST(ExecuteRun, SuppliedConstantsSkipEstimation) {
  json d = indicator_doc();
  d["solver"] = {{"theta", 2.0}, {"zeta", 0.5}, {"c_tau", 0.01}, {"c_a", 0.2}, {"trunc_radius", 3.0}};
  const RunOutcome out = execute_run(parse_run_config(d));
  EXPECT_EQ(out.summary.config["c_tau"].get<double>(), 0.01);
  EXPECT_EQ(out.summary.config["omega"].get<double>(), 0.5);
}
