#include "manismooth/run_config.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include "manismooth/errors.hpp"
#include "manismooth/harness.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/solver_indicator.hpp"
#include "manismooth/solver_lipschitz.hpp"

namespace manismooth {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigurationError(field + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) fail(prefix + it.key(), "unknown key");
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double real(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& field, long min) {
  if (!v.is_number_integer()) fail(field, "expected an integer");
  const long x = v.get<long>();
  if (x < min) fail(field, "must be >= " + std::to_string(min));
  return x;
}

bool boolean(const json& v, const std::string& field) {
  if (!v.is_boolean()) fail(field, "expected true or false");
  return v.get<bool>();
}

std::string string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

std::vector<double> reals(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(real(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::optional<double> positive(const json& obj, const char* key, const std::string& prefix) {
  const json* v = find(obj, key);
  if (!v) return std::nullopt;
  const double x = real(*v, prefix + key);
  if (!(x > 0.0)) fail(prefix + key, "must be > 0");
  return x;
}

SetConfig parse_set(const json& s) {
  if (!s.is_object()) fail("problem.set", "expected an object");
  reject_unknown(s, "problem.set.", {"kind", "center", "radius", "lower", "upper", "target"});
  SetConfig out;
  if (const json* v = find(s, "kind")) out.kind = string(*v, "problem.set.kind");
  if (out.kind != "ball" && out.kind != "box" && out.kind != "singleton")
    fail("problem.set.kind", "expected ball, box or singleton");
  if (const json* v = find(s, "center")) out.center = reals(*v, "problem.set.center");
  if (const json* v = find(s, "radius")) out.radius = real(*v, "problem.set.radius");
  if (const json* v = find(s, "lower")) out.lower = real(*v, "problem.set.lower");
  if (const json* v = find(s, "upper")) out.upper = real(*v, "problem.set.upper");
  if (const json* v = find(s, "target")) out.target = reals(*v, "problem.set.target");
  if (out.kind == "ball" && !(out.radius > 0.0)) fail("problem.set.radius", "must be > 0");
  if (out.kind == "box" && !(out.lower <= out.upper)) fail("problem.set.upper", "must be >= lower");
  return out;
}

ProblemConfig parse_problem(const json& pj) {
  if (!pj.is_object()) fail("problem", "expected an object");
  ProblemConfig out;
  const json* fam = find(pj, "family");
  if (!fam) fail("problem.family", "required");
  out.family = string(*fam, "problem.family");
  if (out.family == "sparse_pca") {
    reject_unknown(pj, "problem.", {"family", "n", "p", "N", "lambda"});
    if (const json* v = find(pj, "n")) out.n = integer(*v, "problem.n", 1);
    if (const json* v = find(pj, "p")) out.p = integer(*v, "problem.p", 1);
    if (const json* v = find(pj, "N")) out.N = static_cast<std::size_t>(integer(*v, "problem.N", 1));
    if (const json* v = find(pj, "lambda")) out.lambda = real(*v, "problem.lambda");
    if (out.p > out.n) fail("problem.p", "must be <= n");
    if (!(out.lambda >= 0.0)) fail("problem.lambda", "must be >= 0");
  } else if (out.family == "constrained_sphere") {
    reject_unknown(pj, "problem.", {"family", "n", "m", "N", "set", "q", "identity_linear", "noise"});
    out.N = 200;
    if (const json* v = find(pj, "n")) out.n = integer(*v, "problem.n", 2);
    if (const json* v = find(pj, "m")) out.m = integer(*v, "problem.m", 1);
    if (const json* v = find(pj, "N")) out.N = static_cast<std::size_t>(integer(*v, "problem.N", 1));
    if (const json* v = find(pj, "set")) out.set = parse_set(*v);
    if (const json* v = find(pj, "q")) out.sphere.q = real(*v, "problem.q");
    if (const json* v = find(pj, "identity_linear")) out.sphere.identity_linear = boolean(*v, "problem.identity_linear");
    if (const json* v = find(pj, "noise")) out.sphere.noise = real(*v, "problem.noise");
    if (out.sphere.identity_linear && out.m != out.n) fail("problem.identity_linear", "requires m == n");
    const auto m = static_cast<std::size_t>(out.m);
    if (!out.set.center.empty() && out.set.center.size() != m) fail("problem.set.center", "length must equal m");
    if (!out.set.target.empty() && out.set.target.size() != m) fail("problem.set.target", "length must equal m");
  } else {
    fail("problem.family", "expected sparse_pca or constrained_sphere, got '" + out.family + "'");
  }
  return out;
}

Eigen::VectorXd vec_or_zero(const std::vector<double>& v, Eigen::Index m) {
  if (v.empty()) return Eigen::VectorXd::Zero(m);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json solver_json_lipschitz(const lipschitz::Schedule& s) {
  return json{{"mu_scale", s.mu_scale}, {"a_scale", s.a_scale}};
}

json solver_json_indicator(const indicator::Config& c, double safety) {
  return json{{"theta", c.theta},
              {"zeta", c.zeta},
              {"c_tau", c.c_tau},
              {"c_a", c.c_a},
              {"trunc_radius", c.trunc_radius},
              {"safety", safety},
              {"omega", c.omega()},
              {"K_tilde", c.K_tilde()}};
}

std::vector<RateFit> summary_fits(const std::vector<TraceRecord>& trace, long K) {
  std::vector<RateFit> fits;
  for (const char* field : {"norm_G", "norm_grad_Fmu"}) {
    try {
      fits.push_back(fit_rate(trace, field, RateWindow{100, K}));
    } catch (const InsufficientDataError&) {
    } catch (const ParameterError&) {
    }
  }
  return fits;
}

}  // namespace

nlohmann::json ProblemConfig::to_json() const {
  if (family == "sparse_pca") return json{{"family", family}, {"n", n}, {"p", p}, {"N", N}, {"lambda", lambda}};
  json s{{"kind", set.kind}};
  if (set.kind == "ball") {
    s["radius"] = set.radius;
    s["center"] = set.center;
  } else if (set.kind == "box") {
    s["lower"] = set.lower;
    s["upper"] = set.upper;
  } else {
    s["target"] = set.target;
  }
  return json{{"family", family}, {"n", n},         {"m", m},
              {"N", N},           {"set", s},       {"q", sphere.q},
              {"identity_linear", sphere.identity_linear}, {"noise", sphere.noise}};
}

RunConfig parse_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("config", "expected a JSON object");
  reject_unknown(doc, "", {"problem", "algorithm", "seed", "max_iters", "trace_every", "diagnostics", "solver",
                           "output_dir"});
  RunConfig cfg;
  const json* pj = find(doc, "problem");
  if (!pj) fail("problem", "required");
  cfg.problem = parse_problem(*pj);

  const json* alg = find(doc, "algorithm");
  if (!alg) fail("algorithm", "required");
  cfg.algorithm = string(*alg, "algorithm");
  if (cfg.algorithm != "lipschitz" && cfg.algorithm != "indicator")
    fail("algorithm", "expected lipschitz or indicator, got '" + cfg.algorithm + "'");

  if (const json* v = find(doc, "seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      fail("seed", "expected an unsigned 64-bit integer");
    cfg.seed = v->get<std::uint64_t>();
  }
  if (const json* v = find(doc, "max_iters")) cfg.max_iters = integer(*v, "max_iters", 1);
  if (const json* v = find(doc, "trace_every")) cfg.trace_every = integer(*v, "trace_every", 1);
  if (const json* v = find(doc, "diagnostics")) cfg.diagnostics = boolean(*v, "diagnostics");
  if (const json* v = find(doc, "output_dir")) cfg.output_dir = string(*v, "output_dir");

  if (const json* sj = find(doc, "solver")) {
    if (!sj->is_object()) fail("solver", "expected an object");
    reject_unknown(*sj, "solver.", {"theta", "zeta", "c_tau", "c_a", "trunc_radius", "safety", "mu_scale", "a_scale"});
    SolverConfig& s = cfg.solver;
    if (const json* v = find(*sj, "theta")) {
      s.theta = real(*v, "solver.theta");
      if (!(*s.theta >= 1.0)) fail("solver.theta", "must be >= 1");
    }
    s.zeta = positive(*sj, "zeta", "solver.");
    s.c_tau = positive(*sj, "c_tau", "solver.");
    s.c_a = positive(*sj, "c_a", "solver.");
    s.trunc_radius = positive(*sj, "trunc_radius", "solver.");
    if (const json* v = find(*sj, "safety")) {
      s.safety = real(*v, "solver.safety");
      if (!(s.safety >= 1.0)) fail("solver.safety", "must be >= 1");
    }
    if (const json* v = find(*sj, "mu_scale")) {
      s.mu_scale = real(*v, "solver.mu_scale");
      if (!(s.mu_scale > 0.0 && s.mu_scale <= 1.0)) fail("solver.mu_scale", "must lie in (0, 1]");
    }
    if (const json* v = find(*sj, "a_scale")) {
      s.a_scale = real(*v, "solver.a_scale");
      if (!(s.a_scale > 0.0)) fail("solver.a_scale", "must be > 0");
    }
  }

  if (cfg.algorithm == "indicator") {
    if (cfg.problem.family != "constrained_sphere")
      fail("algorithm", "indicator needs an indicator-constrained problem (constrained_sphere)");
    if (!cfg.solver.theta) fail("solver.theta", "required when algorithm is indicator");
  } else if (cfg.problem.family != "sparse_pca") {
    fail("algorithm", "lipschitz needs a Lipschitz nonsmooth term (sparse_pca)");
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigurationError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigurationError(std::string("config: ") + e.what());
  }
  return parse_run_config(doc);
}

StochasticProblem build_problem(const ProblemConfig& cfg, std::uint64_t seed) {
  if (cfg.family == "sparse_pca") return make_sparse_pca(cfg.n, cfg.p, cfg.N, cfg.lambda, seed);
  const Eigen::Index m = cfg.m;
  NonsmoothTerm set = [&] {
    if (cfg.set.kind == "ball") return NonsmoothTerm::ball(vec_or_zero(cfg.set.center, m), cfg.set.radius);
    if (cfg.set.kind == "box")
      return NonsmoothTerm::box(Eigen::VectorXd::Constant(m, cfg.set.lower), Eigen::VectorXd::Constant(m, cfg.set.upper));
    return NonsmoothTerm::singleton(vec_or_zero(cfg.set.target, m));
  }();
  return make_constrained_sphere(cfg.n, m, cfg.N, std::move(set), seed, cfg.sphere);
}

RunOutcome execute_run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const StochasticProblem problem = build_problem(cfg.problem, cfg.seed);
  Rng init_rng = named_stream(cfg.seed, "init");
  const ManifoldPoint x0 = random_point(problem.manifold(), init_rng);

  RunOptions options;
  options.max_iters = cfg.max_iters;
  options.trace_every = cfg.trace_every;
  options.diagnostics = cfg.diagnostics;

  RunOutcome out;
  RunSummary& s = out.summary;
  s.algorithm = cfg.algorithm;
  s.problem = cfg.problem.to_json();
  s.seed = cfg.seed;
  s.K = cfg.max_iters;

  Certificate cert = [&] {
    if (cfg.algorithm == "lipschitz") {
      const lipschitz::Schedule schedule{cfg.solver.mu_scale, cfg.solver.a_scale};
      s.config = solver_json_lipschitz(schedule);
      lipschitz::Run r = lipschitz::run(problem, x0, cfg.seed, options, schedule);
      out.trace = std::move(r.trace);
      return lipschitz::certificate(r, problem, cfg.seed);
    }
    const SolverConfig& sc = cfg.solver;
    indicator::Config ic;
    ic.theta = *sc.theta;
    if (!sc.zeta || !sc.c_tau || !sc.c_a || !sc.trunc_radius) {
      ic = indicator::default_config(problem, *sc.theta, sc.safety, cfg.seed, sc.zeta).config;
    }
    if (sc.zeta) ic.zeta = *sc.zeta;
    if (sc.c_tau) ic.c_tau = *sc.c_tau;
    if (sc.c_a) ic.c_a = *sc.c_a;
    if (sc.trunc_radius) ic.trunc_radius = *sc.trunc_radius;
    ic.validate();
    s.config = solver_json_indicator(ic, sc.safety);
    indicator::Run r = indicator::run(problem, x0, ic, cfg.seed, options);
    out.trace = std::move(r.trace);
    return indicator::certificate(r, problem, ic, cfg.seed);
  }();
  s.config["max_iters"] = cfg.max_iters;
  s.config["trace_every"] = cfg.trace_every;
  s.config["diagnostics"] = cfg.diagnostics;

  s.i_K = cert.i_K;
  s.grad_residual = cert.grad_residual;
  s.feas_residual = cert.feas_residual;
  s.membership_ok = cert.membership_ok;
  s.rate_fits = summary_fits(out.trace, cfg.max_iters);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RunOutcome run_to_directory(const RunConfig& cfg, const std::filesystem::path& output_dir) {
  RunOutcome out = execute_run(cfg);
  std::filesystem::create_directories(output_dir);
  write_trace_csv(out.trace, output_dir / "trace.csv");
  write_summary_json(out.summary, output_dir / "summary.json");
  return out;
}

}  // namespace manismooth
