#include "manismooth/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "manismooth/errors.hpp"
#include "manismooth/harness.hpp"
#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/prox.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/smoothing.hpp"
#include "manismooth/solver_indicator.hpp"
#include "manismooth/solver_lipschitz.hpp"

namespace manismooth {

namespace {

constexpr std::uint64_t kSeed = 20240607;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::vector<ManifoldDescriptor> test_manifolds() {
  return {ManifoldDescriptor::sphere(6), ManifoldDescriptor::stiefel(7, 3), ManifoldDescriptor::oblique(5, 3)};
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

// ---- manifold ----

PropertyResult retraction_on_manifold() {
  Rng rng = named_stream(kSeed, "probe");
  double worst = 0.0;
  for (const ManifoldDescriptor& m : test_manifolds())
    for (int s = 0; s < 200; ++s) {
      const ManifoldPoint x = random_point(m, rng);
      const TangentVector eta = uniform(rng, 0.0, 5.0) * random_unit_tangent(x, rng);
      worst = std::max(worst, point_residual(m, retract(x, eta).data()));
    }
  return {"manifold", "retraction lands on the manifold", worst <= 1e-10, "max residual " + fmt(worst)};
}

PropertyResult retraction_at_zero() {
  Rng rng = named_stream(kSeed, "probe");
  bool ok = true;
  for (const ManifoldDescriptor& m : test_manifolds())
    for (int s = 0; s < 50; ++s) {
      const ManifoldPoint x = random_point(m, rng);
      ok = ok && retract(x, TangentVector::zero(x)).data() == x.data();
    }
  return {"manifold", "retraction at zero returns the base point", ok, ""};
}

PropertyResult projection_idempotent() {
  Rng rng = named_stream(kSeed, "probe");
  double worst = 0.0;
  for (const ManifoldDescriptor& m : test_manifolds())
    for (int s = 0; s < 200; ++s) {
      const ManifoldPoint x = random_point(m, rng);
      const Eigen::MatrixXd v = gaussian_matrix(rng, m.rows(), m.cols());
      const TangentVector once = tangent_project(x, v);
      const TangentVector twice = tangent_project(x, once.data());
      worst = std::max({worst, (once.data() - twice.data()).norm() / std::max(1.0, v.norm()),
                        tangent_residual(m, x.data(), once.data())});
    }
  return {"manifold", "tangent projection is idempotent", worst <= 1e-12, "max deviation " + fmt(worst)};
}

PropertyResult transport_nonexpansive() {
  Rng rng = named_stream(kSeed, "probe");
  bool ok = true;
  double worst = 0.0;
  for (const ManifoldDescriptor& m : test_manifolds())
    for (int s = 0; s < 200; ++s) {
      const ManifoldPoint x = random_point(m, rng);
      const ManifoldPoint y = random_point(m, rng);
      const TangentVector xi = uniform(rng, 0.1, 3.0) * random_unit_tangent(x, rng);
      const TangentVector moved = vector_transport(x, y, xi);
      ok = ok && moved.norm() <= xi.norm() * (1.0 + 1e-12);
      worst = std::max(worst, tangent_residual(m, y.data(), moved.data()));
    }
  return {"manifold", "vector transport is tangent and nonexpansive", ok && worst <= 1e-10,
          "max tangency residual " + fmt(worst)};
}

// ---- smoothing ----

NonsmoothTerm random_term_1d(Rng& rng) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  switch (uniform_index(rng, 5)) {
    case 0:
      return NonsmoothTerm::scaled_l1(uniform(rng, 0.0, 3.0), 1);
    case 1:
      return NonsmoothTerm::scaled_l2(uniform(rng, 0.0, 3.0), 1);
    case 2:
      return NonsmoothTerm::ball(Eigen::VectorXd::Constant(1, uniform(rng, -1, 1)), uniform(rng, 0.1, 2.0));
    case 3: {
      const double lo = uniform(rng, -2, 1);
      return NonsmoothTerm::box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, lo + uniform(rng, 0, 2)));
    }
    default:
      return NonsmoothTerm::singleton(Eigen::VectorXd::Constant(1, uniform(rng, -2, 2)));
  }
}

// 1-D set as an interval [lo, hi], read off the term parameters.
std::pair<double, double> interval_of(const NonsmoothTerm& h) {
  const auto& v = h.variant();
  if (const auto* b = std::get_if<IndicatorBall>(&v)) return {b->center(0) - b->radius, b->center(0) + b->radius};
  if (const auto* b = std::get_if<IndicatorBox>(&v)) return {b->lower(0), b->upper(0)};
  const double t = std::get<IndicatorSingleton>(v).target(0);
  return {t, t};
}

// Brute-force argmin over a grid around y, or over the interval for sets.
double grid_prox(const NonsmoothTerm& h, double mu, double y) {
  constexpr double step = 1e-4;
  if (h.is_indicator()) {
    const auto [lo, hi] = interval_of(h);
    double best = lo, best_v = (lo - y) * (lo - y);
    for (double t = lo; t <= hi + step; t += step) {
      const double c = std::min(t, hi);
      if ((c - y) * (c - y) < best_v) {
        best_v = (c - y) * (c - y);
        best = c;
      }
    }
    return best;
  }
  const double lo = y - 3.0 * mu * h.lipschitz_const() - 1.0;
  const double hi = y + 3.0 * mu * h.lipschitz_const() + 1.0;
  double best = lo, best_v = std::numeric_limits<double>::infinity();
  Eigen::VectorXd z(1);
  for (double t = lo; t <= hi; t += step) {
    z(0) = t;
    const double v = h.value(z) + (t - y) * (t - y) / (2.0 * mu);
    if (v < best_v) {
      best_v = v;
      best = t;
    }
  }
  return best;
}

PropertyResult prox_matches_grid() {
  Rng rng = named_stream(kSeed, "probe");
  double worst = 0.0;
  for (int s = 0; s < 200; ++s) {
    const NonsmoothTerm h = random_term_1d(rng);
    const double mu = std::exp(uniform(rng, std::log(0.01), std::log(10.0)));
    const double y = uniform(rng, -4, 4);
    const double got = prox(h, mu, Eigen::VectorXd::Constant(1, y))(0);
    worst = std::max(worst, std::abs(got - grid_prox(h, mu, y)));
  }
  return {"smoothing", "prox agrees with a brute-force grid minimizer", worst <= 1e-3, "max gap " + fmt(worst)};
}

NonsmoothTerm random_term(Rng& rng, Eigen::Index m) {
  switch (uniform_index(rng, 5)) {
    case 0:
      return NonsmoothTerm::scaled_l1(uniform(rng, 0.0, 3.0), m);
    case 1:
      return NonsmoothTerm::scaled_l2(uniform(rng, 0.0, 3.0), m);
    case 2:
      return NonsmoothTerm::ball(gaussian_matrix(rng, m, 1), uniform(rng, 0.1, 2.0));
    case 3: {
      const Eigen::VectorXd lo = gaussian_matrix(rng, m, 1);
      return NonsmoothTerm::box(lo, lo + Eigen::VectorXd::Constant(m, uniform(rng, 0, 2)));
    }
    default:
      return NonsmoothTerm::singleton(gaussian_matrix(rng, m, 1));
  }
}

PropertyResult envelope_inequality() {
  Rng rng = named_stream(kSeed, "probe");
  int failures = 0;
  for (int s = 0; s < 2000; ++s) {
    const NonsmoothTerm h = random_term(rng, 1 + static_cast<Eigen::Index>(uniform_index(rng, 6)));
    const double mu1 = std::exp(uniform(rng, std::log(1e-3), std::log(10.0)));
    const double mu2 = mu1 * uniform(rng, 1e-3, 1.0);
    const Eigen::VectorXd y = 3.0 * gaussian_matrix(rng, h.dim(), 1);
    if (!moreau_envelope_inequality_check(h, mu1, mu2, y)) ++failures;
  }
  return {"smoothing", "envelope comparison inequality across mu", failures == 0,
          std::to_string(failures) + " failures in 2000"};
}

PropertyResult envelope_gradient_bound() {
  Rng rng = named_stream(kSeed, "probe");
  double worst = 0.0;
  for (int s = 0; s < 2000; ++s) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform_index(rng, 6));
    const NonsmoothTerm h = uniform_index(rng, 2) ? NonsmoothTerm::scaled_l1(uniform(rng, 0, 3), m)
                                                  : NonsmoothTerm::scaled_l2(uniform(rng, 0, 3), m);
    const double mu = std::exp(uniform(rng, std::log(1e-3), std::log(10.0)));
    const MoreauEval e = moreau_eval(h, mu, 5.0 * gaussian_matrix(rng, m, 1));
    worst = std::max(worst, e.grad.norm() - h.lipschitz_const());
  }
  return {"smoothing", "envelope gradient norm stays below l_h", worst <= 1e-12, "max excess " + fmt(worst)};
}

double fd_relative_error(const StochasticProblem& p, double mu, Rng& rng) {
  const ManifoldPoint x = random_point(p.manifold(), rng);
  const SmoothedEval at = smoothed_objective_grad(p, x, mu);
  constexpr double t = 1e-5;
  double sq = 0.0;
  for (int d = 0; d < 20; ++d) {
    const TangentVector eta = random_unit_tangent(x, rng);
    const double fd = (smoothed_value(p, retract(x, t * eta), mu) - smoothed_value(p, retract(x, (-t) * eta), mu)) /
                      (2.0 * t);
    const double diff = fd - inner(at.rgrad, eta);
    sq += diff * diff;
  }
  return std::sqrt(sq) / std::max(at.rgrad.norm(), 1e-300);
}

PropertyResult gradient_formula() {
  Rng rng = named_stream(kSeed, "probe");
  const StochasticProblem pca = make_sparse_pca(10, 2, 40, 0.1, kSeed);
  const StochasticProblem sph = make_constrained_sphere(10, 3, 40, NonsmoothTerm::ball(Eigen::VectorXd::Zero(3), 0.3),
                                                       kSeed);
  double worst = 0.0;
  for (const StochasticProblem* p : {&pca, &sph})
    for (double mu : {1.0, 0.1}) worst = std::max(worst, fd_relative_error(*p, mu, rng));
  return {"smoothing", "smoothed gradient matches central differences", worst <= 1e-5,
          "max relative error " + fmt(worst)};
}

// ---- lemmas ----

PropertyResult seq_battery() {
  const BatteryResult r = lemma_seq_battery(10000, kSeed);
  return {"lemmas", "partial-sum power bound on random sequences", r.failures == 0,
          std::to_string(r.failures) + " failures in " + std::to_string(r.cases)};
}

PropertyResult implicit_battery() {
  const BatteryResult r = lemma_implicit_battery(10000, kSeed);
  return {"lemmas", "implicit power bound on random admissible tuples", r.failures == 0,
          std::to_string(r.failures) + " failures in " + std::to_string(r.cases)};
}

// ---- solver ----

PropertyResult lipschitz_run_properties() {
  const StochasticProblem p = make_sparse_pca(10, 2, 50, 0.1, kSeed);
  Rng init = named_stream(kSeed, "init");
  RunOptions opt;
  opt.max_iters = 400;
  const lipschitz::Run r = lipschitz::run(p, random_point(p.manifold(), init), kSeed, opt, {});
  double excess = -1.0;
  for (const TraceRecord& rec : r.trace)
    excess = std::max(excess, rec.infeas - rec.mu * p.h().lipschitz_const());
  const Certificate c = lipschitz::certificate(r, p, kSeed);
  const bool ok = excess <= 1e-10 && c.membership_ok;
  return {"solver", "lipschitz run: infeasibility below mu l_h and a valid certificate", ok,
          "max excess " + fmt(excess) + (c.membership_ok ? "" : ", certificate rejected")};
}

PropertyResult indicator_run_properties() {
  const StochasticProblem p =
      make_constrained_sphere(10, 3, 50, NonsmoothTerm::ball(Eigen::VectorXd::Zero(3), 0.5), kSeed);
  const indicator::Config cfg = indicator::default_config(p, 1.0, 1.0, kSeed).config;
  Rng init = named_stream(kSeed, "init");
  indicator::State s = indicator::init(p, random_point(p.manifold(), init), cfg, kSeed);
  double worst = s.delta.norm() - cfg.trunc_radius;
  for (int k = 0; k < 400; ++k) {
    indicator::step(s, p, cfg);
    worst = std::max(worst, s.delta.norm() - cfg.trunc_radius);
  }
  RunOptions opt;
  opt.max_iters = 400;
  Rng init2 = named_stream(kSeed, "init");
  const indicator::Run r = indicator::run(p, random_point(p.manifold(), init2), cfg, kSeed, opt);
  const Certificate c = indicator::certificate(r, p, cfg, kSeed);
  return {"solver", "indicator run: estimator stays truncated and the certificate is valid",
          worst <= 1e-12 && c.membership_ok, "max excess " + fmt(worst)};
}

PropertyResult runs_deterministic() {
  const StochasticProblem p = make_sparse_pca(8, 2, 30, 0.05, kSeed);
  RunOptions opt;
  opt.max_iters = 200;
  opt.diagnostics = true;
  auto once = [&] {
    Rng init = named_stream(kSeed, "init");
    return lipschitz::run(p, random_point(p.manifold(), init), kSeed, opt, {}).trace;
  };
  return {"solver", "identical seeds give identical traces", once() == once(), ""};
}

using Property = std::function<PropertyResult()>;

std::vector<Property> suite(const std::string& name) {
  if (name == "manifold") return {retraction_on_manifold, retraction_at_zero, projection_idempotent,
                                  transport_nonexpansive};
  if (name == "smoothing") return {prox_matches_grid, envelope_inequality, envelope_gradient_bound, gradient_formula};
  if (name == "lemmas") return {seq_battery, implicit_battery};
  if (name == "solver") return {lipschitz_run_properties, indicator_run_properties, runs_deterministic};
  throw ConfigurationError("unknown suite '" + name + "'");
}

}  // namespace

const std::vector<std::string>& check_suite_names() {
  static const std::vector<std::string> names{"all", "manifold", "smoothing", "lemmas", "solver"};
  return names;
}

std::vector<PropertyResult> run_check_suite(const std::string& name) {
  std::vector<std::string> suites;
  if (name == "all")
    suites = {"manifold", "smoothing", "lemmas", "solver"};
  else
    suites = {name};
  std::vector<PropertyResult> out;
  for (const std::string& s : suites)
    for (const Property& prop : suite(s)) {
      try {
        out.push_back(prop());
      } catch (const std::exception& e) {
        out.push_back({s, "(property threw)", false, e.what()});
      }
    }
  return out;
}

}  // namespace manismooth
