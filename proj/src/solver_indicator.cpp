#include "manismooth/solver_indicator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "manismooth/errors.hpp"
#include "manismooth/smoothing.hpp"

namespace manismooth::indicator {

namespace {

void require_finite(const TangentVector& v, const char* what, long k) {
  if (!v.data().allFinite()) throw NumericalFailure(std::string("non-finite ") + what, k);
}

struct Direction {
  MoreauEval e;
  TangentVector G;
  double dist;
};

Direction direction(const State& s, const StochasticProblem& p, const Config& cfg) {
  const double mu = cfg.mu(s.k);
  const Eigen::VectorXd cx = map_c_eval(p, s.x);
  MoreauEval e = moreau_eval(p.h(), mu, cx);
  TangentVector G = s.delta + envelope_riemannian_grad(p, s.x, e);
  require_finite(G, "search direction G_k", s.k);
  const double dist = (cx - e.prox_point).norm();
  return Direction{std::move(e), std::move(G), dist};
}

double feas_decay(const Config& cfg, long k, double dist) {
  return dist * dist * std::pow(static_cast<double>(std::max(k, 1L)), 2.0 * cfg.omega() / cfg.theta);
}

// Riemannian gradient of g(x) = dist^2(c(x), C)/2 and dist itself.
std::pair<TangentVector, double> penalty_gradient(const StochasticProblem& p, const ManifoldPoint& x) {
  const Eigen::VectorXd cx = map_c_eval(p, x);
  const Eigen::VectorXd r = cx - p.h().project(cx);
  return {tangent_project(x, map_c_jac_t(p, x, r)), r.norm()};
}

}  // namespace

double Config::omega() const { return std::min(theta / (theta + 2.0), 0.5); }

long Config::K_tilde() const {
  const double v = std::ceil(8.0 * omega() / (c_tau * zeta * zeta));
  if (!(v < static_cast<double>(std::numeric_limits<long>::max() / 2))) return std::numeric_limits<long>::max() / 2;
  return static_cast<long>(v);
}

double Config::mu(long k) const { return std::pow(static_cast<double>(std::max(k, 1L)), -omega()); }

double Config::tau(long k) const { return c_tau * std::pow(static_cast<double>(k + 1), -omega()); }

double Config::a(long k) const {
  return std::min(1.0, c_a * std::pow(static_cast<double>(std::max(k, 1L)), -2.0 * omega()));
}

void Config::validate() const {
  if (!(theta >= 1.0)) throw ParameterError("solver.theta must be >= 1");
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ParameterError("solver.zeta must be > 0");
  if (!(c_tau > 0.0) || !std::isfinite(c_tau)) throw ParameterError("solver.c_tau must be > 0");
  if (!(c_a > 0.0) || !std::isfinite(c_a)) throw ParameterError("solver.c_a must be > 0");
  if (!(trunc_radius > 0.0) || !std::isfinite(trunc_radius))
    throw ParameterError("solver.trunc_radius must be > 0");
}

double momentum_constant(double c_tau, double L_tilde) {
  if (!(c_tau > 0.0)) throw ParameterError("momentum_constant: c_tau must be > 0");
  if (!(L_tilde > 0.0)) throw ParameterError("momentum_constant: L_tilde must be > 0");
  // 4 C L~^2 = 1/4 with C = 1/(16 L~^2)
  return 0.75 * c_tau * c_tau + 1.0 / (32.0 * L_tilde * L_tilde);
}

bool step_constant_admissible(const Config& cfg, const ProblemConstants& constants) {
  const double bound = std::max(penalty_smoothness(constants), composite_smoothness_indicator(constants));
  return bound <= 0.0 || cfg.c_tau <= 1.0 / bound;
}

double ErrorBoundProbe::zeta_at(double theta) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dist.size(); ++i) best = std::min(best, grad_norm[i] / std::pow(dist[i], theta));
  return best;
}

double penalty_grad_norm(const StochasticProblem& p, const ManifoldPoint& x) {
  return penalty_gradient(p, x).first.norm();
}

ErrorBoundProbe error_bound_probe(const StochasticProblem& p, int samples, std::uint64_t seed) {
  if (!p.h().is_indicator()) throw ConfigurationError("error_bound_probe: h must be an indicator");
  if (samples < 1) throw ParameterError("error_bound_probe: samples must be >= 1");
  constexpr int kWalk = 40;
  constexpr double kFeasible = 1e-12;
  Rng rng = named_stream(seed, "probe");
  ErrorBoundProbe out;
  for (int s = 0; s < samples; ++s) {
    ManifoldPoint x = random_point(p.manifold(), rng);
    for (int it = 0; it < kWalk; ++it) {
      auto [gg, d] = penalty_gradient(p, x);
      if (d <= kFeasible) break;
      const double gn = gg.norm();
      out.dist.push_back(d);
      out.grad_norm.push_back(gn);
      if (gn == 0.0) break;
      // backtracking (Armijo) on g along -grad g
      const double g0 = 0.5 * d * d;
      double t = 1.0 / std::max(1.0, gn);
      bool moved = false;
      for (int half = 0; half < 30 && !moved; ++half, t *= 0.5) {
        ManifoldPoint y = retract(x, (-t) * gg);
        const double dy = p.h().distance(map_c_eval(p, y));
        if (0.5 * dy * dy <= g0 - 1e-4 * t * gn * gn) {
          x = std::move(y);
          moved = true;
        }
      }
      if (!moved) break;
    }
  }
  if (out.dist.empty()) throw InsufficientDataError("error_bound_probe: inconclusive, every sampled point is feasible");

  // OLS of log ||grad g|| on log dist over points with a nonzero gradient
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < out.dist.size(); ++i) {
    if (!(out.grad_norm[i] > 0.0)) continue;
    const double lx = std::log(out.dist[i]);
    const double ly = std::log(out.grad_norm[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  out.theta_fit = 1.0;
  if (n >= 2) {
    const double var = sxx - sx * sx / static_cast<double>(n);
    if (var > 1e-12 * static_cast<double>(n)) out.theta_fit = (sxy - sx * sy / static_cast<double>(n)) / var;
  }
  out.zeta_hat = out.zeta_at(out.theta_fit);
  return out;
}

DefaultConfigReport default_config(const StochasticProblem& p, double theta, double safety, std::uint64_t seed,
                                   std::optional<double> zeta, int samples) {
  if (!(theta >= 1.0)) throw ParameterError("default_config: theta must be >= 1");
  if (!(safety >= 1.0)) throw ParameterError("default_config: safety must be >= 1");
  if (!p.h().is_indicator()) throw ConfigurationError("default_config: h must be an indicator");
  DefaultConfigReport rep;
  rep.constants = estimate_constants(p, samples, seed).scaled(safety);
  rep.L_g = penalty_smoothness(rep.constants);
  rep.G = composite_smoothness_indicator(rep.constants);
  Config& cfg = rep.config;
  cfg.theta = theta;
  cfg.c_tau = 1.0 / (safety * std::max({rep.L_g, rep.G, 1e-12}));
  cfg.c_a = momentum_constant(cfg.c_tau, std::max(rep.constants.L_tilde, 1e-12));
  cfg.trunc_radius = std::max(rep.constants.L_f, 1e-12);
  if (zeta) {
    cfg.zeta = *zeta;
  } else {
    cfg.zeta = error_bound_probe(p, samples, seed).zeta_at(theta);
    if (!(cfg.zeta > 0.0))
      throw ConfigurationError("default_config: probed zeta is 0, the error bound fails on this problem");
  }
  cfg.validate();
  return rep;
}

TangentVector truncate(TangentVector v, double radius) {
  const double nrm = v.norm();
  if (nrm > radius) v *= radius / nrm;
  return v;
}

State init(const StochasticProblem& p, const ManifoldPoint& x0, const Config& cfg, std::uint64_t seed) {
  cfg.validate();
  if (!(x0.descriptor() == p.manifold()))
    throw DimensionError("x0 lives on " + x0.descriptor().name() + " but the problem is on " + p.manifold().name());
  if (!p.h().is_indicator())
    throw ConfigurationError("the indicator method needs an indicator h; got " + p.h().kind_name());
  Rng rng = named_stream(seed, "sampling");
  const SampleIndex xi{uniform_index(rng, p.num_samples())};
  TangentVector delta = truncate(sample_riemannian_grad(p, x0, xi), cfg.trunc_radius);
  return State{0, x0, std::move(delta), std::move(rng)};
}

StepReport peek(const State& s, const StochasticProblem& p, const Config& cfg) {
  const Direction d = direction(s, p, cfg);
  return StepReport{s.k, d.e.mu, cfg.tau(s.k), cfg.a(s.k + 1), d.G.norm(), d.e.value, d.dist, s.delta.norm()};
}

StepReport step(State& s, const StochasticProblem& p, const Config& cfg, long renormalize_every) {
  const Direction d = direction(s, p, cfg);
  const double tau = cfg.tau(s.k);
  const double a_next = cfg.a(s.k + 1);

  ManifoldPoint x_next = retract(s.x, (-tau) * d.G);
  if ((s.k + 1) % renormalize_every == 0) x_next = renormalize(x_next);

  const SampleIndex xi{uniform_index(s.rng, p.num_samples())};
  TangentVector v = sample_riemannian_grad(p, x_next, xi);
  if (a_next < 1.0) {
    const TangentVector carried = s.delta - sample_riemannian_grad(p, s.x, xi);
    v += (1.0 - a_next) * vector_transport(s.x, x_next, carried);
  }
  require_finite(v, "momentum estimator", s.k);
  TangentVector delta_next = truncate(std::move(v), cfg.trunc_radius);

  const StepReport report{s.k, d.e.mu, tau, a_next, d.G.norm(), d.e.value, d.dist, delta_next.norm()};
  s.x = std::move(x_next);
  s.delta = std::move(delta_next);
  ++s.k;
  return report;
}

Run run(const StochasticProblem& p, const ManifoldPoint& x0, const Config& cfg, std::uint64_t seed,
        const RunOptions& options) {
  validate(options);
  const long K = options.max_iters;
  const SnapshotPlan plan = SnapshotPlan::for_run(K, options.snapshot_budget);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::int64_t {
    if (!options.record_wall_time) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
  };
  auto record = [&](const StepReport& r, const State& at) {
    TraceRecord rec;
    rec.k = r.k;
    rec.mu = r.mu;
    rec.tau = r.tau;
    rec.a = r.a;
    rec.norm_G = r.norm_G;
    rec.infeas = r.infeas;
    rec.feas_decay = feas_decay(cfg, r.k, r.infeas);
    if (options.diagnostics) {
      const Diagnostics dg = diagnose(p, at.x, at.delta, r.mu);
      rec.obj_smooth = dg.obj_smooth;
      rec.norm_grad_Fmu = dg.norm_grad_Fmu;
      rec.norm_eps = dg.norm_eps;
    }
    rec.wall_ns = elapsed();
    return rec;
  };
  auto snapshot = [&](const State& s) {
    if (plan.wants(s.k)) return true;
    return false;
  };

  Run out{init(p, x0, cfg, seed), {}, {}, K};
  State& s = out.final;
  for (long i = 1; i <= K; ++i) {
    if (snapshot(s)) out.snapshots.push_back(Snapshot{s.k, s.x, cfg.mu(s.k), cfg.tau(s.k)});
    const bool traced = i % options.trace_every == 0;
    std::optional<TraceRecord> pending;
    if (traced) pending = record(peek(s, p, cfg), s);
    step(s, p, cfg, options.renormalize_every);
    if (pending) {
      pending->wall_ns = elapsed();
      out.trace.push_back(*pending);
      if (options.early_stop_tol > 0.0 && pending->norm_grad_Fmu && *pending->norm_grad_Fmu <= options.early_stop_tol)
        break;
    }
  }
  if (snapshot(s)) out.snapshots.push_back(Snapshot{s.k, s.x, cfg.mu(s.k), cfg.tau(s.k)});
  out.trace.push_back(record(peek(s, p, cfg), s));
  return out;
}

Certificate certificate(const Run& r, const StochasticProblem& p, const Config& cfg, std::uint64_t seed) {
  (void)cfg;
  return certificate_from_snapshots(p, r.snapshots, /*weighted=*/true, seed);
}

}  // namespace manismooth::indicator
