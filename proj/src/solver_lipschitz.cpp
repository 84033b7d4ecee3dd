#include "manismooth/solver_lipschitz.hpp"

#include <chrono>
#include <cmath>

#include "manismooth/errors.hpp"
#include "manismooth/smoothing.hpp"

namespace manismooth::lipschitz {

namespace {

void require_on_manifold(const StochasticProblem& p, const ManifoldPoint& x) {
  if (!(x.descriptor() == p.manifold()))
    throw DimensionError("x0 lives on " + x.descriptor().name() + " but the problem is on " + p.manifold().name());
}

void require_finite(const TangentVector& v, const char* what, long k) {
  if (!v.data().allFinite()) throw NumericalFailure(std::string("non-finite ") + what, k);
}

// G_k, the envelope evaluation and tau_k for the current state; no mutation.
struct Direction {
  MoreauEval e;
  TangentVector G;
  double norm_sq;
  double grad_sq_sum;
  double a_next;
  double tau;
  double infeas;
};

Direction direction(const State& s, const StochasticProblem& p, const Schedule& schedule) {
  const double mu = schedule.mu(s.k);
  const Eigen::VectorXd cx = map_c_eval(p, s.x);
  MoreauEval e = moreau_eval(p.h(), mu, cx);
  TangentVector G = s.delta + envelope_riemannian_grad(p, s.x, e);
  require_finite(G, "search direction G_k", s.k);
  const double norm_sq = G.data().squaredNorm();
  const double sum = s.grad_sq_sum + norm_sq;
  const double a_next = schedule.a_next(s.k);
  // sum == 0: stationary for the current mu; take a zero step
  const double tau = sum > 0.0 ? std::pow(sum / a_next, -1.0 / 3.0) : 0.0;
  const double infeas = (cx - e.prox_point).norm();
  return Direction{std::move(e), std::move(G), norm_sq, sum, a_next, tau, infeas};
}

}  // namespace

double Schedule::mu(long k) const { return mu_scale * std::pow(static_cast<double>(k), -1.0 / 3.0); }

double Schedule::a_next(long k) const {
  return std::min(1.0, a_scale * std::pow(static_cast<double>(k), -2.0 / 3.0));
}

void Schedule::validate() const {
  if (!(mu_scale > 0.0) || !(mu_scale <= 1.0)) throw ParameterError("mu_scale must lie in (0, 1]");
  if (!(a_scale > 0.0)) throw ParameterError("a_scale must be > 0");
}

State init(const StochasticProblem& p, const ManifoldPoint& x0, std::uint64_t seed) {
  require_on_manifold(p, x0);
  if (p.h().is_indicator())
    throw ConfigurationError("the Lipschitz method needs a Lipschitz h; got " + p.h().kind_name());
  Rng rng = named_stream(seed, "sampling");
  const SampleIndex xi{uniform_index(rng, p.num_samples())};
  TangentVector delta = sample_riemannian_grad(p, x0, xi);
  return State{1, x0, std::move(delta), 0.0, std::move(rng)};
}

StepReport peek(const State& s, const StochasticProblem& p, const Schedule& schedule) {
  const Direction d = direction(s, p, schedule);
  return StepReport{s.k, d.e.mu, d.tau, d.a_next, std::sqrt(d.norm_sq), d.e.value, d.infeas, s.delta.norm()};
}

StepReport step(State& s, const StochasticProblem& p, const Schedule& schedule, long renormalize_every) {
  Direction d = direction(s, p, schedule);
  s.grad_sq_sum = d.grad_sq_sum;

  ManifoldPoint x_next = retract(s.x, (-d.tau) * d.G);
  if (s.k % renormalize_every == 0) x_next = renormalize(x_next);

  const SampleIndex xi{uniform_index(s.rng, p.num_samples())};
  TangentVector delta_next = sample_riemannian_grad(p, x_next, xi);
  if (d.a_next < 1.0) {
    const TangentVector carried = s.delta - sample_riemannian_grad(p, s.x, xi);
    delta_next += (1.0 - d.a_next) * vector_transport(s.x, x_next, carried);
  }
  require_finite(delta_next, "momentum estimator", s.k);

  const StepReport report{s.k, d.e.mu, d.tau, d.a_next, std::sqrt(d.norm_sq), d.e.value, d.infeas,
                          delta_next.norm()};
  s.x = std::move(x_next);
  s.delta = std::move(delta_next);
  ++s.k;
  return report;
}

Run run(const StochasticProblem& p, const ManifoldPoint& x0, std::uint64_t seed, const RunOptions& options,
        const Schedule& schedule) {
  validate(options);
  schedule.validate();
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
    if (options.diagnostics) {
      const Diagnostics dg = diagnose(p, at.x, at.delta, r.mu);
      rec.obj_smooth = dg.obj_smooth;
      rec.norm_grad_Fmu = dg.norm_grad_Fmu;
      rec.norm_eps = dg.norm_eps;
    }
    rec.wall_ns = elapsed();
    return rec;
  };

  Run out{init(p, x0, seed), {}, {}, K};
  State& s = out.final;
  for (long i = 1; i <= K; ++i) {
    if (plan.wants(s.k)) out.snapshots.push_back(Snapshot{s.k, s.x, schedule.mu(s.k), 1.0});
    const bool traced = i % options.trace_every == 0;
    std::optional<TraceRecord> pending;
    if (traced) pending = record(peek(s, p, schedule), s);
    step(s, p, schedule, options.renormalize_every);
    if (pending) {
      pending->wall_ns = elapsed();
      out.trace.push_back(*pending);
      if (options.early_stop_tol > 0.0 && pending->norm_grad_Fmu && *pending->norm_grad_Fmu <= options.early_stop_tol)
        break;
    }
  }
  out.trace.push_back(record(peek(s, p, schedule), s));
  return out;
}

Certificate certificate(const Run& r, const StochasticProblem& p, std::uint64_t seed) {
  return certificate_from_snapshots(p, r.snapshots, /*weighted=*/false, seed);
}

}  // namespace manismooth::lipschitz
