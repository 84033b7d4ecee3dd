#include "manismooth/errors.hpp"
#include "manismooth/kernels.hpp"
#include "manismooth/smoothing.hpp"
#include "manismooth/solver_common.hpp"

namespace manismooth {

void validate(const RunOptions& options) {
  if (options.max_iters < 1) throw ParameterError("max_iters (K) must be >= 1");
  if (options.trace_every < 1) throw ParameterError("trace_every must be >= 1");
  if (options.snapshot_budget < 1) throw ParameterError("snapshot_budget must be >= 1");
  if (options.renormalize_every < 1) throw ParameterError("renormalize_every must be >= 1");
  if (options.early_stop_tol < 0.0) throw ParameterError("early_stop_tol must be >= 0");
}

SnapshotPlan SnapshotPlan::for_run(long K, long budget) {
  SnapshotPlan plan;
  plan.lo = (K + 1) / 2;
  plan.hi = K;
  plan.stride = std::max(1L, K / budget);
  return plan;
}

Diagnostics diagnose(const StochasticProblem& p, const ManifoldPoint& x, const TangentVector& delta, double mu) {
  const ValueGrad f = finite_sum(p.smooth(), x.data());
  const Eigen::VectorXd cx = map_c_eval(p, x);
  const MoreauEval e = moreau_eval(p.h(), mu, cx);
  const TangentVector grad_f = riemannian_gradient(x, f.grad);
  const TangentVector grad_F = riemannian_gradient(x, f.grad + map_c_jac_t(p, x, e.grad));
  return Diagnostics{f.value + e.value, grad_F.norm(), (delta.data() - grad_f.data()).norm()};
}

Certificate certificate_at(const StochasticProblem& p, long k, const ManifoldPoint& x, double mu, Rng& rng) {
  const Eigen::VectorXd cx = map_c_eval(p, x);
  Eigen::VectorXd y = prox(p.h(), mu, cx);
  Eigen::VectorXd z = (cx - y) / mu;
  const ValueGrad f = finite_sum(p.smooth(), x.data());
  const double grad_residual = riemannian_gradient(x, f.grad + map_c_jac_t(p, x, z)).norm();
  const double feas_residual = (cx - y).norm();
  const bool ok = subgradient_membership(p.h(), y, z, rng);
  return Certificate{k, x, std::move(y), std::move(z), mu, grad_residual, feas_residual, ok};
}

Certificate certificate_from_snapshots(const StochasticProblem& p, const std::vector<Snapshot>& snapshots,
                                       bool weighted, std::uint64_t seed) {
  if (snapshots.empty()) throw InsufficientDataError("certificate: no snapshots stored");
  Rng rng = named_stream(seed, "certificate");
  std::size_t pick = 0;
  if (weighted) {
    std::vector<double> w;
    w.reserve(snapshots.size());
    for (const auto& s : snapshots) w.push_back(s.weight);
    pick = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
  } else {
    pick = uniform_index(rng, snapshots.size());
  }
  const Snapshot& s = snapshots[pick];
  return certificate_at(p, s.k, s.x, s.mu, rng);
}

}  // namespace manismooth
