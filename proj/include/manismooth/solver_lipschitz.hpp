#pragma once

#include <cstdint>
#include <vector>

#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/solver_common.hpp"
#include "manismooth/trace.hpp"

/// Stochastic smoothing with recursive momentum and the adaptive stepsize
/// tau_k = (sum_{i<=k} ||G_i||^2 / a_{k+1})^{-1/3}, for Lipschitz h.
namespace manismooth::lipschitz {

/// mu_k = mu_scale k^{-1/3}, a_1 = 1, a_{k+1} = min(1, a_scale k^{-2/3}).
/// The scales are ablation knobs; both are 1 in the analysed method.
struct Schedule {
  double mu_scale = 1.0;
  double a_scale = 1.0;

  double mu(long k) const;
  double a_next(long k) const;
  void validate() const;
};

struct State {
  long k;            ///< current iteration index (starts at 1)
  ManifoldPoint x;   ///< x_k
  TangentVector delta;  ///< momentum estimator delta_k, tangent at x_k
  double grad_sq_sum;   ///< sum_{i<k} ||G_i||^2
  Rng rng;              ///< sample stream
};

/// k = 1, delta_1 = grad f~(x0, xi_1) for one drawn sample (a_1 = 1 leaves no momentum).
State init(const StochasticProblem& p, const ManifoldPoint& x0, std::uint64_t seed);

/// One iteration; updates `s` in place.
StepReport step(State& s, const StochasticProblem& p, const Schedule& schedule = {},
                long renormalize_every = 1000);

/// Quantities step() would report at the current state, without advancing it.
StepReport peek(const State& s, const StochasticProblem& p, const Schedule& schedule = {});

struct Run {
  State final;
  std::vector<TraceRecord> trace;
  std::vector<Snapshot> snapshots;
  long K = 0;
};

/// K = options.max_iters steps. Records every trace_every-th step plus the final iterate.
Run run(const StochasticProblem& p, const ManifoldPoint& x0, std::uint64_t seed, const RunOptions& options,
        const Schedule& schedule = {});

/// i_K uniform over the stored back-half iterates.
Certificate certificate(const Run& r, const StochasticProblem& p, std::uint64_t seed);

}  // namespace manismooth::lipschitz
