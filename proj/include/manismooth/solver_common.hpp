#pragma once

#include <cstdint>
#include <vector>

#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/trace.hpp"

namespace manismooth {

struct RunOptions {
  long max_iters = 1000;
  long trace_every = 1;
  /// Full-gradient columns (obj_smooth, norm_grad_Fmu, norm_eps). O(N) per record.
  bool diagnostics = false;
  /// wall_ns stays 0 unless enabled, so traces are reproducible byte for byte.
  bool record_wall_time = false;
  /// Stop once a traced ||grad F_mu|| falls below this (needs diagnostics; 0 = off).
  double early_stop_tol = 0.0;
  /// Upper bound on stored back-half iterates for the certificate.
  long snapshot_budget = 2000;
  long renormalize_every = 1000;
};

void validate(const RunOptions& options);

/// Which iterate indices in {ceil(K/2), ..., K} are stored for certificates.
struct SnapshotPlan {
  long lo = 1;
  long hi = 1;
  long stride = 1;

  static SnapshotPlan for_run(long K, long budget);
  bool wants(long k) const { return k >= lo && k <= hi && (k - lo) % stride == 0; }
};

/// Full-gradient diagnostics at (x, delta) for smoothing parameter mu.
struct Diagnostics {
  double obj_smooth = 0.0;
  double norm_grad_Fmu = 0.0;
  double norm_eps = 0.0;
};

Diagnostics diagnose(const StochasticProblem& p, const ManifoldPoint& x, const TangentVector& delta, double mu);

/// Draws one snapshot, uniformly or proportionally to Snapshot::weight, and
/// builds (y, z) = (prox_{mu h}(c(x)), (c(x) - y)/mu) with its residuals.
Certificate certificate_from_snapshots(const StochasticProblem& p, const std::vector<Snapshot>& snapshots,
                                       bool weighted, std::uint64_t seed);

/// The (y, z) pair for one iterate.
Certificate certificate_at(const StochasticProblem& p, long k, const ManifoldPoint& x, double mu, Rng& rng);

}  // namespace manismooth
