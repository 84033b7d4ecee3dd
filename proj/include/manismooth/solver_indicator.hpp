#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/solver_common.hpp"
#include "manismooth/trace.hpp"

/// Quadratic-penalty smoothing with truncated recursive momentum, for h the
/// indicator of a convex set C, under the error bound
/// ||grad g(x)|| >= zeta dist^theta(c(x), C), g = dist^2(c(x), C)/2.
namespace manismooth::indicator {

struct Config {
  double theta = 1.0;         ///< error-bound exponent, >= 1
  double zeta = 1.0;          ///< error-bound constant, > 0
  double c_tau = 1.0;         ///< tau_k = c_tau (k+1)^{-omega}
  double c_a = 1.0;           ///< a_k = min(1, c_a k^{-2 omega})
  double trunc_radius = 1.0;  ///< radius of the ball the estimator is projected onto

  /// omega = min{theta/(theta+2), 1/2}
  double omega() const;
  /// K~ = ceil(8 omega / (c_tau zeta^2))
  long K_tilde() const;

  double mu(long k) const;      ///< max(k,1)^{-omega}
  double tau(long k) const;     ///< c_tau (k+1)^{-omega}
  double a(long k) const;       ///< min(1, c_a max(k,1)^{-2 omega})

  void validate() const;
};

/// c_a = c_tau^2 (1/2 + 1/(32 c_tau^2 L~^2) + 4 C L~^2) with C = 1/(16 L~^2).
double momentum_constant(double c_tau, double L_tilde);

/// Whether c_tau <= min{1/L_g, 1/G} for the given constants.
bool step_constant_admissible(const Config& cfg, const ProblemConstants& constants);

struct ErrorBoundProbe {
  double zeta_hat = 0.0;   ///< min ||grad g|| / dist^theta_fit over the probe points
  double theta_fit = 1.0;  ///< slope of log ||grad g|| against log dist
  std::vector<double> dist;
  std::vector<double> grad_norm;

  /// min ||grad g|| / dist^theta over the probe points.
  double zeta_at(double theta) const;
};

/// ||P_T(grad c(x)^T (c(x) - P_C(c(x))))||: the Riemannian gradient norm of g.
double penalty_grad_norm(const StochasticProblem& p, const ManifoldPoint& x);

/// Samples random points, walks each toward C by backtracking descent on g and
/// records (dist, ||grad g||) at every infeasible point visited. Diagnostic only.
/// Throws InsufficientDataError when every visited point is feasible.
ErrorBoundProbe error_bound_probe(const StochasticProblem& p, int samples, std::uint64_t seed);

struct DefaultConfigReport {
  Config config;
  ProblemConstants constants;  ///< already scaled by safety
  double L_g = 0.0;
  double G = 0.0;
};

/// Builds a config from estimated constants (scaled by `safety`). zeta is probed
/// at the given theta unless supplied.
DefaultConfigReport default_config(const StochasticProblem& p, double theta, double safety, std::uint64_t seed,
                                   std::optional<double> zeta = std::nullopt, int samples = 200);

struct State {
  long k;               ///< starts at 0
  ManifoldPoint x;
  TangentVector delta;  ///< ||delta|| <= trunc_radius
  Rng rng;
};

/// k = 0, delta_0 = P_ball(grad f~(x0, xi_0)).
State init(const StochasticProblem& p, const ManifoldPoint& x0, const Config& cfg, std::uint64_t seed);

StepReport step(State& s, const StochasticProblem& p, const Config& cfg, long renormalize_every = 1000);
StepReport peek(const State& s, const StochasticProblem& p, const Config& cfg);

/// Radial projection onto {v : ||v|| <= radius}.
TangentVector truncate(TangentVector v, double radius);

struct Run {
  State final;
  std::vector<TraceRecord> trace;
  std::vector<Snapshot> snapshots;
  long K = 0;
};

Run run(const StochasticProblem& p, const ManifoldPoint& x0, const Config& cfg, std::uint64_t seed,
        const RunOptions& options);

/// i_K drawn with probability proportional to tau_k over stored back-half iterates.
Certificate certificate(const Run& r, const StochasticProblem& p, const Config& cfg, std::uint64_t seed);

}  // namespace manismooth::indicator
