#pragma once

#include "manismooth/kernels.hpp"
#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/prox.hpp"

namespace manismooth {

struct SmoothedEval {
  double value = 0.0;  ///< F_mu(x) = f(x) + h_mu(c(x))
  TangentVector rgrad;  ///< P_T(grad f(x) + grad c(x)^T grad h_mu(c(x)))
  double infeas = 0.0;  ///< ||c(x) - prox_{mu h}(c(x))||
};

/// Full (deterministic) smoothed objective and Riemannian gradient. Diagnostics
/// only; O(N) per call.
SmoothedEval smoothed_objective_grad(const StochasticProblem& p, const ManifoldPoint& x, double mu,
                                     Exec exec = Exec::Parallel);

/// F_mu(x) without the gradient.
double smoothed_value(const StochasticProblem& p, const ManifoldPoint& x, double mu, Exec exec = Exec::Parallel);

/// P_T(grad c(x)^T e.grad): the envelope part of grad F_mu at x.
TangentVector envelope_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, const MoreauEval& e);

/// Full Riemannian gradient of f at x.
TangentVector full_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, Exec exec = Exec::Parallel);

}  // namespace manismooth
