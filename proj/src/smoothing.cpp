#include "manismooth/smoothing.hpp"

namespace manismooth {

TangentVector envelope_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, const MoreauEval& e) {
  return tangent_project(x, map_c_jac_t(p, x, e.grad));
}

TangentVector full_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, Exec exec) {
  return riemannian_gradient(x, finite_sum(p.smooth(), x.data(), exec).grad);
}

SmoothedEval smoothed_objective_grad(const StochasticProblem& p, const ManifoldPoint& x, double mu, Exec exec) {
  const ValueGrad f = finite_sum(p.smooth(), x.data(), exec);
  const Eigen::VectorXd cx = map_c_eval(p, x);
  const MoreauEval e = moreau_eval(p.h(), mu, cx);
  Eigen::MatrixXd euclid = f.grad + map_c_jac_t(p, x, e.grad);
  return SmoothedEval{f.value + e.value, riemannian_gradient(x, euclid), (cx - e.prox_point).norm()};
}

double smoothed_value(const StochasticProblem& p, const ManifoldPoint& x, double mu, Exec exec) {
  const ValueGrad f = finite_sum(p.smooth(), x.data(), exec);
  return f.value + moreau_eval(p.h(), mu, map_c_eval(p, x)).value;
}

}  // namespace manismooth
