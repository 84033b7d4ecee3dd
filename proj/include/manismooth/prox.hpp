#pragma once

#include <string>
#include <variant>

#include <Eigen/Dense>

#include "manismooth/rng.hpp"

namespace manismooth {

struct ScaledL1 {
  double lambda;
};
struct ScaledL2 {
  double lambda;
};
struct IndicatorBall {
  Eigen::VectorXd center;
  double radius;
};
struct IndicatorBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};
struct IndicatorSingleton {
  Eigen::VectorXd target;
};

/// Convex h: R^m -> R U {+inf} with a closed-form prox. Either a Lipschitz
/// regularizer (lambda*||.||_1, lambda*||.||_2) or the indicator of a convex set.
class NonsmoothTerm {
 public:
  using Variant = std::variant<ScaledL1, ScaledL2, IndicatorBall, IndicatorBox, IndicatorSingleton>;

  /// lambda >= 0; lambda = 0 gives h == 0.
  static NonsmoothTerm scaled_l1(double lambda, Eigen::Index dim);
  static NonsmoothTerm scaled_l2(double lambda, Eigen::Index dim);
  static NonsmoothTerm ball(Eigen::VectorXd center, double radius);
  static NonsmoothTerm box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static NonsmoothTerm singleton(Eigen::VectorXd target);

  const Variant& variant() const { return variant_; }
  Eigen::Index dim() const { return dim_; }
  bool is_indicator() const;
  /// l2 -> l2 Lipschitz modulus l_h (lambda*sqrt(m) for l1, lambda for l2, 0 for indicators).
  double lipschitz_const() const { return lipschitz_; }
  std::string kind_name() const;

  /// h(z); +inf outside the set for indicators.
  double value(const Eigen::VectorXd& z) const;
  /// Euclidean projection onto C (indicators only).
  Eigen::VectorXd project(const Eigen::VectorXd& y) const;
  /// dist(y, C) (indicators only).
  double distance(const Eigen::VectorXd& y) const;
  /// Uniform-ish draw from C (indicators only); used by normal-cone checks.
  Eigen::VectorXd sample_in_set(Rng& rng) const;

 private:
  NonsmoothTerm(Variant v, Eigen::Index dim, double lipschitz)
      : variant_(std::move(v)), dim_(dim), lipschitz_(lipschitz) {}

  Variant variant_;
  Eigen::Index dim_;
  double lipschitz_;
};

struct MoreauEval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::VectorXd prox_point;
  double mu = 1.0;
};

/// argmin_z h(z) + ||z - y||^2 / (2 mu), closed form.
Eigen::VectorXd prox(const NonsmoothTerm& h, double mu, const Eigen::VectorXd& y);

/// Envelope value h_mu(y), gradient (y - prox)/mu and the prox point.
MoreauEval moreau_eval(const NonsmoothTerm& h, double mu, const Eigen::VectorXd& y);

/// Checks h_{mu2}(y) <= h_{mu1}(y) + (1/2)((mu1 - mu2)/mu2) mu1 ||grad h_{mu1}(y)||^2
/// and, when applicable, the Lipschitz form (l_h^2 in place of the gradient norm)
/// or the indicator form ((1/mu2 - 1/mu1) dist^2 / 2). Requires 0 < mu2 <= mu1.
bool moreau_envelope_inequality_check(const NonsmoothTerm& h, double mu1, double mu2,
                                      const Eigen::VectorXd& y);

/// z in the subdifferential of h at y. For indicators this is the normal cone,
/// checked as <z, w - y> <= tol(1 + ||z||) over `cone_samples` draws w in C.
bool subgradient_membership(const NonsmoothTerm& h, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& z, Rng& rng, double tol = 1e-8,
                            int cone_samples = 100);

}  // namespace manismooth
