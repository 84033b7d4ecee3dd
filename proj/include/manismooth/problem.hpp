#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "manismooth/manifold.hpp"
#include "manismooth/prox.hpp"

namespace manismooth {

/// Finite-sum smooth part f(x) = (1/N) sum_i f~(x, xi_i). Gradients are Euclidean,
/// in the ambient shape of the manifold point.
class SmoothPart {
 public:
  virtual ~SmoothPart() = default;

  virtual std::size_t num_samples() const = 0;
  virtual double sample_value(const Eigen::MatrixXd& x, std::size_t i) const = 0;
  virtual Eigen::MatrixXd sample_grad(const Eigen::MatrixXd& x, std::size_t i) const = 0;
  /// value += sum_{i in [begin, end)} f~(x, i); grad += sum of the gradients.
  /// The default loops over sample_value/sample_grad; subclasses may block it.
  virtual void accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end, double& value,
                          Eigen::MatrixXd& grad) const;
  virtual std::string name() const = 0;
};

/// f~(X, i) = -1/2 ||a_i^T X||^2 with rows a_i of A (N x n).
class SparsePcaLoss final : public SmoothPart {
 public:
  explicit SparsePcaLoss(Eigen::MatrixXd rows) : a_(std::move(rows)) {}
  std::size_t num_samples() const override { return static_cast<std::size_t>(a_.rows()); }
  double sample_value(const Eigen::MatrixXd& x, std::size_t i) const override;
  Eigen::MatrixXd sample_grad(const Eigen::MatrixXd& x, std::size_t i) const override;
  void accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end, double& value,
                  Eigen::MatrixXd& grad) const override;
  std::string name() const override { return "sparse_pca"; }
  const Eigen::MatrixXd& data() const { return a_; }

 private:
  Eigen::MatrixXd a_;
};

/// f~(x, i) = 1/2 (a_i^T x - b_i)^2 for vector-shaped x.
class LeastSquaresLoss final : public SmoothPart {
 public:
  LeastSquaresLoss(Eigen::MatrixXd rows, Eigen::VectorXd targets);
  std::size_t num_samples() const override { return static_cast<std::size_t>(a_.rows()); }
  double sample_value(const Eigen::MatrixXd& x, std::size_t i) const override;
  Eigen::MatrixXd sample_grad(const Eigen::MatrixXd& x, std::size_t i) const override;
  void accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end, double& value,
                  Eigen::MatrixXd& grad) const override;
  std::string name() const override { return "least_squares"; }
  const Eigen::MatrixXd& data() const { return a_; }
  const Eigen::VectorXd& targets() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

/// f~(x, i) = <g_i, x> for vector-shaped x.
class LinearLoss final : public SmoothPart {
 public:
  explicit LinearLoss(Eigen::MatrixXd rows) : g_(std::move(rows)) {}
  std::size_t num_samples() const override { return static_cast<std::size_t>(g_.rows()); }
  double sample_value(const Eigen::MatrixXd& x, std::size_t i) const override;
  Eigen::MatrixXd sample_grad(const Eigen::MatrixXd& x, std::size_t i) const override;
  std::string name() const override { return "linear"; }
  const Eigen::MatrixXd& data() const { return g_; }

 private:
  Eigen::MatrixXd g_;
};

/// Nonlinear map c: M -> R^m acting on vec(x), with adjoint Jacobian products.
class ConstraintMap {
 public:
  virtual ~ConstraintMap() = default;
  virtual Eigen::Index dim() const = 0;
  virtual Eigen::VectorXd eval(const Eigen::MatrixXd& x) const = 0;
  /// grad c(x)^T v, reshaped to the shape of x.
  virtual Eigen::MatrixXd jac_t(const Eigen::MatrixXd& x, const Eigen::VectorXd& v) const = 0;
  virtual std::string name() const = 0;
};

/// c(x) = vec(x).
class IdentityMap final : public ConstraintMap {
 public:
  IdentityMap(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}
  Eigen::Index dim() const override { return rows_ * cols_; }
  Eigen::VectorXd eval(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd jac_t(const Eigen::MatrixXd& x, const Eigen::VectorXd& v) const override;
  std::string name() const override { return "identity"; }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
};

/// c(x) = B vec(x) + q D (vec(x) o vec(x)) + offset. q = 0 gives an affine map.
class QuadraticMap final : public ConstraintMap {
 public:
  QuadraticMap(Eigen::MatrixXd linear, Eigen::MatrixXd quadratic, double q, Eigen::VectorXd offset);
  Eigen::Index dim() const override { return b_.rows(); }
  Eigen::VectorXd eval(const Eigen::MatrixXd& x) const override;
  Eigen::MatrixXd jac_t(const Eigen::MatrixXd& x, const Eigen::VectorXd& v) const override;
  std::string name() const override { return "quadratic"; }

  const Eigen::MatrixXd& linear() const { return b_; }
  const Eigen::MatrixXd& quadratic() const { return d_; }
  double q() const { return q_; }

 private:
  Eigen::MatrixXd b_;
  Eigen::MatrixXd d_;
  double q_;
  Eigen::VectorXd offset_;
};

/// Problem constants. Estimated values are empirical lower bounds on the true
/// suprema; `scaled` applies a safety factor.
struct ProblemConstants {
  double L_f = 0.0;       ///< max ||grad f(x)|| (Euclidean)
  double L_grad_f = 0.0;  ///< Lipschitz modulus of grad f (Euclidean)
  double L_c = 0.0;       ///< max ||grad c(x)||_2
  double L_grad_c = 0.0;  ///< Lipschitz modulus of grad c
  double L_tilde = 0.0;   ///< average-smoothness constant of the sample gradients
  double sigma = 0.0;     ///< max per-sample Riemannian gradient deviation
  double C_r = 0.0;       ///< max dist(c(x), C) over M (indicators)
  double D = 0.0;         ///< diameter of M
  double alpha = 1.0;     ///< retraction constants
  double beta = 1.0;

  /// Retr-smoothness constant of f: alpha^2 L_grad_f + 2 L_f beta.
  double L() const { return alpha * alpha * L_grad_f + 2.0 * L_f * beta; }
  ProblemConstants scaled(double safety) const;
};

/// Retr-smoothness constant of g = dist^2(c(x), C)/2:
/// L_g = alpha^2 (L_c + C_r L_grad_c) + 2 L_c C_r beta.
double penalty_smoothness(const ProblemConstants& c);
/// Composite constant for Lipschitz h: L + alpha^2 (L_c^2 + l_h L_grad_c) + 2 L_c l_h beta.
double composite_smoothness_lipschitz(const ProblemConstants& c, double ell_h);
/// Composite constant for indicator h: L + alpha^2 (L_c^2 + M L_grad_c) + 2 L_c M beta, M = C_r.
double composite_smoothness_indicator(const ProblemConstants& c);

struct SampleIndex {
  std::size_t value;
};

/// min_{x in M} (1/N) sum_i f~(x, xi_i) + h(c(x)). Immutable; share by const reference
/// or shared_ptr across threads.
class StochasticProblem {
 public:
  StochasticProblem(std::string family, ManifoldDescriptor manifold, std::shared_ptr<const SmoothPart> smooth,
                    std::shared_ptr<const ConstraintMap> map, NonsmoothTerm h);

  const std::string& family() const { return family_; }
  const ManifoldDescriptor& manifold() const { return manifold_; }
  std::size_t num_samples() const { return smooth_->num_samples(); }
  const SmoothPart& smooth() const { return *smooth_; }
  const ConstraintMap& map() const { return *map_; }
  const NonsmoothTerm& h() const { return h_; }

 private:
  std::string family_;
  ManifoldDescriptor manifold_;
  std::shared_ptr<const SmoothPart> smooth_;
  std::shared_ptr<const ConstraintMap> map_;
  NonsmoothTerm h_;
};

/// P_{T_x M}(grad f~(x, xi)).
TangentVector sample_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, SampleIndex xi);
Eigen::VectorXd map_c_eval(const StochasticProblem& p, const ManifoldPoint& x);
Eigen::MatrixXd map_c_jac_t(const StochasticProblem& p, const ManifoldPoint& x, const Eigen::VectorXd& v);
/// Dense Jacobian of c at x (m x ambient size), assembled from adjoint products.
Eigen::MatrixXd map_c_jacobian(const StochasticProblem& p, const ManifoldPoint& x);

/// Stiefel(n,p) sparse PCA: Gaussian rows a_i, f = -(1/2N)||AX||_F^2, c = identity,
/// h = lambda ||.||_1.
StochasticProblem make_sparse_pca(Eigen::Index n, Eigen::Index p, std::size_t N, double lambda,
                                  std::uint64_t seed);

struct ConstrainedSphereOptions {
  double q = 0.5;               ///< weight of the quadratic part of c
  bool identity_linear = false;  ///< B = I (requires m == n)
  double noise = 0.1;           ///< label noise of the planted least-squares data
};

/// Sphere(n) least squares f~(x, i) = 1/2 (a_i^T x - b_i)^2 with
/// c(x) = B x + q D (x o x) and h = the given indicator.
StochasticProblem make_constrained_sphere(Eigen::Index n, Eigen::Index m, std::size_t N, NonsmoothTerm set,
                                          std::uint64_t seed, const ConstrainedSphereOptions& options = {});

/// Empirical constants from `samples` random points / retracted pairs.
ProblemConstants estimate_constants(const StochasticProblem& p, int samples, std::uint64_t seed);

}  // namespace manismooth
