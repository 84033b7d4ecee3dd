#include "manismooth/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "manismooth/errors.hpp"
#include "manismooth/kernels.hpp"

namespace manismooth {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const Eigen::MatrixXd& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

void require_vector_shape(const Eigen::MatrixXd& x, Eigen::Index n, const char* what) {
  if (x.cols() != 1 || x.rows() != n) throw DimensionError(std::string(what) + ": expected an n x 1 point");
}

// Largest singular value of a dense matrix via the smaller Gram matrix.
double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = a.rows() <= a.cols() ? Eigen::MatrixXd(a * a.transpose())
                                                    : Eigen::MatrixXd(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace

void SmoothPart::accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end, double& value,
                            Eigen::MatrixXd& grad) const {
  for (std::size_t i = begin; i < end; ++i) {
    value += sample_value(x, i);
    grad += sample_grad(x, i);
  }
}

double SparsePcaLoss::sample_value(const Eigen::MatrixXd& x, std::size_t i) const {
  const Eigen::RowVectorXd ax = a_.row(static_cast<Eigen::Index>(i)) * x;
  return -0.5 * ax.squaredNorm();
}

Eigen::MatrixXd SparsePcaLoss::sample_grad(const Eigen::MatrixXd& x, std::size_t i) const {
  const auto row = a_.row(static_cast<Eigen::Index>(i));
  const Eigen::RowVectorXd ax = row * x;
  return -row.transpose() * ax;
}

void SparsePcaLoss::accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end, double& value,
                               Eigen::MatrixXd& grad) const {
  const auto block = a_.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  const Eigen::MatrixXd ax = block * x;
  value += -0.5 * ax.squaredNorm();
  grad.noalias() -= block.transpose() * ax;
}

LeastSquaresLoss::LeastSquaresLoss(Eigen::MatrixXd rows, Eigen::VectorXd targets)
    : a_(std::move(rows)), b_(std::move(targets)) {
  if (a_.rows() != b_.size()) throw DimensionError("LeastSquaresLoss: rows/targets mismatch");
}

double LeastSquaresLoss::sample_value(const Eigen::MatrixXd& x, std::size_t i) const {
  require_vector_shape(x, a_.cols(), "LeastSquaresLoss");
  const auto k = static_cast<Eigen::Index>(i);
  const double r = a_.row(k).dot(x.col(0)) - b_(k);
  return 0.5 * r * r;
}

Eigen::MatrixXd LeastSquaresLoss::sample_grad(const Eigen::MatrixXd& x, std::size_t i) const {
  require_vector_shape(x, a_.cols(), "LeastSquaresLoss");
  const auto k = static_cast<Eigen::Index>(i);
  const double r = a_.row(k).dot(x.col(0)) - b_(k);
  return r * a_.row(k).transpose();
}

void LeastSquaresLoss::accumulate(const Eigen::MatrixXd& x, std::size_t begin, std::size_t end,
                                  double& value, Eigen::MatrixXd& grad) const {
  require_vector_shape(x, a_.cols(), "LeastSquaresLoss");
  const auto b = static_cast<Eigen::Index>(begin);
  const auto len = static_cast<Eigen::Index>(end - begin);
  const Eigen::VectorXd r = a_.middleRows(b, len) * x.col(0) - b_.segment(b, len);
  value += 0.5 * r.squaredNorm();
  grad.col(0).noalias() += a_.middleRows(b, len).transpose() * r;
}

double LinearLoss::sample_value(const Eigen::MatrixXd& x, std::size_t i) const {
  require_vector_shape(x, g_.cols(), "LinearLoss");
  return g_.row(static_cast<Eigen::Index>(i)).dot(x.col(0));
}

Eigen::MatrixXd LinearLoss::sample_grad(const Eigen::MatrixXd& x, std::size_t i) const {
  require_vector_shape(x, g_.cols(), "LinearLoss");
  return g_.row(static_cast<Eigen::Index>(i)).transpose();
}

Eigen::VectorXd IdentityMap::eval(const Eigen::MatrixXd& x) const {
  if (x.rows() != rows_ || x.cols() != cols_) throw DimensionError("IdentityMap: shape mismatch");
  return as_vector(x);
}

Eigen::MatrixXd IdentityMap::jac_t(const Eigen::MatrixXd& x, const Eigen::VectorXd& v) const {
  if (x.rows() != rows_ || x.cols() != cols_ || v.size() != dim())
    throw DimensionError("IdentityMap: shape mismatch in jac_t");
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows_, cols_);
}

QuadraticMap::QuadraticMap(Eigen::MatrixXd linear, Eigen::MatrixXd quadratic, double q, Eigen::VectorXd offset)
    : b_(std::move(linear)), d_(std::move(quadratic)), q_(q), offset_(std::move(offset)) {
  if (q_ != 0.0 && (d_.rows() != b_.rows() || d_.cols() != b_.cols()))
    throw DimensionError("QuadraticMap: linear/quadratic shape mismatch");
  if (offset_.size() == 0) offset_ = Eigen::VectorXd::Zero(b_.rows());
  if (offset_.size() != b_.rows()) throw DimensionError("QuadraticMap: offset size mismatch");
}

Eigen::VectorXd QuadraticMap::eval(const Eigen::MatrixXd& x) const {
  if (x.size() != b_.cols()) throw DimensionError("QuadraticMap: point size mismatch");
  const auto v = as_vector(x);
  Eigen::VectorXd out = b_ * v + offset_;
  if (q_ != 0.0) out.noalias() += q_ * (d_ * v.cwiseProduct(v));
  return out;
}

Eigen::MatrixXd QuadraticMap::jac_t(const Eigen::MatrixXd& x, const Eigen::VectorXd& v) const {
  if (x.size() != b_.cols() || v.size() != b_.rows()) throw DimensionError("QuadraticMap: shape mismatch in jac_t");
  Eigen::VectorXd out = b_.transpose() * v;
  if (q_ != 0.0) out += (2.0 * q_) * as_vector(x).cwiseProduct(d_.transpose() * v);
  return Eigen::Map<const Eigen::MatrixXd>(out.data(), x.rows(), x.cols());
}

ProblemConstants ProblemConstants::scaled(double safety) const {
  if (!(safety >= 1.0)) throw ParameterError("safety factor must be >= 1");
  ProblemConstants c = *this;
  for (double* v : {&c.L_f, &c.L_grad_f, &c.L_c, &c.L_grad_c, &c.L_tilde, &c.sigma, &c.C_r}) *v *= safety;
  return c;
}

double penalty_smoothness(const ProblemConstants& c) {
  return c.alpha * c.alpha * (c.L_c + c.C_r * c.L_grad_c) + 2.0 * c.L_c * c.C_r * c.beta;
}

double composite_smoothness_lipschitz(const ProblemConstants& c, double ell_h) {
  return c.L() + c.alpha * c.alpha * (c.L_c * c.L_c + ell_h * c.L_grad_c) + 2.0 * c.L_c * ell_h * c.beta;
}

double composite_smoothness_indicator(const ProblemConstants& c) {
  return c.L() + c.alpha * c.alpha * (c.L_c * c.L_c + c.C_r * c.L_grad_c) + 2.0 * c.L_c * c.C_r * c.beta;
}

StochasticProblem::StochasticProblem(std::string family, ManifoldDescriptor manifold,
                                     std::shared_ptr<const SmoothPart> smooth,
                                     std::shared_ptr<const ConstraintMap> map, NonsmoothTerm h)
    : family_(std::move(family)),
      manifold_(manifold),
      smooth_(std::move(smooth)),
      map_(std::move(map)),
      h_(std::move(h)) {
  if (!smooth_ || !map_) throw ParameterError("StochasticProblem: missing smooth part or map");
  if (smooth_->num_samples() < 1) throw ParameterError("StochasticProblem: N must be >= 1");
  if (map_->dim() != h_.dim())
    throw DimensionError("StochasticProblem: c maps to R^" + std::to_string(map_->dim()) +
                         " but h acts on R^" + std::to_string(h_.dim()));
}

TangentVector sample_riemannian_grad(const StochasticProblem& p, const ManifoldPoint& x, SampleIndex xi) {
  if (xi.value >= p.num_samples())
    throw ParameterError("sample index " + std::to_string(xi.value) + " out of range (N = " +
                         std::to_string(p.num_samples()) + ")");
  return riemannian_gradient(x, p.smooth().sample_grad(x.data(), xi.value));
}

Eigen::VectorXd map_c_eval(const StochasticProblem& p, const ManifoldPoint& x) { return p.map().eval(x.data()); }

Eigen::MatrixXd map_c_jac_t(const StochasticProblem& p, const ManifoldPoint& x, const Eigen::VectorXd& v) {
  if (v.size() != p.map().dim()) throw DimensionError("map_c_jac_t: v has the wrong size");
  return p.map().jac_t(x.data(), v);
}

Eigen::MatrixXd map_c_jacobian(const StochasticProblem& p, const ManifoldPoint& x) {
  const Eigen::Index m = p.map().dim();
  Eigen::MatrixXd jac(m, x.data().size());
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    e(j) = 1.0;
    const Eigen::MatrixXd row = p.map().jac_t(x.data(), e);
    jac.row(j) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), row.size());
    e(j) = 0.0;
  }
  return jac;
}

StochasticProblem make_sparse_pca(Eigen::Index n, Eigen::Index p, std::size_t N, double lambda,
                                  std::uint64_t seed) {
  if (N < 1) throw ParameterError("make_sparse_pca: N must be >= 1");
  const ManifoldDescriptor m = ManifoldDescriptor::stiefel(n, p);
  Rng rng = named_stream(seed, "data");
  auto loss = std::make_shared<const SparsePcaLoss>(gaussian_matrix(rng, static_cast<Eigen::Index>(N), n));
  auto map = std::make_shared<const IdentityMap>(n, p);
  return StochasticProblem("sparse_pca", m, std::move(loss), std::move(map), NonsmoothTerm::scaled_l1(lambda, n * p));
}

StochasticProblem make_constrained_sphere(Eigen::Index n, Eigen::Index m, std::size_t N, NonsmoothTerm set,
                                          std::uint64_t seed, const ConstrainedSphereOptions& options) {
  if (N < 1) throw ParameterError("make_constrained_sphere: N must be >= 1");
  if (m < 1) throw ParameterError("make_constrained_sphere: m must be >= 1");
  if (!set.is_indicator()) throw ConfigurationError("make_constrained_sphere: set must be an indicator term");
  if (set.dim() != m) throw DimensionError("make_constrained_sphere: set dimension must equal m");
  if (options.identity_linear && m != n) throw ParameterError("make_constrained_sphere: B = I requires m == n");
  const ManifoldDescriptor manifold = ManifoldDescriptor::sphere(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));

  Rng rng = named_stream(seed, "data");
  Eigen::MatrixXd a = scale * gaussian_matrix(rng, static_cast<Eigen::Index>(N), n);
  const ManifoldPoint planted = random_point(manifold, rng);
  Eigen::VectorXd b = a * planted.data().col(0) + options.noise * gaussian_matrix(rng, a.rows(), 1).col(0);
  Eigen::MatrixXd lin = options.identity_linear ? Eigen::MatrixXd::Identity(m, n)
                                                : Eigen::MatrixXd(scale * gaussian_matrix(rng, m, n));
  Eigen::MatrixXd quad = gaussian_matrix(rng, m, n);

  auto loss = std::make_shared<const LeastSquaresLoss>(std::move(a), std::move(b));
  auto map = std::make_shared<const QuadraticMap>(std::move(lin), std::move(quad), options.q, Eigen::VectorXd());
  return StochasticProblem("constrained_sphere", manifold, std::move(loss), std::move(map), std::move(set));
}

ProblemConstants estimate_constants(const StochasticProblem& p, int samples, std::uint64_t seed) {
  if (samples < 100) throw ParameterError("estimate_constants: samples must be >= 100");
  const ManifoldDescriptor& m = p.manifold();
  const RetractionConstants rc = estimate_retraction_constants(m, samples, seed);
  ProblemConstants c;
  c.alpha = rc.alpha;
  c.beta = rc.beta;
  c.D = m.diameter();

  Rng rng = named_stream(seed, "constants");
  const std::size_t N = p.num_samples();
  constexpr std::size_t kDeviationSamples = 256;
  std::vector<std::size_t> indices(std::min(N, kDeviationSamples));

  for (int s = 0; s < samples; ++s) {
    const ManifoldPoint x = random_point(m, rng);
    const ValueGrad fx = finite_sum(p.smooth(), x.data());
    c.L_f = std::max(c.L_f, fx.grad.norm());

    const Eigen::MatrixXd jx = map_c_jacobian(p, x);
    c.L_c = std::max(c.L_c, spectral_norm(jx));
    if (p.h().is_indicator()) c.C_r = std::max(c.C_r, p.h().distance(map_c_eval(p, x)));

    const double len = 1.0 - uniform01(rng);
    const TangentVector zeta = len * random_unit_tangent(x, rng);
    const ManifoldPoint y = retract(x, zeta);
    const double dxy = (y.data() - x.data()).norm();
    if (dxy > 0.0) {
      const ValueGrad fy = finite_sum(p.smooth(), y.data());
      c.L_grad_f = std::max(c.L_grad_f, (fx.grad - fy.grad).norm() / dxy);
      c.L_grad_c = std::max(c.L_grad_c, spectral_norm(jx - map_c_jacobian(p, y)) / dxy);
    }

    const SampleIndex xi{uniform_index(rng, N)};
    const TangentVector gx = sample_riemannian_grad(p, x, xi);
    const TangentVector gy = sample_riemannian_grad(p, y, xi);
    const TangentVector back = vector_transport(y, x, gy);
    c.L_tilde = std::max(c.L_tilde, (gx.data() - back.data()).norm() / zeta.norm());

    if (N <= kDeviationSamples) {
      std::iota(indices.begin(), indices.end(), std::size_t{0});
    } else {
      for (auto& i : indices) i = uniform_index(rng, N);
    }
    const Eigen::MatrixXd rgrad = riemannian_gradient(x, fx.grad).data();
    c.sigma = std::max(c.sigma, max_sample_deviation(p, x, rgrad, indices));
  }
  return c;
}

}  // namespace manismooth
