#include "manismooth/manifold.hpp"

#include <cmath>
#include <sstream>

#include "manismooth/errors.hpp"

namespace manismooth {

namespace {

constexpr double kUnitNormTol = 1e-12;
constexpr double kStiefelTol = 1e-10;
constexpr double kTangentTol = 1e-10;

void require_shape(const ManifoldDescriptor& m, const Eigen::MatrixXd& a, const char* what) {
  if (a.rows() != m.rows() || a.cols() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected " << m.rows() << "x" << m.cols() << ", got " << a.rows() << "x"
       << a.cols();
    throw DimensionError(os.str());
  }
}

// Thin QR with R forced to a positive diagonal.
Eigen::MatrixXd sign_fixed_qr(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index p = a.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  const Eigen::MatrixXd& r = qr.matrixQR();
  double rmax = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) rmax = std::max(rmax, std::abs(r(j, j)));
  for (Eigen::Index j = 0; j < p; ++j) {
    const double d = r(j, j);
    if (!(std::abs(d) > 1e-12 * rmax) || !std::isfinite(d))
      throw DegenerateRetractionError("Stiefel retraction: X + eta is rank deficient");
    if (d < 0) q.col(j) = -q.col(j);
  }
  return q;
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& a, const char* what) {
  Eigen::MatrixXd out = a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double nrm = a.col(j).norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DegenerateRetractionError(what);
    out.col(j) /= nrm;
  }
  return out;
}

Eigen::MatrixXd project_to_manifold(const ManifoldDescriptor& m, const Eigen::MatrixXd& a) {
  switch (m.kind) {
    case ManifoldKind::Sphere:
      return normalize_columns(a, "sphere retraction: x + eta = 0");
    case ManifoldKind::Stiefel:
      return sign_fixed_qr(a);
    case ManifoldKind::Oblique:
      return normalize_columns(a, "oblique retraction: zero column in X + eta");
  }
  return a;
}

}  // namespace

ManifoldDescriptor ManifoldDescriptor::sphere(Eigen::Index n) {
  if (n < 2) throw ParameterError("Sphere(n) requires n >= 2");
  return {ManifoldKind::Sphere, n, 1};
}

ManifoldDescriptor ManifoldDescriptor::stiefel(Eigen::Index n, Eigen::Index p) {
  if (p < 1 || n < p) throw ParameterError("Stiefel(n,p) requires n >= p >= 1");
  return {ManifoldKind::Stiefel, n, p};
}

ManifoldDescriptor ManifoldDescriptor::oblique(Eigen::Index n, Eigen::Index p) {
  if (p < 1 || n < p) throw ParameterError("Oblique(n,p) requires n >= p >= 1");
  return {ManifoldKind::Oblique, n, p};
}

double ManifoldDescriptor::diameter() const {
  return 2.0 * std::sqrt(static_cast<double>(cols()));
}

std::string ManifoldDescriptor::name() const {
  std::ostringstream os;
  switch (kind) {
    case ManifoldKind::Sphere:
      os << "Sphere(" << n << ")";
      break;
    case ManifoldKind::Stiefel:
      os << "Stiefel(" << n << "," << p << ")";
      break;
    case ManifoldKind::Oblique:
      os << "Oblique(" << n << "," << p << ")";
      break;
  }
  return os.str();
}

double point_residual(const ManifoldDescriptor& m, const Eigen::MatrixXd& x) {
  switch (m.kind) {
    case ManifoldKind::Sphere:
      return std::abs(x.norm() - 1.0);
    case ManifoldKind::Stiefel:
      return (x.transpose() * x - Eigen::MatrixXd::Identity(x.cols(), x.cols())).norm();
    case ManifoldKind::Oblique:
      return (x.colwise().norm().array() - 1.0).abs().maxCoeff();
  }
  return 0.0;
}

double tangent_residual(const ManifoldDescriptor& m, const Eigen::MatrixXd& x,
                        const Eigen::MatrixXd& v) {
  switch (m.kind) {
    case ManifoldKind::Sphere:
      return std::abs(x.col(0).dot(v.col(0)));
    case ManifoldKind::Stiefel: {
      const Eigen::MatrixXd xtv = x.transpose() * v;
      return (xtv + xtv.transpose()).norm();
    }
    case ManifoldKind::Oblique:
      return (x.array() * v.array()).colwise().sum().abs().maxCoeff();
  }
  return 0.0;
}

ManifoldPoint::ManifoldPoint(ManifoldDescriptor descriptor, Eigen::MatrixXd data)
    : descriptor_(descriptor), data_(std::move(data)) {
  require_shape(descriptor_, data_, "ManifoldPoint");
  const double tol = descriptor_.kind == ManifoldKind::Stiefel ? kStiefelTol : kUnitNormTol;
  const double res = point_residual(descriptor_, data_);
  if (!(res <= tol)) {
    std::ostringstream os;
    os << "point is not on " << descriptor_.name() << " (residual " << res << ")";
    throw InvariantError(os.str());
  }
}

TangentVector::TangentVector(ManifoldPoint base, Eigen::MatrixXd data)
    : base_(std::move(base)), data_(std::move(data)) {
  require_shape(base_.descriptor(), data_, "TangentVector");
  const double res = tangent_residual(base_.descriptor(), base_.data(), data_);
  // absolute tolerance for unit-scale vectors, relative beyond that
  if (!(res <= kTangentTol * std::max(1.0, data_.norm()))) {
    std::ostringstream os;
    os << "vector is not tangent to " << base_.descriptor().name() << " (residual " << res << ")";
    throw InvariantError(os.str());
  }
}

TangentVector TangentVector::zero(const ManifoldPoint& base) {
  return TangentVector(kUnchecked, base, Eigen::MatrixXd::Zero(base.data().rows(), base.data().cols()));
}

void TangentVector::require_same_base(const TangentVector& other) const {
  if (!(descriptor() == other.descriptor()) || base_.data() != other.base_.data())
    throw DimensionError("tangent vectors live at different base points");
}

TangentVector& TangentVector::operator+=(const TangentVector& other) {
  require_same_base(other);
  data_ += other.data_;
  return *this;
}

TangentVector& TangentVector::operator-=(const TangentVector& other) {
  require_same_base(other);
  data_ -= other.data_;
  return *this;
}

double inner(const TangentVector& a, const TangentVector& b) {
  if (!(a.descriptor() == b.descriptor()) || a.base().data() != b.base().data())
    throw DimensionError("inner: tangent vectors live at different base points");
  return (a.data().array() * b.data().array()).sum();
}

TangentVector tangent_project(const ManifoldPoint& x, const Eigen::MatrixXd& v) {
  const ManifoldDescriptor& m = x.descriptor();
  require_shape(m, v, "tangent_project");
  const Eigen::MatrixXd& X = x.data();
  Eigen::MatrixXd out;
  switch (m.kind) {
    case ManifoldKind::Sphere:
      out = v - X.col(0).dot(v.col(0)) * X;
      break;
    case ManifoldKind::Stiefel: {
      const Eigen::MatrixXd xtv = X.transpose() * v;
      out = v - X * (0.5 * (xtv + xtv.transpose()));
      break;
    }
    case ManifoldKind::Oblique: {
      const Eigen::RowVectorXd d = (X.array() * v.array()).colwise().sum();
      out = v - X * d.asDiagonal();
      break;
    }
  }
  return TangentVector(kUnchecked, x, std::move(out));
}

ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& eta) {
  if (!(eta.descriptor() == x.descriptor()) || eta.base().data() != x.data())
    throw DimensionError("retract: eta is not based at x");
  if (eta.data().isZero(0.0)) return x;
  return ManifoldPoint(kUnchecked, x.descriptor(), project_to_manifold(x.descriptor(), x.data() + eta.data()));
}

TangentVector vector_transport(const ManifoldPoint& x, const ManifoldPoint& y, const TangentVector& xi) {
  if (!(x.descriptor() == y.descriptor())) throw DimensionError("vector_transport: different manifolds");
  if (!(xi.descriptor() == x.descriptor()) || xi.base().data() != x.data())
    throw DimensionError("vector_transport: xi is not based at x");
  return tangent_project(y, xi.data());
}

ManifoldPoint renormalize(const ManifoldPoint& x) {
  return ManifoldPoint(kUnchecked, x.descriptor(), project_to_manifold(x.descriptor(), x.data()));
}

ManifoldPoint random_point(const ManifoldDescriptor& m, Rng& rng) {
  for (;;) {
    try {
      return ManifoldPoint(kUnchecked, m, project_to_manifold(m, gaussian_matrix(rng, m.rows(), m.cols())));
    } catch (const DegenerateRetractionError&) {
      // probability zero; redraw
    }
  }
}

TangentVector random_unit_tangent(const ManifoldPoint& x, Rng& rng) {
  for (;;) {
    TangentVector t = tangent_project(x, gaussian_matrix(rng, x.data().rows(), x.data().cols()));
    const double nrm = t.norm();
    if (nrm > 1e-8) return (1.0 / nrm) * std::move(t);
  }
}

RetractionConstants estimate_retraction_constants(const ManifoldDescriptor& m, int samples,
                                                  std::uint64_t rng_seed) {
  if (samples < 100) throw ParameterError("estimate_retraction_constants: samples must be >= 100");
  Rng rng = named_stream(rng_seed, "retraction");
  RetractionConstants out{0.0, 0.0};
  for (int s = 0; s < samples; ++s) {
    const ManifoldPoint x = random_point(m, rng);
    const double r = 1.0 - uniform01(rng);  // (0, 1]
    const TangentVector u = r * random_unit_tangent(x, rng);
    const ManifoldPoint y = retract(x, u);
    const double un = u.norm();
    out.alpha = std::max(out.alpha, (y.data() - x.data()).norm() / un);
    out.beta = std::max(out.beta, (y.data() - x.data() - u.data()).norm() / (un * un));
  }
  return out;
}

}  // namespace manismooth
