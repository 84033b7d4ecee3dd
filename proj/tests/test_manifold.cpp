#include <gtest/gtest.h>

#include <cmath>

#include "manismooth/errors.hpp"
#include "manismooth/manifold.hpp"

using namespace manismooth;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

ManifoldPoint e(Eigen::Index n, Eigen::Index i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v(i) = 1.0;
  return ManifoldPoint(ManifoldDescriptor::sphere(n), v);
}

// Orthonormal basis of T_X St(n,p) from X Omega (Omega skew) and X_perp K.
Eigen::MatrixXd stiefel_tangent_basis(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows(), p = X.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd Xperp = Q.rightCols(n - p);
  std::vector<Eigen::VectorXd> cols;
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      Eigen::MatrixXd om = Eigen::MatrixXd::Zero(p, p);
      om(i, j) = 1;
      om(j, i) = -1;
      const Eigen::MatrixXd t = X * om;
      cols.push_back(Eigen::Map<const Eigen::VectorXd>(t.data(), t.size()));
    }
  for (Eigen::Index i = 0; i < n - p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n - p, p);
      k(i, j) = 1;
      const Eigen::MatrixXd t = Xperp * k;
      cols.push_back(Eigen::Map<const Eigen::VectorXd>(t.data(), t.size()));
    }
  Eigen::MatrixXd B(n * p, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = cols[c];
  return B;
}

std::vector<ManifoldDescriptor> manifolds() {
  return {ManifoldDescriptor::sphere(5), ManifoldDescriptor::stiefel(6, 3), ManifoldDescriptor::stiefel(4, 4),
          ManifoldDescriptor::oblique(5, 2)};
}

}  // namespace

TEST(Descriptor, RejectsBadShapes) {
  EXPECT_THROW(ManifoldDescriptor::sphere(1), ParameterError);
  EXPECT_THROW(ManifoldDescriptor::stiefel(2, 3), ParameterError);
  EXPECT_THROW(ManifoldDescriptor::oblique(3, 0), ParameterError);
  EXPECT_EQ(ManifoldDescriptor::stiefel(5, 2).ambient_size(), 10);
  EXPECT_EQ(ManifoldDescriptor::sphere(5).cols(), 1);
}

TEST(ManifoldPoint, ValidatesInvariant) {
  EXPECT_THROW(ManifoldPoint(ManifoldDescriptor::sphere(3), vec({1, 1, 0})), InvariantError);
  EXPECT_THROW(ManifoldPoint(ManifoldDescriptor::sphere(3), vec({1, 0})), DimensionError);
  Eigen::MatrixXd X(3, 2);
  X << 1, 1, 0, 0, 0, 0;
  EXPECT_THROW(ManifoldPoint(ManifoldDescriptor::stiefel(3, 2), X), InvariantError);
  EXPECT_NO_THROW(ManifoldPoint(ManifoldDescriptor::oblique(3, 2), X));
}

TEST(TangentVector, RejectsNormalComponent) {
  const ManifoldPoint x = e(3, 0);
  EXPECT_THROW(TangentVector(x, vec({0.5, 1, 0})), InvariantError);
  EXPECT_NO_THROW(TangentVector(x, vec({0, 1, -2})));
}

TEST(TangentProject, SphereExample) {
  const TangentVector t = tangent_project(e(3, 0), vec({0.5, 1, -2}));
  EXPECT_NEAR((t.data() - vec({0, 1, -2})).norm(), 0.0, 1e-15);
}

TEST(TangentProject, TangentInputUnchanged) {
  Rng rng = named_stream(1, "probe");
  for (const ManifoldDescriptor& m : manifolds()) {
    const ManifoldPoint x = random_point(m, rng);
    const TangentVector v = random_unit_tangent(x, rng);
    EXPECT_LT((tangent_project(x, v.data()).data() - v.data()).norm(), 1e-14) << m.name();
  }
}

TEST(TangentProject, StiefelMatchesLeastSquaresOverTangentBasis) {
  Rng rng = named_stream(3, "probe");
  const ManifoldDescriptor m = ManifoldDescriptor::stiefel(3, 2);
  for (int t = 0; t < 20; ++t) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(rng, 3, 2));
    const Eigen::MatrixXd X = qr.householderQ() * Eigen::MatrixXd::Identity(3, 2);
    const ManifoldPoint x(m, X);
    const Eigen::MatrixXd v = gaussian_matrix(rng, 3, 2);
    const Eigen::MatrixXd B = stiefel_tangent_basis(X);
    const Eigen::VectorXd coef = B.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(v.data(), 6));
    const Eigen::VectorXd best = B * coef;
    const TangentVector eta = tangent_project(x, v);
    EXPECT_LT((Eigen::Map<const Eigen::VectorXd>(eta.data().data(), 6) - best).norm(), 1e-12);
    EXPECT_LT((X.transpose() * eta.data() + eta.data().transpose() * X).norm(), 1e-12);
  }
}

TEST(TangentProject, ObliqueColumnsOrthogonal) {
  Rng rng = named_stream(4, "probe");
  const ManifoldPoint x = random_point(ManifoldDescriptor::oblique(4, 3), rng);
  const TangentVector t = tangent_project(x, gaussian_matrix(rng, 4, 3));
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(x.data().col(j).dot(t.data().col(j)), 0.0, 1e-14);
}

TEST(Retract, SphereExample) {
  const ManifoldPoint x = ManifoldPoint(ManifoldDescriptor::sphere(2), vec({1, 0}));
  const ManifoldPoint y = retract(x, TangentVector(x, vec({0, 1})));
  EXPECT_NEAR(y.data()(0), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(y.data()(1), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Retract, StiefelSingleColumnIsNormalization) {
  const ManifoldDescriptor m = ManifoldDescriptor::stiefel(3, 1);
  const ManifoldPoint x(m, vec({1, 0, 0}));
  const ManifoldPoint y = retract(x, TangentVector(x, vec({0, 1, 0})));
  EXPECT_LT((y.data() - vec({1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0})).norm(), 1e-15);
}

TEST(Retract, ZeroStepIsIdentity) {
  Rng rng = named_stream(5, "probe");
  for (const ManifoldDescriptor& m : manifolds()) {
    const ManifoldPoint x = random_point(m, rng);
    EXPECT_EQ(retract(x, TangentVector::zero(x)).data(), x.data()) << m.name();
  }
}

TEST(Retract, StaysOnManifold) {
  Rng rng = named_stream(6, "probe");
  for (const ManifoldDescriptor& m : manifolds())
    for (int t = 0; t < 100; ++t) {
      const ManifoldPoint x = random_point(m, rng);
      const ManifoldPoint y = retract(x, 10.0 * uniform01(rng) * random_unit_tangent(x, rng));
      EXPECT_LT(point_residual(m, y.data()), 1e-12) << m.name();
    }
}

TEST(Retract, FirstOrderAtZero) {
  const ManifoldPoint x = e(3, 0);
  const TangentVector u(x, vec({0, 0.6, 0.8}));
  for (double s : {1e-2, 1e-4, 1e-6}) {
    const double ratio = (retract(x, s * u).data() - x.data()).norm() / s;
    EXPECT_NEAR(ratio, 1.0, s);
  }
}

TEST(Retract, DegenerateSphereStepThrows) {
  const ManifoldPoint x = e(3, 0);
  const TangentVector bad(kUnchecked, x, -x.data());
  EXPECT_THROW(retract(x, bad), DegenerateRetractionError);
}

TEST(Retract, RequiresMatchingBase) {
  const ManifoldPoint x = e(3, 0);
  const ManifoldPoint y = e(3, 1);
  EXPECT_THROW(retract(x, TangentVector::zero(y)), DimensionError);
}

TEST(Transport, SphereExamples) {
  const ManifoldPoint x = e(3, 0), y = e(3, 1);
  EXPECT_LT((vector_transport(x, y, TangentVector(x, vec({0, 0, 1}))).data() - vec({0, 0, 1})).norm(), 1e-15);
  EXPECT_LT(vector_transport(x, y, TangentVector(x, vec({0, 1, 0}))).norm(), 1e-15);
}

TEST(Transport, SameBaseIsIdentityAndNonexpansive) {
  Rng rng = named_stream(7, "probe");
  for (const ManifoldDescriptor& m : manifolds())
    for (int t = 0; t < 50; ++t) {
      const ManifoldPoint x = random_point(m, rng);
      const TangentVector xi = random_unit_tangent(x, rng);
      EXPECT_LT((vector_transport(x, x, xi).data() - xi.data()).norm(), 1e-14);
      const ManifoldPoint y = random_point(m, rng);
      const TangentVector moved = vector_transport(x, y, xi);
      EXPECT_LE(moved.norm(), 1.0 + 1e-12);
      EXPECT_LT(tangent_residual(m, y.data(), moved.data()), 1e-12);
    }
}

TEST(TangentVector, ArithmeticNeedsSameBase) {
  const ManifoldPoint x = e(3, 0), y = e(3, 1);
  TangentVector a = TangentVector::zero(x);
  EXPECT_THROW(a += TangentVector::zero(y), DimensionError);
  EXPECT_THROW(inner(a, TangentVector::zero(y)), DimensionError);
}

TEST(RetractionConstants, SphereAlphaAtMostOne) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RetractionConstants rc = estimate_retraction_constants(ManifoldDescriptor::sphere(6), 2000, seed);
    EXPECT_LE(rc.alpha, 1.0 + 1e-9);
  }
}

TEST(RetractionConstants, SphereBetaDenseSampling) {
  const RetractionConstants rc = estimate_retraction_constants(ManifoldDescriptor::sphere(3), 10000, 42);
  EXPECT_LE(rc.beta, 1.0 + 1e-6);
  // ||(x+u)/sqrt(1+r^2) - x - u|| = sqrt(1+r^2) - 1 <= r^2/2
  EXPECT_LE(rc.beta, 0.5 + 1e-12);
  EXPECT_GT(rc.beta, 0.3);
}

TEST(RetractionConstants, NeedsEnoughSamples) {
  EXPECT_THROW(estimate_retraction_constants(ManifoldDescriptor::sphere(3), 10, 1), ParameterError);
}

TEST(RetractionConstants, Deterministic) {
  const auto a = estimate_retraction_constants(ManifoldDescriptor::stiefel(5, 2), 300, 9);
  const auto b = estimate_retraction_constants(ManifoldDescriptor::stiefel(5, 2), 300, 9);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.beta, b.beta);
}

TEST(Renormalize, RemovesDrift) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(4, 2);
  X(2, 0) = 1e-13;
  const ManifoldPoint x(ManifoldDescriptor::stiefel(4, 2), X);
  EXPECT_LT(point_residual(x.descriptor(), renormalize(x).data()), 1e-15);
}
