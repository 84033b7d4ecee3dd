#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "manismooth/rng.hpp"

namespace manismooth {

enum class ManifoldKind { Sphere, Stiefel, Oblique };

/// Which compact embedded submanifold a point lives on, and its size.
/// Sphere(n) is stored as an n x 1 matrix; Stiefel/Oblique as n x p.
struct ManifoldDescriptor {
  ManifoldKind kind = ManifoldKind::Sphere;
  Eigen::Index n = 2;
  Eigen::Index p = 1;

  static ManifoldDescriptor sphere(Eigen::Index n);
  static ManifoldDescriptor stiefel(Eigen::Index n, Eigen::Index p);
  static ManifoldDescriptor oblique(Eigen::Index n, Eigen::Index p);

  Eigen::Index rows() const { return n; }
  Eigen::Index cols() const { return kind == ManifoldKind::Sphere ? 1 : p; }
  Eigen::Index ambient_size() const { return rows() * cols(); }
  /// max ||x - y|| over the manifold (chordal, Frobenius).
  double diameter() const;
  std::string name() const;

  bool operator==(const ManifoldDescriptor&) const = default;
};

struct Unchecked {};
inline constexpr Unchecked kUnchecked{};

class ManifoldPoint {
 public:
  /// Validates the manifold invariants; throws InvariantError / DimensionError.
  ManifoldPoint(ManifoldDescriptor descriptor, Eigen::MatrixXd data);
  /// For values already known to be on the manifold (retraction outputs).
  ManifoldPoint(Unchecked, ManifoldDescriptor descriptor, Eigen::MatrixXd data)
      : descriptor_(descriptor), data_(std::move(data)) {}

  const ManifoldDescriptor& descriptor() const { return descriptor_; }
  const Eigen::MatrixXd& data() const { return data_; }

 private:
  ManifoldDescriptor descriptor_;
  Eigen::MatrixXd data_;
};

class TangentVector {
 public:
  /// Validates tangency at `base`; throws InvariantError / DimensionError.
  TangentVector(ManifoldPoint base, Eigen::MatrixXd data);
  TangentVector(Unchecked, ManifoldPoint base, Eigen::MatrixXd data)
      : base_(std::move(base)), data_(std::move(data)) {}

  static TangentVector zero(const ManifoldPoint& base);

  const ManifoldDescriptor& descriptor() const { return base_.descriptor(); }
  const ManifoldPoint& base() const { return base_; }
  const Eigen::MatrixXd& data() const { return data_; }
  double norm() const { return data_.norm(); }

  TangentVector& operator+=(const TangentVector& other);
  TangentVector& operator-=(const TangentVector& other);
  TangentVector& operator*=(double s) {
    data_ *= s;
    return *this;
  }

 private:
  void require_same_base(const TangentVector& other) const;

  ManifoldPoint base_;
  Eigen::MatrixXd data_;
};

inline TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
inline TangentVector operator-(TangentVector a, const TangentVector& b) { return a -= b; }
inline TangentVector operator*(double s, TangentVector a) { return a *= s; }

/// Frobenius inner product of two tangent vectors at the same base.
double inner(const TangentVector& a, const TangentVector& b);

struct RetractionConstants {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Residual of the point invariant (|1 - ||x||| for sphere, ||X^T X - I||_F for
/// Stiefel, max column deviation for oblique).
double point_residual(const ManifoldDescriptor& m, const Eigen::MatrixXd& x);
/// Residual of the tangency invariant at x.
double tangent_residual(const ManifoldDescriptor& m, const Eigen::MatrixXd& x,
                        const Eigen::MatrixXd& v);

/// Orthogonal projection onto T_x M.
TangentVector tangent_project(const ManifoldPoint& x, const Eigen::MatrixXd& v);

/// Riemannian gradient of a function with Euclidean gradient `euclid_grad` at x.
inline TangentVector riemannian_gradient(const ManifoldPoint& x, const Eigen::MatrixXd& euclid_grad) {
  return tangent_project(x, euclid_grad);
}

/// Projection-type retraction: normalization (sphere), sign-fixed thin QR
/// (Stiefel), column normalization (oblique).
ManifoldPoint retract(const ManifoldPoint& x, const TangentVector& eta);

/// Projection-based transport T_x^y(xi) = P_{T_y M}(xi). Nonexpansive, not an isometry.
TangentVector vector_transport(const ManifoldPoint& x, const ManifoldPoint& y, const TangentVector& xi);

/// Re-normalizes / re-orthonormalizes x to arrest floating-point drift.
ManifoldPoint renormalize(const ManifoldPoint& x);

ManifoldPoint random_point(const ManifoldDescriptor& m, Rng& rng);
/// Random unit-norm tangent vector at x.
TangentVector random_unit_tangent(const ManifoldPoint& x, Rng& rng);

/// Empirical alpha = max ||R_x(u) - x|| / ||u|| and beta = max ||R_x(u) - x - u|| / ||u||^2
/// over `samples` random pairs with 0 < ||u|| <= 1.
RetractionConstants estimate_retraction_constants(const ManifoldDescriptor& m, int samples,
                                                  std::uint64_t rng_seed);

}  // namespace manismooth
