#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "manismooth/manifold.hpp"

namespace manismooth {

/// One monitored iteration. Optional fields are only filled when full-gradient
/// diagnostics are enabled.
struct TraceRecord {
  long k = 0;
  double mu = 0.0;
  double tau = 0.0;
  double a = 0.0;
  double norm_G = 0.0;
  std::optional<double> obj_smooth;     ///< F_mu(x_k)
  std::optional<double> norm_grad_Fmu;  ///< ||grad F_mu(x_k)||
  double infeas = 0.0;                  ///< ||c - prox|| or dist(c, C)
  std::optional<double> norm_eps;       ///< ||delta_k - grad f(x_k)||
  std::int64_t wall_ns = 0;
  /// dist^2(c(x_k), C) k^{2 omega / theta}; indicator runs only, not serialized.
  std::optional<double> feas_decay;

  bool operator==(const TraceRecord&) const = default;
};

/// What a single solver iteration reports.
struct StepReport {
  long k = 0;        ///< iteration index of the step just taken
  double mu = 0.0;   ///< mu_k
  double tau = 0.0;  ///< tau_k
  double a = 0.0;    ///< a_{k+1}
  double norm_G = 0.0;
  double envelope_value = 0.0;  ///< h_mu(c(x_k))
  double infeas = 0.0;
  double norm_delta_next = 0.0;  ///< ||delta_{k+1}||
};

/// Iterate stored for certificate sampling.
struct Snapshot {
  long k = 0;
  ManifoldPoint x;
  double mu = 0.0;
  double weight = 1.0;  ///< sampling weight (tau_k for the indicator method)
};

/// Witness (y, z) for approximate stationarity of x_{i_K}.
struct Certificate {
  long i_K = 0;
  ManifoldPoint x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  double mu = 0.0;
  double grad_residual = 0.0;  ///< ||P_T(grad f(x) + grad c(x)^T z)||
  double feas_residual = 0.0;  ///< ||c(x) - y||
  bool membership_ok = false;  ///< z in the subdifferential / normal cone at y
};

}  // namespace manismooth
