#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "manismooth/manifold.hpp"
#include "manismooth/problem.hpp"

namespace manismooth {

enum class Exec { Serial, Parallel };

struct ValueGrad {
  double value = 0.0;
  Eigen::MatrixXd grad;  ///< Euclidean
};

/// Samples per parallel work item. Partial sums are combined in chunk order,
/// so results do not depend on the thread count.
inline constexpr std::size_t kFiniteSumChunk = 64;

/// Reference: (1/N) sum_i f~(x, i) and its gradient, one sample at a time.
ValueGrad finite_sum_serial(const SmoothPart& part, const Eigen::MatrixXd& x);
/// OpenMP: fixed chunks through SmoothPart::accumulate, ordered reduction.
ValueGrad finite_sum_parallel(const SmoothPart& part, const Eigen::MatrixXd& x);

inline ValueGrad finite_sum(const SmoothPart& part, const Eigen::MatrixXd& x, Exec exec = Exec::Parallel) {
  return exec == Exec::Serial ? finite_sum_serial(part, x) : finite_sum_parallel(part, x);
}

/// max_i ||P_T(grad f~(x, i)) - rgrad|| over the given sample indices.
double max_sample_deviation_serial(const StochasticProblem& p, const ManifoldPoint& x,
                                   const Eigen::MatrixXd& rgrad, std::span<const std::size_t> indices);
double max_sample_deviation_parallel(const StochasticProblem& p, const ManifoldPoint& x,
                                     const Eigen::MatrixXd& rgrad, std::span<const std::size_t> indices);

inline double max_sample_deviation(const StochasticProblem& p, const ManifoldPoint& x,
                                   const Eigen::MatrixXd& rgrad, std::span<const std::size_t> indices,
                                   Exec exec = Exec::Parallel) {
  return exec == Exec::Serial ? max_sample_deviation_serial(p, x, rgrad, indices)
                              : max_sample_deviation_parallel(p, x, rgrad, indices);
}

}  // namespace manismooth
