#include "manismooth/kernels.hpp"

#include <algorithm>
#include <vector>

namespace manismooth {

ValueGrad finite_sum_serial(const SmoothPart& part, const Eigen::MatrixXd& x) {
  const std::size_t n = part.num_samples();
  ValueGrad out{0.0, Eigen::MatrixXd::Zero(x.rows(), x.cols())};
  for (std::size_t i = 0; i < n; ++i) {
    out.value += part.sample_value(x, i);
    out.grad += part.sample_grad(x, i);
  }
  out.value /= static_cast<double>(n);
  out.grad /= static_cast<double>(n);
  return out;
}

ValueGrad finite_sum_parallel(const SmoothPart& part, const Eigen::MatrixXd& x) {
  const std::size_t n = part.num_samples();
  const std::size_t chunks = (n + kFiniteSumChunk - 1) / kFiniteSumChunk;
  std::vector<double> values(chunks, 0.0);
  std::vector<Eigen::MatrixXd> grads(chunks);

  const long nchunks = static_cast<long>(chunks);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kFiniteSumChunk;
    const std::size_t end = std::min(n, begin + kFiniteSumChunk);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    double v = 0.0;
    part.accumulate(x, begin, end, v, g);
    values[c] = v;
    grads[c] = std::move(g);
  }

  ValueGrad out{0.0, Eigen::MatrixXd::Zero(x.rows(), x.cols())};
  for (std::size_t c = 0; c < chunks; ++c) {
    out.value += values[c];
    out.grad += grads[c];
  }
  out.value /= static_cast<double>(n);
  out.grad /= static_cast<double>(n);
  return out;
}

double max_sample_deviation_serial(const StochasticProblem& p, const ManifoldPoint& x,
                                   const Eigen::MatrixXd& rgrad, std::span<const std::size_t> indices) {
  double best = 0.0;
  for (std::size_t i : indices) {
    const TangentVector g = sample_riemannian_grad(p, x, SampleIndex{i});
    best = std::max(best, (g.data() - rgrad).norm());
  }
  return best;
}

double max_sample_deviation_parallel(const StochasticProblem& p, const ManifoldPoint& x,
                                     const Eigen::MatrixXd& rgrad, std::span<const std::size_t> indices) {
  const long n = static_cast<long>(indices.size());
  double best = 0.0;
  // max is order-independent, so a plain reduction stays deterministic
#pragma omp parallel for schedule(static) reduction(max : best)
  for (long k = 0; k < n; ++k) {
    const TangentVector g = sample_riemannian_grad(p, x, SampleIndex{indices[static_cast<std::size_t>(k)]});
    best = std::max(best, (g.data() - rgrad).norm());
  }
  return best;
}

}  // namespace manismooth
