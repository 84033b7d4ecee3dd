#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace manismooth {

using Rng = std::mt19937_64;

/// Derives an independent generator from a master seed and a stream name
/// ("data", "sampling", "probe", "init", ...). Same (seed, name) always
/// yields the same stream; different names are decorrelated via splitmix64.
Rng named_stream(std::uint64_t seed, std::string_view name);

std::uint64_t splitmix64(std::uint64_t x);

Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Uniform index in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace manismooth
