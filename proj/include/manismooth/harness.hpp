#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manismooth/problem.hpp"
#include "manismooth/trace.hpp"

namespace manismooth {

enum class RateMode {
  RunningMeanSquare,  ///< log of the running mean of field^2
  Raw,                ///< log of the field itself
};

struct RateWindow {
  long k_lo = 100;
  long k_hi = 0;
};

struct RateFit {
  std::string field;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  RateWindow window;
  std::size_t points = 0;
};

/// Value of a named trace column, if present in the record.
std::optional<double> trace_field(const TraceRecord& r, const std::string& field);
bool is_trace_field(const std::string& field);

/// OLS of log value against log k over records in [k_lo, k_hi]. The running mean
/// accumulates over every record from the start of the trace. Records with
/// k < 1 or a nonpositive value are skipped. Needs >= 10 usable points.
RateFit fit_rate(std::span<const TraceRecord> trace, const std::string& field, RateWindow window,
                 RateMode mode = RateMode::RunningMeanSquare);

/// sum_k b_k / (sum_{i<=k} b_i)^p <= (sum_k b_k)^{1-p} / (1-p), slack 1e-12.
bool lemma_seq_bound_check(std::span<const double> b, double p);

/// Given x <= c x^alpha + d x^beta + e, checks
/// x <= 2 (4 alpha)^{alpha/(1-alpha)} c^{1/(1-alpha)} + 2 (4 beta)^{beta/(1-beta)} d^{1/(1-beta)} + 2 e.
bool lemma_implicit_bound_check(double c, double d, double e, double alpha, double beta, double x);

/// Largest x >= 0 with x <= c x^alpha + d x^beta + e, by bisection.
double implicit_premise_root(double c, double d, double e, double alpha, double beta);

struct BatteryResult {
  long cases = 0;
  long failures = 0;
};

BatteryResult lemma_seq_battery(long cases, std::uint64_t seed);
/// Each case checks the premise root and a random admissible x below it.
BatteryResult lemma_implicit_battery(long cases, std::uint64_t seed);

struct RetrSmoothCheck {
  double empirical = 0.0;  ///< max 2 mu (F_mu(R_x(eta)) - F_mu(x) - <eta, grad F_mu(x)>) / ||eta||^2
  double bound = 0.0;      ///< composite constant from estimated problem constants
};

RetrSmoothCheck retr_smooth_constant_check(const StochasticProblem& p, double mu, int samples, std::uint64_t seed);

}  // namespace manismooth
