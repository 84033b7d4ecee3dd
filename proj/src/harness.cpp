#include "manismooth/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "manismooth/errors.hpp"
#include "manismooth/rng.hpp"
#include "manismooth/smoothing.hpp"

namespace manismooth {

namespace {

bool within(double lhs, double rhs) { return lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs)); }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(uniform(rng, std::log(lo), std::log(hi))); }

double premise_gap(double c, double d, double e, double alpha, double beta, double x) {
  return c * std::pow(x, alpha) + d * std::pow(x, beta) + e - x;
}

}  // namespace

std::optional<double> trace_field(const TraceRecord& r, const std::string& field) {
  if (field == "mu") return r.mu;
  if (field == "tau") return r.tau;
  if (field == "a") return r.a;
  if (field == "norm_G") return r.norm_G;
  if (field == "obj_smooth") return r.obj_smooth;
  if (field == "norm_grad_Fmu") return r.norm_grad_Fmu;
  if (field == "infeas") return r.infeas;
  if (field == "norm_eps") return r.norm_eps;
  if (field == "wall_ns") return static_cast<double>(r.wall_ns);
  throw ParameterError("unknown trace field '" + field + "'");
}

bool is_trace_field(const std::string& field) {
  static const char* const names[] = {"mu", "tau", "a", "norm_G", "obj_smooth", "norm_grad_Fmu",
                                      "infeas", "norm_eps", "wall_ns"};
  return std::find(std::begin(names), std::end(names), field) != std::end(names);
}

RateFit fit_rate(std::span<const TraceRecord> trace, const std::string& field, RateWindow window, RateMode mode) {
  if (!(window.k_lo < window.k_hi)) throw ParameterError("fit_rate: window needs k_lo < k_hi");
  std::vector<double> lx, ly;
  double sum_sq = 0.0;
  long count = 0;
  for (const TraceRecord& r : trace) {
    const std::optional<double> v = trace_field(r, field);
    if (!v) continue;
    sum_sq += (*v) * (*v);
    ++count;
    if (r.k < window.k_lo || r.k > window.k_hi || r.k < 1) continue;
    const double y = mode == RateMode::RunningMeanSquare ? sum_sq / static_cast<double>(count) : *v;
    if (!(y > 0.0) || !std::isfinite(y)) continue;
    lx.push_back(std::log(static_cast<double>(r.k)));
    ly.push_back(std::log(y));
  }
  const std::size_t n = lx.size();
  if (n < 10)
    throw InsufficientDataError("fit_rate: " + std::to_string(n) + " usable records of '" + field +
                                "' in the window, need at least 10");

  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("fit_rate: all usable records share one k");

  RateFit fit;
  fit.field = field;
  fit.window = window;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  // a constant series is fit exactly
  fit.r_squared = syy > 1e-300 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

bool lemma_seq_bound_check(std::span<const double> b, double p) {
  if (b.empty() || !(b[0] > 0.0)) throw ParameterError("lemma_seq_bound_check: b_1 must be > 0");
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("lemma_seq_bound_check: p must lie in (0, 1)");
  double partial = 0.0;
  double lhs = 0.0;
  for (double v : b) {
    if (!(v >= 0.0)) throw ParameterError("lemma_seq_bound_check: entries must be >= 0");
    partial += v;
    lhs += v / std::pow(partial, p);
  }
  return within(lhs, std::pow(partial, 1.0 - p) / (1.0 - p));
}

bool lemma_implicit_bound_check(double c, double d, double e, double alpha, double beta, double x) {
  if (!(c > 0.0) || !(d > 0.0)) throw ParameterError("lemma_implicit_bound_check: c and d must be > 0");
  if (!(e >= 0.0)) throw ParameterError("lemma_implicit_bound_check: e must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
    throw ParameterError("lemma_implicit_bound_check: alpha and beta must lie in (0, 1)");
  if (!(x >= 0.0)) throw ParameterError("lemma_implicit_bound_check: x must be >= 0");
  const double premise_rhs = c * std::pow(x, alpha) + d * std::pow(x, beta) + e;
  if (!within(x, premise_rhs)) throw ParameterError("lemma_implicit_bound_check: x violates the premise");
  const double rhs = 2.0 * std::pow(4.0 * alpha, alpha / (1.0 - alpha)) * std::pow(c, 1.0 / (1.0 - alpha)) +
                     2.0 * std::pow(4.0 * beta, beta / (1.0 - beta)) * std::pow(d, 1.0 / (1.0 - beta)) + 2.0 * e;
  return within(x, rhs);
}

double implicit_premise_root(double c, double d, double e, double alpha, double beta) {
  // the gap is concave with gap(0) = e >= 0, so the premise set is [0, root]
  double hi = 1.0;
  while (premise_gap(c, d, e, alpha, beta, hi) >= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (premise_gap(c, d, e, alpha, beta, mid) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

BatteryResult lemma_seq_battery(long cases, std::uint64_t seed) {
  Rng rng = named_stream(seed, "probe");
  BatteryResult out;
  for (long t = 0; t < cases; ++t) {
    const std::size_t len = 1 + uniform_index(rng, 200);
    std::vector<double> b(len);
    b[0] = log_uniform(rng, 1e-6, 1e3);
    for (std::size_t i = 1; i < len; ++i) {
      const double u = uniform01(rng);
      b[i] = u < 0.1 ? 0.0 : log_uniform(rng, 1e-6, 1e3);
    }
    const double p = uniform(rng, 0.01, 0.99);
    ++out.cases;
    if (!lemma_seq_bound_check(b, p)) ++out.failures;
  }
  return out;
}

BatteryResult lemma_implicit_battery(long cases, std::uint64_t seed) {
  Rng rng = named_stream(seed, "probe");
  BatteryResult out;
  for (long t = 0; t < cases; ++t) {
    const double c = log_uniform(rng, 1e-2, 1e2);
    const double d = log_uniform(rng, 1e-2, 1e2);
    const double e = uniform01(rng) < 0.2 ? 0.0 : log_uniform(rng, 1e-3, 1e3);
    const double alpha = uniform(rng, 0.05, 0.95);
    const double beta = uniform(rng, 0.05, 0.95);
    const double root = implicit_premise_root(c, d, e, alpha, beta);
    const double below = root * uniform01(rng);
    ++out.cases;
    if (!lemma_implicit_bound_check(c, d, e, alpha, beta, root) ||
        !lemma_implicit_bound_check(c, d, e, alpha, beta, below))
      ++out.failures;
  }
  return out;
}

RetrSmoothCheck retr_smooth_constant_check(const StochasticProblem& p, double mu, int samples, std::uint64_t seed) {
  if (samples < 100) throw ParameterError("retr_smooth_constant_check: samples must be >= 100");
  if (!(mu > 0.0)) throw ParameterError("retr_smooth_constant_check: mu must be > 0");
  const ProblemConstants constants = estimate_constants(p, samples, seed);
  RetrSmoothCheck out;
  out.bound = p.h().is_indicator() ? composite_smoothness_indicator(constants)
                                   : composite_smoothness_lipschitz(constants, p.h().lipschitz_const());

  Rng rng = named_stream(seed, "probe");
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const ManifoldPoint x = random_point(p.manifold(), rng);
    const double r = uniform(rng, 1e-3, 1.0);
    const TangentVector eta = r * random_unit_tangent(x, rng);
    const SmoothedEval at_x = smoothed_objective_grad(p, x, mu);
    const double moved = smoothed_value(p, retract(x, eta), mu);
    const double q = 2.0 * mu * (moved - at_x.value - inner(eta, at_x.rgrad)) / (r * r);
    worst = std::max(worst, q);
  }
  out.empirical = worst;
  return out;
}

}  // namespace manismooth
