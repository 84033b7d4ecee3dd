#include "manismooth/prox.hpp"

#include <cmath>
#include <limits>

#include "manismooth/errors.hpp"

namespace manismooth {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const NonsmoothTerm& h, const Eigen::VectorXd& y, const char* what) {
  if (y.size() != h.dim())
    throw DimensionError(std::string(what) + ": vector has size " + std::to_string(y.size()) +
                         ", term expects " + std::to_string(h.dim()));
}

void require_mu(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("smoothing parameter mu must be > 0");
}

}  // namespace

NonsmoothTerm NonsmoothTerm::scaled_l1(double lambda, Eigen::Index dim) {
  if (!(lambda >= 0.0)) throw ParameterError("ScaledL1: lambda must be >= 0");
  if (dim < 1) throw ParameterError("ScaledL1: dim must be >= 1");
  return NonsmoothTerm(ScaledL1{lambda}, dim, lambda * std::sqrt(static_cast<double>(dim)));
}

NonsmoothTerm NonsmoothTerm::scaled_l2(double lambda, Eigen::Index dim) {
  if (!(lambda >= 0.0)) throw ParameterError("ScaledL2: lambda must be >= 0");
  if (dim < 1) throw ParameterError("ScaledL2: dim must be >= 1");
  return NonsmoothTerm(ScaledL2{lambda}, dim, lambda);
}

NonsmoothTerm NonsmoothTerm::ball(Eigen::VectorXd center, double radius) {
  if (!(radius > 0.0)) throw ParameterError("IndicatorBall: radius must be > 0");
  const Eigen::Index m = center.size();
  if (m < 1) throw ParameterError("IndicatorBall: empty center");
  return NonsmoothTerm(IndicatorBall{std::move(center), radius}, m, 0.0);
}

NonsmoothTerm NonsmoothTerm::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size() || lower.size() < 1)
    throw DimensionError("IndicatorBox: lower/upper size mismatch");
  if ((lower.array() > upper.array()).any()) throw ParameterError("IndicatorBox: lower > upper");
  const Eigen::Index m = lower.size();
  return NonsmoothTerm(IndicatorBox{std::move(lower), std::move(upper)}, m, 0.0);
}

NonsmoothTerm NonsmoothTerm::singleton(Eigen::VectorXd target) {
  const Eigen::Index m = target.size();
  if (m < 1) throw ParameterError("IndicatorSingleton: empty target");
  return NonsmoothTerm(IndicatorSingleton{std::move(target)}, m, 0.0);
}

bool NonsmoothTerm::is_indicator() const {
  return !std::holds_alternative<ScaledL1>(variant_) && !std::holds_alternative<ScaledL2>(variant_);
}

std::string NonsmoothTerm::kind_name() const {
  return std::visit(overloaded{[](const ScaledL1&) { return std::string("l1"); },
                               [](const ScaledL2&) { return std::string("l2"); },
                               [](const IndicatorBall&) { return std::string("ball"); },
                               [](const IndicatorBox&) { return std::string("box"); },
                               [](const IndicatorSingleton&) { return std::string("singleton"); }},
                    variant_);
}

Eigen::VectorXd NonsmoothTerm::project(const Eigen::VectorXd& y) const {
  require_dim(*this, y, "project");
  return std::visit(
      overloaded{
          [&](const IndicatorBall& b) -> Eigen::VectorXd {
            const Eigen::VectorXd d = y - b.center;
            const double nrm = d.norm();
            if (nrm <= b.radius) return y;
            return b.center + (b.radius / nrm) * d;
          },
          [&](const IndicatorBox& b) -> Eigen::VectorXd { return y.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const IndicatorSingleton& s) -> Eigen::VectorXd { return s.target; },
          [&](const auto&) -> Eigen::VectorXd {
            throw ConfigurationError("project: term " + kind_name() + " is not an indicator");
          }},
      variant_);
}

double NonsmoothTerm::distance(const Eigen::VectorXd& y) const {
  require_dim(*this, y, "distance");
  return std::visit(
      overloaded{[&](const IndicatorBall& b) { return std::max(0.0, (y - b.center).norm() - b.radius); },
                 [&](const IndicatorBox& b) {
                   return (y - y.cwiseMax(b.lower).cwiseMin(b.upper)).norm();
                 },
                 [&](const IndicatorSingleton& s) { return (y - s.target).norm(); },
                 [&](const auto&) -> double {
                   throw ConfigurationError("distance: term " + kind_name() + " is not an indicator");
                 }},
      variant_);
}

double NonsmoothTerm::value(const Eigen::VectorXd& z) const {
  require_dim(*this, z, "value");
  return std::visit(overloaded{[&](const ScaledL1& t) { return t.lambda * z.lpNorm<1>(); },
                               [&](const ScaledL2& t) { return t.lambda * z.norm(); },
                               [&](const IndicatorBall& b) {
                                 return (z - b.center).norm() <= b.radius ? 0.0 : kInf;
                               },
                               [&](const IndicatorBox& b) {
                                 const bool in = (z.array() >= b.lower.array()).all() &&
                                                 (z.array() <= b.upper.array()).all();
                                 return in ? 0.0 : kInf;
                               },
                               [&](const IndicatorSingleton& s) { return z == s.target ? 0.0 : kInf; }},
                    variant_);
}

Eigen::VectorXd NonsmoothTerm::sample_in_set(Rng& rng) const {
  return std::visit(
      overloaded{
          [&](const IndicatorBall& b) -> Eigen::VectorXd {
            Eigen::VectorXd d = gaussian_matrix(rng, dim_, 1).col(0);
            const double nrm = d.norm();
            if (nrm == 0.0) return b.center;
            const double r = b.radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(dim_));
            return b.center + (r / nrm) * d;
          },
          [&](const IndicatorBox& b) -> Eigen::VectorXd {
            Eigen::VectorXd w(dim_);
            for (Eigen::Index i = 0; i < dim_; ++i)
              w(i) = b.lower(i) + uniform01(rng) * (b.upper(i) - b.lower(i));
            return w;
          },
          [&](const IndicatorSingleton& s) -> Eigen::VectorXd { return s.target; },
          [&](const auto&) -> Eigen::VectorXd {
            throw ConfigurationError("sample_in_set: term " + kind_name() + " is not an indicator");
          }},
      variant_);
}

Eigen::VectorXd prox(const NonsmoothTerm& h, double mu, const Eigen::VectorXd& y) {
  require_mu(mu);
  require_dim(h, y, "prox");
  return std::visit(overloaded{[&](const ScaledL1& t) -> Eigen::VectorXd {
                                 const double thr = mu * t.lambda;
                                 Eigen::VectorXd z(y.size());
                                 for (Eigen::Index i = 0; i < y.size(); ++i) {
                                   const double v = y(i);
                                   z(i) = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
                                 }
                                 return z;
                               },
                               [&](const ScaledL2& t) -> Eigen::VectorXd {
                                 const double thr = mu * t.lambda;
                                 const double nrm = y.norm();
                                 if (nrm <= thr) return Eigen::VectorXd::Zero(y.size());
                                 return (1.0 - thr / nrm) * y;
                               },
                               [&](const auto&) -> Eigen::VectorXd { return h.project(y); }},
                    h.variant());
}

MoreauEval moreau_eval(const NonsmoothTerm& h, double mu, const Eigen::VectorXd& y) {
  MoreauEval e;
  e.mu = mu;
  e.prox_point = prox(h, mu, y);
  Eigen::VectorXd r = y - e.prox_point;
  // closed forms for the Lipschitz terms; (y - prox)/mu cancels badly when lambda mu << |y|
  if (const auto* t = std::get_if<ScaledL1>(&h.variant())) {
    e.grad = (y / mu).cwiseMax(-t->lambda).cwiseMin(t->lambda);
    r = mu * e.grad;
  } else if (const auto* t = std::get_if<ScaledL2>(&h.variant())) {
    const double nrm = y.norm();
    e.grad = nrm <= t->lambda * mu ? Eigen::VectorXd(y / mu) : Eigen::VectorXd((t->lambda / nrm) * y);
    r = mu * e.grad;
  } else {
    e.grad = r / mu;
  }
  if (h.is_indicator()) {
    // dist^2/(2mu) from the residual directly; h(prox) is exactly 0
    e.value = r.squaredNorm() / (2.0 * mu);
  } else {
    e.value = h.value(e.prox_point) + r.squaredNorm() / (2.0 * mu);
  }
  return e;
}

bool moreau_envelope_inequality_check(const NonsmoothTerm& h, double mu1, double mu2,
                                      const Eigen::VectorXd& y) {
  require_mu(mu1);
  require_mu(mu2);
  if (mu2 > mu1) throw ParameterError("moreau_envelope_inequality_check: requires mu2 <= mu1");
  const MoreauEval e1 = moreau_eval(h, mu1, y);
  const MoreauEval e2 = moreau_eval(h, mu2, y);
  auto holds = [](double lhs, double rhs) { return lhs <= rhs + 1e-10 * (1.0 + std::abs(rhs)); };

  const double factor = 0.5 * (mu1 - mu2) / mu2 * mu1;
  bool ok = holds(e2.value, e1.value + factor * e1.grad.squaredNorm());
  if (h.is_indicator()) {
    const double d = h.distance(y);
    ok = ok && holds(e2.value, e1.value + 0.5 * (1.0 / mu2 - 1.0 / mu1) * d * d);
  } else {
    const double lh = h.lipschitz_const();
    ok = ok && holds(e2.value, e1.value + factor * lh * lh);
  }
  return ok;
}

bool subgradient_membership(const NonsmoothTerm& h, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& z, Rng& rng, double tol, int cone_samples) {
  require_dim(h, y, "subgradient_membership");
  require_dim(h, z, "subgradient_membership");
  if (!y.allFinite() || !z.allFinite()) return false;
  return std::visit(
      overloaded{[&](const ScaledL1& t) {
                   for (Eigen::Index j = 0; j < y.size(); ++j) {
                     if (std::abs(z(j)) > t.lambda + tol) return false;
                     if (y(j) != 0.0 && std::abs(z(j) - t.lambda * (y(j) > 0 ? 1.0 : -1.0)) > tol)
                       return false;
                   }
                   return true;
                 },
                 [&](const ScaledL2& t) {
                   const double nrm = y.norm();
                   if (nrm == 0.0) return z.norm() <= t.lambda + tol;
                   return (z - (t.lambda / nrm) * y).norm() <= tol;
                 },
                 [&](const auto&) {
                   if (h.distance(y) > tol) return false;
                   const double scale = tol * (1.0 + z.norm());
                   for (int s = 0; s < cone_samples; ++s) {
                     const Eigen::VectorXd w = h.sample_in_set(rng);
                     if (z.dot(w - y) > scale) return false;
                   }
                   return true;
                 }},
      h.variant());
}

}  // namespace manismooth
