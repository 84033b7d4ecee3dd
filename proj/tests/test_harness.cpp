#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <memory>

#include "manismooth/errors.hpp"
#include "manismooth/harness.hpp"
#include "manismooth/problem.hpp"

using namespace manismooth;

namespace {

std::vector<TraceRecord> series(long n, const std::function<double(long)>& f) {
  std::vector<TraceRecord> out;
  for (long k = 1; k <= n; ++k) {
    TraceRecord r;
    r.k = k;
    r.norm_G = f(k);
    r.norm_grad_Fmu = f(k);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(FitRate, ExactPowerLaw) {
  const auto t = series(2000, [](long k) { return std::pow(k, -2.0 / 3.0); });
  const RateFit f = fit_rate(t, "norm_G", {100, 2000}, RateMode::Raw);
  EXPECT_NEAR(f.slope, -2.0 / 3.0, 1e-6);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.points, 1901u);
}

TEST(FitRate, ConstantSeries) {
  const auto t = series(500, [](long) { return 0.7; });
  EXPECT_NEAR(fit_rate(t, "norm_G", {100, 500}).slope, 0.0, 1e-12);
  EXPECT_NEAR(fit_rate(t, "norm_G", {100, 500}, RateMode::Raw).slope, 0.0, 1e-12);
}

TEST(FitRate, NoisyPowerLaw) {
  const auto t = series(5000, [](long k) { return std::pow(k, -1.0 / 3.0) * (1 + 0.01 * std::sin(k)); });
  EXPECT_NEAR(fit_rate(t, "norm_G", {100, 5000}, RateMode::Raw).slope, -1.0 / 3.0, 0.02);
}

TEST(FitRate, RunningMeanOfSquares) {
  // (1/k) sum_{i<=k} i^{-2/3} = 3 k^{-2/3} + O(1/k); the correction shifts the
  // slope by about 0.02 on [1e3, 1e4]
  const auto t = series(10000, [](long k) { return std::pow(k, -1.0 / 3.0); });
  EXPECT_NEAR(fit_rate(t, "norm_grad_Fmu", {1000, 10000}).slope, -2.0 / 3.0, 0.03);
}

TEST(FitRate, InsufficientData) {
  const auto t = series(50, [](long k) { return 1.0 / k; });
  EXPECT_THROW(fit_rate(t, "norm_G", {45, 50}), InsufficientDataError);
  std::vector<TraceRecord> bare = series(50, [](long k) { return 1.0 / k; });
  for (auto& r : bare) r.norm_eps.reset();
  EXPECT_THROW(fit_rate(bare, "norm_eps", {1, 50}), InsufficientDataError);
  EXPECT_THROW(fit_rate(t, "norm_G", {50, 10}), ParameterError);
  EXPECT_THROW(fit_rate(t, "nope", {1, 50}), ParameterError);
}

TEST(FitRate, Deterministic) {
  const auto t = series(300, [](long k) { return std::exp(-0.01 * k) + 1.0 / k; });
  const RateFit a = fit_rate(t, "norm_G", {100, 300}), b = fit_rate(t, "norm_G", {100, 300});
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.intercept, b.intercept);
  EXPECT_GE(a.r_squared, 0.0);
  EXPECT_LE(a.r_squared, 1.0);
}

TEST(SeqBound, FourOnes) {
  const std::vector<double> b{1, 1, 1, 1};
  const double lhs = 1 + 1 / std::sqrt(2.0) + 1 / std::sqrt(3.0) + 0.5;
  EXPECT_NEAR(lhs, 2.7844, 1e-4);
  EXPECT_TRUE(lemma_seq_bound_check(b, 0.5));
}

TEST(SeqBound, SingleElement) {
  for (double p : {0.01, 0.5, 0.99}) {
    const std::vector<double> b{3.7};
    EXPECT_TRUE(lemma_seq_bound_check(b, p));
  }
}

TEST(SeqBound, Preconditions) {
  const std::vector<double> zero_first{0, 1};
  const std::vector<double> negative{1, -1};
  const std::vector<double> ok{1, 2};
  EXPECT_THROW(lemma_seq_bound_check(zero_first, 0.5), ParameterError);
  EXPECT_THROW(lemma_seq_bound_check(negative, 0.5), ParameterError);
  EXPECT_THROW(lemma_seq_bound_check(ok, 1.0), ParameterError);
}

TEST(SeqBound, RandomBattery) {
  const BatteryResult r = lemma_seq_battery(10000, 77);
  EXPECT_EQ(r.cases, 10000);
  EXPECT_EQ(r.failures, 0);
}

TEST(ImplicitBound, HalfPowers) {
  // x <= 2 sqrt(x) forces x <= 4
  EXPECT_NEAR(implicit_premise_root(1, 1, 0, 0.5, 0.5), 4.0, 1e-12);
  EXPECT_TRUE(lemma_implicit_bound_check(1, 1, 0, 0.5, 0.5, 4.0));
  EXPECT_TRUE(lemma_implicit_bound_check(1, 1, 0, 0.5, 0.5, 0.0));
}

TEST(ImplicitBound, RejectsPremiseViolation) {
  EXPECT_THROW(lemma_implicit_bound_check(1, 1, 0, 0.5, 0.5, 5.0), ParameterError);
  EXPECT_THROW(lemma_implicit_bound_check(0, 1, 0, 0.5, 0.5, 0.0), ParameterError);
  EXPECT_THROW(lemma_implicit_bound_check(1, 1, 0, 1.0, 0.5, 0.0), ParameterError);
}

TEST(ImplicitBound, BisectionRootSatisfiesPremise) {
  for (double e : {0.0, 0.5, 30.0}) {
    const double x = implicit_premise_root(2, 0.3, e, 0.3, 0.7);
    EXPECT_GE(2 * std::pow(x, 0.3) + 0.3 * std::pow(x, 0.7) + e - x, 0.0);
    const double above = x * (1 + 1e-9) + 1e-12;
    EXPECT_LT(2 * std::pow(above, 0.3) + 0.3 * std::pow(above, 0.7) + e - above, 0.0);
  }
}

TEST(ImplicitBound, RandomBattery) {
  const BatteryResult r = lemma_implicit_battery(10000, 78);
  EXPECT_EQ(r.cases, 10000);
  EXPECT_EQ(r.failures, 0);
}

TEST(RetrSmooth, QuadraticOnSphereBelowAnalyticConstant) {
  Rng rng = named_stream(5, "probe");
  const Eigen::Index n = 6;
  const Eigen::MatrixXd A = gaussian_matrix(rng, 30, n);
  const StochasticProblem p("quadratic", ManifoldDescriptor::sphere(n), std::make_shared<const SparsePcaLoss>(A),
                            std::make_shared<const IdentityMap>(n, 1), NonsmoothTerm::scaled_l1(0.0, n));
  const double q = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A.transpose() * A / 30.0).eigenvalues().maxCoeff();
  // alpha = 1, beta = 1/2 on the sphere; L_f = L_grad_f = ||Q||; L_c = 1; l_h = 0
  const double analytic = q + 2 * q * 0.5 + 1.0;
  const RetrSmoothCheck c = retr_smooth_constant_check(p, 1.0, 2000, 3);
  EXPECT_LE(c.empirical, analytic);
  EXPECT_LE(c.empirical, c.bound);
  EXPECT_TRUE(std::isfinite(c.empirical));
}

TEST(RetrSmooth, NeedsSamples) {
  const StochasticProblem p = make_sparse_pca(4, 1, 10, 0.1, 1);
  EXPECT_THROW(retr_smooth_constant_check(p, 1.0, 10, 1), ParameterError);
}
