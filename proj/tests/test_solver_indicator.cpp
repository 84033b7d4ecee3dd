#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "manismooth/errors.hpp"
#include "manismooth/problem.hpp"
#include "manismooth/smoothing.hpp"
#include "manismooth/solver_indicator.hpp"

using namespace manismooth;
namespace ind = manismooth::indicator;

namespace {

ManifoldPoint start(const StochasticProblem& p, std::uint64_t seed) {
  Rng rng = named_stream(seed, "init");
  return random_point(p.manifold(), rng);
}

StochasticProblem sphere_problem(std::uint64_t seed = 1, double radius = 0.3) {
  return make_constrained_sphere(12, 4, 60, NonsmoothTerm::ball(Eigen::VectorXd::Zero(4), radius), seed);
}

ind::Config config(double c_tau = 0.05, double radius = 10.0) {
  ind::Config c;
  c.theta = 1.0;
  c.zeta = 0.5;
  c.c_tau = c_tau;
  c.c_a = ind::momentum_constant(c_tau, 2.0);
  c.trunc_radius = radius;
  return c;
}

RunOptions opts(long K, long every = 1) {
  RunOptions o;
  o.max_iters = K;
  o.trace_every = every;
  return o;
}

}  // namespace

TEST(IndicatorConfig, Omega) {
  ind::Config c;
  c.theta = 1;
  EXPECT_NEAR(c.omega(), 1.0 / 3.0, 1e-16);
  c.theta = 2;
  EXPECT_EQ(c.omega(), 0.5);
  c.theta = 4;
  EXPECT_EQ(c.omega(), 0.5);
}

TEST(IndicatorConfig, MomentumConstant) {
  for (double ct : {0.1, 1.0})
    for (double lt : {0.5, 3.0}) {
      // c_tau^2 (1/2 + 1/(32 c_tau^2 L~^2) + 4 C L~^2) with C = 1/(16 L~^2)
      const double C = 1.0 / (16 * lt * lt);
      const double full = ct * ct * (0.5 + 1.0 / (32 * ct * ct * lt * lt) + 4 * C * lt * lt);
      EXPECT_NEAR(ind::momentum_constant(ct, lt), full, 1e-15 * full);
      EXPECT_NEAR(ind::momentum_constant(ct, lt), 0.75 * ct * ct + 0.03125 / (lt * lt), 1e-15 * full);
    }
  EXPECT_THROW(ind::momentum_constant(0.0, 1.0), ParameterError);
}

TEST(IndicatorConfig, KTilde) {
  ind::Config c;
  c.theta = 1;
  c.c_tau = 1;
  c.zeta = 1;
  EXPECT_EQ(c.K_tilde(), 3);
}

TEST(IndicatorConfig, Schedules) {
  ind::Config c = config(0.5);
  EXPECT_EQ(c.tau(0), 0.5);
  EXPECT_NEAR(c.tau(7), 0.25, 1e-16);
  EXPECT_EQ(c.mu(0), 1.0);
  EXPECT_NEAR(c.mu(8), 0.5, 1e-16);
  c.c_a = 0.3;
  EXPECT_NEAR(c.a(8), 0.3 * 0.25, 1e-16);
  c.c_a = 100;
  EXPECT_EQ(c.a(8), 1.0);
}

TEST(IndicatorConfig, Validation) {
  ind::Config c = config();
  c.theta = 0.5;
  EXPECT_THROW(c.validate(), ParameterError);
  c = config();
  c.trunc_radius = 0;
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(IndicatorConfig, AdmissibleStepConstant) {
  ProblemConstants k;
  k.L_f = 1;
  k.L_grad_f = 1;
  k.L_c = 1;
  k.L_grad_c = 1;
  k.C_r = 1;
  ind::Config c = config();
  const double bound = std::max(penalty_smoothness(k), composite_smoothness_indicator(k));
  c.c_tau = 1.0 / bound;
  EXPECT_TRUE(ind::step_constant_admissible(c, k));
  c.c_tau = 1.01 / bound;
  EXPECT_FALSE(ind::step_constant_admissible(c, k));
}

TEST(IndicatorInit, TruncationOfFirstEstimator) {
  const StochasticProblem p = make_constrained_sphere(8, 2, 1, NonsmoothTerm::ball(Eigen::VectorXd::Zero(2), 1), 2);
  const ManifoldPoint x0 = start(p, 2);
  const double g = sample_riemannian_grad(p, x0, SampleIndex{0}).norm();
  ASSERT_GT(g, 0.0);
  EXPECT_EQ(ind::init(p, x0, config(0.05, 2 * g), 1).delta.norm(), g);
  EXPECT_NEAR(ind::init(p, x0, config(0.05, g / 2), 1).delta.norm(), g / 2, 1e-15);
  EXPECT_EQ(ind::init(p, x0, config(), 3).delta.data(), ind::init(p, x0, config(), 3).delta.data());
  EXPECT_EQ(ind::init(p, x0, config(), 3).k, 0);
}

TEST(IndicatorInit, RejectsLipschitzTerm) {
  const StochasticProblem p = make_sparse_pca(6, 2, 10, 0.1, 1);
  EXPECT_THROW(ind::init(p, start(p, 1), config(), 1), ConfigurationError);
}

TEST(IndicatorStep, FullMomentumWeightResetsToTruncatedSample) {
  const StochasticProblem p = sphere_problem();
  ind::Config c = config(0.05, 0.01);
  c.c_a = 1e6;  // a_{k+1} = 1 throughout
  ind::State s = ind::init(p, start(p, 1), c, 1);
  Rng mirror = named_stream(1, "sampling");
  uniform_index(mirror, p.num_samples());
  for (int k = 0; k < 20; ++k) {
    ind::step(s, p, c);
    const SampleIndex xi{uniform_index(mirror, p.num_samples())};
    const TangentVector expect = ind::truncate(sample_riemannian_grad(p, s.x, xi), c.trunc_radius);
    EXPECT_LT((s.delta.data() - expect.data()).norm(), 1e-15);
  }
}

TEST(IndicatorStep, FeasibleIterateDirectionIsEstimator) {
  ConstrainedSphereOptions o;
  o.q = 0;
  o.identity_linear = true;
  const StochasticProblem p = make_constrained_sphere(5, 5, 10, NonsmoothTerm::ball(Eigen::VectorXd::Zero(5), 1.0), 3, o);
  const ind::State s = ind::init(p, start(p, 3), config(), 3);
  const StepReport r = ind::peek(s, p, config());
  EXPECT_EQ(r.norm_G, s.delta.norm());
  EXPECT_EQ(r.infeas, 0.0);
}

TEST(IndicatorStep, TruncationHoldsEveryIteration) {
  const StochasticProblem p = sphere_problem(4);
  const ind::Config c = config(0.05, 0.2);
  ind::State s = ind::init(p, start(p, 4), c, 4);
  for (int k = 0; k < 2000; ++k) {
    const StepReport r = ind::step(s, p, c);
    ASSERT_LE(r.norm_delta_next, c.trunc_radius * (1 + 1e-15));
    ASSERT_EQ(r.norm_delta_next, s.delta.norm());
  }
}

TEST(IndicatorRun, TraceLengthAndDeterminism) {
  const StochasticProblem p = sphere_problem(5);
  for (auto [K, every] : {std::pair{100L, 1L}, {100L, 9L}}) {
    const ind::Run a = ind::run(p, start(p, 5), config(), 6, opts(K, every));
    const ind::Run b = ind::run(p, start(p, 5), config(), 6, opts(K, every));
    EXPECT_EQ(static_cast<long>(a.trace.size()), K / every + 1);
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.trace.back().k, K);
  }
}

TEST(IndicatorRun, FeasibleEverywhereKeepsZeroDistance) {
  ConstrainedSphereOptions o;
  o.q = 0;
  o.identity_linear = true;
  const StochasticProblem p = make_constrained_sphere(6, 6, 10, NonsmoothTerm::ball(Eigen::VectorXd::Zero(6), 1.5), 3, o);
  const ind::Run r = ind::run(p, start(p, 3), config(), 3, opts(200));
  for (const TraceRecord& t : r.trace) EXPECT_EQ(t.infeas, 0.0);
}

TEST(IndicatorRun, SnapshotsIncludeFinalIterateAndStepWeights) {
  const StochasticProblem p = sphere_problem(6);
  const ind::Config c = config();
  const ind::Run r = ind::run(p, start(p, 6), c, 6, opts(40));
  ASSERT_FALSE(r.snapshots.empty());
  EXPECT_EQ(r.snapshots.front().k, 20);
  EXPECT_EQ(r.snapshots.back().k, 40);
  for (const Snapshot& s : r.snapshots) EXPECT_EQ(s.weight, c.tau(s.k));
}

TEST(IndicatorCertificate, NormalConeAndResidualIdentity) {
  const StochasticProblem p = sphere_problem(7, 0.2);
  const ind::Config c = config();
  const ind::Run r = ind::run(p, start(p, 7), c, 7, opts(300));
  const Certificate cert = ind::certificate(r, p, c, 7);
  EXPECT_TRUE(cert.membership_ok);
  EXPECT_NEAR(cert.grad_residual, smoothed_objective_grad(p, cert.x, cert.mu).rgrad.norm(), 1e-10);
  EXPECT_LE(cert.y.norm(), 0.2 + 1e-12);
  if (cert.z.norm() > 0) EXPECT_NEAR(cert.z.normalized().dot(cert.y.normalized()), 1.0, 1e-10);
}

TEST(ErrorBoundProbe, IdentityMapIntoSmallBallHasFlatPenalty) {
  // dist(x, ball(0, 1/2)) = 1/2 everywhere on the sphere and grad g = P_T(x/2) = 0
  const Eigen::Index n = 5;
  const StochasticProblem p("ball", ManifoldDescriptor::sphere(n),
                            std::make_shared<const LinearLoss>(Eigen::MatrixXd::Ones(1, n)),
                            std::make_shared<const IdentityMap>(n, 1), NonsmoothTerm::ball(Eigen::VectorXd::Zero(n), 0.5));
  const ind::ErrorBoundProbe probe = ind::error_bound_probe(p, 200, 1);
  ASSERT_FALSE(probe.dist.empty());
  for (std::size_t i = 0; i < probe.dist.size(); ++i) {
    EXPECT_NEAR(probe.dist[i], 0.5, 1e-14);
    EXPECT_LT(probe.grad_norm[i], 1e-14);
  }
  EXPECT_LT(probe.zeta_hat, 1e-13);
  EXPECT_THROW(ind::default_config(p, 1.0, 1.0, 1), ConfigurationError);
}

TEST(ErrorBoundProbe, FeasibleEverywhereIsInconclusive) {
  ConstrainedSphereOptions o;
  o.q = 0;
  o.identity_linear = true;
  const StochasticProblem p = make_constrained_sphere(5, 5, 10, NonsmoothTerm::ball(Eigen::VectorXd::Zero(5), 2.0), 3, o);
  EXPECT_THROW(ind::error_bound_probe(p, 50, 1), InsufficientDataError);
}

TEST(ErrorBoundProbe, PositiveConstantMatchesDirectComputation) {
  const StochasticProblem p = make_constrained_sphere(20, 5, 50, NonsmoothTerm::ball(Eigen::VectorXd::Zero(5), 0.3), 8);
  const ind::ErrorBoundProbe probe = ind::error_bound_probe(p, 200, 2);
  ASSERT_GE(probe.dist.size(), 10u);
  double direct = INFINITY;
  for (std::size_t i = 0; i < probe.dist.size(); ++i) direct = std::min(direct, probe.grad_norm[i] / probe.dist[i]);
  EXPECT_GT(probe.zeta_at(1.0), 0.0);
  EXPECT_DOUBLE_EQ(probe.zeta_at(1.0), direct);
  EXPECT_TRUE(std::isfinite(probe.zeta_at(1.0)));
  // the recorded gradient norms are the penalty gradient at points with that distance
  EXPECT_GT(probe.theta_fit, 0.0);
}

TEST(ErrorBoundProbe, ExponentStableAcrossSeeds) {
  const StochasticProblem p = make_constrained_sphere(20, 5, 50, NonsmoothTerm::ball(Eigen::VectorXd::Zero(5), 0.3), 8);
  const double a = ind::error_bound_probe(p, 200, 11).theta_fit;
  const double b = ind::error_bound_probe(p, 200, 12).theta_fit;
  EXPECT_LE(std::abs(a - b), 0.2 * std::max(std::abs(a), std::abs(b)));
}

TEST(DefaultConfig, UsesScaledConstants) {
  const StochasticProblem p = sphere_problem(9);
  const ind::DefaultConfigReport rep = ind::default_config(p, 1.0, 2.0, 9);
  EXPECT_NEAR(rep.config.c_tau, 1.0 / (2.0 * std::max(rep.L_g, rep.G)), 1e-15);
  EXPECT_NEAR(rep.config.c_a, ind::momentum_constant(rep.config.c_tau, rep.constants.L_tilde), 1e-15);
  EXPECT_EQ(rep.config.trunc_radius, rep.constants.L_f);
  EXPECT_GT(rep.config.zeta, 0.0);
  EXPECT_TRUE(ind::step_constant_admissible(rep.config, rep.constants));
  EXPECT_EQ(ind::default_config(p, 1.0, 2.0, 9, 0.7).config.zeta, 0.7);
}
