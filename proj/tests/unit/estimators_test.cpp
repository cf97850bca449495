#include "spdelab/estimators.hpp"

#include <gtest/gtest.h>

#include "spdelab/errors.hpp"
#include "spdelab/noise.hpp"
#include "spdelab/nonlin.hpp"
#include "test_support.hpp"

namespace spdelab {
namespace {

using testing::eval_direct;
using testing::random_field;

SpectralField cosine_mode(int K, int k, double amplitude = 1.0) {
  return SpectralField::generate(K, 1, [&](int m, int) {
    return m == k ? cplx(0.5 * amplitude * std::sqrt(kTwoPi)) : cplx{};
  });
}

TEST(ThetaTest, ConstantFieldIsZero) {
  const std::vector<double> v = {3.0};
  EXPECT_EQ(theta_eps(constant_field(5, v), Scheme::identity(1, 0), 0.1), 0.0);
}

TEST(ThetaTest, SingleModeClosedForm) {
  const int k = 5;
  const auto u = SpectralField::generate(8, 1, [k](int m, int) { return m == k ? cplx(0.6, -0.8) : cplx{}; });
  for (double eps : {0.3, 0.05}) {
    EXPECT_NEAR(theta_eps(u, Scheme::identity(1, 0), eps), 2.0 * (2.0 - 2.0 * std::cos(k * eps)) / (eps * eps),
                1e-10);
  }
}

TEST(ThetaTest, UndividedFormMatchesHatD) {
  const auto u = random_field(10, 2, 8);
  const auto s = Scheme::identity(2, 1);
  const double eps = 0.07;
  double via_hat = 0.0;
  for (const auto& a : s.mu()) {
    const double n = sobolev_norm(apply_hatD(u, eps * a.location), 0.0);
    via_hat += std::abs(a.weight) * a.location * a.location * n * n;
  }
  EXPECT_NEAR(theta_eps(u, s, eps), via_hat, 1e-12 * via_hat);
}

TEST(ThetaTest, StationaryScalingSlope) {
  // E Theta_eps(psi_tilde) grows like eps^{-1} for the finite-difference scheme.
  const auto s = Scheme::finite_difference(1, 0);
  std::vector<double> eps = {0.05, 0.025, 0.0125};
  std::vector<double> means;
  for (size_t e = 0; e < eps.size(); ++e) {
    const int K = static_cast<int>(std::ceil(kPi / eps[e]));
    double sum = 0.0;
    const int n = 20;
    for (int i = 0; i < n; ++i) {
      auto rng = derive_stream(4, static_cast<std::uint64_t>(i), "theta", e);
      const auto pair = sample_stationary_pair(s, eps[e], 1.0, K, 1, rng);
      sum += theta_eps(pair.psi_tilde, s, eps[e]);
    }
    means.push_back(sum / n);
  }
  const double slope = rate_fit(eps, means).slope;
  EXPECT_GE(slope, -1.2);
  EXPECT_LE(slope, -0.8);
}

TEST(XiTest, ConstantFieldIsZero) {
  const std::vector<double> v = {1.0, -2.0};
  const auto xi = xi_eps(constant_field(4, v), Scheme::finite_difference(1, 0), 0.1);
  ASSERT_EQ(xi.n, 2);
  for (const auto& e : xi.entries) EXPECT_LT(sobolev_norm(e, 0.0), 1e-14);
}

TEST(XiTest, SymmetricAndPointwise) {
  const auto u = random_field(6, 2, 3);
  const auto s = Scheme::identity(2, 1);
  const double eps = 0.2;
  const auto xi = xi_eps(u.resized(12), s, eps);
  EXPECT_LT(max_abs_diff(xi.at(0, 1), xi.at(1, 0)), 1e-15);
  for (double x : {0.5, 2.5}) {
    double expect = 0.0;
    for (const auto& a : s.mu()) {
      const double d0 = eval_direct(u, x + eps * a.location, 0) - eval_direct(u, x, 0);
      const double d1 = eval_direct(u, x + eps * a.location, 1) - eval_direct(u, x, 1);
      expect += a.weight / (2 * eps) * d0 * d1;
    }
    EXPECT_NEAR(eval_direct(xi.at(0, 1), x), expect, 1e-13);
  }
}

TEST(XiTest, SingleModeMeanClosedForm) {
  // cos(kx): mean of (u(x + eps y) - u(x))^2 is 1 - cos(k eps y).
  for (int k = 1; k <= 8; ++k) {
    const auto u = cosine_mode(8, k);
    for (const auto& s : {Scheme::identity(1, 0), Scheme::identity(2, 1), Scheme::identity(1, 1)}) {
      const double eps = 0.15;
      double expect = 0.0;
      for (const auto& a : s.mu()) expect += a.weight / (2 * eps) * (1.0 - std::cos(k * eps * a.location));
      EXPECT_NEAR(xi_eps(u, s, eps).mean(0, 0), expect, 1e-10) << k;
    }
  }
}

TEST(XiTest, SymmetricMeasureCancelsOnSingleMode) {
  // a = b: both atoms give the same d^2 mean with opposite weights.
  const auto xi = xi_eps(cosine_mode(6, 4), Scheme::identity(1.5, 1.5), 0.1);
  EXPECT_NEAR(xi.mean(0, 0), 0.0, 1e-13);
}

TEST(XiTest, AtomVersionIsUnitWeight) {
  const auto u = random_field(5, 1, 2);
  const auto s = Scheme("one", Symbol::one("identity"), Symbol::one(), {{2.0, 1.0}, {0.0, -1.0}}, 1.0);
  // Same as xi_eps with the y = 0 atom (which contributes nothing) and weight 1 at y = 2.
  EXPECT_LT(max_abs_diff(xi_eps_atom(u, 2.0, 0.1).at(0, 0), xi_eps(u, s, 0.1).at(0, 0)), 1e-15);
}

TEST(ChainRuleTest, DiscreteChainRuleHoldsForQuadraticG) {
  // D_eps G(u) - G'(u) D_eps u = sum_i w_i/(2 eps) G''(u)[d_i, d_i], exact for quadratic G.
  const int K = 12;
  const auto u = random_field(K, 2, 21).resized(2 * K);
  const PolynomialMap g({Polynomial::parse("0.5*u1^2 + u1*u2 - 2*u2", 2),
                         Polynomial::parse("0.3*u2^2 - u1 + 0.7*u1^2", 2)});
  for (const auto& s : {Scheme::identity(1, 0), Scheme::identity(2, 1), Scheme::finite_difference(3, 1)}) {
    const double eps = 0.09;
    const auto lhs = apply_D_eps(s, apply_pointwise(g, u, 2.0), eps) -
                     apply_bilinear(jacobian(g), u, apply_D_eps(s, u, eps), 2.0);
    const auto xi = xi_eps(u, s, eps);
    const auto jac = jacobian(g);
    const std::vector<double> origin = {0.0, 0.0};
    const auto rhs = SpectralField::generate(2 * K, 2, [&](int k, int i) {
      cplx acc{};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const double hess = jac[static_cast<size_t>(i)][static_cast<size_t>(a)].derivative(b).evaluate(origin);
          acc += hess * xi.at(a, b).coeff(k);
        }
      }
      return acc;
    });
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-10) << s.name();
  }
}

TEST(QuadraticVariationTest, ConstantIsZero) {
  const std::vector<double> v = {2.0};
  EXPECT_EQ(quadratic_variation(constant_field(3, v), 11)[0], 0.0);
}

TEST(QuadraticVariationTest, MatchesDirectGridSum) {
  const auto u = random_field(7, 2, 6);
  for (int M : {15, 40, 101}) {
    const auto qv = quadratic_variation(u, M);
    for (int c = 0; c < 2; ++c) {
      double direct = 0.0;
      for (int j = 0; j < M; ++j) {
        const double d = eval_direct(u, kTwoPi * (j + 1) / M, c) - eval_direct(u, kTwoPi * j / M, c);
        direct += d * d;
      }
      EXPECT_NEAR(qv[static_cast<size_t>(c)], direct, 1e-12);
    }
  }
}

TEST(QuadraticVariationTest, ExpectedQvDirectSum) {
  const double nu = 0.8;
  const int K = 50;
  const int M = 151;
  double direct = 0.0;
  for (int k = -K; k <= K; ++k) direct += (2 - 2 * std::cos(kTwoPi * k / M)) / (2 * (1 + nu * k * k));
  EXPECT_NEAR(expected_qv(nu, K, M), direct * M / kTwoPi, 1e-12);
}

TEST(QuadraticVariationTest, ExpectedQvIsMeanOfSamples) {
  // Monte-Carlo mean of the grid QV against the exact finite sum.
  const int K = 20;
  const int M = 61;
  auto rng = derive_stream(3, 0, "qv");
  const auto s = Scheme::identity(1, 0);
  const int n = 4000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = sample_stationary_pair(s, 0.1, 1.0, K, 1, rng);
    sum += quadratic_variation(p.psi, M)[0];
  }
  const double exact = expected_qv(1.0, K, M);
  EXPECT_NEAR(sum / n / exact, 1.0, 0.03);
}

TEST(QuadraticVariationTest, LimitIsPiOverNu) {
  EXPECT_NEAR(expected_qv(1.0, 8192, 2048) / kPi, 1.0, 0.03);
  EXPECT_NEAR(expected_qv(2.0, 8192, 2048) / (kPi / 2.0), 1.0, 0.03);
}

TEST(NegativeSobolevTest, ExactTargetAndMeanShift) {
  const int n = 3;
  const double c = 0.4;
  XiMatrixField a;
  a.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::vector<double> v = {i == j ? c : 0.0};
      a.entries.push_back(constant_field(4, v));
    }
  }
  EXPECT_NEAR(negative_sobolev_distance(a, c, 0.75), 0.0, 1e-15);
  const double delta = 0.01;
  EXPECT_NEAR(negative_sobolev_distance(a, c + delta, 0.75), delta * std::sqrt(kTwoPi) * std::sqrt(n), 1e-14);
}

TEST(NegativeSobolevTest, WeightsHighModesDown) {
  XiMatrixField a;
  a.n = 1;
  a.entries.push_back(cosine_mode(10, 9));
  // Two coefficients of modulus sqrt(2 pi)/2 at |k| = 9.
  const double expect = std::sqrt(2 * std::pow(0.5 * std::sqrt(kTwoPi), 2) * std::pow(82.0, -0.75));
  EXPECT_NEAR(negative_sobolev_distance(a, 0.0, 0.75), expect, 1e-14);
}

TEST(RateFitTest, ExactPowerLaws) {
  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  auto f1 = rate_fit(eps, eps);
  EXPECT_NEAR(f1.slope, 1.0, 1e-14);
  EXPECT_NEAR(f1.residual, 0.0, 1e-14);
  std::vector<double> half;
  for (double e : eps) half.push_back(3.0 * std::sqrt(e));
  const auto f2 = rate_fit(eps, half);
  EXPECT_NEAR(f2.slope, 0.5, 1e-14);
  EXPECT_NEAR(f2.intercept, std::log(3.0), 1e-13);
}

TEST(RateFitTest, NoisySlopeWithinWindow) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> eps;
  std::vector<double> err;
  for (int i = 0; i < 8; ++i) {
    eps.push_back(std::pow(2.0, -i));
    err.push_back(std::sqrt(eps.back()) * (1.0 + 0.05 * g(rng)));
  }
  const double slope = rate_fit(eps, err).slope;
  EXPECT_GE(slope, 0.4);
  EXPECT_LE(slope, 0.6);
}

TEST(RateFitTest, DegenerateInput) {
  EXPECT_THROW(rate_fit({0.1, 0.2}, {1, 2}), ValidationError);
  EXPECT_THROW(rate_fit({0.1, 0.2, 0.3}, {1, -2, 3}), ValidationError);
  EXPECT_THROW(rate_fit({0.1, 0.1, 0.1}, {1, 2, 3}), ValidationError);
}

}  // namespace
}  // namespace spdelab
