#include "spdelab/integrator.hpp"

#include <gtest/gtest.h>

#include "spdelab/errors.hpp"
#include "test_support.hpp"

namespace spdelab {
namespace {

using testing::eval_direct;
using testing::random_field;

SimConfig small_config() {
  SimConfig c;
  c.max_mode = 16;
  c.dt = 1e-3;
  c.horizon = 0.05;
  c.sample_interval = 0.01;
  c.eps = 0.125;
  c.scheme = Scheme::identity(1, 0);
  c.F = PolynomialMap::zero(1);
  c.G = PolynomialMap({Polynomial::parse("0.5*u1^2", 1)});
  c.lambda_mode = LambdaMode::closed_form;
  c.seed = 77;
  return c;
}

TEST(InitialSpecTest, ParseAndBuild) {
  const auto spec = InitialSpec::parse("cos 1 0.5; sin 2 0.25; const 0.1", 0);
  ASSERT_EQ(spec.terms.size(), 3u);
  const auto u = spec.build(4, 1);
  for (double x : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR(eval_direct(u, x), 0.5 * std::cos(x) + 0.25 * std::sin(2 * x) + 0.1, 1e-15);
  }
  EXPECT_TRUE(InitialSpec::parse("0", 0).terms.empty());
  EXPECT_THROW(InitialSpec::parse("tan 1 2", 0), ValidationError);
  EXPECT_THROW(InitialSpec::parse("cos 0 1", 0), ValidationError);
  EXPECT_THROW(InitialSpec::parse("cos 9 1", 0).build(4, 1), ValidationError);
}

TEST(SimConfigTest, StepCounts) {
  auto c = small_config();
  EXPECT_EQ(c.base_steps(), 50);
  EXPECT_EQ(c.base_steps_per_sample(), 10);
  c.refine_level = 2;
  EXPECT_DOUBLE_EQ(c.step_size(), 2.5e-4);
  EXPECT_NO_THROW(c.validate());
}

TEST(SimConfigTest, ValidationFailures) {
  auto bad = [](auto mutate) {
    auto c = small_config();
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](SimConfig& c) { c.nu = 0; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SimConfig& c) { c.horizon = 0.0505; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SimConfig& c) { c.sample_interval = 0.02; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SimConfig& c) { c.components = 2; }).validate(), ValidationError);
  EXPECT_THROW(bad([](SimConfig& c) { c.refine_level = 20; }).validate(), ValidationError);
}

TEST(ResolveLambdaTest, Modes) {
  auto c = small_config();
  EXPECT_DOUBLE_EQ(resolve_lambda(c).value, 0.25);
  c.lambda_mode = LambdaMode::quadrature;
  EXPECT_NEAR(resolve_lambda(c).value, 0.25, 1e-10);
  c.lambda_mode = LambdaMode::zero;
  EXPECT_EQ(resolve_lambda(c).value, 0.0);
  c.lambda_mode = LambdaMode::explicit_value;
  c.lambda_value = 0.3;
  EXPECT_EQ(resolve_lambda(c).value, 0.3);
  EXPECT_NEAR(closed_form_for(Scheme::galerkin(2, 1), 1.0).value,
              lambda_quadrature(Scheme::galerkin(2, 1), 1.0, 1e-10).value, 1e-9);
  const Scheme custom("t", Symbol::table("f", {0, 1}, {1, 1}, 1), Symbol::one(), asymmetric_measure(1, 0), 1);
  EXPECT_THROW(closed_form_for(custom, 1.0), ValidationError);
}

TEST(StepperTest, HeatDecayIsExact) {
  auto c = small_config();
  c.G = PolynomialMap::zero(1);
  const auto u0 = random_field(16, 1, 3);
  const Stepper s(c, Variant::limit_uncorrected, 0.0);
  const SpectralField zero(16, 1);
  SpectralField u = u0;
  for (int i = 0; i < 50; ++i) u = s.step(u, zero);
  const double T = 50 * c.dt;
  for (int k = 0; k <= 16; ++k) {
    EXPECT_NEAR(std::abs(u.coeff(k) - std::exp(-c.nu * k * k * T) * u0.coeff(k)), 0.0, 1e-12);
  }
}

TEST(StepperTest, ConstantForcingGrowsMeanMode) {
  auto c = small_config();
  c.G = PolynomialMap::zero(1);
  c.F = PolynomialMap({Polynomial::parse("2.5", 1)});
  const Stepper s(c, Variant::limit_corrected, 0.25);
  const SpectralField zero(16, 1);
  SpectralField u(16, 1);
  for (int i = 1; i <= 5; ++i) {
    u = s.step(u, zero);
    EXPECT_NEAR(u.coeff(0).real(), i * 2.5 * std::sqrt(kTwoPi) * c.dt, 1e-13);
  }
}

TEST(StepperTest, LinearDriftMatchesScalarOde) {
  auto c = small_config();
  c.G = PolynomialMap::zero(1);
  c.F = PolynomialMap({Polynomial::parse("-u1", 1)});
  c.nu = 0.7;
  const Stepper s(c, Variant::limit_uncorrected, 0.0);
  const SpectralField zero(16, 1);
  const auto u0 = InitialSpec::parse("cos 3 1", 0).build(16, 1);
  SpectralField u = u0;
  for (int i = 0; i < 100; ++i) u = s.step(u, zero);
  const double exact = std::exp(-(c.nu * 9 + 1.0) * 0.1) * u0.coeff(3).real();
  EXPECT_NEAR(u.coeff(3).real() / exact, 1.0, 1e-3);
}

TEST(StepperTest, NoiseVarianceIsExactOuIncrement) {
  // Starting from 0 with F = G = 0, one step gives q dW whose variance must
  // equal the exact OU variance (1 - e^{-2 l dt}) / (2 l).
  auto c = small_config();
  c.G = PolynomialMap::zero(1);
  c.dt = 0.01;
  c.horizon = 0.05;
  const Stepper s(c, Variant::limit_uncorrected, 0.0);
  auto rng = derive_stream(1, 0, "t");
  const auto dw = wiener_increment(16, 1, c.dt, rng);
  const auto u = s.step(SpectralField(16, 1), dw);
  for (int k : {1, 4, 16}) {
    const double l = c.nu * k * k;
    const double expect_sd = std::sqrt(-std::expm1(-2 * l * c.dt) / (2 * l));
    EXPECT_NEAR(std::abs(u.coeff(k)) / std::abs(dw.coeff(k)), expect_sd / std::sqrt(c.dt), 1e-14);
  }
  EXPECT_EQ(u.coeff(0), dw.coeff(0));
}

TEST(StepperTest, InfiniteSymbolModesAreZeroed) {
  auto c = small_config();
  c.scheme = Scheme::finite_difference(1, 0);
  c.eps = 0.25;  // eps k >= pi from k = 13
  const Stepper s(c, Variant::approximate, 0.0);
  auto rng = derive_stream(2, 0, "t");
  const auto u = s.step(random_field(16, 1, 1), wiener_increment(16, 1, c.dt, rng));
  for (int k = 13; k <= 16; ++k) EXPECT_EQ(u.coeff(k), cplx{});
  EXPECT_NE(u.coeff(12), cplx{});
}

TEST(StepperTest, ApproximateNonlinearityIsChainRuleForm) {
  auto c = small_config();
  c.scheme = Scheme::identity(2, 1);
  c.G = PolynomialMap({Polynomial::parse("0.5*u1^2 + u1^3", 1)});
  c.F = PolynomialMap({Polynomial::parse("0.2*u1", 1)});
  const auto u = random_field(16, 1, 4);
  const auto got = Stepper(c, Variant::approximate, 0.0).nonlinearity(u);
  const auto expect = apply_pointwise(c.F, u, c.pad) +
                      apply_bilinear(jacobian(c.G), u, apply_D_eps(c.scheme, u, c.eps), c.pad);
  EXPECT_LT(max_abs_diff(got, expect), 1e-12);
}

TEST(StepperTest, LimitNonlinearityIsConservativeForm) {
  auto c = small_config();
  const auto u = random_field(16, 1, 5);
  const double lambda = 0.25;
  const auto got = Stepper(c, Variant::limit_corrected, lambda).nonlinearity(u);
  const auto ddx = [](int k) { return cplx(0.0, k); };
  // F~ = F - lambda * G'' = -0.25 (a constant).
  const auto expect = apply_pointwise(corrected_drift(c.F, c.G, lambda), u, c.pad) +
                      apply_pointwise(c.G, u, c.pad).multiply(ddx);
  EXPECT_LT(max_abs_diff(got, expect), 1e-12);
  EXPECT_NEAR(expect.coeff(0).real() - apply_pointwise(c.G, u, c.pad).multiply(ddx).coeff(0).real(),
              -0.25 * std::sqrt(kTwoPi), 1e-13);
}

TEST(StepperTest, ShapeMismatchThrows) {
  const Stepper s(small_config(), Variant::approximate, 0.0);
  EXPECT_THROW(s.step(SpectralField(8, 1), SpectralField(16, 1)), ResolutionError);
  EXPECT_THROW(s.step(SpectralField(16, 1), SpectralField(8, 1)), ResolutionError);
}

TEST(RunVariantTest, SamplesAtRequestedTimes) {
  const auto c = small_config();
  std::vector<double> times;
  run_variant(c, Variant::limit_corrected, 0.25, SpectralField(16, 1), 0,
              [&](int i, double t, const SpectralField&) {
                EXPECT_EQ(static_cast<size_t>(i), times.size());
                times.push_back(t);
              });
  ASSERT_EQ(times.size(), 6u);
  EXPECT_DOUBLE_EQ(times.back(), 0.05);
}

TEST(RunVariantTest, RefinedPathConverges) {
  // Same Wiener path at dt and dt/4: the states at T agree to O(dt).
  auto c = small_config();
  c.horizon = 0.02;
  c.sample_interval = 0.02;
  const auto u0 = InitialSpec::parse("cos 1 0.5", 0).build(16, 1);
  auto final_state = [&](int level) {
    SimConfig local = c;
    local.refine_level = level;
    SpectralField out;
    run_variant(local, Variant::limit_uncorrected, 0.0, u0, 3,
                [&](int, double, const SpectralField& u) { out = u; });
    return out;
  };
  const auto a = final_state(0);
  const auto b = final_state(2);
  const auto d = final_state(4);
  EXPECT_LT(sup_norm(b - d), sup_norm(a - d));
  EXPECT_LT(sup_norm(a - d), 0.05 * sup_norm(d));
}

TEST(RunVariantTest, BlowUpReportsTime) {
  auto c = small_config();
  c.F = PolynomialMap({Polynomial::parse("u1^2", 1)});
  c.G = PolynomialMap::zero(1);
  c.horizon = 1.0;
  c.sample_interval = 0.5;
  const auto u0 = InitialSpec::parse("const 100", 0).build(16, 1);
  try {
    run_variant(c, Variant::limit_uncorrected, 0.0, u0, 0, [](int, double, const SpectralField&) {});
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.last_valid_time(), 0.0);
    EXPECT_LT(e.last_valid_time(), 0.1);
  }
}

TEST(MeanStderrTest, KnownValues) {
  const auto r = mean_stderr({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_NEAR(r.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(r.n, 4);
  EXPECT_EQ(mean_stderr({}).n, 0);
}

TEST(ParallelForTest, VisitsEveryIndexAndRethrows) {
  std::vector<int> hits(50, 0);
  parallel_for(50, 4, [&](int i) { hits[static_cast<size_t>(i)]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](int i) { if (i == 7) throw ValidationError("x"); }),
               ValidationError);
}

TEST(RunCoupledTest, IdentitySchemeWithoutFluxHasZeroError) {
  auto c = small_config();
  c.G = PolynomialMap::zero(1);
  const auto r = run_coupled(c, {0.25, 0.125}, 2, 1);
  for (size_t e = 0; e < 2; ++e) {
    for (const auto& rec : r.records[e]) {
      for (size_t i = 0; i < rec.times.size(); ++i) {
        EXPECT_EQ(rec.sup_err_corrected[i], 0.0);
        EXPECT_EQ(rec.sup_err_uncorrected[i], 0.0);
      }
    }
  }
}

TEST(RunCoupledTest, ZeroLambdaMakesColumnsIdentical) {
  auto c = small_config();
  c.lambda_mode = LambdaMode::zero;
  const auto r = run_coupled(c, {0.125}, 2, 1);
  for (const auto& rec : r.records[0]) {
    EXPECT_EQ(rec.sup_err_corrected, rec.sup_err_uncorrected);
    EXPECT_EQ(rec.halpha_err_corrected, rec.halpha_err_uncorrected);
  }
}

TEST(RunCoupledTest, InitialErrorVanishesForIdentityScheme) {
  const auto r = run_coupled(small_config(), {0.125}, 2, 1);
  EXPECT_EQ(r.times.size(), 6u);
  for (const auto& rec : r.records[0]) {
    EXPECT_EQ(rec.sup_err_corrected[0], 0.0);
    EXPECT_EQ(rec.initial_sup_diff, 0.0);
    EXPECT_GT(rec.sup_err_corrected.back(), 0.0);
  }
  EXPECT_EQ(r.valid_count(0), 2);
  EXPECT_EQ(r.limit_qv.size(), 2u);
  EXPECT_GT(r.limit_qv[0], 0.0);
}

TEST(RunCoupledTest, WorkerCountDoesNotChangeResults) {
  auto c = small_config();
  c.scheme = Scheme::finite_difference(1, 0);
  const auto a = run_coupled(c, {0.25, 0.125}, 3, 1);
  const auto b = run_coupled(c, {0.25, 0.125}, 3, 4);
  for (size_t e = 0; e < 2; ++e) {
    for (size_t r = 0; r < 3; ++r) {
      EXPECT_EQ(a.records[e][r].sup_err_corrected, b.records[e][r].sup_err_corrected);
      EXPECT_EQ(a.records[e][r].halpha_err_uncorrected, b.records[e][r].halpha_err_uncorrected);
      EXPECT_EQ(a.records[e][r].initial_sup_diff, b.records[e][r].initial_sup_diff);
    }
  }
  EXPECT_EQ(a.limit_qv, b.limit_qv);
}

TEST(RunCoupledTest, BlowUpIsFlaggedAndExcluded) {
  auto c = small_config();
  c.F = PolynomialMap({Polynomial::parse("u1^2", 1)});
  c.v0 = InitialSpec::parse("const 100", 0);
  const auto r = run_coupled(c, {0.125}, 2, 1);
  EXPECT_EQ(r.valid_count(0), 0);
  EXPECT_TRUE(r.records[0][0].blew_up);
  EXPECT_FALSE(r.records[0][0].blow_up_variant.empty());
  EXPECT_EQ(r.final_column(0, &TrajectoryRecord::sup_err_corrected).n, 0);
}

}  // namespace
}  // namespace spdelab
