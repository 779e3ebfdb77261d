#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "catalogue.hpp"
#include "gradreg/instances.hpp"
#include "gradreg/methods.hpp"
#include "gradreg/subsolver.hpp"

namespace gradreg {
namespace {

using testing::random_feasible_point;
using testing::random_vector;

CompositeProblem half_square(Index n, double b = 0.0, CompositePart simple = CompositePart::zero()) {
  return make_quadratic(HessianView::dense(Matrix::Identity(n, n)),
                        DualVector(Vector::Constant(n, b)), std::move(simple));
}

TEST(RegularizationParameter, ZeroGradientGivesZero) {
  EXPECT_EQ(regularization_parameter(0.0, 5.0, 0.7), 0.0);
}

TEST(RegularizationParameter, UnitExample) {
  EXPECT_DOUBLE_EQ(regularization_parameter(1.0, 3.0, 1.0), 1.0);
}

TEST(RegularizationParameter, ScaledExample) {
  EXPECT_DOUBLE_EQ(regularization_parameter(2.0, 6.0, 0.5), 4.0);
}

TEST(RegularizationParameter, RejectsInvalidArguments) {
  EXPECT_THROW(regularization_parameter(1.0, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(regularization_parameter(-1.0, 1.0, 1.0), InvalidInput);
  EXPECT_THROW(regularization_parameter(1.0, 1.0, 1.5), InvalidInput);
}

TEST(SmoothStep, StationaryPointIsFixed) {
  const auto p = half_square(2);
  const auto s = solve_step_smooth(p, PrimalVector::zero(2), 1.0);
  EXPECT_EQ(s.point.vec().norm(), 0.0);
  EXPECT_EQ(s.selected_subgradient.vec().norm(), 0.0);
}

TEST(SmoothStep, OneDimensionalShiftedSolve) {
  const auto p = half_square(1);
  const auto s = solve_step_smooth(p, PrimalVector{1.0}, 1.0);
  EXPECT_NEAR(s.point[0], 0.5, 1e-15);
  EXPECT_NEAR(s.selected_subgradient[0], 0.5, 1e-15);
  EXPECT_NEAR(s.step_norm, 0.5, 1e-15);
}

TEST(SmoothStep, TwoDimensionalShiftedSolve) {
  const auto p = half_square(2);
  const auto s = solve_step_smooth(p, PrimalVector{2.0, 0.0}, 3.0);
  // T = x - (I + 3I)^{-1} x: a step of length 2/4 towards the origin.
  EXPECT_NEAR(s.point[0], 1.5, 1e-15);
  EXPECT_NEAR(s.point[1], 0.0, 1e-15);
  EXPECT_NEAR(s.step_norm, 0.5, 1e-15);
}

TEST(SmoothStep, ModelValueDoesNotExceedObjective) {
  const auto inst = testing::logistic(60, 6, 1e-2, 4);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const PrimalVector x(random_vector(rng, 6, 2.0));
    const auto s = solve_step_smooth(inst.problem, x, 0.3);
    const double F = inst.problem.F(x);
    EXPECT_LE(s.model_value, F + 1e-10 * (1.0 + std::abs(F)));
  }
}

TEST(SmoothStep, CgReportsNonConvergence) {
  const auto inst = testing::logistic(60, 20, 0.0, 4);
  InnerSolverConfig cfg;
  cfg.linear = LinearSolveMode::cg;
  cfg.cg_max_iterations = 1;
  cfg.cg_tolerance = 1e-14;
  EXPECT_THROW(solve_step_smooth(inst.problem, PrimalVector(Vector::Ones(20)), 1e-3, cfg), NumericError);
}

TEST(CompositeStep, ZeroPartMatchesSmoothStep) {
  const auto inst = testing::log_sum_exp();
  const PrimalVector x = inst.x0;
  const double A = 0.8;
  const auto a = solve_step_smooth(inst.problem, x, A);
  InnerSolverConfig cfg;
  cfg.abs_tolerance = 1e-13;
  cfg.rel_tolerance = 1e-13;
  const auto b = solve_step_composite(inst.problem, x, A, cfg);
  EXPECT_LE((a.point - b.point).vec().norm(), 1e-10);
  EXPECT_LE((a.selected_subgradient - b.selected_subgradient).vec().norm(), 1e-9);
}

TEST(CompositeStep, L1Example) {
  // f = 1/2 (x - 3)^2 up to a constant, psi = |x|, from x = 0 with A = 1.
  const auto p = half_square(1, 3.0, CompositePart::l1(1.0));
  const auto s = solve_step_composite(p, PrimalVector{0.0}, 1.0);
  EXPECT_NEAR(s.point[0], 1.0, 1e-9);
  EXPECT_NEAR(s.selected_subgradient[0], -1.0, 1e-9);
  EXPECT_TRUE(s.certified);
}

TEST(CompositeStep, ActiveBoxConstraint) {
  // f = 1/2 (x + 1)^2, psi = indicator of [0, inf), from x = 0 with A = 1.
  const auto p = half_square(1, -1.0,
                             CompositePart::box(Vector::Zero(1),
                                                Vector::Constant(1, std::numeric_limits<double>::infinity())));
  const auto s = solve_step_composite(p, PrimalVector{0.0}, 1.0);
  EXPECT_NEAR(s.point[0], 0.0, 1e-12);
  for (double y : {0.0, 0.5, 3.0}) {
    EXPECT_GE(s.selected_subgradient[0] * (y - s.point[0]), -1e-10);
  }
}

TEST(CompositeStep, IterationCapFlagsStepAsUncertified) {
  const auto inst = testing::l1_quadratic(10, 0.5, 3);
  InnerSolverConfig cfg;
  cfg.max_iterations = 2;
  cfg.abs_tolerance = 1e-15;
  cfg.rel_tolerance = 1e-15;
  const auto s = solve_step_composite(inst.problem, inst.x0, 0.5, cfg);
  EXPECT_FALSE(s.certified);
  EXPECT_FALSE(s.warning.empty());
}

TEST(CompositeStep, ZeroRegularizationReturnsTheSamePoint) {
  const auto inst = testing::l1_quadratic();
  const auto s = solve_step(inst.problem, inst.x0, 0.0);
  EXPECT_TRUE(s.converged);
  EXPECT_EQ((s.point - inst.x0).vec().norm(), 0.0);
}

TEST(SelectSubgradient, VanishesWhenTheStepIsZero) {
  const auto inst = testing::logistic(30, 4, 0.1, 2);
  const PrimalVector x{0.3, -0.2, 1.0, 0.0};
  EXPECT_EQ(select_subgradient(inst.problem, x, x, 0.7).vec().norm(), 0.0);
}

TEST(SelectSubgradient, QuadraticReducesToScaledStep) {
  Matrix Q(2, 2);
  Q << 3, 1, 1, 2;
  const auto p = make_quadratic(HessianView::dense(Q), DualVector{1.0, -1.0});
  const PrimalVector x{1.0, 2.0};
  const PrimalVector T{0.25, -0.5};
  const DualVector g = select_subgradient(p, x, T, 1.7);
  EXPECT_NEAR(g[0], -1.7 * (T[0] - x[0]), 1e-14);
  EXPECT_NEAR(g[1], -1.7 * (T[1] - x[1]), 1e-14);
}

TEST(SelectSubgradient, L1Example) {
  const auto p = half_square(1, 3.0, CompositePart::l1(1.0));
  EXPECT_NEAR(select_subgradient(p, PrimalVector{0.0}, PrimalVector{1.0}, 1.0)[0], -1.0, 1e-15);
}

TEST(ModelLowerBound, HoldsWithEqualityAtTheStep) {
  const auto p = half_square(1);
  const auto s = solve_step(p, PrimalVector{1.0}, 1.0);
  EXPECT_TRUE(model_lower_bound_check(s, p, PrimalVector{1.0}, 1.0, s.point));
}

TEST(ModelLowerBound, StrictGapAtTheBasePoint) {
  const auto p = half_square(1);
  const PrimalVector x{1.0};
  const auto s = solve_step(p, x, 1.0);
  // M(x, x) = F(x) = 0.5 versus M(x, T) + 1/2 (1 + 1) (x - T)^2 = 0.25 + 0.25.
  EXPECT_NEAR(model_value(p, x, 1.0, x), 0.5, 1e-15);
  EXPECT_NEAR(s.model_value + 0.5 * 2.0 * 0.25, 0.5, 1e-15);
  EXPECT_TRUE(model_lower_bound_check(s, p, x, 1.0, x));
}

TEST(ModelLowerBound, FailsForAWrongStep) {
  const auto p = half_square(1);
  StepResult fake = solve_step(p, PrimalVector{1.0}, 1.0);
  fake.point = PrimalVector{0.9};
  fake.model_value = model_value(p, PrimalVector{1.0}, 1.0, fake.point);
  EXPECT_FALSE(model_lower_bound_check(fake, p, PrimalVector{1.0}, 1.0, PrimalVector{0.5}));
}

// ---------------------------------------------------------------- step properties

class StepProperties : public ::testing::TestWithParam<int> {
 protected:
  static const std::vector<testing::Instance>& instances() {
    static const std::vector<testing::Instance> all = [] {
      std::vector<testing::Instance> v;
      v.push_back(testing::logistic(120, 10, 1e-2, 11));
      v.push_back(testing::log_sum_exp());
      v.push_back(testing::l1_quadratic());
      v.push_back(testing::box_quadratic());
      v.push_back(testing::cubic_uc(3, 1.0));
      v.push_back(testing::smoothed_chain(8, 0.1));
      v.push_back(testing::scaled_logistic());
      return v;
    }();
    return all;
  }
};

TEST_P(StepProperties, SingleStepInequalities) {
  const auto& inst = instances()[GetParam()];
  const auto& p = inst.problem;
  const double sigma = p.sigma();
  const double L2 = p.lips_hessian();
  const double H = optimal_H(L2, sigma);
  const double c = 1.0 / sigma + 1.5 * L2 / H;
  std::mt19937_64 rng(400 + GetParam());
  for (int t = 0; t < 40; ++t) {
    PrimalVector x = random_feasible_point(rng, p, inst.x0, inst.radius / 2);
    if (p.simple.is_indicator()) x = 0.9 * x;  // interior start
    const DualVector gx = stationarity_subgradient(p, x);
    const double g = p.norms.dual(gx);
    const double A = regularization_parameter(g, H, sigma);
    InnerSolverConfig cfg;
    cfg.abs_tolerance = 1e-13;
    cfg.rel_tolerance = 1e-12;
    cfg.max_iterations = 100000;
    const auto s = solve_step(p, x, A, cfg);
    ASSERT_TRUE(s.certified) << inst.name;
    const double r = s.step_norm;
    const double g1 = p.norms.dual(s.selected_subgradient);
    const double res = s.inner_residual / (sigma * A);

    EXPECT_LE(r, g / (sigma * A) * (1.0 + 1e-8) + res) << inst.name;
    EXPECT_LE(H * r, 3.0 * sigma * A * (1.0 + 1e-8) + H * res) << inst.name;
    EXPECT_LE(g1, sigma * A * c * r * (1.0 + 1e-6) + s.inner_residual + 1e-12) << inst.name;
    EXPECT_LE(g1, c * g * (1.0 + 1e-6) + s.inner_residual + 1e-12) << inst.name;
    EXPECT_TRUE(acceptance_test(p, x, s.point, H)) << inst.name;
    const double Fx = p.F(x);
    const double FT = p.F(s.point);
    EXPECT_GE(Fx - FT, 0.5 * s.curvature + 0.5 * sigma * A * r * r -
                           1e-8 * (1.0 + std::abs(Fx)) - s.inner_residual * r)
        << inst.name;
    EXPECT_LE(s.model_value, Fx + 1e-10 * (1.0 + std::abs(Fx))) << inst.name;
    for (int j = 0; j < 5; ++j) {
      const PrimalVector y = random_feasible_point(rng, p, x, inst.radius / 2);
      EXPECT_TRUE(model_lower_bound_check(s, p, x, A, y)) << inst.name;
    }
  }
}

TEST_P(StepProperties, SelectedSubgradientSupportsTheObjective) {
  const auto& inst = instances()[GetParam()];
  const auto& p = inst.problem;
  std::mt19937_64 rng(500 + GetParam());
  const double H = optimal_H(p.lips_hessian(), p.sigma());
  PrimalVector x = inst.x0;
  for (int t = 0; t < 5; ++t) {
    const double g = p.norms.dual(stationarity_subgradient(p, x));
    const auto s = solve_step(p, x, regularization_parameter(g, H, p.sigma()));
    const double FT = p.F(s.point);
    for (int j = 0; j < 50; ++j) {
      const PrimalVector y = random_feasible_point(rng, p, s.point, inst.radius / 2);
      EXPECT_GE(p.F(y), FT + pairing(s.selected_subgradient, y - s.point) -
                            1e-8 * (1.0 + std::abs(FT)) -
                            s.inner_residual * (y - s.point).vec().norm())
          << inst.name;
    }
    x = s.point;
  }
}

INSTANTIATE_TEST_SUITE_P(Catalogue, StepProperties, ::testing::Range(0, 7));

TEST(DirectVersusCg, AgreeWithinTenTimesTheCgTolerance) {
  std::mt19937_64 rng(9);
  for (const auto& inst : {testing::logistic(200, 30, 1e-3, 6), testing::log_sum_exp(),
                           testing::smoothed_chain(20, 0.1), testing::scaled_logistic()}) {
    const auto& p = inst.problem;
    for (int t = 0; t < 10; ++t) {
      const PrimalVector x = random_feasible_point(rng, p, inst.x0, inst.radius / 4);
      const double g = p.norms.dual(p.smooth.gradient(x));
      const double A = regularization_parameter(g, optimal_H(p.lips_hessian(), p.sigma()), p.sigma());
      InnerSolverConfig direct;
      InnerSolverConfig cg;
      cg.linear = LinearSolveMode::cg;
      cg.cg_tolerance = 1e-10;
      const auto a = solve_step_smooth(p, x, A, direct);
      const auto b = solve_step_smooth(p, x, A, cg);
      EXPECT_LE((a.point - b.point).vec().norm(), 10.0 * cg.cg_tolerance * (1.0 + a.point.vec().norm()))
          << inst.name;
    }
  }
}

}  // namespace
}  // namespace gradreg
