#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "catalogue.hpp"
#include "gradreg/vector.hpp"

namespace gradreg {
namespace {

using testing::random_vector;

TEST(DualNorm, ZeroVectorHasZeroNorm) {
  EXPECT_EQ(dual_norm(DualVector::zero(4), NormPair::euclidean(4)), 0.0);
}

TEST(DualNorm, EuclideanThreeFour) {
  EXPECT_DOUBLE_EQ(dual_norm(DualVector{3.0, 4.0}, NormPair::euclidean(2)), 5.0);
}

TEST(DualNorm, WeightedPairMatchesClosedForm) {
  const NormPair norms = NormPair::weighted(Vector{{1.0, 0.5}});
  EXPECT_NEAR(dual_norm(DualVector{1.0, 1.0}, norms), std::sqrt(3.0), 1e-15);
}

TEST(DualNorm, WeightedPairMatchesGridMaximization) {
  // max <g, x> over the weighted unit ball, by brute force over its boundary.
  const Vector w{{1.0, 0.5}};
  const NormPair norms = NormPair::weighted(w);
  const DualVector g{1.0, 1.0};
  double best = 0.0;
  const int steps = 200000;
  for (int i = 0; i < steps; ++i) {
    const double t = 2.0 * M_PI * i / steps;
    const PrimalVector x{std::cos(t) / std::sqrt(w(0)), std::sin(t) / std::sqrt(w(1))};
    best = std::max(best, pairing(g, x));
  }
  EXPECT_NEAR(dual_norm(g, norms), best, 1e-8);
}

TEST(DualNorm, RejectsNonFiniteInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dual_norm(DualVector{1.0, nan}, NormPair::euclidean(2)), InvalidInput);
}

TEST(ApplyHessian, Identity) {
  const auto B = HessianView::dense(Matrix::Identity(2, 2));
  const DualVector r = apply_hessian(B, PrimalVector{2.0, -1.0});
  EXPECT_EQ(r[0], 2.0);
  EXPECT_EQ(r[1], -1.0);
}

TEST(ApplyHessian, Diagonal) {
  const auto B = HessianView::dense(Vector{{2.0, 3.0}}.asDiagonal());
  const DualVector r = apply_hessian(B, PrimalVector{1.0, 1.0});
  EXPECT_EQ(r[0], 2.0);
  EXPECT_EQ(r[1], 3.0);
}

TEST(ApplyHessian, DenseProduct) {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  const DualVector r = apply_hessian(HessianView::dense(m), PrimalVector{1.0, 0.0});
  EXPECT_EQ(r[0], 2.0);
  EXPECT_EQ(r[1], 1.0);
}

TEST(ApplyHessian, DimensionMismatchIsRejected) {
  const auto B = HessianView::dense(Matrix::Identity(3, 3));
  EXPECT_THROW(apply_hessian(B, PrimalVector{1.0, 2.0}), InvalidInput);
}

TEST(ApplyHessian, OperatorFormMaterializes) {
  Matrix m(2, 2);
  m << 4, -1, -1, 3;
  const auto B = HessianView::op(2, [m](const Vector& h) { return Vector(m * h); });
  EXPECT_TRUE(B.to_dense().isApprox(m));
  EXPECT_FALSE(B.has_dense());
}

class NormProperties : public ::testing::TestWithParam<int> {};

TEST_P(NormProperties, AxiomsAndDualityOnRandomSamples) {
  std::mt19937_64 rng(100 + GetParam());
  const Index n = 5;
  Vector w = Vector::Ones(n);
  if (GetParam() == 1) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (Index i = 0; i < n; ++i) w(i) = u(rng);
  }
  const NormPair norms = GetParam() == 0 ? NormPair::euclidean(n) : NormPair::weighted(w);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int t = 0; t < 500; ++t) {
    const PrimalVector x(random_vector(rng, n, 2.0));
    const PrimalVector y(random_vector(rng, n, 2.0));
    const DualVector g(random_vector(rng, n, 2.0));
    const double a = normal(rng);
    EXPECT_NEAR(norms.primal(a * x), std::abs(a) * norms.primal(x), 1e-12 * norms.primal(a * x) + 1e-300);
    EXPECT_LE(norms.primal(x + y), norms.primal(x) + norms.primal(y) + 1e-12);
    EXPECT_LE(std::abs(pairing(g, x)), norms.dual(g) * norms.primal(x) * (1.0 + 1e-12));
    EXPECT_NEAR(norms.dual(a * g), std::abs(a) * norms.dual(g), 1e-12 * norms.dual(a * g) + 1e-300);
  }
  EXPECT_EQ(norms.primal(PrimalVector::zero(n)), 0.0);
}

INSTANTIATE_TEST_SUITE_P(EuclideanAndWeighted, NormProperties, ::testing::Values(0, 1));

TEST(HessianProperties, SymmetryAndDenseOperatorAgreementOnInstances) {
  std::mt19937_64 rng(7);
  for (const auto& inst : {testing::logistic(80, 8, 1e-2, 9), testing::log_sum_exp(),
                           testing::cubic_uc(4, 1.0, 1.0), testing::smoothed_chain(8)}) {
    const Index n = inst.problem.dim();
    const PrimalVector x(random_vector(rng, n));
    const HessianView B = inst.problem.smooth.hessian(x);
    const Matrix dense = B.to_dense();
    const auto op = HessianView::op(n, [dense](const Vector& h) { return Vector(dense * h); });
    for (int t = 0; t < 100; ++t) {
      const PrimalVector h1(random_vector(rng, n));
      const PrimalVector h2(random_vector(rng, n));
      const double a = pairing(B.apply(h1), h2);
      const double b = pairing(B.apply(h2), h1);
      EXPECT_NEAR(a, b, 1e-10 * (std::abs(a) + std::abs(b) + 1e-12)) << inst.name;
      EXPECT_LE((B.apply(h1) - op.apply_operator(h1)).vec().norm(), 1e-10 * (1.0 + h1.vec().norm()));
      EXPECT_GE(pairing(B.apply(h1), h1), -1e-12 * h1.vec().squaredNorm()) << inst.name;
    }
  }
}

TEST(TaggedVector, ArithmeticStaysWithinRole) {
  PrimalVector x{1.0, 2.0};
  const PrimalVector y{0.5, -1.0};
  x += y;
  EXPECT_EQ(x[0], 1.5);
  EXPECT_EQ((2.0 * y)[1], -2.0);
  EXPECT_EQ(pairing(DualVector{1.0, 1.0}, y), -0.5);
}

}  // namespace
}  // namespace gradreg
