#pragma once

#include <cstdint>
#include <optional>

#include "gradreg/dataset.hpp"
#include "gradreg/problem.hpp"

namespace gradreg {

// ---------------------------------------------------------------------------
// Smooth functions

/// f(x) = sum_i log(1 + exp(-b_i <a_i, x>)) + mu/2 ||x||^2.
class LogisticLoss final : public SmoothFunction {
 public:
  LogisticLoss(LabeledDataset data, double ridge_mu);
  Index dim() const override { return data_.dim(); }
  double value(const PrimalVector& x) const override;
  DualVector gradient(const PrimalVector& x) const override;
  HessianView hessian(const PrimalVector& x) const override;

 private:
  LabeledDataset data_;
  double mu_;
};

/// f(x) = 1/2 <Qx, x> - <b, x> + sigma3/3 ||x||^3 (Euclidean norm in the cubic term).
class QuadraticCubic final : public SmoothFunction {
 public:
  QuadraticCubic(Matrix Q, Vector b, double cubic_coefficient);
  Index dim() const override { return b_.size(); }
  double value(const PrimalVector& x) const override;
  DualVector gradient(const PrimalVector& x) const override;
  HessianView hessian(const PrimalVector& x) const override;

 private:
  Matrix Q_;
  Vector b_;
  double cubic_;
};

/// f(x) = log sum_i exp(<a_i, x> - c_i) + mu/2 ||x||^2.
class LogSumExp final : public SmoothFunction {
 public:
  LogSumExp(Matrix A, Vector c, double ridge_mu);
  Index dim() const override { return A_.cols(); }
  double value(const PrimalVector& x) const override;
  DualVector gradient(const PrimalVector& x) const override;
  HessianView hessian(const PrimalVector& x) const override;

 private:
  Vector softmax(const Vector& x) const;
  Matrix A_;
  Vector c_;
  double mu_;
};

/// f(x) = sum_{i<n} h(x_i - x_{i+1}) + h(x_n) - x_1 with h(t) = (t^2 + s^2)^{3/2} / 3.
/// A smoothed version of the classical cubic chain: a method whose steps only reach
/// one new coordinate per Hessian product needs at least n steps. h'' is
/// 2-Lipschitz for every s >= 0, so L2 <= 8 sqrt(2) in the Euclidean norm.
class SmoothedChain final : public SmoothFunction {
 public:
  SmoothedChain(Index n, double smoothing);
  Index dim() const override { return n_; }
  double value(const PrimalVector& x) const override;
  DualVector gradient(const PrimalVector& x) const override;
  HessianView hessian(const PrimalVector& x) const override;

 private:
  Vector differences(const PrimalVector& x) const;
  Index n_;
  double s2_;
};

// ---------------------------------------------------------------------------
// Hessian-Lipschitz estimation

struct LipschitzEstimateOptions {
  std::uint64_t seed = 1;
  int base_points = 24;
  int power_iterations = 4;
  double safety_factor = 1.05;
  double fd_step = 1e-4;
};

/// Sampled estimate of L2 = sup ||hess f(x) - hess f(y)|| / ||x - y|| over the ball
/// of the given radius around center. Combines random long segments with a
/// power search for the direction maximizing the third derivative at random
/// base points, then multiplies the maximum by the safety factor.
double estimate_hessian_lipschitz(const SmoothFunction& f, const NormPair& norms,
                                  const PrimalVector& center, double radius,
                                  const LipschitzEstimateOptions& options = {});

// ---------------------------------------------------------------------------
// Benchmark instances

struct LogisticOptions {
  std::optional<double> lips_hessian;  // user-supplied L2; estimated when absent
  double region_radius = 0.0;          // 0: chosen from the data scale
  LipschitzEstimateOptions estimate;
};

CompositeProblem make_logistic(LabeledDataset data, double ridge_mu,
                               const LogisticOptions& options = {});

/// f = 1/2 <Qx, x> + sigma3/3 ||x||^3, psi = 0. L2 = 2 sigma3. The uniform
/// convexity modulus certified for this f is sigma3/2; the reference optimum
/// x* = 0, F* = 0 is attached.
CompositeProblem make_cubic_uc(const HessianView& Q, double sigma3);

/// f = 1/2 <Qx, x> - <b, x>, psi = lambda ||x||_1, L2 = 0.
CompositeProblem make_l1_quadratic(const HessianView& Q, const DualVector& b, double lambda);

/// f = 1/2 <Qx, x> - <b, x> with an arbitrary simple term.
CompositeProblem make_quadratic(const HessianView& Q, const DualVector& b,
                                CompositePart simple = CompositePart::zero());

struct LogSumExpOptions {
  std::optional<double> lips_hessian;
  double region_radius = 2.0;
  LipschitzEstimateOptions estimate;
};

CompositeProblem make_log_sum_exp(Matrix A, Vector c, double ridge_mu,
                                  const LogSumExpOptions& options = {});

/// Smoothed chain of length n with L2 = 8 sqrt(2); no reference optimum attached.
CompositeProblem make_smoothed_chain(Index n, double smoothing = 0.1);

/// Replaces the simple term; the reference optimum is dropped.
CompositeProblem with_simple_part(CompositeProblem problem, CompositePart simple);

/// Replaces geometry (scaling function and norms); the reference optimum is kept.
/// The smooth constants are reused as-is, so the new norm should be one in which
/// they remain valid (e.g. keep the norm and change only the scaling function).
CompositeProblem with_geometry(CompositeProblem problem, ScalingFunction scaling, NormPair norms);

}  // namespace gradreg
