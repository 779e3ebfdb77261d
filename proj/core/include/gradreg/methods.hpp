#pragma once

#include <cstdint>
#include <optional>

#include "gradreg/problem.hpp"
#include "gradreg/subsolver.hpp"
#include "gradreg/trace.hpp"

namespace gradreg {

struct SolverConfig {
  Mode mode = Mode::basic;
  double H = 0.0;   // basic method; must be positive
  double H0 = 0.0;  // line-search floor; must be positive in that mode
  int max_iterations = 5000;
  double grad_tolerance = 1e-8;           // delta
  std::optional<double> f_gap_tolerance;  // eps, used when a reference optimum is known
  InnerSolverConfig inner;
  int max_doublings = 64;

  // Accelerated scheme: cap on basic iterations per inner solve.
  int max_inner_iterations = 5000;
  // Accelerated scheme: inner tolerance; computed from eps and L2 when absent.
  std::optional<double> accel_delta;
  // Attach per-step certificates to each record while running.
  bool certify = true;
  // Stop with reason "stalled" once the subgradient norm has not improved on its best
  // value for this many iterations (0 disables). Used when the tolerance may be below
  // what floating point can deliver.
  int stall_iterations = 0;
};

/// H_* = 9/2 L2 sigma. Returns max(H_*, L2) so that H >= L2 also holds for sigma < 1.
/// A zero L2 is replaced by a tiny floor so the step stays regularized.
double optimal_H(double L2, double sigma);

/// H_# = 3 sigma L2, the choice maximizing the linear rate on uniformly convex problems
/// (raised to L2 when sigma < 1/3, floored like optimal_H).
double optimal_H_uniformly_convex(double L2, double sigma);

/// Floor applied to L2 = 0 wherever a positive value is required.
inline constexpr double kLipschitzFloor = 1e-12;

/// f(T) <= f(x_bar) + <grad f(x_bar), T - x_bar> + 1/2 <hess f(x_bar)(T - x_bar), T - x_bar>
///         + H/6 ||T - x_bar||^3 + 1e-10 (1 + |f(x_bar)|).
bool acceptance_test(const CompositeProblem& problem, const PrimalVector& x_bar,
                     const PrimalVector& T, double H);

/// Gradient-regularized Newton iterations with fixed H.
Trace run_basic(const CompositeProblem& problem, const PrimalVector& x0,
                const DualVector& F0_sub, const SolverConfig& config);

/// Base value for the next line-search iteration: max(H0, 2^{i_k - 1} H_k).
double next_line_search_base(double H0, double H_k, int i_k);

/// The same with H adapted by doubling until the cubic upper model holds.
Trace run_line_search(const CompositeProblem& problem, const PrimalVector& x0,
                      const DualVector& F0_sub, const SolverConfig& config);

/// Contracting proximal acceleration with inner basic solves.
Trace run_accelerated(const CompositeProblem& problem, const PrimalVector& x0,
                      const SolverConfig& config);

/// Dispatches on config.mode; builds F'_0 with initial_subgradient().
Trace run(const CompositeProblem& problem, const PrimalVector& x0, const SolverConfig& config);

/// Inner tolerance of the accelerated scheme, (eps / L2)^{2/3} / (2 * 3^{7/3}).
double accelerated_delta(double eps, double L2);

/// b_k = k^2 / (9 L2) for k >= 1.
double accelerated_coefficient(int k, double L2);

/// Outer iteration count after which the accelerated scheme guarantees an eps gap:
/// ceil(sqrt(54) (L2 beta / eps)^{1/3}).
int accelerated_iteration_bound(double L2, double beta, double eps);

/// Prox-function phi(x) = 2/3 ||x - center||^3 (Euclidean) and its Bregman distance.
class CubicProxFunction {
 public:
  explicit CubicProxFunction(PrimalVector center) : center_(std::move(center)) {}
  double value(const PrimalVector& x) const;
  DualVector gradient(const PrimalVector& x) const;
  Matrix hessian(const PrimalVector& x) const;
  /// beta_phi(x, y) = phi(y) - phi(x) - <grad phi(x), y - x>.
  double beta(const PrimalVector& x, const PrimalVector& y) const;
  /// Lipschitz constant of the Hessian of phi.
  static constexpr double lips_hessian() { return 4.0; }
  const PrimalVector& center() const { return center_; }

 private:
  PrimalVector center_;
};

/// beta_phi(anchor, y) for phi centered at the origin.
double prox_function_beta(const PrimalVector& anchor, const PrimalVector& y);

/// Fraction of sampled pairs violating beta_phi(x, y) >= 1/3 ||y - x||^3 (should be 0).
/// Pairs are drawn in a ball of the given radius around center.
double validate_prox_function(const CubicProxFunction& phi, int samples, std::uint64_t seed,
                              double radius);

/// High-accuracy solve used to obtain F* and x*: basic method to a subgradient
/// norm of `tolerance` with a tight inner solver.
ReferenceOptimum reference_solve(const CompositeProblem& problem, const PrimalVector& x0,
                                 double tolerance = 1e-12, int max_iterations = 20000);

}  // namespace gradreg
