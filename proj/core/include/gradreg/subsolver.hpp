#pragma once

#include <string>

#include "gradreg/problem.hpp"

namespace gradreg {

enum class LinearSolveMode { direct, cg };

/// Controls how the regularized Newton subproblem is solved.
struct InnerSolverConfig {
  LinearSolveMode linear = LinearSolveMode::direct;
  double cg_tolerance = 1e-12;  // relative residual of the shifted system
  int cg_max_iterations = 2000;

  // Proximal-gradient loop for psi != 0.
  double abs_tolerance = 1e-10;
  double rel_tolerance = 1e-8;
  int max_iterations = 10000;
};

/// Output of one regularized Newton step T = T_A(x_bar).
struct StepResult {
  PrimalVector point;                // T
  DualVector selected_subgradient;   // F'(T)
  double model_value = 0.0;          // M_A(x_bar, T)
  double step_norm = 0.0;            // ||T - x_bar||
  int inner_iterations = 0;
  /// Dual norm of a subgradient of y -> M_A(x_bar, y) at T; zero for an exact step.
  double inner_residual = 0.0;
  /// False when the inner solver stopped at its iteration cap.
  bool certified = true;
  /// True when A = 0 and the step is the trivial T = x_bar.
  bool converged = false;
  double linear_term = 0.0;  // <grad f(x_bar), T - x_bar>
  double curvature = 0.0;    // <hess f(x_bar)(T - x_bar), T - x_bar>
  std::string warning;
};

/// A = (1/sigma) sqrt(H g / 3).
double regularization_parameter(double g_norm, double H, double sigma);

/// M_A(x_bar, y).
double model_value(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                   const PrimalVector& y);

/// Step for psi = 0: solves (hess f(x_bar) + A diag(s)) (T - x_bar) = -grad f(x_bar),
/// with s the scaling-function diagonal, by Cholesky or matrix-free CG.
StepResult solve_step_smooth(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                             const InnerSolverConfig& inner = {});

/// Step for a general simple term by accelerated proximal gradient on the
/// strongly convex model y -> M_A(x_bar, y). The returned subgradient is
/// grad f(T) + psi'(T) with psi'(T) read off the final prox step, hence an
/// exact element of the subdifferential of F at T.
StepResult solve_step_composite(const CompositeProblem& problem, const PrimalVector& x_bar,
                                double A, const InnerSolverConfig& inner = {});

/// Dispatches on whether psi is zero.
StepResult solve_step(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                      const InnerSolverConfig& inner = {});

/// grad f(T) - grad f(x_bar) - hess f(x_bar)(T - x_bar) - A (grad d(T) - grad d(x_bar)).
DualVector select_subgradient(const CompositeProblem& problem, const PrimalVector& x_bar,
                              const PrimalVector& T, double A);

/// M_A(x_bar, y) >= M_A(x_bar, T) + 1/2 <hess f(x_bar)(y-T), y-T> + 1/2 sigma A ||y-T||^2 - slack.
/// The default slack is relative plus the inner residual term ||res|| ||y - T||.
bool model_lower_bound_check(const StepResult& step, const CompositeProblem& problem,
                             const PrimalVector& x_bar, double A, const PrimalVector& y,
                             double rel_slack = 1e-10);

}  // namespace gradreg
