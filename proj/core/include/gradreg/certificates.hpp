#pragma once

#include <optional>
#include <vector>

#include "gradreg/problem.hpp"
#include "gradreg/trace.hpp"

namespace gradreg {

// Slack policy: relative 1e-6 on whole-trace rate bounds, 1e-8 on single-step
// inequalities, plus linear terms in the inner-solver residual for inexact steps.
inline constexpr double kTheoremSlack = 1e-6;
inline constexpr double kLemmaSlack = 1e-8;

/// sigma^{-1} + 3 L2 / (2H).
double growth_constant(double sigma, double L2, double H);

/// (1 / (2c^2)) sqrt(3 / H).
double progress_constant(double c, double H);

/// (3 sqrt(3) / (4 c^{3/2})) sqrt(sigma3 / H).
double uc_rate_constant(double c, double sigma3, double H);

/// max_k ||x_k - x*|| over the recorded iterates (a-posteriori stand-in for the
/// level-set diameter).
double distance_bound(const Trace& trace, const PrimalVector& x_star);

/// Recomputes the per-step certificates of every record from trace data alone.
void attach_step_certificates(Trace& trace);

/// Certificates for one step x_k -> x_{k+1}; `prev` is record k-1 when it exists.
std::vector<Certificate> step_certificates(const TraceHeader& header, const IterationRecord* prev,
                                           const IterationRecord& cur,
                                           const IterationRecord& next);

// --- whole-trace checks --------------------------------------------------------------
// Each returns one certificate summarizing the worst index; lhs/rhs are taken there.

Certificate check_functional_rate(const Trace& trace, double F_star, double D_hat, double H,
                                  double sigma, double L2, double eps);

Certificate check_iteration_budget(const Trace& trace, double F_star, double D_hat, double H,
                                   double c, double eps);

Certificate check_linear_rate_uc(const Trace& trace, double F_star, double sigma3, double H,
                                 double c, double g0, double D_hat);

Certificate check_superlinear(const Trace& trace, double mu, double H, double c);

Certificate check_gradient_complexity(const Trace& trace, double delta, double g0, double c,
                                      double H, double D_hat);

/// Final displayed bound for uniformly convex problems.
Certificate check_gradient_complexity_uc(const Trace& trace, double delta, double g0, double c,
                                         double H, double sigma3, double F0_gap);

Certificate check_line_search_budget(const Trace& trace, double c0, double L2, double D_hat,
                                     double eps, double F_star);

/// Total doublings sum i_k <= 2k + log2(max(L2, H0) / H0) + 1.
Certificate check_line_search_doublings(const Trace& trace, double L2, double H0);

Certificate check_ubound_uc(const CompositeProblem& problem, const PrimalVector& x, double sigma3,
                            double F_star);

/// First k with F_k - F* <= eps is at most ceil(sqrt(54) (L2 beta / eps)^{1/3}).
Certificate check_accelerated_bound(const Trace& trace, double F_star, double L2, double beta,
                                    double eps);

/// F_k k^3 <= 54^{3/2} L2 beta wherever that bound divided by k^3 is at least eps.
Certificate check_accelerated_rate(const Trace& trace, double F_star, double L2, double beta,
                                   double eps);

/// All whole-trace certificates applicable to this trace, using the header's eps
/// (1e-6 when absent) and delta.
std::vector<Certificate> certify_trace(const Trace& trace);

/// Per-step certificates (recomputed) followed by certify_trace().
std::vector<Certificate> full_report(const Trace& trace);

}  // namespace gradreg
