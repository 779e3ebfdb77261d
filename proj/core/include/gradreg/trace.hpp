#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradreg/vector.hpp"

namespace gradreg {

enum class Verdict { pass, fail, not_armed };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One runtime-checked inequality lhs <= rhs + slack.
struct Certificate {
  std::string name;
  std::string anchor;  // which guarantee this instance of the check stands for
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  Verdict verdict = Verdict::not_armed;
  std::string armed_conditions;

  bool armed() const { return verdict != Verdict::not_armed; }
  bool failed() const { return verdict == Verdict::fail; }
};

/// Builds an armed certificate whose verdict is pass iff lhs <= rhs + slack.
/// A NaN on either side is a failure.
Certificate make_certificate(std::string name, std::string anchor, double lhs, double rhs,
                             double slack, std::string armed_conditions);

/// Builds a certificate that was not evaluated because a hypothesis is missing.
Certificate not_armed(std::string name, std::string anchor, std::string reason);

enum class Mode { basic, line_search, accelerated };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// State at x_k and the step x_k -> x_{k+1} taken from it.
///
/// For basic and line-search traces the step fields (A, H_used, i_k, step_norm,
/// linear_term, curvature, model_value, inner_*) describe the step leaving x_k and
/// are zero on the final record. Certificates on record k concern the pair
/// (x_k, x_{k+1}).
struct IterationRecord {
  int k = 0;
  PrimalVector x;
  double F = 0.0;
  double f = 0.0;
  double g_norm = 0.0;  // dual norm of the recorded subgradient at x_k

  double A = 0.0;
  double H_used = 0.0;  // H of the accepted step (2^{i_k} H_k in line search)
  double H_k = 0.0;     // line-search base value before doubling
  int i_k = 0;
  double step_norm = 0.0;
  double linear_term = 0.0;
  double curvature = 0.0;
  double model_value = 0.0;
  int inner_iterations = 0;
  double inner_residual = 0.0;
  bool certified = true;

  // Accelerated scheme only.
  std::optional<double> b;
  std::optional<double> B;
  std::optional<PrimalVector> v;

  std::vector<Certificate> certificates;
};

/// Everything a certificate needs besides the iteration records.
struct TraceHeader {
  std::string instance;
  Mode mode = Mode::basic;
  Index n = 0;
  double sigma = 1.0;
  double L2 = 0.0;
  double H = 0.0;   // fixed H (basic), H_0 (line search), inner H (accelerated)
  double H0 = 0.0;
  double c = 0.0;   // sigma^{-1} + 3 L2 / (2H) for basic, the same with H_0 for line search
  std::optional<double> mu;
  std::optional<double> sigma3;
  std::optional<double> F_star;
  std::optional<PrimalVector> x_star;
  double delta = 0.0;
  std::optional<double> eps;
  std::string simple_part = "zero";
  bool third_differentiable = true;
  Vector scaling_diagonal;
  Vector norm_weights;
  std::string stop_reason;
  PrimalVector x0;
};

struct Trace {
  TraceHeader header;
  std::vector<IterationRecord> records;
};

}  // namespace gradreg
