#include "gradreg/methods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gradreg/certificates.hpp"

namespace gradreg {

namespace {

[[noreturn]] void rethrow_at(int k, const Error& e) {
  throw NumericError("iteration " + std::to_string(k) + ": " + e.what());
}

TraceHeader make_header(const CompositeProblem& problem, const PrimalVector& x0,
                        const SolverConfig& config) {
  TraceHeader h;
  h.instance = problem.name;
  h.mode = config.mode;
  h.n = problem.dim();
  h.sigma = problem.sigma();
  h.L2 = problem.lips_hessian();
  h.mu = problem.smooth.strong_convexity_mu();
  h.sigma3 = problem.smooth.uniform_convexity_sigma3();
  if (problem.reference) {
    h.F_star = problem.reference->F_star;
    h.x_star = problem.reference->x_star;
  }
  h.delta = config.grad_tolerance;
  h.eps = config.f_gap_tolerance;
  h.simple_part = problem.simple.name();
  h.third_differentiable = problem.smooth.constants().third_differentiable;
  h.scaling_diagonal = problem.scaling.diagonal();
  h.norm_weights = problem.norms.weights();
  h.x0 = x0;
  return h;
}

void check_start(const CompositeProblem& problem, const PrimalVector& x0) {
  require_same_size(x0.size(), problem.dim(), "initial point");
  require_finite(x0, "initial point");
  if (!problem.simple.in_domain(x0)) throw InvalidInput("initial point outside dom psi");
}

// Fills x, F, f, g_norm for the current iterate.
IterationRecord state_record(const CompositeProblem& problem, int k, const PrimalVector& x,
                             double g_norm) {
  IterationRecord rec;
  rec.k = k;
  rec.x = x;
  rec.f = problem.smooth.value(x);
  rec.F = rec.f + problem.simple.value(x);
  rec.g_norm = g_norm;
  if (!std::isfinite(rec.F) || !std::isfinite(g_norm)) {
    throw NumericError("iteration " + std::to_string(k) + ": non-finite objective or subgradient");
  }
  return rec;
}

void record_step(IterationRecord& rec, const StepResult& step, double A, double H) {
  rec.A = A;
  rec.H_used = H;
  rec.step_norm = step.step_norm;
  rec.linear_term = step.linear_term;
  rec.curvature = step.curvature;
  rec.model_value = step.model_value;
  rec.inner_iterations = step.inner_iterations;
  rec.inner_residual = step.inner_residual;
  rec.certified = step.certified;
}

// Returns the stop reason for the state in rec, or an empty string to continue.
std::string stop_reason(const CompositeProblem& problem, const IterationRecord& rec,
                        const SolverConfig& config) {
  if (rec.g_norm <= config.grad_tolerance) return "gradient";
  if (problem.reference && config.f_gap_tolerance &&
      rec.F - problem.reference->F_star <= *config.f_gap_tolerance) {
    return "f_gap";
  }
  if (rec.k >= config.max_iterations) return "iteration_cap";
  return {};
}

// Smooth part of the auxiliary objective of the accelerated scheme:
// B' f((b x + B x_k) / B') + beta_phi(v_k; x).
class ContractedObjective final : public SmoothFunction {
 public:
  ContractedObjective(const SmoothOracle& f, double b, double B_prev, PrimalVector x_prev,
                      const CubicProxFunction& phi, PrimalVector anchor)
      : f_(f),
        b_(b),
        B_next_(B_prev + b),
        shift_((B_prev / (B_prev + b)) * x_prev),
        phi_(phi),
        anchor_(std::move(anchor)),
        anchor_grad_(phi.gradient(anchor_)),
        anchor_value_(phi.value(anchor_)) {}

  Index dim() const override { return f_.dim(); }

  double value(const PrimalVector& x) const override {
    return B_next_ * f_.value(inner(x)) + bregman_part(x);
  }

  DualVector gradient(const PrimalVector& x) const override {
    return b_ * f_.gradient(inner(x)) + phi_.gradient(x) - anchor_grad_;
  }

  HessianView hessian(const PrimalVector& x) const override {
    const double w = b_ * b_ / B_next_;
    Matrix H = w * f_.hessian(inner(x)).to_dense() + phi_.hessian(x);
    return HessianView::dense(std::move(H));
  }

  /// Hessian-Lipschitz constant of this function given L2 of f.
  double lips_hessian(double L2) const {
    return b_ * b_ * b_ / (B_next_ * B_next_) * L2 + CubicProxFunction::lips_hessian();
  }

 private:
  PrimalVector inner(const PrimalVector& x) const { return (b_ / B_next_) * x + shift_; }
  double bregman_part(const PrimalVector& x) const {
    return phi_.value(x) - anchor_value_ - pairing(anchor_grad_, x - anchor_);
  }

  SmoothOracle f_;
  double b_;
  double B_next_;
  PrimalVector shift_;
  CubicProxFunction phi_;
  PrimalVector anchor_;
  DualVector anchor_grad_;
  double anchor_value_;
};

}  // namespace

double optimal_H(double L2, double sigma) {
  const double L = std::max(L2, kLipschitzFloor);
  return std::max(4.5 * L * sigma, L);
}

double optimal_H_uniformly_convex(double L2, double sigma) {
  const double L = std::max(L2, kLipschitzFloor);
  return std::max(3.0 * sigma * L, L);
}

bool acceptance_test(const CompositeProblem& problem, const PrimalVector& x_bar,
                     const PrimalVector& T, double H) {
  const PrimalVector d = T - x_bar;
  const double fx = problem.smooth.value(x_bar);
  const double s = problem.norms.primal(d);
  const double model = fx + pairing(problem.smooth.gradient(x_bar), d) +
                       0.5 * pairing(problem.smooth.hessian(x_bar).apply(d), d) +
                       H / 6.0 * s * s * s;
  return problem.smooth.value(T) <= model + 1e-10 * (1.0 + std::abs(fx));
}

Trace run_basic(const CompositeProblem& problem, const PrimalVector& x0, const DualVector& F0_sub,
                const SolverConfig& config) {
  check_start(problem, x0);
  require_same_size(F0_sub.size(), problem.dim(), "initial subgradient");
  if (!(config.H > 0.0) || !std::isfinite(config.H)) throw InvalidInput("basic method: H must be positive");

  Trace trace;
  trace.header = make_header(problem, x0, config);
  trace.header.mode = Mode::basic;
  trace.header.H = config.H;
  trace.header.c = 1.0 / problem.sigma() + 1.5 * problem.lips_hessian() / config.H;

  PrimalVector x = x0;
  DualVector sub = F0_sub;
  double best_g = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int k = 0;; ++k) {
    IterationRecord rec = state_record(problem, k, x, problem.norms.dual(sub));
    if (rec.g_norm < best_g) {
      best_g = rec.g_norm;
      best_k = k;
    }
    std::string why = stop_reason(problem, rec, config);
    if (why.empty() && config.stall_iterations > 0 && k - best_k >= config.stall_iterations) {
      why = "stalled";
    }
    if (!why.empty()) {
      trace.header.stop_reason = why;
      trace.records.push_back(std::move(rec));
      break;
    }
    try {
      const double A = regularization_parameter(rec.g_norm, config.H, problem.sigma());
      const StepResult step = solve_step(problem, x, A, config.inner);
      record_step(rec, step, A, config.H);
      rec.H_k = config.H;
      x = step.point;
      sub = step.selected_subgradient;
    } catch (const Error& e) {
      rethrow_at(k, e);
    }
    trace.records.push_back(std::move(rec));
  }
  if (config.certify) attach_step_certificates(trace);
  return trace;
}

double next_line_search_base(double H0, double H_k, int i_k) {
  return std::max(H0, std::ldexp(H_k, i_k - 1));
}

Trace run_line_search(const CompositeProblem& problem, const PrimalVector& x0,
                      const DualVector& F0_sub, const SolverConfig& config) {
  check_start(problem, x0);
  require_same_size(F0_sub.size(), problem.dim(), "initial subgradient");
  if (!(config.H0 > 0.0) || !std::isfinite(config.H0)) {
    throw InvalidInput("line search: H0 must be positive");
  }

  Trace trace;
  trace.header = make_header(problem, x0, config);
  trace.header.mode = Mode::line_search;
  trace.header.H = config.H0;
  trace.header.H0 = config.H0;
  trace.header.c = 1.0 / problem.sigma() + 1.5 * problem.lips_hessian() / config.H0;

  PrimalVector x = x0;
  DualVector sub = F0_sub;
  double H_k = config.H0;
  for (int k = 0;; ++k) {
    IterationRecord rec = state_record(problem, k, x, problem.norms.dual(sub));
    if (std::string why = stop_reason(problem, rec, config); !why.empty()) {
      trace.header.stop_reason = why;
      trace.records.push_back(std::move(rec));
      break;
    }
    try {
      int i = 0;
      for (;; ++i) {
        if (i > config.max_doublings) {
          throw NumericError("line search exceeded " + std::to_string(config.max_doublings) +
                             " doublings; L2 misestimated or f not smooth enough");
        }
        const double H = std::ldexp(H_k, i);
        const double A = regularization_parameter(rec.g_norm, H, problem.sigma());
        const StepResult step = solve_step(problem, x, A, config.inner);
        const double s = step.step_norm;
        const double bound = rec.f + step.linear_term + 0.5 * step.curvature + H / 6.0 * s * s * s;
        const double fT = problem.smooth.value(step.point);
        if (fT <= bound + 1e-10 * (1.0 + std::abs(rec.f))) {
          record_step(rec, step, A, H);
          rec.H_k = H_k;
          rec.i_k = i;
          x = step.point;
          sub = step.selected_subgradient;
          break;
        }
      }
      H_k = next_line_search_base(config.H0, H_k, i);
    } catch (const Error& e) {
      rethrow_at(k, e);
    }
    trace.records.push_back(std::move(rec));
  }
  if (config.certify) attach_step_certificates(trace);
  return trace;
}

Trace run_accelerated(const CompositeProblem& problem, const PrimalVector& x0,
                      const SolverConfig& config) {
  check_start(problem, x0);
  if (!problem.norms.is_euclidean() || !problem.scaling.is_identity()) {
    throw InvalidInput("accelerated scheme requires the Euclidean norm and scaling function");
  }
  const double L2 = std::max(problem.lips_hessian(), kLipschitzFloor);
  double delta = 0.0;
  if (config.accel_delta) {
    delta = *config.accel_delta;
  } else if (config.f_gap_tolerance) {
    delta = accelerated_delta(*config.f_gap_tolerance, L2);
  } else {
    throw InvalidInput("accelerated scheme needs eps or an explicit inner tolerance");
  }
  if (!(delta > 0.0)) throw InvalidInput("accelerated scheme: inner tolerance must be positive");

  Trace trace;
  trace.header = make_header(problem, x0, config);
  trace.header.mode = Mode::accelerated;
  trace.header.delta = delta;

  const CubicProxFunction phi(x0);
  PrimalVector x = x0;
  PrimalVector v = x0;
  double B = 0.0;
  double b = 0.0;
  int inner_iterations = 0;
  double inner_residual = 0.0;
  for (int k = 0;; ++k) {
    const double g = problem.norms.dual(stationarity_subgradient(problem, x));
    IterationRecord rec = state_record(problem, k, x, g);
    rec.b = b;
    rec.B = B;
    rec.v = v;
    rec.inner_iterations = inner_iterations;
    rec.inner_residual = inner_residual;
    rec.H_used = trace.header.H;

    std::string why;
    if (problem.reference && config.f_gap_tolerance &&
        rec.F - problem.reference->F_star <= *config.f_gap_tolerance) {
      why = "f_gap";
    } else if (!config.f_gap_tolerance || !problem.reference) {
      if (g <= config.grad_tolerance) why = "gradient";
    }
    if (why.empty() && k >= config.max_iterations) why = "iteration_cap";
    if (!why.empty()) {
      trace.header.stop_reason = why;
      trace.records.push_back(std::move(rec));
      break;
    }
    trace.records.push_back(std::move(rec));

    try {
      b = accelerated_coefficient(k + 1, L2);
      const double B_next = B + b;
      auto contracted = std::make_shared<ContractedObjective>(problem.smooth, b, B, x, phi, v);
      SmoothConstants inner_constants;
      inner_constants.lips_hessian = contracted->lips_hessian(L2);
      CompositeProblem h = make_problem(
          problem.name + "/contracted",
          SmoothOracle(contracted, inner_constants),
          problem.simple.is_zero() ? CompositePart::zero() : problem.simple.scaled(b));

      SolverConfig inner;
      inner.mode = Mode::basic;
      inner.H = optimal_H(inner_constants.lips_hessian, 1.0);
      inner.grad_tolerance = delta;
      inner.max_iterations = config.max_inner_iterations;
      inner.inner = config.inner;
      inner.certify = false;
      trace.header.H = inner.H;
      const Trace solve = run_basic(h, v, stationarity_subgradient(h, v), inner);
      const IterationRecord& last = solve.records.back();
      if (solve.header.stop_reason != "gradient") {
        throw NumericError("inner solve stopped by " + solve.header.stop_reason +
                           " with subgradient norm " + std::to_string(last.g_norm));
      }
      v = last.x;
      inner_iterations = static_cast<int>(solve.records.size()) - 1;
      inner_residual = last.g_norm;
      x = (b / B_next) * v + (B / B_next) * x;
      B = B_next;
    } catch (const Error& e) {
      rethrow_at(k, e);
    }
  }
  if (config.certify) attach_step_certificates(trace);
  return trace;
}

Trace run(const CompositeProblem& problem, const PrimalVector& x0, const SolverConfig& config) {
  switch (config.mode) {
    case Mode::basic:
      return run_basic(problem, x0, initial_subgradient(problem, x0), config);
    case Mode::line_search:
      return run_line_search(problem, x0, initial_subgradient(problem, x0), config);
    case Mode::accelerated:
      return run_accelerated(problem, x0, config);
  }
  throw InvalidInput("unknown mode");
}

double accelerated_delta(double eps, double L2) {
  if (!(eps > 0.0) || !(L2 > 0.0)) throw InvalidInput("accelerated_delta: eps, L2 must be positive");
  return std::pow(eps / L2, 2.0 / 3.0) / (2.0 * std::pow(3.0, 7.0 / 3.0));
}

double accelerated_coefficient(int k, double L2) {
  if (k < 1) throw InvalidInput("accelerated_coefficient: k must be >= 1");
  return static_cast<double>(k) * k / (9.0 * L2);
}

int accelerated_iteration_bound(double L2, double beta, double eps) {
  return static_cast<int>(std::ceil(std::sqrt(54.0) * std::cbrt(L2 * beta / eps)));
}

double CubicProxFunction::value(const PrimalVector& x) const {
  const double r = (x - center_).vec().norm();
  return 2.0 / 3.0 * r * r * r;
}

DualVector CubicProxFunction::gradient(const PrimalVector& x) const {
  const Vector u = (x - center_).vec();
  return DualVector(2.0 * u.norm() * u);
}

Matrix CubicProxFunction::hessian(const PrimalVector& x) const {
  const Vector u = (x - center_).vec();
  const double r = u.norm();
  Matrix H = Matrix::Zero(u.size(), u.size());
  if (r == 0.0) return H;
  H.diagonal().setConstant(2.0 * r);
  H.noalias() += (2.0 / r) * u * u.transpose();
  return H;
}

double CubicProxFunction::beta(const PrimalVector& x, const PrimalVector& y) const {
  return value(y) - value(x) - pairing(gradient(x), y - x);
}

double prox_function_beta(const PrimalVector& anchor, const PrimalVector& y) {
  return CubicProxFunction(PrimalVector::zero(anchor.size())).beta(anchor, y);
}

double validate_prox_function(const CubicProxFunction& phi, int samples, std::uint64_t seed,
                              double radius) {
  const Index n = phi.center().size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto draw = [&] {
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = normal(rng);
    d *= radius * unif(rng) / std::max(d.norm(), 1e-300);
    return phi.center() + PrimalVector(d);
  };
  int bad = 0;
  for (int s = 0; s < samples; ++s) {
    const PrimalVector x = draw();
    const PrimalVector y = draw();
    const double r = (y - x).vec().norm();
    const double lower = r * r * r / 3.0;
    if (phi.beta(x, y) < lower * (1.0 - 1e-12) - 1e-300) ++bad;
  }
  return samples > 0 ? static_cast<double>(bad) / samples : 0.0;
}

ReferenceOptimum reference_solve(const CompositeProblem& problem, const PrimalVector& x0,
                                 double tolerance, int max_iterations) {
  SolverConfig config;
  config.mode = Mode::basic;
  config.H = optimal_H(problem.lips_hessian(), problem.sigma());
  config.grad_tolerance = tolerance;
  config.max_iterations = max_iterations;
  config.inner.abs_tolerance = std::min(1e-14, tolerance);
  config.inner.rel_tolerance = 1e-12;
  config.inner.max_iterations = 50000;
  config.certify = false;
  config.stall_iterations = 20;

  CompositeProblem plain = problem;
  plain.reference.reset();
  const Trace trace = run_basic(plain, x0, initial_subgradient(plain, x0), config);
  // Near the solution F only moves at roundoff level, so the lowest F can belong to
  // a less converged iterate. x* is the best-certified point; F* is the lowest value
  // seen, which keeps recorded gaps nonnegative.
  const auto best = std::min_element(
      trace.records.begin(), trace.records.end(),
      [](const IterationRecord& a, const IterationRecord& b) { return a.g_norm < b.g_norm; });
  const auto lowest = std::min_element(
      trace.records.begin(), trace.records.end(),
      [](const IterationRecord& a, const IterationRecord& b) { return a.F < b.F; });
  return ReferenceOptimum{lowest->F, best->x, best->g_norm};
}

}  // namespace gradreg
