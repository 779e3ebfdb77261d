#include "gradreg/subsolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace gradreg {

namespace {

void check_step_inputs(const CompositeProblem& problem, const PrimalVector& x_bar, double A) {
  require_same_size(x_bar.size(), problem.dim(), "regularized step");
  require_finite(x_bar, "regularized step");
  if (!(A >= 0.0) || !std::isfinite(A)) throw InvalidInput("regularized step: A must be >= 0");
}

StepResult trivial_step(const CompositeProblem& problem, const PrimalVector& x_bar) {
  StepResult r;
  r.point = x_bar;
  r.selected_subgradient = DualVector::zero(x_bar.size());
  r.model_value = problem.F(x_bar);
  r.converged = true;
  return r;
}

// Fills the model bookkeeping shared by both step kinds.
void finish_step(StepResult& r, const CompositeProblem& problem, const PrimalVector& x_bar,
                 double A, const DualVector& grad, const HessianView& hess) {
  const PrimalVector delta = r.point - x_bar;
  r.step_norm = problem.norms.primal(delta);
  r.linear_term = pairing(grad, delta);
  r.curvature = pairing(hess.apply(delta), delta);
  r.model_value = problem.smooth.value(x_bar) + r.linear_term + 0.5 * r.curvature +
                  A * bregman(problem.scaling, x_bar, r.point) + problem.simple.value(r.point);
  if (!std::isfinite(r.model_value) || !r.point.all_finite()) {
    throw NumericError("regularized step produced a non-finite point");
  }
}

Vector conjugate_gradient(const std::function<Vector(const Vector&)>& apply, const Vector& rhs,
                          double rel_tol, int max_iter, int& iterations, double& rel_residual) {
  Vector x = Vector::Zero(rhs.size());
  Vector r = rhs;
  Vector p = r;
  double rr = r.squaredNorm();
  const double target = rel_tol * rel_tol * rhs.squaredNorm();
  iterations = 0;
  while (rr > target && iterations < max_iter) {
    const Vector Ap = apply(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) break;
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
    ++iterations;
  }
  const double denom = rhs.norm();
  rel_residual = denom > 0.0 ? std::sqrt(rr) / denom : 0.0;
  return x;
}

}  // namespace

double regularization_parameter(double g_norm, double H, double sigma) {
  if (!std::isfinite(g_norm) || g_norm < 0.0) throw InvalidInput("A_H: g must be finite, >= 0");
  if (!(H > 0.0) || !std::isfinite(H)) throw InvalidInput("A_H: H must be positive");
  if (!(sigma > 0.0) || sigma > 1.0) throw InvalidInput("A_H: sigma must lie in (0, 1]");
  return std::sqrt(H * g_norm / 3.0) / sigma;
}

double model_value(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                   const PrimalVector& y) {
  const PrimalVector delta = y - x_bar;
  const DualVector grad = problem.smooth.gradient(x_bar);
  const HessianView hess = problem.smooth.hessian(x_bar);
  return problem.smooth.value(x_bar) + pairing(grad, delta) +
         0.5 * pairing(hess.apply(delta), delta) + A * bregman(problem.scaling, x_bar, y) +
         problem.simple.value(y);
}

StepResult solve_step_smooth(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                             const InnerSolverConfig& inner) {
  check_step_inputs(problem, x_bar, A);
  if (!problem.simple.is_zero()) throw InvalidInput("solve_step_smooth: psi must be zero");
  if (A == 0.0) return trivial_step(problem, x_bar);

  const DualVector grad = problem.smooth.gradient(x_bar);
  const HessianView hess = problem.smooth.hessian(x_bar);
  const Vector& s = problem.scaling.diagonal();

  StepResult r;
  Vector delta;
  if (inner.linear == LinearSolveMode::direct) {
    Matrix M = hess.to_dense();
    M.diagonal() += A * s;
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) {
      throw NumericError("solve_step_smooth: shifted Hessian is not positive definite");
    }
    delta = -llt.solve(grad.vec());
    r.inner_iterations = 1;
  } else {
    const auto apply = [&](const Vector& v) -> Vector {
      const PrimalVector pv(v);
      Vector out = hess.has_operator() ? hess.apply_operator(pv).vec() : hess.apply(pv).vec();
      return out + A * s.cwiseProduct(v);
    };
    double rel_res = 0.0;
    delta = -conjugate_gradient(apply, grad.vec(), inner.cg_tolerance, inner.cg_max_iterations,
                                r.inner_iterations, rel_res);
    if (!(rel_res <= inner.cg_tolerance)) {
      std::ostringstream os;
      os << "solve_step_smooth: CG did not converge in " << inner.cg_max_iterations
         << " iterations (relative residual " << rel_res << ")";
      throw NumericError(os.str());
    }
  }
  r.point = x_bar + PrimalVector(delta);
  const DualVector residual =
      hess.apply(PrimalVector(delta)) + DualVector(A * s.cwiseProduct(delta)) + grad;
  r.inner_residual = problem.norms.dual(residual);
  r.selected_subgradient = problem.smooth.gradient(r.point) - residual;
  finish_step(r, problem, x_bar, A, grad, hess);
  return r;
}

StepResult solve_step_composite(const CompositeProblem& problem, const PrimalVector& x_bar,
                                double A, const InnerSolverConfig& inner) {
  check_step_inputs(problem, x_bar, A);
  if (!problem.simple.in_domain(x_bar)) {
    throw InvalidInput("solve_step_composite: x_bar outside dom psi");
  }
  if (A == 0.0) return trivial_step(problem, x_bar);

  const DualVector grad = problem.smooth.gradient(x_bar);
  const HessianView hess = problem.smooth.hessian(x_bar);
  Matrix Q = hess.to_dense();
  Q.diagonal() += A * problem.scaling.diagonal();
  Q = 0.5 * (Q + Q.transpose());

  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("solve_step_composite: eigen solve failed");
  const double L = eig.eigenvalues().maxCoeff();
  const double mu = std::max(eig.eigenvalues().minCoeff(), A * problem.scaling.diagonal().minCoeff());
  if (!(L > 0.0)) throw NumericError("solve_step_composite: degenerate model curvature");
  const double t = 1.0 / L;
  const double momentum = (std::sqrt(L) - std::sqrt(mu)) / (std::sqrt(L) + std::sqrt(mu));
  const double strong = problem.sigma() * A;

  const auto model_grad = [&](const Vector& y) -> Vector { return grad.vec() + Q * (y - x_bar.vec()); };

  Vector y = x_bar.vec();
  Vector prev = x_bar.vec();
  Vector psi_sub;
  Vector point;
  double residual = 0.0;
  bool done = false;
  int it = 0;
  while (it < inner.max_iterations) {
    ++it;
    const Vector gy = model_grad(y);
    point = problem.simple.prox(PrimalVector(Vector(y - t * gy)), t).vec();
    // Optimality of the prox step: (y - t*gy - point)/t lies in the subdifferential at point.
    psi_sub = (y - point) / t - gy;
    const DualVector res(model_grad(point) + psi_sub);
    residual = problem.norms.dual(res);
    const double step = problem.norms.primal(PrimalVector(Vector(point - x_bar.vec())));
    if (residual <= std::max(inner.abs_tolerance, inner.rel_tolerance * strong * step)) {
      done = true;
      break;
    }
    y = point + momentum * (point - prev);
    prev = point;
  }

  StepResult r;
  r.point = PrimalVector(point);
  r.inner_iterations = it;
  r.inner_residual = residual;
  r.certified = done;
  if (!done) {
    std::ostringstream os;
    os << "inner proximal-gradient loop hit its cap of " << inner.max_iterations
       << " iterations (residual " << residual << ")";
    r.warning = os.str();
  }
  r.selected_subgradient = problem.smooth.gradient(r.point) + DualVector(psi_sub);
  finish_step(r, problem, x_bar, A, grad, hess);
  return r;
}

StepResult solve_step(const CompositeProblem& problem, const PrimalVector& x_bar, double A,
                      const InnerSolverConfig& inner) {
  return problem.simple.is_zero() ? solve_step_smooth(problem, x_bar, A, inner)
                                  : solve_step_composite(problem, x_bar, A, inner);
}

DualVector select_subgradient(const CompositeProblem& problem, const PrimalVector& x_bar,
                              const PrimalVector& T, double A) {
  require_same_size(T.size(), x_bar.size(), "select_subgradient");
  const PrimalVector delta = T - x_bar;
  return problem.smooth.gradient(T) - problem.smooth.gradient(x_bar) -
         problem.smooth.hessian(x_bar).apply(delta) -
         A * bregman_gradient_gap(problem.scaling, x_bar, T);
}

bool model_lower_bound_check(const StepResult& step, const CompositeProblem& problem,
                             const PrimalVector& x_bar, double A, const PrimalVector& y,
                             double rel_slack) {
  if (!problem.simple.in_domain(y)) return true;
  const double lhs = model_value(problem, x_bar, A, y);
  const PrimalVector diff = y - step.point;
  const double dist = problem.norms.primal(diff);
  const double curv = pairing(problem.smooth.hessian(x_bar).apply(diff), diff);
  const double rhs = step.model_value + 0.5 * curv + 0.5 * problem.sigma() * A * dist * dist;
  const double slack = rel_slack * (1.0 + std::abs(lhs)) + step.inner_residual * dist;
  return lhs >= rhs - slack;
}

}  // namespace gradreg
