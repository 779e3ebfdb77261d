#include "catalogue.hpp"

#include <cmath>

#include "gradreg/dataset.hpp"
#include "gradreg/instances.hpp"
#include "gradreg/methods.hpp"

#ifndef GRADREG_TEST_DATA
#error "GRADREG_TEST_DATA must point at tests/data"
#endif

namespace gradreg::testing {

std::filesystem::path data_dir() { return GRADREG_TEST_DATA; }

Vector random_vector(std::mt19937_64& rng, Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

PrimalVector random_feasible_point(std::mt19937_64& rng, const CompositeProblem& problem,
                                   const PrimalVector& center, double radius) {
  const Index n = problem.dim();
  Vector d = random_vector(rng, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  d *= radius * unif(rng) / std::max(d.norm(), 1e-300);
  PrimalVector y(center.vec() + d);
  if (problem.simple.is_indicator()) y = problem.simple.prox(y, 1.0);
  return y;
}

Instance with_reference(Instance inst) {
  if (!inst.problem.reference) inst.problem.reference = reference_solve(inst.problem, inst.x0);
  return inst;
}

Instance quadratic_1d() {
  Matrix Q(1, 1);
  Q << 1.0;
  CompositeProblem p = make_quadratic(HessianView::dense(Q), DualVector{0.0});
  p.name = "quadratic_1d";
  p.reference = ReferenceOptimum{0.0, PrimalVector{0.0}, 0.0};
  return {"quadratic_1d", std::move(p), PrimalVector{1.0}, 2.0};
}

Instance logistic(Index samples, Index dim, double ridge, std::uint64_t seed) {
  LogisticOptions opts;
  opts.estimate.seed = seed;
  CompositeProblem p = make_logistic(synthetic_classification(samples, dim, seed), ridge, opts);
  p.name = "logistic";
  return {"logistic", std::move(p), PrimalVector::zero(dim), 4.0 * std::sqrt(double(dim))};
}

Instance logistic_fixture() {
  LogisticOptions opts;
  opts.region_radius = 6.0;
  CompositeProblem p = make_logistic(load_libsvm(data_dir() / "sample.libsvm"), 0.1, opts);
  p.name = "logistic_fixture";
  const Index n = p.dim();
  return {"logistic_fixture", std::move(p), PrimalVector::zero(n), 6.0};
}

Instance log_sum_exp(Index samples, Index dim, double ridge, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix A(samples, dim);
  for (Index i = 0; i < samples; ++i) A.row(i) = random_vector(rng, dim, 1.0 / std::sqrt(double(dim)));
  Vector c = random_vector(rng, samples);
  LogSumExpOptions opts;
  opts.estimate.seed = seed;
  CompositeProblem p = make_log_sum_exp(std::move(A), std::move(c), ridge, opts);
  PrimalVector x0(random_vector(rng, dim, 0.5));
  return {"log_sum_exp", std::move(p), std::move(x0), 2.0};
}

Instance l1_quadratic(Index n, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix M(n, n);
  for (Index j = 0; j < n; ++j) M.col(j) = random_vector(rng, n);
  Matrix Q = M * M.transpose() / double(n) + 0.1 * Matrix::Identity(n, n);
  DualVector b(random_vector(rng, n));
  CompositeProblem p = make_l1_quadratic(HessianView::dense(Q), b, lambda);
  return {"l1_quadratic", std::move(p), PrimalVector(random_vector(rng, n)), 3.0};
}

Instance box_quadratic(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix M(n, n);
  for (Index j = 0; j < n; ++j) M.col(j) = random_vector(rng, n);
  Matrix Q = M * M.transpose() / double(n) + 0.2 * Matrix::Identity(n, n);
  DualVector b(Q * Vector::Constant(n, 2.0));  // unconstrained minimizer (2, ..., 2)
  CompositeProblem p =
      make_quadratic(HessianView::dense(Q), b,
                     CompositePart::box(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0)));
  p.name = "box_quadratic";
  return {"box_quadratic", std::move(p), PrimalVector::zero(n), 2.0};
}

Instance cubic_uc(Index n, double sigma3, double q_scale, double start) {
  Vector q = Vector::LinSpaced(n, 0.5, 1.5) * q_scale;
  CompositeProblem p = make_cubic_uc(HessianView::dense(q.asDiagonal()), sigma3);
  Vector x0 = Vector::LinSpaced(n, 1.0, -1.0);
  if (n == 1) x0(0) = 1.0;
  x0 *= start / x0.norm();
  return {"cubic_uc", std::move(p), PrimalVector(std::move(x0)), 2.0 * start};
}

Instance smoothed_chain(Index n, double smoothing) {
  return {"smoothed_chain", make_smoothed_chain(n, smoothing), PrimalVector::zero(n),
          2.0 * double(n)};
}

Instance scaled_logistic() {
  Instance base = logistic(200, 20, 1e-2, 5);
  Vector s = Vector::LinSpaced(base.problem.dim(), 0.5, 1.0);
  base.problem = with_geometry(std::move(base.problem),
                               ScalingFunction::weighted(s, base.problem.norms),
                               base.problem.norms);
  base.problem.name = "scaled_logistic";
  base.name = "scaled_logistic";
  return base;
}

std::vector<Instance> shipped_instances() {
  std::vector<Instance> out;
  out.push_back(quadratic_1d());
  out.push_back(with_reference(logistic()));
  out.push_back(with_reference(logistic_fixture()));
  out.push_back(with_reference(log_sum_exp()));
  out.push_back(with_reference(l1_quadratic()));
  out.push_back(with_reference(box_quadratic()));
  out.push_back(cubic_uc(3, 1.0));
  out.push_back(cubic_uc(4, 0.1, 1.0));
  out.push_back(with_reference(smoothed_chain(12)));
  out.push_back(with_reference(scaled_logistic()));
  return out;
}

}  // namespace gradreg::testing
