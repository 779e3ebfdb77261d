#include "gradreg/instances.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace gradreg {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + exp(-t)).
double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Matrix dense_psd(const HessianView& Q, const char* what) {
  Matrix m = Q.to_dense();
  if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite Q");
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw InvalidInput(std::string(what) + ": Q must be positive semidefinite");
  }
  return m;
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

PrimalVector random_unit(std::mt19937_64& rng, Index n, const NormPair& norms) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector u(n);
  for (Index i = 0; i < n; ++i) u(i) = normal(rng);
  PrimalVector p(std::move(u));
  return (1.0 / norms.primal(p)) * p;
}

}  // namespace

// ---------------------------------------------------------------------------

LogisticLoss::LogisticLoss(LabeledDataset data, double ridge_mu)
    : data_(std::move(data)), mu_(ridge_mu) {
  if (data_.samples() == 0 || data_.dim() == 0) throw InvalidInput("logistic: empty dataset");
  if (!data_.features.allFinite()) throw InvalidInput("logistic: non-finite feature");
  if (((data_.labels.array() != 1.0) && (data_.labels.array() != -1.0)).any()) {
    throw InvalidInput("logistic: labels must be -1 or +1");
  }
  if (!(ridge_mu >= 0.0)) throw InvalidInput("logistic: ridge must be nonnegative");
}

double LogisticLoss::value(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "logistic");
  const Vector z = data_.labels.cwiseProduct(data_.features * x.vec());
  double s = 0.0;
  for (Index i = 0; i < z.size(); ++i) s += softplus(-z(i));
  return s + 0.5 * mu_ * x.vec().squaredNorm();
}

DualVector LogisticLoss::gradient(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "logistic");
  const Vector z = data_.labels.cwiseProduct(data_.features * x.vec());
  Vector w(z.size());
  for (Index i = 0; i < z.size(); ++i) w(i) = -data_.labels(i) * logistic(-z(i));
  return DualVector(data_.features.transpose() * w + mu_ * x.vec());
}

HessianView LogisticLoss::hessian(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "logistic");
  const Vector z = data_.features * x.vec();
  Vector curv(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double p = logistic(z(i));
    curv(i) = p * (1.0 - p);
  }
  Matrix H = data_.features.transpose() * curv.asDiagonal() * data_.features;
  H.diagonal().array() += mu_;
  // The operator form keeps its own copy of the data needed for A^T D A h.
  auto op = [A = data_.features, curv, mu = mu_](const Vector& h) -> Vector {
    return A.transpose() * curv.cwiseProduct(A * h) + mu * h;
  };
  return HessianView::both(std::move(H), std::move(op));
}

// ---------------------------------------------------------------------------

QuadraticCubic::QuadraticCubic(Matrix Q, Vector b, double cubic_coefficient)
    : Q_(std::move(Q)), b_(std::move(b)), cubic_(cubic_coefficient) {
  require_same_size(Q_.rows(), b_.size(), "QuadraticCubic");
  require_same_size(Q_.cols(), b_.size(), "QuadraticCubic");
  if (!(cubic_ >= 0.0)) throw InvalidInput("QuadraticCubic: cubic coefficient must be >= 0");
}

double QuadraticCubic::value(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "QuadraticCubic");
  const Vector& v = x.vec();
  const double r = v.norm();
  return 0.5 * v.dot(Q_ * v) - b_.dot(v) + cubic_ / 3.0 * r * r * r;
}

DualVector QuadraticCubic::gradient(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "QuadraticCubic");
  const Vector& v = x.vec();
  return DualVector(Q_ * v - b_ + cubic_ * v.norm() * v);
}

HessianView QuadraticCubic::hessian(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "QuadraticCubic");
  const Vector& v = x.vec();
  const double r = v.norm();
  Matrix H = Q_;
  if (cubic_ > 0.0 && r > 0.0) {
    H.diagonal().array() += cubic_ * r;
    H.noalias() += (cubic_ / r) * v * v.transpose();
  }
  auto op = [Q = Q_, v, r, s = cubic_](const Vector& h) -> Vector {
    Vector out = Q * h;
    if (s > 0.0 && r > 0.0) out += s * (r * h + (v.dot(h) / r) * v);
    return out;
  };
  return HessianView::both(std::move(H), std::move(op));
}

// ---------------------------------------------------------------------------

LogSumExp::LogSumExp(Matrix A, Vector c, double ridge_mu)
    : A_(std::move(A)), c_(std::move(c)), mu_(ridge_mu) {
  require_same_size(A_.rows(), c_.size(), "LogSumExp");
  if (A_.rows() == 0 || A_.cols() == 0) throw InvalidInput("LogSumExp: empty matrix");
  if (!(mu_ >= 0.0)) throw InvalidInput("LogSumExp: ridge must be nonnegative");
}

Vector LogSumExp::softmax(const Vector& x) const {
  Vector z = A_ * x - c_;
  z.array() -= z.maxCoeff();
  z = z.array().exp();
  return z / z.sum();
}

double LogSumExp::value(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "LogSumExp");
  const Vector z = A_ * x.vec() - c_;
  const double zmax = z.maxCoeff();
  return zmax + std::log((z.array() - zmax).exp().sum()) + 0.5 * mu_ * x.vec().squaredNorm();
}

DualVector LogSumExp::gradient(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "LogSumExp");
  return DualVector(A_.transpose() * softmax(x.vec()) + mu_ * x.vec());
}

HessianView LogSumExp::hessian(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "LogSumExp");
  const Vector p = softmax(x.vec());
  const Vector Ap = A_.transpose() * p;
  Matrix H = A_.transpose() * p.asDiagonal() * A_ - Ap * Ap.transpose();
  H.diagonal().array() += mu_;
  H = 0.5 * (H + H.transpose());
  auto op = [A = A_, p, mu = mu_](const Vector& h) -> Vector {
    const Vector Ah = A * h;
    return A.transpose() * (p.cwiseProduct(Ah) - p * p.dot(Ah)) + mu * h;
  };
  return HessianView::both(std::move(H), std::move(op));
}

// ---------------------------------------------------------------------------

double estimate_hessian_lipschitz(const SmoothFunction& f, const NormPair& norms,
                                  const PrimalVector& center, double radius,
                                  const LipschitzEstimateOptions& options) {
  const Index n = f.dim();
  require_same_size(center.size(), n, "estimate_hessian_lipschitz");
  if (!(radius > 0.0)) throw InvalidInput("estimate_hessian_lipschitz: radius must be positive");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const auto random_point = [&] {
    return center + (radius * unif(rng)) * random_unit(rng, n, norms);
  };

  double best = 0.0;
  for (int s = 0; s < options.base_points; ++s) {
    const PrimalVector x = random_point();
    const PrimalVector y = random_point();
    const double dist = norms.primal(x - y);
    if (dist > 0.0) {
      const Matrix diff = f.hessian(x).to_dense() - f.hessian(y).to_dense();
      best = std::max(best, norms.operator_norm(diff) / dist);
    }

    // Power search for the steepest third-derivative direction at x.
    PrimalVector u = random_unit(rng, n, norms);
    const double t = options.fd_step * std::max(1.0, radius);
    for (int it = 0; it < options.power_iterations; ++it) {
      const Matrix M =
          (f.hessian(x + t * u).to_dense() - f.hessian(x - t * u).to_dense()) / (2.0 * t);
      best = std::max(best, norms.operator_norm(M));
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
      const Vector& ev = eig.eigenvalues();
      const Index top = std::abs(ev(0)) > std::abs(ev(n - 1)) ? 0 : n - 1;
      PrimalVector next(eig.eigenvectors().col(top));
      const double nn = norms.primal(next);
      if (!(nn > 0.0)) break;
      u = (1.0 / nn) * next;
    }
  }
  return options.safety_factor * best;
}

// ---------------------------------------------------------------------------

CompositeProblem make_logistic(LabeledDataset data, double ridge_mu, const LogisticOptions& options) {
  if (data.samples() == 0) throw InvalidInput("make_logistic: empty dataset");
  const Index n = data.dim();
  double mean_row = data.features.rowwise().norm().mean();
  if (!(mean_row > 0.0)) mean_row = 1.0;
  auto fn = std::make_shared<LogisticLoss>(std::move(data), ridge_mu);
  const NormPair norms = NormPair::euclidean(n);

  SmoothConstants constants;
  if (options.lips_hessian) {
    constants.lips_hessian = *options.lips_hessian;
  } else {
    const double radius = options.region_radius > 0.0
                              ? options.region_radius
                              : 4.0 * std::sqrt(static_cast<double>(n)) / mean_row;
    constants.lips_hessian =
        estimate_hessian_lipschitz(*fn, norms, PrimalVector::zero(n), radius, options.estimate);
  }
  if (ridge_mu > 0.0) constants.strong_convexity_mu = ridge_mu;
  return make_problem("logistic", SmoothOracle(std::move(fn), constants), CompositePart::zero());
}

CompositeProblem make_cubic_uc(const HessianView& Q, double sigma3) {
  if (!(sigma3 > 0.0) || !std::isfinite(sigma3)) {
    throw InvalidInput("make_cubic_uc: sigma3 must be positive");
  }
  Matrix q = dense_psd(Q, "make_cubic_uc");
  const Index n = q.rows();
  SmoothConstants constants;
  constants.lips_hessian = 2.0 * sigma3;
  constants.uniform_convexity_sigma3 = 0.5 * sigma3;
  constants.third_differentiable = false;
  const double mu = min_eigenvalue(q);
  if (mu > 0.0) constants.strong_convexity_mu = mu;
  auto fn = std::make_shared<QuadraticCubic>(std::move(q), Vector::Zero(n), sigma3);
  CompositeProblem p =
      make_problem("cubic_uc", SmoothOracle(std::move(fn), constants), CompositePart::zero());
  p.reference = ReferenceOptimum{0.0, PrimalVector::zero(n), 0.0};
  return p;
}

CompositeProblem make_quadratic(const HessianView& Q, const DualVector& b, CompositePart simple) {
  Matrix q = dense_psd(Q, "make_quadratic");
  require_same_size(q.rows(), b.size(), "make_quadratic");
  SmoothConstants constants;
  constants.lips_hessian = 0.0;
  const double mu = min_eigenvalue(q);
  if (mu > 0.0) constants.strong_convexity_mu = mu;
  auto fn = std::make_shared<QuadraticCubic>(std::move(q), b.vec(), 0.0);
  return make_problem("quadratic", SmoothOracle(std::move(fn), constants), std::move(simple));
}

CompositeProblem make_l1_quadratic(const HessianView& Q, const DualVector& b, double lambda) {
  CompositeProblem p = make_quadratic(Q, b, CompositePart::l1(lambda));
  p.name = "l1_quadratic";
  return p;
}

CompositeProblem make_log_sum_exp(Matrix A, Vector c, double ridge_mu,
                                  const LogSumExpOptions& options) {
  const Index n = A.cols();
  auto fn = std::make_shared<LogSumExp>(std::move(A), std::move(c), ridge_mu);
  const NormPair norms = NormPair::euclidean(n);
  SmoothConstants constants;
  constants.lips_hessian =
      options.lips_hessian ? *options.lips_hessian
                           : estimate_hessian_lipschitz(*fn, norms, PrimalVector::zero(n),
                                                        options.region_radius, options.estimate);
  if (ridge_mu > 0.0) constants.strong_convexity_mu = ridge_mu;
  return make_problem("log_sum_exp", SmoothOracle(std::move(fn), constants),
                      CompositePart::zero());
}

SmoothedChain::SmoothedChain(Index n, double smoothing) : n_(n), s2_(smoothing * smoothing) {
  if (n < 1) throw InvalidInput("chain length must be positive");
  if (!(smoothing >= 0.0)) throw InvalidInput("chain smoothing must be nonnegative");
}

Vector SmoothedChain::differences(const PrimalVector& x) const {
  if (x.size() != n_) throw InvalidInput("chain: dimension mismatch");
  Vector d(n_);
  for (Index i = 0; i + 1 < n_; ++i) d(i) = x[i] - x[i + 1];
  d(n_ - 1) = x[n_ - 1];
  return d;
}

double SmoothedChain::value(const PrimalVector& x) const {
  const Vector d = differences(x);
  double total = 0.0;
  for (Index i = 0; i < n_; ++i) total += std::pow(d(i) * d(i) + s2_, 1.5) / 3.0;
  return total - x[0];
}

DualVector SmoothedChain::gradient(const PrimalVector& x) const {
  const Vector d = differences(x);
  Vector g = Vector::Zero(n_);
  for (Index i = 0; i < n_; ++i) {
    const double w = d(i) * std::sqrt(d(i) * d(i) + s2_);
    g(i) += w;
    if (i + 1 < n_) g(i + 1) -= w;
  }
  g(0) -= 1.0;
  return DualVector(std::move(g));
}

HessianView SmoothedChain::hessian(const PrimalVector& x) const {
  const Vector d = differences(x);
  Matrix H = Matrix::Zero(n_, n_);
  for (Index i = 0; i < n_; ++i) {
    const double r = std::sqrt(d(i) * d(i) + s2_);
    const double w = r > 0.0 ? (2.0 * d(i) * d(i) + s2_) / r : 0.0;
    H(i, i) += w;
    if (i + 1 < n_) {
      H(i + 1, i + 1) += w;
      H(i, i + 1) -= w;
      H(i + 1, i) -= w;
    }
  }
  return HessianView::dense(std::move(H));
}

CompositeProblem make_smoothed_chain(Index n, double smoothing) {
  SmoothConstants constants;
  constants.lips_hessian = 8.0 * std::sqrt(2.0);
  return make_problem("smoothed_chain",
                      SmoothOracle(std::make_shared<SmoothedChain>(n, smoothing), constants),
                      CompositePart::zero());
}

CompositeProblem with_simple_part(CompositeProblem problem, CompositePart simple) {
  problem.simple = std::move(simple);
  problem.reference.reset();
  problem.validate();
  return problem;
}

CompositeProblem with_geometry(CompositeProblem problem, ScalingFunction scaling, NormPair norms) {
  problem.scaling = std::move(scaling);
  problem.norms = std::move(norms);
  problem.validate();
  return problem;
}

}  // namespace gradreg
