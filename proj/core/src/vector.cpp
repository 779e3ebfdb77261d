#include "gradreg/vector.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace gradreg {

void require_same_size(Index a, Index b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                       " vs " + std::to_string(b) + ")");
  }
}

NormPair NormPair::euclidean(Index n) {
  if (n <= 0) throw InvalidInput("NormPair: dimension must be positive");
  return NormPair(Vector::Ones(n), true);
}

NormPair NormPair::weighted(Vector weights) {
  if (weights.size() == 0) throw InvalidInput("NormPair: empty weight vector");
  if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
    throw InvalidInput("NormPair: weights must be finite and positive");
  }
  const bool unit = (weights.array() == 1.0).all();
  return NormPair(std::move(weights), unit);
}

double NormPair::primal(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "primal norm");
  if (euclidean_) return x.vec().norm();
  return std::sqrt((w_.array() * x.vec().array().square()).sum());
}

double NormPair::dual(const DualVector& g) const {
  require_same_size(g.size(), dim(), "dual norm");
  if (euclidean_) return g.vec().norm();
  return std::sqrt((g.vec().array().square() / w_.array()).sum());
}

std::pair<double, double> NormPair::spectrum(const Matrix& B) const {
  require_same_size(B.rows(), dim(), "spectrum");
  Matrix scaled = B;
  if (!euclidean_) {
    const Vector s = w_.array().rsqrt();
    scaled = s.asDiagonal() * B * s.asDiagonal();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (scaled + scaled.transpose()),
                                            Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("spectrum: eigen-decomposition failed");
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

double NormPair::operator_norm(const Matrix& B) const {
  const auto [lo, hi] = spectrum(B);
  return std::max(std::abs(lo), std::abs(hi));
}

double dual_norm(const DualVector& g, const NormPair& norms) {
  require_finite(g, "dual_norm");
  return norms.dual(g);
}

double primal_norm(const PrimalVector& x, const NormPair& norms) {
  require_finite(x, "primal_norm");
  return norms.primal(x);
}

HessianView HessianView::dense(Matrix m) {
  if (m.rows() != m.cols()) throw InvalidInput("HessianView: matrix must be square");
  HessianView h;
  h.n_ = m.rows();
  h.dense_ = std::move(m);
  return h;
}

HessianView HessianView::op(Index n, Operator apply) {
  if (!apply) throw InvalidInput("HessianView: empty operator");
  HessianView h;
  h.n_ = n;
  h.op_ = std::move(apply);
  return h;
}

HessianView HessianView::both(Matrix m, Operator apply) {
  HessianView h = dense(std::move(m));
  if (!apply) throw InvalidInput("HessianView: empty operator");
  h.op_ = std::move(apply);
  return h;
}

Matrix HessianView::to_dense() const {
  if (dense_) return *dense_;
  Matrix m(n_, n_);
  Vector e = Vector::Zero(n_);
  for (Index j = 0; j < n_; ++j) {
    e(j) = 1.0;
    m.col(j) = op_(e);
    e(j) = 0.0;
  }
  return 0.5 * (m + m.transpose());
}

DualVector HessianView::apply(const PrimalVector& h) const {
  return dense_ ? apply_dense(h) : apply_operator(h);
}

DualVector HessianView::apply_dense(const PrimalVector& h) const {
  if (!dense_) throw InvalidInput("HessianView: no dense form");
  require_same_size(h.size(), n_, "apply_hessian");
  return DualVector(*dense_ * h.vec());
}

DualVector HessianView::apply_operator(const PrimalVector& h) const {
  if (!op_) throw InvalidInput("HessianView: no operator form");
  require_same_size(h.size(), n_, "apply_hessian");
  return DualVector(op_(h.vec()));
}

DualVector apply_hessian(const HessianView& B, const PrimalVector& h) { return B.apply(h); }

}  // namespace gradreg
