#pragma once

#include <Eigen/Dense>

#include <functional>
#include <initializer_list>
#include <optional>
#include <utility>

#include "gradreg/errors.hpp"

namespace gradreg {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct PrimalTag {};
struct DualTag {};

/// Coordinates of a point (Tag = PrimalTag) or of a linear functional
/// (Tag = DualTag). Arithmetic is only defined within one role; the two
/// roles meet through pairing().
template <class Tag>
class TaggedVector {
 public:
  TaggedVector() = default;
  explicit TaggedVector(Vector coords) : v_(std::move(coords)) {}
  TaggedVector(std::initializer_list<double> coords) : v_(coords.size()) {
    Index i = 0;
    for (double c : coords) v_(i++) = c;
  }

  static TaggedVector zero(Index n) { return TaggedVector(Vector::Zero(n)); }

  Index size() const { return v_.size(); }
  const Vector& vec() const { return v_; }
  Vector& vec() { return v_; }
  double operator[](Index i) const { return v_(i); }

  bool all_finite() const { return v_.allFinite(); }

  TaggedVector& operator+=(const TaggedVector& o) {
    v_ += o.v_;
    return *this;
  }
  TaggedVector& operator-=(const TaggedVector& o) {
    v_ -= o.v_;
    return *this;
  }
  TaggedVector& operator*=(double a) {
    v_ *= a;
    return *this;
  }

  friend TaggedVector operator+(TaggedVector a, const TaggedVector& b) { return a += b; }
  friend TaggedVector operator-(TaggedVector a, const TaggedVector& b) { return a -= b; }
  friend TaggedVector operator*(double s, TaggedVector a) { return a *= s; }
  friend TaggedVector operator*(TaggedVector a, double s) { return a *= s; }
  friend TaggedVector operator-(TaggedVector a) {
    a.v_ = -a.v_;
    return a;
  }

 private:
  Vector v_;
};

using PrimalVector = TaggedVector<PrimalTag>;
using DualVector = TaggedVector<DualTag>;

/// <g, x>
inline double pairing(const DualVector& g, const PrimalVector& x) { return g.vec().dot(x.vec()); }

/// Throws InvalidInput unless every entry is finite.
template <class Tag>
void require_finite(const TaggedVector<Tag>& v, const char* what) {
  if (!v.all_finite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

void require_same_size(Index a, Index b, const char* what);

/// Primal norm ||x||^2 = sum_i w_i x_i^2 and its dual ||g||_*^2 = sum_i g_i^2 / w_i.
/// Euclidean is the special case w = 1.
class NormPair {
 public:
  static NormPair euclidean(Index n);
  static NormPair weighted(Vector weights);

  Index dim() const { return w_.size(); }
  bool is_euclidean() const { return euclidean_; }
  const Vector& weights() const { return w_; }

  double primal(const PrimalVector& x) const;
  double dual(const DualVector& g) const;

  /// max |<Bx, x>| over ||x|| <= 1, for symmetric B.
  double operator_norm(const Matrix& B) const;

  /// Spectrum bounds of symmetric B relative to this norm (lambda_min, lambda_max).
  std::pair<double, double> spectrum(const Matrix& B) const;

 private:
  NormPair(Vector w, bool euclidean) : w_(std::move(w)), euclidean_(euclidean) {}
  Vector w_;
  bool euclidean_;
};

double dual_norm(const DualVector& g, const NormPair& norms);
double primal_norm(const PrimalVector& x, const NormPair& norms);

/// The Hessian of a smooth function at one point, in dense form, operator
/// form, or both.
class HessianView {
 public:
  using Operator = std::function<Vector(const Vector&)>;

  static HessianView dense(Matrix m);
  static HessianView op(Index n, Operator apply);
  static HessianView both(Matrix m, Operator apply);

  Index dim() const { return n_; }
  bool has_dense() const { return dense_.has_value(); }
  bool has_operator() const { return static_cast<bool>(op_); }

  /// The dense matrix; materialized column by column when only the operator exists.
  Matrix to_dense() const;

  /// Bh, preferring the dense form.
  DualVector apply(const PrimalVector& h) const;
  DualVector apply_dense(const PrimalVector& h) const;
  DualVector apply_operator(const PrimalVector& h) const;

 private:
  Index n_ = 0;
  std::optional<Matrix> dense_;
  Operator op_;
};

DualVector apply_hessian(const HessianView& B, const PrimalVector& h);

}  // namespace gradreg
