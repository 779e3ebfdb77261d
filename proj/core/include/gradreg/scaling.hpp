#pragma once

#include "gradreg/vector.hpp"

namespace gradreg {

/// Scaling function d(x) = 1/2 sum_i s_i x_i^2.
///
/// Relative to a diagonal norm with weights w, d is sigma-strongly convex with
/// sigma = min_i s_i / w_i and its gradient is 1-Lipschitz iff max_i s_i / w_i <= 1.
/// The constructor enforces the Lipschitz normalization and accepts any declared
/// sigma in (0, min_i s_i / w_i].
class ScalingFunction {
 public:
  /// d = 1/2 ||x||^2 under the Euclidean norm; sigma = 1.
  static ScalingFunction euclidean(Index n);

  /// d = 1/2 sum s_i x_i^2 with sigma = min_i s_i / w_i for the given norm.
  static ScalingFunction weighted(Vector s, const NormPair& norms);

  /// As weighted(), but with an explicitly supplied modulus.
  static ScalingFunction weighted(Vector s, const NormPair& norms, double sigma);

  Index dim() const { return s_.size(); }
  double sigma() const { return sigma_; }
  const Vector& diagonal() const { return s_; }
  bool is_identity() const { return identity_; }

  double value(const PrimalVector& x) const;
  DualVector gradient(const PrimalVector& x) const;

 private:
  ScalingFunction(Vector s, double sigma);
  Vector s_;
  double sigma_;
  bool identity_;
};

/// Bregman distance rho(x, y) = d(y) - d(x) - <grad d(x), y - x>.
double bregman(const ScalingFunction& d, const PrimalVector& x, const PrimalVector& y);

/// grad d(y) - grad d(x).
DualVector bregman_gradient_gap(const ScalingFunction& d, const PrimalVector& x,
                                const PrimalVector& y);

}  // namespace gradreg
