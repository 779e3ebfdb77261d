#include "gradreg/scaling.hpp"

#include <cmath>
#include <limits>

namespace gradreg {

namespace {

// Headroom for weights computed as ratios that land a few ulps above 1.
constexpr double kLipschitzTolerance = 1e-12;

}  // namespace

ScalingFunction::ScalingFunction(Vector s, double sigma)
    : s_(std::move(s)), sigma_(sigma), identity_((s_.array() == 1.0).all()) {}

ScalingFunction ScalingFunction::euclidean(Index n) {
  if (n <= 0) throw InvalidInput("ScalingFunction: dimension must be positive");
  return ScalingFunction(Vector::Ones(n), 1.0);
}

ScalingFunction ScalingFunction::weighted(Vector s, const NormPair& norms) {
  require_same_size(s.size(), norms.dim(), "ScalingFunction");
  if (!s.allFinite() || (s.array() <= 0.0).any()) {
    throw InvalidInput("ScalingFunction: weights must be finite and positive");
  }
  const double sigma = (s.array() / norms.weights().array()).minCoeff();
  return weighted(std::move(s), norms, std::min(sigma, 1.0));
}

ScalingFunction ScalingFunction::weighted(Vector s, const NormPair& norms, double sigma) {
  require_same_size(s.size(), norms.dim(), "ScalingFunction");
  if (!s.allFinite() || (s.array() <= 0.0).any()) {
    throw InvalidInput("ScalingFunction: weights must be finite and positive");
  }
  const Vector ratio = s.array() / norms.weights().array();
  if (ratio.maxCoeff() > 1.0 + kLipschitzTolerance) {
    throw InvalidInput("ScalingFunction: gradient is not 1-Lipschitz in the paired norm");
  }
  if (!(sigma > 0.0) || sigma > 1.0 || sigma > ratio.minCoeff() * (1.0 + kLipschitzTolerance)) {
    throw InvalidInput("ScalingFunction: sigma must lie in (0, min_i s_i/w_i] and (0, 1]");
  }
  return ScalingFunction(std::move(s), sigma);
}

double ScalingFunction::value(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "ScalingFunction::value");
  return 0.5 * (s_.array() * x.vec().array().square()).sum();
}

DualVector ScalingFunction::gradient(const PrimalVector& x) const {
  require_same_size(x.size(), dim(), "ScalingFunction::gradient");
  return DualVector(s_.cwiseProduct(x.vec()));
}

double bregman(const ScalingFunction& d, const PrimalVector& x, const PrimalVector& y) {
  require_same_size(x.size(), y.size(), "bregman");
  // For the quadratic family the distance is exactly 1/2 sum s_i (y_i - x_i)^2;
  // evaluating it this way avoids cancellation in d(y) - d(x).
  const Vector diff = y.vec() - x.vec();
  const double r = 0.5 * (d.diagonal().array() * diff.array().square()).sum();
  if (!std::isfinite(r)) throw NumericError("bregman: non-finite result");
  return r;
}

DualVector bregman_gradient_gap(const ScalingFunction& d, const PrimalVector& x,
                                const PrimalVector& y) {
  require_same_size(x.size(), y.size(), "bregman_gradient_gap");
  return DualVector(d.diagonal().cwiseProduct(y.vec() - x.vec()));
}

}  // namespace gradreg
