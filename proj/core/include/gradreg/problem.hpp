#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "gradreg/scaling.hpp"
#include "gradreg/vector.hpp"

namespace gradreg {

/// Twice differentiable convex function f.
class SmoothFunction {
 public:
  virtual ~SmoothFunction() = default;
  virtual Index dim() const = 0;
  virtual double value(const PrimalVector& x) const = 0;
  virtual DualVector gradient(const PrimalVector& x) const = 0;
  virtual HessianView hessian(const PrimalVector& x) const = 0;
};

struct SmoothConstants {
  double lips_hessian = 0.0;                         // L2
  std::optional<double> strong_convexity_mu;         // mu
  std::optional<double> uniform_convexity_sigma3;    // sigma_3
  /// False when f lacks a third derivative somewhere (e.g. a cubic norm term at the origin).
  bool third_differentiable = true;
};

/// A smooth function together with the constants the theory needs.
class SmoothOracle {
 public:
  SmoothOracle(std::shared_ptr<const SmoothFunction> fn, SmoothConstants constants);

  Index dim() const { return fn_->dim(); }
  double value(const PrimalVector& x) const { return fn_->value(x); }
  DualVector gradient(const PrimalVector& x) const { return fn_->gradient(x); }
  HessianView hessian(const PrimalVector& x) const { return fn_->hessian(x); }

  double lips_hessian() const { return constants_.lips_hessian; }
  std::optional<double> strong_convexity_mu() const { return constants_.strong_convexity_mu; }
  std::optional<double> uniform_convexity_sigma3() const {
    return constants_.uniform_convexity_sigma3;
  }
  const SmoothConstants& constants() const { return constants_; }
  const std::shared_ptr<const SmoothFunction>& function() const { return fn_; }

  SmoothOracle with_constants(SmoothConstants constants) const {
    return SmoothOracle(fn_, std::move(constants));
  }

 private:
  std::shared_ptr<const SmoothFunction> fn_;
  SmoothConstants constants_;
};

/// The simple term psi of F = f + psi.
class CompositePart {
 public:
  struct Zero {};
  struct L1 {
    double lambda;
  };
  struct Box {
    Vector lo;
    Vector hi;
  };
  struct Ball {
    Vector center;
    double radius;
  };
  using Kind = std::variant<Zero, L1, Box, Ball>;

  static CompositePart zero() { return CompositePart(Zero{}); }
  static CompositePart l1(double lambda);
  static CompositePart box(Vector lo, Vector hi);
  static CompositePart ball(Vector center, double radius);

  const Kind& kind() const { return kind_; }
  bool is_zero() const { return std::holds_alternative<Zero>(kind_); }
  bool is_indicator() const {
    return std::holds_alternative<Box>(kind_) || std::holds_alternative<Ball>(kind_);
  }
  std::string name() const;

  /// psi(x); +infinity outside dom psi.
  double value(const PrimalVector& x) const;
  bool in_domain(const PrimalVector& x) const;
  bool in_interior(const PrimalVector& x) const;

  /// argmin_y t*psi(y) + 1/2 ||y - v||_2^2.
  PrimalVector prox(const PrimalVector& v, double t) const;

  /// Minimum-norm element of the subdifferential at x (x in dom psi).
  DualVector min_norm_subgradient(const PrimalVector& x) const;

  /// The same term multiplied by a positive factor (indicators are unchanged).
  CompositePart scaled(double factor) const;

 private:
  explicit CompositePart(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

struct ReferenceOptimum {
  double F_star;
  PrimalVector x_star;
  double subgradient_norm;  // ||F'(x_star)||_* certified by the reference solve
};

/// F = f + psi with the geometry (norms, scaling function) used to minimize it.
struct CompositeProblem {
  std::string name;
  SmoothOracle smooth;
  CompositePart simple;
  ScalingFunction scaling;
  NormPair norms;
  std::optional<ReferenceOptimum> reference;

  Index dim() const { return smooth.dim(); }
  double F(const PrimalVector& x) const { return smooth.value(x) + simple.value(x); }
  double sigma() const { return scaling.sigma(); }
  double lips_hessian() const { return smooth.lips_hessian(); }

  /// Throws InvalidInput if the components disagree on dimension.
  void validate() const;
};

CompositeProblem make_problem(std::string name, SmoothOracle smooth, CompositePart simple);
CompositeProblem make_problem(std::string name, SmoothOracle smooth, CompositePart simple,
                              ScalingFunction scaling, NormPair norms);

/// Initial subgradient F'_0 = grad f(x0) + min-norm element of the subdifferential
/// of psi at x0. Indicator terms require x0 in the interior of their domain.
DualVector initial_subgradient(const CompositeProblem& problem, const PrimalVector& x0);

/// An element of the subdifferential of F at x with small dual norm: grad f(x)
/// plus the psi-subgradient chosen coordinatewise (l1, box) or along the outward
/// normal (ball) to cancel as much of grad f(x) as possible. Exact minimum norm for
/// the separable cases.
DualVector stationarity_subgradient(const CompositeProblem& problem, const PrimalVector& x);

}  // namespace gradreg
