#include "gradreg/problem.hpp"

#include <cmath>
#include <sstream>

namespace gradreg {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Tolerance for treating a point as inside a closed set.
constexpr double kDomainTol = 1e-12;

}  // namespace

SmoothOracle::SmoothOracle(std::shared_ptr<const SmoothFunction> fn, SmoothConstants constants)
    : fn_(std::move(fn)), constants_(std::move(constants)) {
  if (!fn_) throw InvalidInput("SmoothOracle: null function");
  if (!(constants_.lips_hessian >= 0.0) || !std::isfinite(constants_.lips_hessian)) {
    throw InvalidInput("SmoothOracle: L2 must be finite and nonnegative");
  }
}

CompositePart CompositePart::l1(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("l1: lambda must be positive");
  return CompositePart(L1{lambda});
}

CompositePart CompositePart::box(Vector lo, Vector hi) {
  require_same_size(lo.size(), hi.size(), "box");
  if ((lo.array() >= hi.array()).any()) {
    throw InvalidInput("box: need lo < hi componentwise (nonempty interior)");
  }
  if (lo.array().isNaN().any() || hi.array().isNaN().any()) throw InvalidInput("box: NaN bound");
  return CompositePart(Box{std::move(lo), std::move(hi)});
}

CompositePart CompositePart::ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidInput("ball: radius must be positive");
  if (!center.allFinite()) throw InvalidInput("ball: non-finite center");
  return CompositePart(Ball{std::move(center), radius});
}

std::string CompositePart::name() const {
  return std::visit(Overloaded{[](const Zero&) { return std::string("zero"); },
                               [](const L1& p) {
                                 std::ostringstream os;
                                 os << "l1(" << p.lambda << ")";
                                 return os.str();
                               },
                               [](const Box&) { return std::string("box"); },
                               [](const Ball& b) {
                                 std::ostringstream os;
                                 os << "ball(" << b.radius << ")";
                                 return os.str();
                               }},
                    kind_);
}

bool CompositePart::in_domain(const PrimalVector& x) const {
  return std::visit(
      Overloaded{[](const Zero&) { return true; }, [](const L1&) { return true; },
                 [&](const Box& b) {
                   return ((x.vec() - b.lo).array() >= -kDomainTol).all() &&
                          ((b.hi - x.vec()).array() >= -kDomainTol).all();
                 },
                 [&](const Ball& b) {
                   return (x.vec() - b.center).norm() <= b.radius * (1.0 + kDomainTol);
                 }},
      kind_);
}

bool CompositePart::in_interior(const PrimalVector& x) const {
  return std::visit(
      Overloaded{[](const Zero&) { return true; }, [](const L1&) { return true; },
                 [&](const Box& b) {
                   return (x.vec().array() > b.lo.array()).all() &&
                          (x.vec().array() < b.hi.array()).all();
                 },
                 [&](const Ball& b) { return (x.vec() - b.center).norm() < b.radius; }},
      kind_);
}

double CompositePart::value(const PrimalVector& x) const {
  return std::visit(Overloaded{[](const Zero&) { return 0.0; },
                               [&](const L1& p) { return p.lambda * x.vec().lpNorm<1>(); },
                               [&](const Box&) { return in_domain(x) ? 0.0 : kInf; },
                               [&](const Ball&) { return in_domain(x) ? 0.0 : kInf; }},
                    kind_);
}

PrimalVector CompositePart::prox(const PrimalVector& v, double t) const {
  return std::visit(
      Overloaded{[&](const Zero&) { return v; },
                 [&](const L1& p) {
                   const double thr = t * p.lambda;
                   Vector out = v.vec().array().sign() *
                                (v.vec().array().abs() - thr).max(0.0);
                   return PrimalVector(std::move(out));
                 },
                 [&](const Box& b) { return PrimalVector(v.vec().cwiseMax(b.lo).cwiseMin(b.hi)); },
                 [&](const Ball& b) {
                   const Vector d = v.vec() - b.center;
                   const double r = d.norm();
                   if (r <= b.radius) return v;
                   return PrimalVector(b.center + (b.radius / r) * d);
                 }},
      kind_);
}

DualVector CompositePart::min_norm_subgradient(const PrimalVector& x) const {
  if (!in_domain(x)) throw InvalidInput("min_norm_subgradient: point outside dom psi");
  return std::visit(Overloaded{[&](const Zero&) { return DualVector::zero(x.size()); },
                               [&](const L1& p) {
                                 return DualVector(p.lambda * x.vec().array().sign().matrix());
                               },
                               [&](const Box&) { return DualVector::zero(x.size()); },
                               [&](const Ball&) { return DualVector::zero(x.size()); }},
                    kind_);
}

CompositePart CompositePart::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidInput("CompositePart::scaled: factor must be positive");
  if (const auto* p = std::get_if<L1>(&kind_)) return l1(p->lambda * factor);
  return *this;
}

void CompositeProblem::validate() const {
  const Index n = smooth.dim();
  require_same_size(scaling.dim(), n, "CompositeProblem scaling");
  require_same_size(norms.dim(), n, "CompositeProblem norms");
  if (const auto* b = std::get_if<CompositePart::Box>(&simple.kind())) {
    require_same_size(b->lo.size(), n, "CompositeProblem box");
  }
  if (const auto* b = std::get_if<CompositePart::Ball>(&simple.kind())) {
    require_same_size(b->center.size(), n, "CompositeProblem ball");
  }
  if (reference) require_same_size(reference->x_star.size(), n, "CompositeProblem reference");
}

CompositeProblem make_problem(std::string name, SmoothOracle smooth, CompositePart simple) {
  const Index n = smooth.dim();
  return make_problem(std::move(name), std::move(smooth), std::move(simple),
                      ScalingFunction::euclidean(n), NormPair::euclidean(n));
}

CompositeProblem make_problem(std::string name, SmoothOracle smooth, CompositePart simple,
                              ScalingFunction scaling, NormPair norms) {
  CompositeProblem p{std::move(name), std::move(smooth), std::move(simple), std::move(scaling),
                     std::move(norms), std::nullopt};
  p.validate();
  return p;
}

DualVector initial_subgradient(const CompositeProblem& problem, const PrimalVector& x0) {
  require_same_size(x0.size(), problem.dim(), "initial_subgradient");
  require_finite(x0, "initial_subgradient");
  if (problem.simple.is_indicator() && !problem.simple.in_interior(x0)) {
    throw InvalidInput("initial point must lie in the interior of dom psi");
  }
  return problem.smooth.gradient(x0) + problem.simple.min_norm_subgradient(x0);
}

DualVector stationarity_subgradient(const CompositeProblem& problem, const PrimalVector& x) {
  require_same_size(x.size(), problem.dim(), "stationarity_subgradient");
  if (!problem.simple.in_domain(x)) throw InvalidInput("stationarity_subgradient: x outside dom psi");
  const Vector g = problem.smooth.gradient(x).vec();
  const Index n = g.size();
  return std::visit(
      Overloaded{[&](const CompositePart::Zero&) { return DualVector(g); },
                 [&](const CompositePart::L1& p) {
                   Vector out(n);
                   for (Index i = 0; i < n; ++i) {
                     if (x[i] != 0.0) {
                       out(i) = g(i) + p.lambda * (x[i] > 0.0 ? 1.0 : -1.0);
                     } else {
                       const double mag = std::max(std::abs(g(i)) - p.lambda, 0.0);
                       out(i) = g(i) > 0.0 ? mag : -mag;
                     }
                   }
                   return DualVector(std::move(out));
                 },
                 [&](const CompositePart::Box& b) {
                   Vector out = g;
                   for (Index i = 0; i < n; ++i) {
                     const bool at_lo = x[i] <= b.lo(i) + kDomainTol;
                     const bool at_hi = x[i] >= b.hi(i) - kDomainTol;
                     // The normal cone is (-inf, 0] at a lower bound and [0, inf) at an upper bound.
                     if (at_lo && g(i) > 0.0) out(i) = 0.0;
                     if (at_hi && g(i) < 0.0) out(i) = 0.0;
                   }
                   return DualVector(std::move(out));
                 },
                 [&](const CompositePart::Ball& b) {
                   const Vector d = x.vec() - b.center;
                   const double r = d.norm();
                   if (r < b.radius * (1.0 - kDomainTol) || r == 0.0) return DualVector(g);
                   const Vector u = d / r;
                   const double t = std::max(-g.dot(u), 0.0);
                   return DualVector(g + t * u);
                 }},
      problem.simple.kind());
}

}  // namespace gradreg
