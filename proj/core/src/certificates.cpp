#include "gradreg/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace gradreg {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::not_armed:
      return "not_armed";
  }
  return "not_armed";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "not_armed") return Verdict::not_armed;
  throw InvalidInput("unknown verdict '" + s + "'");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::basic:
      return "basic";
    case Mode::line_search:
      return "line_search";
    case Mode::accelerated:
      return "accelerated";
  }
  return "basic";
}

Mode mode_from_string(const std::string& s) {
  if (s == "basic") return Mode::basic;
  if (s == "line_search") return Mode::line_search;
  if (s == "accelerated") return Mode::accelerated;
  throw InvalidInput("unknown mode '" + s + "'");
}

Certificate make_certificate(std::string name, std::string anchor, double lhs, double rhs,
                             double slack, std::string armed_conditions) {
  Certificate c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.lhs = lhs;
  c.rhs = rhs;
  c.slack = slack;
  c.armed_conditions = std::move(armed_conditions);
  c.verdict = (lhs <= rhs + slack) ? Verdict::pass : Verdict::fail;
  return c;
}

Certificate not_armed(std::string name, std::string anchor, std::string reason) {
  Certificate c;
  c.name = std::move(name);
  c.anchor = std::move(anchor);
  c.armed_conditions = std::move(reason);
  c.verdict = Verdict::not_armed;
  return c;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Evaluates the inequality but withholds a verdict when `armed` is false.
Certificate judge(std::string name, std::string anchor, double lhs, double rhs, double slack,
                  bool armed, std::string conditions) {
  Certificate c = make_certificate(std::move(name), std::move(anchor), lhs, rhs, slack,
                                   std::move(conditions));
  if (!armed) c.verdict = Verdict::not_armed;
  return c;
}

std::string step_anchor(int k, const char* what) {
  std::ostringstream os;
  os << "step " << k << "->" << k + 1 << ": " << what;
  return os.str();
}

// Tracks the index with the largest violation lhs - rhs - slack.
struct Worst {
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  int k = -1;
  double margin = -kInf;
  int count = 0;

  void offer(int idx, double l, double r, double s) {
    ++count;
    const double m = l - r - s;
    if (k < 0 || m > margin || std::isnan(m)) {
      lhs = l;
      rhs = r;
      slack = s;
      k = idx;
      margin = std::isnan(m) ? kInf : m;
    }
  }
};

Certificate from_worst(std::string name, const std::string& what, const Worst& w,
                       std::string conditions) {
  if (w.count == 0) {
    // No index satisfies the hypothesis, so the statement holds vacuously.
    Certificate c = make_certificate(std::move(name), what + " (vacuous: no qualifying index)",
                                     0.0, 0.0, 0.0, std::move(conditions));
    return c;
  }
  std::ostringstream os;
  os << what << " (worst at k=" << w.k << ", " << w.count << " indices checked)";
  return make_certificate(std::move(name), os.str(), w.lhs, w.rhs, w.slack,
                          std::move(conditions));
}

bool all_steps_certified(const Trace& trace) {
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    if (!trace.records[i].certified) return false;
  }
  return true;
}

double primal_norm_with(const Vector& weights, const Vector& x) {
  return std::sqrt((weights.array() * x.array().square()).sum());
}

// ln( F0 g0^{1/2} D^{1/2} / eps^{3/2} )
double log_term(double F0, double g0, double D, double eps) {
  return std::log(F0 * std::sqrt(g0) * std::sqrt(D) / std::pow(eps, 1.5));
}

// Largest k with F_k - F* >= eps, or -1.
int last_gap_index(const Trace& trace, double F_star, double eps) {
  int last = -1;
  for (const auto& r : trace.records) {
    if (r.F - F_star >= eps) last = r.k;
  }
  return last;
}

}  // namespace

double growth_constant(double sigma, double L2, double H) { return 1.0 / sigma + 1.5 * L2 / H; }

double progress_constant(double c, double H) { return std::sqrt(3.0 / H) / (2.0 * c * c); }

double uc_rate_constant(double c, double sigma3, double H) {
  return 3.0 * std::sqrt(3.0) / (4.0 * std::pow(c, 1.5)) * std::sqrt(sigma3 / H);
}

double distance_bound(const Trace& trace, const PrimalVector& x_star) {
  const Vector& w = trace.header.norm_weights;
  double D = 0.0;
  for (const auto& r : trace.records) {
    D = std::max(D, primal_norm_with(w, (r.x - x_star).vec()));
  }
  return D;
}

std::vector<Certificate> step_certificates(const TraceHeader& h, const IterationRecord* prev,
                                           const IterationRecord& cur,
                                           const IterationRecord& next) {
  std::vector<Certificate> out;
  const int k = cur.k;
  if (h.mode == Mode::accelerated) {
    const double L2 = std::max(h.L2, 1e-12);
    const double k1 = static_cast<double>(next.k);
    const double mass = next.B.value_or(0.0);
    const std::string heur = h.third_differentiable ? "" : "; heuristic: f lacks a third derivative";
    out.push_back(make_certificate("accel_mass", step_anchor(k, "coefficient mass B_k >= k^3/(27 L2)"),
                                   k1 * k1 * k1 / (27.0 * L2), mass, 1e-12 * mass,
                                   "always" + heur));
    out.push_back(make_certificate("accel_inner_tolerance",
                                   step_anchor(k, "inner solve reached the subgradient tolerance"),
                                   next.inner_residual, h.delta, 0.0, "always" + heur));
    return out;
  }

  const double sigma = h.sigma;
  const double L2 = h.L2;
  const double A = cur.A;
  const double H = cur.H_used;
  const double g = cur.g_norm;
  const double g1 = next.g_norm;
  const double s = cur.step_norm;
  const double r = cur.inner_residual;
  const double r_prev = prev ? prev->inner_residual : 0.0;
  const double sA = sigma * A;
  if (!(sA > 0.0) || !(H > 0.0)) return out;

  const double c = growth_constant(sigma, L2, H);
  const double e = (r + r_prev) / sA;  // distance from T to the exact subproblem solution
  const bool exact = cur.certified;
  const std::string inexact = exact ? "" : "; inner solve hit its cap";

  // Step length and the A-bound follow from strong convexity of the model.
  {
    const double rhs = g / sA;
    out.push_back(judge("step_size", step_anchor(k, "||T - x|| <= ||F'(x)||_* / (sigma A)"), s,
                        rhs, kLemmaSlack * rhs + e, exact, "certified step" + inexact));
  }
  {
    const double rhs = 3.0 * sA;
    out.push_back(judge("a_bound", step_anchor(k, "H ||T - x|| <= 3 sigma A"), H * s, rhs,
                        kLemmaSlack * rhs + H * e, exact, "certified step" + inexact));
  }
  {
    const double lhs = cur.model_value + 0.5 * cur.curvature + 0.5 * sA * s * s;
    out.push_back(judge("model_lower_bound",
                        step_anchor(k, "model at x >= model minimum + quadratic growth"), lhs,
                        cur.F, kLemmaSlack * (1.0 + std::abs(cur.F)) + r * s, exact,
                        "certified step" + inexact));
  }
  const double x_slack = 0.5 * L2 * s * e + r;
  {
    const double rhs = sA * c * s;
    out.push_back(judge("grad_norm_step",
                        step_anchor(k, "||F'(T)||_* <= sigma A c ||T - x||"), g1, rhs,
                        kTheoremSlack * rhs + x_slack, exact, "L2 declared" + inexact));
  }
  {
    const double rhs = c * g;
    out.push_back(judge("grad_norm_ratio", step_anchor(k, "||F'(T)||_* <= c ||F'(x)||_*"), g1,
                        rhs, kTheoremSlack * rhs + sA * c * e + x_slack, exact,
                        "L2 declared" + inexact));
  }

  const double f_model = cur.f + cur.linear_term + 0.5 * cur.curvature + H / 6.0 * s * s * s;
  const double up_slack = 1e-10 * (1.0 + std::abs(cur.f));
  const bool upper_holds = next.f <= f_model + up_slack;
  {
    const bool armed = H >= L2 || h.mode == Mode::line_search;
    out.push_back(judge("cubic_upper_model",
                        step_anchor(k, "f(T) <= second-order model + H/6 ||T - x||^3"), next.f,
                        f_model, up_slack, armed,
                        armed ? "H >= L2 or accepted by line search" : "H < L2"));
  }

  const bool armed = upper_holds && exact;
  const std::string cond = upper_holds ? "cubic upper model holds" + inexact
                                       : "cubic upper model fails at this step";
  const double dec_slack =
      kLemmaSlack * (1.0 + std::abs(cur.F)) + r * s + H * e * s * s / 6.0;
  out.push_back(judge("decrease",
                      step_anchor(k, "F(x) - F(T) >= 1/2 <hess(T - x), T - x> + sigma A/2 ||T - x||^2"),
                      0.5 * cur.curvature + 0.5 * sA * s * s, cur.F - next.F, dec_slack, armed,
                      cond));
  {
    const double kappa = progress_constant(c, H);
    const double lhs = kappa * g1 * g1 / std::sqrt(g);
    const double slack =
        kLemmaSlack * (lhs + 1.0 + std::abs(cur.F)) + dec_slack + g1 * x_slack / (sA * c * c);
    out.push_back(judge("progress",
                        step_anchor(k, "F(x) - F(T) >= kappa ||F'(T)||_*^2 / ||F'(x)||_*^{1/2}"),
                        lhs, cur.F - next.F, slack, armed, cond));
  }
  out.push_back(judge("monotone", step_anchor(k, "F(T) <= F(x)"), next.F, cur.F, dec_slack, armed,
                      cond));

  if (h.mu && *h.mu > 0.0) {
    const double mu = *h.mu;
    const bool armed_super = H >= L2 && upper_holds && exact;
    const double rhs = 2.0 * c / mu * std::sqrt(H / 3.0) * std::pow(g, 1.5);
    const double s_err = 2.0 * r_prev / mu + (s > 0.0 ? 2.0 * dec_slack / (mu * s) : 0.0);
    out.push_back(judge("superlinear_step",
                        step_anchor(k, "||F'(T)||_* <= (2c/mu) sqrt(H/3) ||F'(x)||_*^{3/2}"), g1,
                        rhs, kTheoremSlack * rhs + x_slack + sA * c * s_err, armed_super,
                        armed_super ? "mu declared, H >= L2" : "needs H >= L2 and the upper model"));
  }

  if (h.mode == Mode::line_search) {
    const double top = std::max(h.H0, L2);
    const std::string lc = "line search, L2 declared";
    out.push_back(make_certificate("ls_floor", step_anchor(k, "H_0 <= H_k"), h.H0, cur.H_k,
                                   1e-12 * h.H0, lc));
    out.push_back(make_certificate("ls_ceiling", step_anchor(k, "H_k <= max(H_0, L2)"), cur.H_k,
                                   top, 1e-12 * top, lc));
    out.push_back(make_certificate("ls_trial", step_anchor(k, "2^{i_k} H_k <= 2 max(H_0, L2)"), H,
                                   2.0 * top, 1e-12 * top, lc));
  }
  return out;
}

void attach_step_certificates(Trace& trace) {
  auto& recs = trace.records;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].certificates.clear();
    if (i + 1 < recs.size()) {
      recs[i].certificates =
          step_certificates(trace.header, i > 0 ? &recs[i - 1] : nullptr, recs[i], recs[i + 1]);
    }
  }
}

Certificate check_functional_rate(const Trace& trace, double F_star, double D_hat, double H,
                                  double sigma, double L2, double eps) {
  const char* name = "functional_rate";
  const std::string what = "1/sqrt(F_k - F*) lower bound for all k with F_k - F* >= eps";
  if (trace.records.empty()) return not_armed(name, what, "empty trace");
  if (!(H >= L2)) return not_armed(name, what, "requires H >= L2");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  const double c = growth_constant(sigma, L2, H);
  const double F0 = trace.records.front().F - F_star;
  const double g0 = trace.records.front().g_norm;
  const double a = std::sqrt(3.0 / (H * D_hat * D_hat * D_hat)) / (4.0 * c * c);
  Worst w;
  if (F0 > 0.0 && D_hat > 0.0) {
    const double lt = log_term(F0, g0, D_hat, eps);
    for (const auto& r : trace.records) {
      const double gap = r.F - F_star;
      if (gap < eps) continue;
      const double lhs = 1.0 / std::sqrt(F0) + a * (r.k - lt);
      const double rhs = 1.0 / std::sqrt(gap);
      w.offer(r.k, lhs, rhs, kTheoremSlack * std::abs(rhs));
    }
  }
  return from_worst(name, what, w, "H >= L2, F* known, D a-posteriori");
}

Certificate check_iteration_budget(const Trace& trace, double F_star, double D_hat, double H,
                                   double c, double eps) {
  const char* name = "iteration_budget";
  const std::string what = "last k with F_k - F* >= eps <= 4c^2 sqrt(H D^3/(3 eps)) + log term";
  if (trace.records.empty()) return not_armed(name, what, "empty trace");
  if (!(H >= trace.header.L2)) return not_armed(name, what, "requires H >= L2");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  const int K = last_gap_index(trace, F_star, eps);
  Worst w;
  if (K >= 0) {
    const double F0 = trace.records.front().F - F_star;
    const double g0 = trace.records.front().g_norm;
    const double rhs = 4.0 * c * c * std::sqrt(H * D_hat * D_hat * D_hat / (3.0 * eps)) +
                       log_term(F0, g0, D_hat, eps);
    w.offer(K, K, rhs, kTheoremSlack * std::abs(rhs));
  }
  return from_worst(name, what, w, "H >= L2, F* known, D a-posteriori");
}

Certificate check_linear_rate_uc(const Trace& trace, double F_star, double sigma3, double H,
                                 double c, double g0, double D_hat) {
  const char* name = "linear_rate_uc";
  const std::string what = "F_k - F* <= D g_0 exp(-k ln(1+S) / (c^{1/2} + ln(1+S)/2))";
  if (!(sigma3 > 0.0)) return not_armed(name, what, "sigma3 unknown");
  if (!(H >= trace.header.L2)) return not_armed(name, what, "requires H >= L2");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  const double S = uc_rate_constant(c, sigma3, H);
  const double rate = std::log1p(S) / (std::sqrt(c) + 0.5 * std::log1p(S));
  Worst w;
  for (const auto& r : trace.records) {
    const double rhs = D_hat * g0 * std::exp(-r.k * rate);
    w.offer(r.k, r.F - F_star, rhs, kTheoremSlack * rhs + 1e-14 * (1.0 + std::abs(F_star)));
  }
  return from_worst(name, what, w, "sigma3 declared, H >= L2, D a-posteriori");
}

Certificate check_superlinear(const Trace& trace, double mu, double H, double c) {
  const char* name = "superlinear";
  const std::string what = "g_{k+1} <= (2c/mu) sqrt(H/3) g_k^{3/2} for every step";
  if (!(mu > 0.0)) return not_armed(name, what, "mu unknown");
  if (!(H >= trace.header.L2)) return not_armed(name, what, "requires H >= L2");
  Worst w;
  const auto& recs = trace.records;
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
    if (!recs[i].certified) continue;
    const double rhs = 2.0 * c / mu * std::sqrt(H / 3.0) * std::pow(recs[i].g_norm, 1.5);
    const double r = recs[i].inner_residual;
    w.offer(recs[i].k, recs[i + 1].g_norm, rhs, kTheoremSlack * rhs + 2.0 * r);
  }
  return from_worst(name, what, w, "mu declared, H >= L2");
}

Certificate check_gradient_complexity(const Trace& trace, double delta, double g0, double c,
                                      double H, double D_hat) {
  const char* name = "gradient_complexity";
  const std::string what = "N <= 2c^2 sqrt(3 H D^2 / delta) + 1.5 ln(g_0/delta) + ln c";
  if (trace.header.stop_reason != "gradient") {
    return not_armed(name, what, "trace not stopped by the subgradient criterion");
  }
  if (!(H >= trace.header.L2)) return not_armed(name, what, "requires H >= L2");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  // N is the last index of the prefix on which g_k >= delta.
  int N = -1;
  for (const auto& r : trace.records) {
    if (r.g_norm >= delta) N = r.k; else break;
  }
  Worst w;
  if (N >= 0) {
    const double rhs = 2.0 * c * c * std::sqrt(3.0 * H * D_hat * D_hat / delta) +
                       1.5 * std::log(g0 / delta) + std::log(c);
    w.offer(N, N, rhs, kTheoremSlack * std::abs(rhs));
  }
  return from_worst(name, what, w, "stopped by subgradient criterion, H >= L2, D a-posteriori");
}

Certificate check_gradient_complexity_uc(const Trace& trace, double delta, double g0, double c,
                                         double H, double sigma3, double F0_gap) {
  const char* name = "gradient_complexity_uc";
  const std::string what = "N bound under uniform convexity (final form)";
  if (!(sigma3 > 0.0)) return not_armed(name, what, "sigma3 unknown");
  if (trace.header.stop_reason != "gradient") {
    return not_armed(name, what, "trace not stopped by the subgradient criterion");
  }
  if (!(H >= trace.header.L2)) return not_armed(name, what, "requires H >= L2");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  int N = -1;
  for (const auto& r : trace.records) {
    if (r.g_norm >= delta) N = r.k; else break;
  }
  Worst w;
  if (N >= 0) {
    const double S = uc_rate_constant(c, sigma3, H);
    const double l = std::log1p(S);
    const double kappa = progress_constant(c, H);
    const double rhs = 3.0 * std::sqrt(c) / l *
                           std::log(3.0 * c * F0_gap / (2.0 * kappa * std::sqrt(sigma3))) +
                       3.0 * (1.0 + 2.0 * std::sqrt(c) / l) * std::log(g0 / delta);
    w.offer(N, N, rhs, kTheoremSlack * std::abs(rhs));
  }
  return from_worst(name, what, w, "sigma3 declared, stopped by subgradient criterion");
}

Certificate check_line_search_budget(const Trace& trace, double c0, double L2, double D_hat,
                                     double eps, double F_star) {
  const char* name = "line_search_budget";
  const std::string what =
      "last k with F_k - F* >= eps <= 4c0^2 sqrt(2 max(L2,H0) D^3/(3 eps)) + log term";
  if (trace.records.empty()) return not_armed(name, what, "empty trace");
  if (!all_steps_certified(trace)) return not_armed(name, what, "inexact steps in trace");
  const int K = last_gap_index(trace, F_star, eps);
  Worst w;
  if (K >= 0) {
    const double L = std::max({L2, trace.header.H0, 1e-12});
    const double F0 = trace.records.front().F - F_star;
    const double g0 = trace.records.front().g_norm;
    const double rhs = 4.0 * c0 * c0 * std::sqrt(2.0 * L * D_hat * D_hat * D_hat / (3.0 * eps)) +
                       log_term(F0, g0, D_hat, eps);
    w.offer(K, K, rhs, kTheoremSlack * std::abs(rhs));
  }
  return from_worst(name, what, w, "F* known, D a-posteriori");
}

Certificate check_line_search_doublings(const Trace& trace, double L2, double H0) {
  long total = 0;
  int steps = 0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    total += trace.records[i].i_k;
    ++steps;
  }
  const double rhs = 2.0 * steps + std::log2(std::max(L2, H0) / H0) + 1.0;
  return make_certificate("ls_doublings", "sum of doublings <= 2k + log2(max(L2,H0)/H0) + 1",
                          static_cast<double>(total), rhs, 1e-12 * rhs, "line search");
}

Certificate check_ubound_uc(const CompositeProblem& problem, const PrimalVector& x, double sigma3,
                            double F_star) {
  const char* name = "ubound_uc";
  const std::string what = "F(x) - F* <= 2/(3 sqrt(sigma3)) ||F'(x)||_*^{3/2}";
  if (!(sigma3 > 0.0)) return not_armed(name, what, "sigma3 unknown");
  const double gap = problem.F(x) - F_star;
  const double g = problem.norms.dual(stationarity_subgradient(problem, x));
  const double rhs = 2.0 / (3.0 * std::sqrt(sigma3)) * std::pow(g, 1.5);
  return make_certificate(name, what, gap, rhs,
                          kLemmaSlack * rhs + 1e-14 * (1.0 + std::abs(F_star)),
                          "sigma3 declared, F* known");
}

Certificate check_accelerated_bound(const Trace& trace, double F_star, double L2, double beta,
                                    double eps) {
  const char* name = "accel_iteration_bound";
  const std::string what = "first k with F_k - F* <= eps <= ceil(sqrt(54) (L2 beta/eps)^{1/3})";
  const std::string heur =
      trace.header.third_differentiable ? "" : "; heuristic: f lacks a third derivative";
  const double bound = std::ceil(std::sqrt(54.0) * std::cbrt(L2 * beta / eps));
  for (const auto& r : trace.records) {
    if (r.F - F_star <= eps) {
      return make_certificate(name, what, r.k, bound, 0.0, "F*, x* known" + heur);
    }
  }
  if (trace.records.empty() || trace.records.back().k < bound) {
    return not_armed(name, what, "trace ended before reaching eps or the bound");
  }
  return make_certificate(name, what, trace.records.back().k, bound, 0.0, "F*, x* known" + heur);
}

Certificate check_accelerated_rate(const Trace& trace, double F_star, double L2, double beta,
                                   double eps) {
  const char* name = "accel_rate";
  const std::string what = "(F_k - F*) k^3 <= 54^{3/2} L2 beta while that bound is >= eps";
  const std::string heur =
      trace.header.third_differentiable ? "" : "; heuristic: f lacks a third derivative";
  const double C = std::pow(54.0, 1.5) * L2 * beta;
  Worst w;
  for (const auto& r : trace.records) {
    if (r.k < 1) continue;
    const double k3 = static_cast<double>(r.k) * r.k * r.k;
    if (C / k3 < eps) continue;
    w.offer(r.k, (r.F - F_star) * k3, C, kTheoremSlack * C);
  }
  return from_worst(name, what, w, "F*, x* known" + heur);
}

std::vector<Certificate> certify_trace(const Trace& trace) {
  std::vector<Certificate> out;
  const TraceHeader& h = trace.header;
  if (trace.records.empty()) return out;
  const double eps = h.eps.value_or(1e-6);
  const double g0 = trace.records.front().g_norm;
  const bool has_ref = h.F_star && h.x_star;
  const double D_hat = has_ref ? distance_bound(trace, *h.x_star) : 0.0;

  if (h.mode == Mode::basic) {
    if (has_ref) {
      out.push_back(check_functional_rate(trace, *h.F_star, D_hat, h.H, h.sigma, h.L2, eps));
      out.push_back(check_iteration_budget(trace, *h.F_star, D_hat, h.H, h.c, eps));
      if (h.sigma3) {
        out.push_back(check_linear_rate_uc(trace, *h.F_star, *h.sigma3, h.H, h.c, g0, D_hat));
      }
    } else {
      out.push_back(not_armed("functional_rate", "rate in function value", "F* unknown"));
      out.push_back(not_armed("iteration_budget", "iteration budget", "F* unknown"));
    }
    if (h.mu) out.push_back(check_superlinear(trace, *h.mu, h.H, h.c));
    if (has_ref) {
      out.push_back(check_gradient_complexity(trace, h.delta, g0, h.c, h.H, D_hat));
    } else {
      out.push_back(not_armed("gradient_complexity", "subgradient-norm complexity", "x* unknown"));
    }
    if (h.sigma3 && h.F_star) {
      out.push_back(check_gradient_complexity_uc(trace, h.delta, g0, h.c, h.H, *h.sigma3,
                                                 trace.records.front().F - *h.F_star));
    }
  } else if (h.mode == Mode::line_search) {
    out.push_back(check_line_search_doublings(trace, h.L2, h.H0));
    if (has_ref) {
      out.push_back(check_line_search_budget(trace, h.c, h.L2, D_hat, eps, *h.F_star));
    } else {
      out.push_back(not_armed("line_search_budget", "line-search budget", "F* unknown"));
    }
  } else {
    if (has_ref && h.eps) {
      const double L2 = std::max(h.L2, 1e-12);
      // Bregman distance of phi = 2/3 ||x - x0||^3 from x0 to x*.
      const double dist = (*h.x_star - h.x0).vec().norm();
      const double beta = 2.0 / 3.0 * dist * dist * dist;
      out.push_back(check_accelerated_bound(trace, *h.F_star, L2, beta, eps));
      out.push_back(check_accelerated_rate(trace, *h.F_star, L2, beta, eps));
    } else {
      out.push_back(not_armed("accel_iteration_bound", "accelerated bound", "F*, x*, eps needed"));
    }
  }
  return out;
}

std::vector<Certificate> full_report(const Trace& trace) {
  Trace copy = trace;
  attach_step_certificates(copy);
  std::vector<Certificate> out;
  for (const auto& r : copy.records) out.insert(out.end(), r.certificates.begin(), r.certificates.end());
  const auto tail = certify_trace(trace);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace gradreg
