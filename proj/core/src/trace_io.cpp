#include "gradreg/trace_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

namespace gradreg {

namespace {

using json = nlohmann::json;

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw InvalidInput("expected a number, got " + j.dump());
}

json vec(const Vector& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Vector get_vec(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = get_num(j[i]);
  return v;
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_num(j.at(key));
}

json cert_json(const Certificate& c) {
  return json{{"name", c.name},   {"anchor", c.anchor},
              {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)},
              {"slack", num(c.slack)}, {"verdict", to_string(c.verdict)},
              {"armed_conditions", c.armed_conditions}};
}

Certificate cert_from(const json& j) {
  Certificate c;
  c.name = j.at("name").get<std::string>();
  c.anchor = j.at("anchor").get<std::string>();
  c.lhs = get_num(j.at("lhs"));
  c.rhs = get_num(j.at("rhs"));
  c.slack = get_num(j.at("slack"));
  c.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  c.armed_conditions = j.at("armed_conditions").get<std::string>();
  return c;
}

json header_json(const TraceHeader& h) {
  return json{{"type", "header"},
              {"instance", h.instance},
              {"mode", to_string(h.mode)},
              {"n", h.n},
              {"sigma", num(h.sigma)},
              {"L2", num(h.L2)},
              {"H", num(h.H)},
              {"H0", num(h.H0)},
              {"c", num(h.c)},
              {"mu", opt(h.mu)},
              {"sigma3", opt(h.sigma3)},
              {"F_star", opt(h.F_star)},
              {"x_star", h.x_star ? vec(h.x_star->vec()) : json(nullptr)},
              {"delta", num(h.delta)},
              {"eps", opt(h.eps)},
              {"simple_part", h.simple_part},
              {"third_differentiable", h.third_differentiable},
              {"scaling_diagonal", vec(h.scaling_diagonal)},
              {"norm_weights", vec(h.norm_weights)},
              {"stop_reason", h.stop_reason},
              {"x0", vec(h.x0.vec())}};
}

TraceHeader header_from(const json& j) {
  if (j.value("type", "") != "header") throw InvalidInput("first record is not a header");
  TraceHeader h;
  h.instance = j.at("instance").get<std::string>();
  h.mode = mode_from_string(j.at("mode").get<std::string>());
  h.n = j.at("n").get<Index>();
  h.sigma = get_num(j.at("sigma"));
  h.L2 = get_num(j.at("L2"));
  h.H = get_num(j.at("H"));
  h.H0 = get_num(j.at("H0"));
  h.c = get_num(j.at("c"));
  h.mu = get_opt(j, "mu");
  h.sigma3 = get_opt(j, "sigma3");
  h.F_star = get_opt(j, "F_star");
  if (j.contains("x_star") && !j.at("x_star").is_null()) h.x_star = PrimalVector(get_vec(j.at("x_star")));
  h.delta = get_num(j.at("delta"));
  h.eps = get_opt(j, "eps");
  h.simple_part = j.at("simple_part").get<std::string>();
  h.third_differentiable = j.at("third_differentiable").get<bool>();
  h.scaling_diagonal = get_vec(j.at("scaling_diagonal"));
  h.norm_weights = get_vec(j.at("norm_weights"));
  h.stop_reason = j.at("stop_reason").get<std::string>();
  h.x0 = PrimalVector(get_vec(j.at("x0")));
  if (h.norm_weights.size() != h.n || h.scaling_diagonal.size() != h.n || h.x0.size() != h.n) {
    throw InvalidInput("header vectors disagree with n");
  }
  return h;
}

json record_json(const IterationRecord& r) {
  json j{{"type", "iteration"},
         {"k", r.k},
         {"x", vec(r.x.vec())},
         {"F", num(r.F)},
         {"f", num(r.f)},
         {"g_norm", num(r.g_norm)},
         {"A", num(r.A)},
         {"H_used", num(r.H_used)},
         {"H_k", num(r.H_k)},
         {"i_k", r.i_k},
         {"step_norm", num(r.step_norm)},
         {"lin", num(r.linear_term)},
         {"quad", num(r.curvature)},
         {"model_value", num(r.model_value)},
         {"inner_iterations", r.inner_iterations},
         {"inner_residual", num(r.inner_residual)},
         {"certified", r.certified}};
  if (r.b) j["b"] = num(*r.b);
  if (r.B) j["B"] = num(*r.B);
  if (r.v) j["v"] = vec(r.v->vec());
  json certs = json::array();
  for (const auto& c : r.certificates) certs.push_back(cert_json(c));
  j["certificates"] = std::move(certs);
  return j;
}

IterationRecord record_from(const json& j, Index n) {
  if (j.value("type", "") != "iteration") throw InvalidInput("expected an iteration record");
  IterationRecord r;
  r.k = j.at("k").get<int>();
  r.x = PrimalVector(get_vec(j.at("x")));
  if (r.x.size() != n) throw InvalidInput("iterate dimension disagrees with header");
  r.F = get_num(j.at("F"));
  r.f = get_num(j.at("f"));
  r.g_norm = get_num(j.at("g_norm"));
  r.A = get_num(j.at("A"));
  r.H_used = get_num(j.at("H_used"));
  r.H_k = get_num(j.at("H_k"));
  r.i_k = j.at("i_k").get<int>();
  r.step_norm = get_num(j.at("step_norm"));
  r.linear_term = get_num(j.at("lin"));
  r.curvature = get_num(j.at("quad"));
  r.model_value = get_num(j.at("model_value"));
  r.inner_iterations = j.at("inner_iterations").get<int>();
  r.inner_residual = get_num(j.at("inner_residual"));
  r.certified = j.at("certified").get<bool>();
  r.b = get_opt(j, "b");
  r.B = get_opt(j, "B");
  if (j.contains("v")) r.v = PrimalVector(get_vec(j.at("v")));
  for (const auto& c : j.at("certificates")) r.certificates.push_back(cert_from(c));
  return r;
}

// Runs fn on each non-blank line, turning any failure into a ParseError at that line.
template <class Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), no,
                       e.byte == 0 ? 1 : e.byte);
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), no, 1);
    } catch (const InvalidInput& e) {
      throw ParseError(std::string("bad record: ") + e.what(), no, 1);
    }
  }
}

}  // namespace

void write_trace(std::ostream& out, const Trace& trace) {
  out << header_json(trace.header).dump() << '\n';
  for (const auto& r : trace.records) out << record_json(r).dump() << '\n';
}

Trace read_trace(std::istream& in) {
  Trace t;
  bool have_header = false;
  for_each_line(in, [&](const json& j) {
    if (!have_header) {
      t.header = header_from(j);
      have_header = true;
    } else {
      t.records.push_back(record_from(j, t.header.n));
      if (t.records.back().k != static_cast<int>(t.records.size()) - 1) {
        throw InvalidInput("iteration indices are not consecutive from 0");
      }
    }
  });
  if (!have_header) throw ParseError("trace has no header record", 1, 1);
  return t;
}

void save_trace(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  write_trace(out, trace);
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open trace " + path.string());
  return read_trace(in);
}

void write_report(std::ostream& out, const std::vector<Certificate>& certificates) {
  for (const auto& c : certificates) out << cert_json(c).dump() << '\n';
}

std::vector<Certificate> read_report(std::istream& in) {
  std::vector<Certificate> out;
  for_each_line(in, [&](const json& j) { out.push_back(cert_from(j)); });
  return out;
}

}  // namespace gradreg
