#include "gradreg_cli/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gradreg/dataset.hpp"
#include "gradreg/instances.hpp"

namespace gradreg::cli {

namespace {

ParseError yaml_error(const std::string& what, const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return ParseError(what, static_cast<std::size_t>(m.line + 1),
                    static_cast<std::size_t>(m.column + 1));
}

template <class T>
T get(const YAML::Node& node, const char* key) {
  const YAML::Node v = node[key];
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw yaml_error(std::string("bad value for '") + key + "'", v.IsDefined() ? v : node);
  }
}

template <class T>
T get_or(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  return get<T>(node, key);
}

template <class T>
std::optional<T> get_opt(const YAML::Node& node, const char* key) {
  if (!node[key]) return std::nullopt;
  return get<T>(node, key);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

Vector read_vector(const YAML::Node& node, const char* key) {
  return to_vector(get<std::vector<double>>(node, key));
}

// Q from either "Q" (list of rows) or "Q_diag"; n is used for an all-zero default.
Matrix read_matrix(const YAML::Node& params, std::optional<Index> n) {
  if (params["Q"]) {
    const auto rows = get<std::vector<std::vector<double>>>(params, "Q");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw yaml_error("Q must be square", params["Q"]);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
      }
    }
    return m;
  }
  if (params["Q_diag"]) return read_vector(params, "Q_diag").asDiagonal();
  if (n) return Matrix::Zero(*n, *n);
  throw yaml_error("one of Q, Q_diag or n is required", params);
}

CompositePart read_simple(const YAML::Node& params, Index n) {
  const YAML::Node s = params["simple"];
  if (!s) return CompositePart::zero();
  const std::string kind = get<std::string>(s, "kind");
  if (kind == "zero") return CompositePart::zero();
  if (kind == "l1") return CompositePart::l1(get<double>(s, "lambda"));
  if (kind == "box") {
    Vector lo = s["lo"] ? read_vector(s, "lo") : Vector::Constant(n, -get<double>(s, "bound"));
    Vector hi = s["hi"] ? read_vector(s, "hi") : Vector::Constant(n, get<double>(s, "bound"));
    return CompositePart::box(std::move(lo), std::move(hi));
  }
  if (kind == "ball") {
    Vector center = s["center"] ? read_vector(s, "center") : Vector::Zero(n);
    return CompositePart::ball(std::move(center), get<double>(s, "radius"));
  }
  throw yaml_error("unknown simple part '" + kind + "'", s);
}

SolverSpec parse_solver(const YAML::Node& node) {
  if (!node.IsMap()) throw yaml_error("solver entry must be a map", node);
  SolverSpec spec;
  try {
    spec.mode = mode_from_string(get_or<std::string>(node, "mode", "basic"));
  } catch (const InvalidInput& e) {
    throw yaml_error(e.what(), node["mode"]);
  }
  spec.label = get_or<std::string>(node, "label", to_string(spec.mode));
  if (node["H"]) {
    try {
      spec.H = HChoice::parse(get<std::string>(node, "H"));
    } catch (const InvalidInput& e) {
      throw yaml_error(e.what(), node["H"]);
    }
  }
  spec.H0 = get_opt<double>(node, "H0");
  spec.delta = get_or<double>(node, "delta", spec.delta);
  spec.eps = get_opt<double>(node, "eps");
  spec.max_iterations = get_or<int>(node, "max_iterations", spec.max_iterations);
  const std::string linear = get_or<std::string>(node, "linear", "direct");
  if (linear == "direct") {
    spec.linear = LinearSolveMode::direct;
  } else if (linear == "cg") {
    spec.linear = LinearSolveMode::cg;
  } else {
    throw yaml_error("linear must be 'direct' or 'cg'", node["linear"]);
  }
  return spec;
}

InstanceSpec parse_instance(const YAML::Node& node, const std::filesystem::path& base_dir) {
  if (!node.IsMap()) throw yaml_error("instance entry must be a map", node);
  InstanceSpec spec;
  spec.name = get<std::string>(node, "name");
  spec.constructor = get<std::string>(node, "constructor");
  bool known = false;
  for (const auto& c : constructor_names()) known = known || c == spec.constructor;
  if (!known) throw yaml_error("unknown constructor '" + spec.constructor + "'", node["constructor"]);
  if (node["dataset"]) {
    std::filesystem::path p = get<std::string>(node, "dataset");
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw yaml_error("dataset not found: " + p.string(), node["dataset"]);
    }
    spec.dataset = p;
  }
  YAML::Emitter out;
  out << (node["parameters"] ? node["parameters"] : YAML::Node(YAML::NodeType::Map));
  spec.parameters_yaml = out.c_str();
  spec.x0 = get_opt<std::vector<double>>(node, "x0");
  spec.reference = get_or<bool>(node, "reference", true);
  return spec;
}

}  // namespace

HChoice HChoice::parse(const std::string& text) {
  HChoice c;
  if (text == "auto") return c;
  if (text == "auto-uc") {
    c.rule = Rule::uniformly_convex;
    return c;
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput("H must be 'auto', 'auto-uc' or a positive number, got '" + text + "'");
  }
  c.rule = Rule::fixed;
  c.value = v;
  return c;
}

double HChoice::resolve(double L2, double sigma) const {
  switch (rule) {
    case Rule::optimal:
      return optimal_H(L2, sigma);
    case Rule::uniformly_convex:
      return optimal_H_uniformly_convex(L2, sigma);
    case Rule::fixed:
      return value;
  }
  return value;
}

std::string HChoice::describe() const {
  switch (rule) {
    case Rule::optimal:
      return "auto";
    case Rule::uniformly_convex:
      return "auto-uc";
    case Rule::fixed:
      break;
  }
  std::ostringstream s;
  s << value;
  return s.str();
}

std::vector<std::string> constructor_names() {
  return {"quadratic", "l1_quadratic", "cubic_uc", "logistic", "log_sum_exp", "smoothed_chain"};
}

RunManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, static_cast<std::size_t>(e.mark.line + 1),
                     static_cast<std::size_t>(e.mark.column + 1));
  }
  if (!root.IsMap()) throw ParseError("manifest must be a map", 1, 1);

  RunManifest m;
  m.seed = get_or<std::uint64_t>(root, "seed", m.seed);
  if (root["output_dir"]) {
    std::filesystem::path p = get<std::string>(root, "output_dir");
    m.output_dir = p.is_relative() ? base_dir / p : p;
  }
  const YAML::Node instances = root["instances"];
  if (!instances || !instances.IsSequence() || instances.size() == 0) {
    throw ParseError("manifest lists no instances", 1, 1);
  }
  for (const auto& node : instances) m.instances.push_back(parse_instance(node, base_dir));
  for (std::size_t i = 0; i < m.instances.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (m.instances[i].name == m.instances[j].name) {
        throw yaml_error("duplicate instance name '" + m.instances[i].name + "'", instances[i]);
      }
    }
  }
  if (const YAML::Node solvers = root["solvers"]) {
    if (!solvers.IsSequence()) throw yaml_error("solvers must be a list", solvers);
    for (const auto& node : solvers) m.solvers.push_back(parse_solver(node));
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open manifest " + path.string(), 0, 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str(), path.parent_path());
}

BuiltInstance build_instance(const InstanceSpec& spec, std::uint64_t seed,
                             const ConstantOverrides& overrides) {
  const YAML::Node params = YAML::Load(spec.parameters_yaml);
  seed = get_or<std::uint64_t>(params, "seed", seed);
  const std::optional<double> L2 = get_opt<double>(params, "L2");

  std::optional<CompositeProblem> problem;
  const std::string& ctor = spec.constructor;
  if (ctor == "quadratic" || ctor == "l1_quadratic") {
    Matrix Q = read_matrix(params, std::nullopt);
    const Index n = Q.rows();
    Vector b = params["b"] ? read_vector(params, "b") : Vector::Zero(n);
    if (ctor == "quadratic") {
      problem = make_quadratic(HessianView::dense(std::move(Q)), DualVector(std::move(b)),
                               read_simple(params, n));
    } else {
      problem = make_l1_quadratic(HessianView::dense(std::move(Q)), DualVector(std::move(b)),
                                  get<double>(params, "lambda"));
    }
  } else if (ctor == "cubic_uc") {
    const Matrix Q = read_matrix(params, get_opt<Index>(params, "n"));
    problem = make_cubic_uc(HessianView::dense(Q), get<double>(params, "sigma3"));
  } else if (ctor == "logistic") {
    LabeledDataset data;
    if (spec.dataset) {
      data = load_libsvm(*spec.dataset, get_or<Index>(params, "dim", 0));
    } else {
      data = synthetic_classification(get<Index>(params, "samples"), get<Index>(params, "dim"),
                                      seed, get_or<double>(params, "flip", 0.1));
    }
    LogisticOptions opts;
    opts.lips_hessian = L2;
    opts.region_radius = get_or<double>(params, "radius", 0.0);
    opts.estimate.seed = seed;
    problem = make_logistic(std::move(data), get_or<double>(params, "ridge", 0.0), opts);
  } else if (ctor == "log_sum_exp") {
    const Index m = get<Index>(params, "samples");
    const Index n = get<Index>(params, "dim");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(m, n);
    Vector c(m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) A(i, j) = normal(rng) / std::sqrt(static_cast<double>(n));
      c(i) = normal(rng);
    }
    LogSumExpOptions opts;
    opts.lips_hessian = L2;
    opts.region_radius = get_or<double>(params, "radius", opts.region_radius);
    opts.estimate.seed = seed;
    problem = make_log_sum_exp(std::move(A), std::move(c), get_or<double>(params, "ridge", 0.0),
                               opts);
  } else if (ctor == "smoothed_chain") {
    problem = make_smoothed_chain(get<Index>(params, "n"), get_or<double>(params, "smoothing", 0.1));
  } else {
    throw InvalidInput("unknown constructor '" + ctor + "'");
  }

  CompositeProblem& p = *problem;
  p.name = spec.name;
  if (params["scaling"]) {
    const Vector s = read_vector(params, "scaling");
    p = with_geometry(std::move(p), ScalingFunction::weighted(s, p.norms), p.norms);
  }

  SmoothConstants constants = p.smooth.constants();
  if (L2) constants.lips_hessian = *L2;
  if (auto v = get_opt<double>(params, "mu")) constants.strong_convexity_mu = *v;
  if (auto v = get_opt<double>(params, "declared_sigma3")) constants.uniform_convexity_sigma3 = *v;
  if (overrides.mu) constants.strong_convexity_mu = *overrides.mu;
  if (overrides.sigma3) constants.uniform_convexity_sigma3 = *overrides.sigma3;
  p.smooth = p.smooth.with_constants(constants);

  PrimalVector x0 = PrimalVector::zero(p.dim());
  if (spec.x0) {
    if (static_cast<Index>(spec.x0->size()) != p.dim()) {
      throw InvalidInput(spec.name + ": x0 has " + std::to_string(spec.x0->size()) +
                         " entries, expected " + std::to_string(p.dim()));
    }
    x0 = PrimalVector(to_vector(*spec.x0));
  }
  if (spec.reference && !p.reference) p.reference = reference_solve(p, x0);
  p.validate();
  return {std::move(p), std::move(x0)};
}

SolverConfig resolve_config(const SolverSpec& spec, const CompositeProblem& problem) {
  SolverConfig c;
  c.mode = spec.mode;
  const double L2 = std::max(problem.lips_hessian(), kLipschitzFloor);
  c.H = spec.H.resolve(problem.lips_hessian(), problem.sigma());
  c.H0 = spec.H0 ? *spec.H0 : L2 / 8.0;
  c.grad_tolerance = spec.delta;
  c.f_gap_tolerance = spec.eps;
  c.max_iterations = spec.max_iterations;
  c.inner.linear = spec.linear;
  return c;
}

}  // namespace gradreg::cli
