#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gradreg/methods.hpp"
#include "gradreg/problem.hpp"

namespace gradreg::cli {

/// How H is chosen for a basic run.
struct HChoice {
  enum class Rule { optimal, uniformly_convex, fixed } rule = Rule::optimal;
  double value = 0.0;  // used when rule == fixed

  static HChoice parse(const std::string& text);
  double resolve(double L2, double sigma) const;
  std::string describe() const;
};

/// One solver configuration as written in a manifest; unresolved until an
/// instance supplies L2 and sigma.
struct SolverSpec {
  std::string label;  // used in output file names; defaults to the mode
  Mode mode = Mode::basic;
  HChoice H;
  std::optional<double> H0;  // line search; defaults to L2 / 8
  double delta = 1e-8;
  std::optional<double> eps;
  int max_iterations = 5000;
  LinearSolveMode linear = LinearSolveMode::direct;
};

/// One instance entry: a constructor name with its parameters.
struct InstanceSpec {
  std::string name;
  std::string constructor;
  std::optional<std::filesystem::path> dataset;  // resolved against the manifest directory
  std::string parameters_yaml;                   // the raw parameter map, re-parsed on build
  std::optional<std::vector<double>> x0;
  bool reference = true;  // attach a high-accuracy reference optimum before running
};

struct RunManifest {
  std::vector<InstanceSpec> instances;
  std::vector<SolverSpec> solvers;
  std::optional<std::filesystem::path> output_dir;
  std::uint64_t seed = 1;
};

/// Throws ParseError / InvalidInput on malformed content or missing datasets.
RunManifest load_manifest(const std::filesystem::path& path);
RunManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

/// Overrides applied on top of an instance's declared constants.
struct ConstantOverrides {
  std::optional<double> sigma3;
  std::optional<double> mu;
};

struct BuiltInstance {
  CompositeProblem problem;
  PrimalVector x0;
};

/// Constructs the problem described by spec. Randomized pieces (synthetic data,
/// sampled L2 estimation) draw from seed unless the entry sets its own.
BuiltInstance build_instance(const InstanceSpec& spec, std::uint64_t seed,
                             const ConstantOverrides& overrides = {});

/// Turns a solver spec into a concrete configuration for the given problem.
SolverConfig resolve_config(const SolverSpec& spec, const CompositeProblem& problem);

/// Names of the supported instance constructors.
std::vector<std::string> constructor_names();

}  // namespace gradreg::cli
