#include "gradreg_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "gradreg/certificates.hpp"
#include "gradreg/methods.hpp"
#include "gradreg/trace_io.hpp"
#include "gradreg_cli/manifest.hpp"

namespace gradreg::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTraceSuffix = ".trace.jsonl";
constexpr const char* kReportSuffix = ".report.jsonl";

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. Exceptions are kept
// per index so that one failing job does not hide the others.
std::vector<std::exception_ptr> parallel_for(std::size_t count, int jobs,
                                             const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return errors;
}

int exit_code_for(const std::exception_ptr& e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const ParseError& x) {
    message = x.what();
    return kParseError;
  } catch (const InvalidInput& x) {
    message = x.what();
    return kParseError;
  } catch (const std::exception& x) {
    message = x.what();
    return kNumericError;
  }
  return kNumericError;
}

struct Counts {
  int pass = 0;
  int fail = 0;
  int idle = 0;
};

Counts count(const std::vector<Certificate>& certs) {
  Counts c;
  for (const auto& x : certs) {
    if (x.verdict == Verdict::pass) ++c.pass;
    else if (x.verdict == Verdict::fail) ++c.fail;
    else ++c.idle;
  }
  return c;
}

// ---------------------------------------------------------------------------
// run / compare

struct RunFlags {
  std::string manifest;
  std::optional<std::string> mode;
  std::optional<std::string> H;
  std::optional<double> H0;
  std::optional<double> sigma3;
  std::optional<double> mu;
  std::optional<double> delta;
  std::optional<double> eps;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iterations;
  bool strict = false;
  int jobs = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_mode) {
  cmd->add_option("--manifest", f.manifest, "YAML run manifest")->required();
  if (with_mode) {
    cmd->add_option("--mode", f.mode, "basic, line_search, accelerated or compare");
  }
  cmd->add_option("--H", f.H, "auto, auto-uc or a positive number");
  cmd->add_option("--H0", f.H0, "line-search floor (default L2/8)");
  cmd->add_option("--sigma3", f.sigma3, "declared uniform convexity modulus");
  cmd->add_option("--mu", f.mu, "declared strong convexity modulus");
  cmd->add_option("--delta", f.delta, "subgradient-norm tolerance");
  cmd->add_option("--eps", f.eps, "objective-gap tolerance");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "seed for randomized instance pieces");
  cmd->add_option("--max-iterations", f.max_iterations, "iteration cap");
  cmd->add_flag("--strict", f.strict, "exit 3 when an armed certificate fails");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
}

SolverSpec apply_flags(SolverSpec s, const RunFlags& f) {
  if (f.H) s.H = HChoice::parse(*f.H);
  if (f.H0) s.H0 = *f.H0;
  if (f.delta) s.delta = *f.delta;
  if (f.eps) s.eps = *f.eps;
  if (f.max_iterations) s.max_iterations = *f.max_iterations;
  return s;
}

std::vector<SolverSpec> solver_list(const RunManifest& m, const RunFlags& f, bool compare) {
  std::vector<SolverSpec> base = m.solvers.empty() ? std::vector<SolverSpec>{SolverSpec{}} : m.solvers;
  std::vector<SolverSpec> out;
  if (compare) {
    for (Mode mode : {Mode::basic, Mode::line_search, Mode::accelerated}) {
      SolverSpec s = base.front();
      s.mode = mode;
      s.label = to_string(mode);
      out.push_back(apply_flags(s, f));
    }
  } else if (f.mode) {
    SolverSpec s = base.front();
    s.mode = mode_from_string(*f.mode);
    s.label = to_string(s.mode);
    out.push_back(apply_flags(s, f));
  } else {
    for (const auto& s : base) out.push_back(apply_flags(s, f));
  }
  for (auto& s : out) {
    if (s.mode == Mode::accelerated && !s.eps) s.eps = 1e-6;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (out[i].label == out[j].label) out[i].label += "-" + std::to_string(i);
    }
  }
  return out;
}

fs::path output_directory(const RunManifest& m, const RunFlags& f) {
  if (f.out) return *f.out;
  if (m.output_dir) return *m.output_dir;
  if (const char* env = std::getenv("GRADREG_OUTPUT_DIR"); env && *env) return env;
  return "gradreg-out";
}

struct JobResult {
  std::string trace_text;
  std::string report_text;
  std::string stop_reason;
  int iterations = 0;
  std::optional<double> gap;
  double g_final = 0.0;
  Counts counts;
};

JobResult run_job(const BuiltInstance& inst, const SolverSpec& spec) {
  const SolverConfig config = resolve_config(spec, inst.problem);
  const Trace trace = run(inst.problem, inst.x0, config);
  JobResult r;
  std::ostringstream t;
  write_trace(t, trace);
  r.trace_text = t.str();
  const auto report = full_report(trace);
  std::ostringstream rep;
  write_report(rep, report);
  r.report_text = rep.str();
  r.stop_reason = trace.header.stop_reason;
  r.iterations = static_cast<int>(trace.records.size()) - 1;
  const IterationRecord& last = trace.records.back();
  if (trace.header.F_star) r.gap = last.F - *trace.header.F_star;
  r.g_final = last.g_norm;
  r.counts = count(report);
  return r;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const RunFlags& f, bool compare, std::ostream& out, std::ostream& err) {
  RunManifest manifest;
  std::vector<SolverSpec> solvers;
  try {
    manifest = load_manifest(f.manifest);
    if (f.seed) manifest.seed = *f.seed;
    solvers = solver_list(manifest, f, compare || (f.mode && *f.mode == "compare"));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }
  compare = compare || (f.mode && *f.mode == "compare");

  ConstantOverrides overrides{f.sigma3, f.mu};
  std::vector<std::optional<BuiltInstance>> built(manifest.instances.size());
  const auto build_errors = parallel_for(built.size(), f.jobs, [&](std::size_t i) {
    built[i] = build_instance(manifest.instances[i], manifest.seed, overrides);
  });
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (!build_errors[i]) continue;
    std::string msg;
    const int rc = exit_code_for(build_errors[i], msg);
    err << "error: instance " << manifest.instances[i].name << ": " << msg << "\n";
    return rc;
  }

  const std::size_t per = solvers.size();
  std::vector<JobResult> results(built.size() * per);
  const auto errors = parallel_for(results.size(), f.jobs, [&](std::size_t j) {
    results[j] = run_job(*built[j / per], solvers[j % per]);
  });

  // Single collector: every file is written here, in manifest order.
  const fs::path dir = output_directory(manifest, f);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kNumericError;
  }
  int rc = kOk;
  int failing = 0;
  out << "instance\tsolver\titerations\tF-F*\tg_final\tstop\tpass/fail/not_armed\n";
  for (std::size_t j = 0; j < results.size(); ++j) {
    const std::string& name = manifest.instances[j / per].name;
    const SolverSpec& s = solvers[j % per];
    if (errors[j]) {
      std::string msg;
      const int code = exit_code_for(errors[j], msg);
      err << "error: " << name << " / " << s.label << ": " << msg << "\n";
      rc = std::max(rc, code == kParseError ? static_cast<int>(kParseError) : static_cast<int>(kNumericError));
      out << name << "\t" << s.label << "\t-\t-\t-\terror\t-\n";
      continue;
    }
    const JobResult& r = results[j];
    const fs::path stem = dir / (name + "." + s.label);
    try {
      write_file(stem.string() + kTraceSuffix, r.trace_text);
      write_file(stem.string() + kReportSuffix, r.report_text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      rc = std::max(rc, static_cast<int>(kNumericError));
    }
    out << name << "\t" << s.label << "\t" << r.iterations << "\t"
        << (r.gap ? fmt(*r.gap, "%.3e") : "-") << "\t" << fmt(r.g_final, "%.3e") << "\t"
        << r.stop_reason << "\t" << r.counts.pass << "/" << r.counts.fail << "/" << r.counts.idle
        << "\n";
    if (r.counts.fail > 0) {
      ++failing;
      err << "warning: " << name << " / " << s.label << ": " << r.counts.fail
          << " armed certificate(s) failed\n";
    }
  }

  if (compare) {
    out << "\ninstance\tbasic\tline_search\taccelerated\n";
    for (std::size_t i = 0; i < built.size(); ++i) {
      out << manifest.instances[i].name;
      for (std::size_t k = 0; k < per; ++k) {
        const std::size_t j = i * per + k;
        out << "\t" << (errors[j] ? std::string("error") : std::to_string(results[j].iterations));
      }
      out << "\n";
    }
  }
  if (rc != kOk) return rc;
  if (failing > 0 && f.strict) return kStrictFailure;
  return kOk;
}

// ---------------------------------------------------------------------------
// certify

std::vector<fs::path> collect_traces(const std::vector<std::string>& inputs) {
  std::vector<fs::path> paths;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const std::string n = e.path().filename().string();
        if (e.is_regular_file() && n.size() > std::strlen(kTraceSuffix) &&
            n.compare(n.size() - std::strlen(kTraceSuffix), std::string::npos, kTraceSuffix) == 0) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      paths.insert(paths.end(), found.begin(), found.end());
    } else {
      paths.emplace_back(in);
    }
  }
  return paths;
}

fs::path report_path(const fs::path& trace, const std::optional<std::string>& out_dir) {
  std::string name = trace.filename().string();
  const std::string suffix = kTraceSuffix;
  if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), std::string::npos, suffix) == 0) {
    name.erase(name.size() - suffix.size());
  }
  name += kReportSuffix;
  return (out_dir ? fs::path(*out_dir) : trace.parent_path()) / name;
}

void print_report(const std::string& title, const std::vector<Certificate>& certs,
                  std::ostream& out, std::ostream& err) {
  // Per-step certificates are summarized by name; whole-trace ones are listed.
  struct Row {
    Counts counts;
    double worst_margin = -INFINITY;  // max of lhs - rhs - slack over armed instances
  };
  std::map<std::string, Row> steps;
  std::vector<const Certificate*> whole;
  for (const auto& c : certs) {
    if (c.anchor.rfind("step ", 0) == 0) {
      Row& r = steps[c.name];
      if (c.verdict == Verdict::pass) ++r.counts.pass;
      else if (c.verdict == Verdict::fail) ++r.counts.fail;
      else ++r.counts.idle;
      if (c.armed()) r.worst_margin = std::max(r.worst_margin, c.lhs - c.rhs - c.slack);
    } else {
      whole.push_back(&c);
    }
  }
  out << "== " << title << "\n";
  out << "certificate\tpass\tfail\tnot_armed\tworst lhs-rhs-slack\n";
  for (const auto& [name, r] : steps) {
    out << name << "\t" << r.counts.pass << "\t" << r.counts.fail << "\t" << r.counts.idle << "\t"
        << (std::isfinite(r.worst_margin) ? fmt(r.worst_margin, "%.3e") : "-") << "\n";
  }
  out << "certificate\tverdict\tlhs\trhs\tslack\n";
  for (const Certificate* c : whole) {
    out << c->name << "\t" << to_string(c->verdict) << "\t" << fmt(c->lhs, "%.6e") << "\t"
        << fmt(c->rhs, "%.6e") << "\t" << fmt(c->slack, "%.1e") << "\n";
    if (!c->armed()) {
      err << "warning: " << title << ": " << c->name << " not armed (" << c->armed_conditions
          << ")\n";
    }
  }
}

int cmd_certify(const std::vector<std::string>& inputs, const std::optional<std::string>& out_dir,
                std::ostream& out, std::ostream& err) {
  const auto paths = collect_traces(inputs);
  if (paths.empty()) {
    err << "error: no trace files given\n";
    return kParseError;
  }
  if (out_dir) fs::create_directories(*out_dir);
  bool malformed = false;
  bool failed = false;
  for (const auto& p : paths) {
    Trace trace;
    try {
      trace = load_trace(p);
    } catch (const Error& e) {
      err << "error: " << p.string() << ": " << e.what() << "\n";
      malformed = true;
      continue;
    }
    const auto report = full_report(trace);
    std::ostringstream text;
    write_report(text, report);
    try {
      write_file(report_path(p, out_dir), text.str());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      malformed = true;
    }
    print_report(p.filename().string(), report, out, err);
    failed = failed || count(report).fail > 0;
  }
  if (malformed) return kParseError;
  return failed ? kNumericError : kOk;
}

// ---------------------------------------------------------------------------
// plotdata

int cmd_plotdata(const std::string& path, const std::string& quantity,
                 const std::optional<std::string>& out_path, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> known = {"f_gap", "grad_norm", "A", "H", "i_k"};
  if (std::find(known.begin(), known.end(), quantity) == known.end()) {
    err << "error: unknown quantity '" << quantity << "' (expected f_gap, grad_norm, A, H, i_k)\n";
    return kParseError;
  }
  Trace trace;
  try {
    trace = load_trace(path);
  } catch (const Error& e) {
    err << "error: " << path << ": " << e.what() << "\n";
    return kParseError;
  }
  if (quantity == "f_gap" && !trace.header.F_star) {
    err << "error: f_gap needs a reference optimum in the trace header\n";
    return kParseError;
  }
  std::ostringstream text;
  text << "# k " << quantity << "\n";
  for (const auto& r : trace.records) {
    double v = 0.0;
    if (quantity == "f_gap") v = r.F - *trace.header.F_star;
    else if (quantity == "grad_norm") v = r.g_norm;
    else if (quantity == "A") v = r.A;
    else if (quantity == "H") v = r.H_used;
    else v = r.i_k;
    text << r.k << " " << fmt(v, "%.17g") << "\n";
  }
  if (out_path) {
    try {
      write_file(*out_path, text.str());
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kNumericError;
    }
  } else {
    out << text.str();
  }
  return kOk;
}

}  // namespace

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-regularized Newton solvers with runtime convergence certificates",
               "gradreg"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run solvers on the instances of a manifest");
  add_run_flags(run_cmd, run_flags, true);

  RunFlags cmp_flags;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "basic vs line search vs accelerated");
  add_run_flags(cmp_cmd, cmp_flags, false);

  std::vector<std::string> certify_inputs;
  std::optional<std::string> certify_out;
  CLI::App* cert_cmd = app.add_subcommand("certify", "recompute certificates of stored traces");
  cert_cmd->add_option("traces", certify_inputs, "trace files or directories")->required();
  cert_cmd->add_option("--out", certify_out, "directory for report files");

  std::string plot_trace;
  std::string plot_quantity;
  std::optional<std::string> plot_out;
  CLI::App* plot_cmd = app.add_subcommand("plotdata", "two-column data for plotting");
  plot_cmd->add_option("trace", plot_trace, "trace file")->required();
  plot_cmd->add_option("--quantity,-q", plot_quantity, "f_gap, grad_norm, A, H or i_k")->required();
  plot_cmd->add_option("--out", plot_out, "output file (default: standard output)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*run_cmd) {
      return cmd_run(run_flags, false, out, err);
    }
    if (*cmp_cmd) return cmd_run(cmp_flags, true, out, err);
    if (*cert_cmd) return cmd_certify(certify_inputs, certify_out, out, err);
    if (*plot_cmd) return cmd_plotdata(plot_trace, plot_quantity, plot_out, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  }
  return kParseError;
}

}  // namespace gradreg::cli
