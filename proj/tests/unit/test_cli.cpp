#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "catalogue.hpp"
#include "gradreg/certificates.hpp"
#include "gradreg/methods.hpp"
#include "gradreg/trace_io.hpp"
#include "gradreg_cli/commands.hpp"
#include "gradreg_cli/manifest.hpp"

namespace fs = std::filesystem;

namespace gradreg {
namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::main_with_args(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("gradreg_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path data(const std::string& name) const { return testing::data_dir() / name; }
  fs::path dir_;
};

TEST_F(Cli, EmptyManifestIsAParseError) {
  const auto r = cli({"run", "--manifest", data("empty.yaml").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_FALSE(r.err.empty());
}

TEST_F(Cli, UnknownConstructorReportsLineAndColumn) {
  const fs::path m = dir_ / "bad.yaml";
  std::ofstream(m) << "instances:\n  - name: a\n    constructor: nonsense\n";
  try {
    cli::load_manifest(m);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_EQ(cli({"run", "--manifest", m.string(), "--out", dir_.string()}).code, 2);
}

TEST_F(Cli, MissingManifestFileIsAParseError) {
  EXPECT_EQ(cli({"run", "--manifest", (dir_ / "none.yaml").string()}).code, 2);
}

TEST_F(Cli, FixedHReproducesTheHandTrace) {
  const auto r = cli({"run", "--manifest", data("suite.yaml").string(), "--mode", "basic", "--H", "3",
                      "--delta", "1e-8", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Trace got = load_trace(dir_ / "quad1d.basic.trace.jsonl");
  const Trace want = load_trace(data("quad1d_hand.trace.jsonl"));
  // The suite also sets an objective-gap tolerance, so this run may stop earlier
  // than the stored trace; the iterates they share must agree.
  ASSERT_GE(got.records.size(), 3u);
  ASSERT_LE(got.records.size(), want.records.size());
  for (std::size_t i = 0; i < got.records.size(); ++i) {
    EXPECT_NEAR(got.records[i].x[0], want.records[i].x[0], 1e-12);
    if (i + 1 < got.records.size()) EXPECT_NEAR(got.records[i].A, want.records[i].A, 1e-12);
  }
  EXPECT_NEAR(got.records[1].x[0], 0.5, 1e-12);
  EXPECT_NEAR(got.records[2].x[0], 0.20711, 1e-5);
  EXPECT_EQ(got.header.H, 3.0);
}

TEST_F(Cli, AutoHUsesTheDefaultRule) {
  const auto r = cli({"run", "--manifest", data("suite.yaml").string(), "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Trace t = load_trace(dir_ / "libsvm_logistic.basic.trace.jsonl");
  EXPECT_DOUBLE_EQ(t.header.H, optimal_H(t.header.L2, t.header.sigma));
  EXPECT_NE(r.out.find("libsvm_logistic"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "l1_quad.basic.report.jsonl"));
}

TEST_F(Cli, RejectsInvalidH) {
  EXPECT_EQ(cli({"run", "--manifest", data("suite.yaml").string(), "--H", "-1", "--out", dir_.string()}).code,
            2);
  EXPECT_EQ(
      cli({"run", "--manifest", data("suite.yaml").string(), "--H", "bogus", "--out", dir_.string()}).code, 2);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRunsAndJobCounts) {
  const fs::path a = dir_ / "a";
  const fs::path b = dir_ / "b";
  ASSERT_EQ(cli({"compare", "--manifest", data("suite.yaml").string(), "--out", a.string(), "--jobs", "1"}).code,
            0);
  ASSERT_EQ(cli({"compare", "--manifest", data("suite.yaml").string(), "--out", b.string(), "--jobs", "4"}).code,
            0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
  }
  EXPECT_EQ(files, 3u * 3u * 2u);
}

TEST_F(Cli, CertifyReproducesTheStoredReport) {
  ASSERT_EQ(cli({"run", "--manifest", data("suite.yaml").string(), "--out", dir_.string()}).code, 0);
  const fs::path trace = dir_ / "l1_quad.basic.trace.jsonl";
  const fs::path report = dir_ / "l1_quad.basic.report.jsonl";
  const std::string stored = slurp(report);
  fs::remove(report);
  const auto r = cli({"certify", trace.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(slurp(report), stored);
}

TEST_F(Cli, CertifyAcceptsUnarmedTrace) {
  const auto r = cli({"certify", data("h_below_L2.trace.jsonl").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE((r.out + r.err).find("not armed"), std::string::npos);
}

TEST_F(Cli, CertifyFlagsTamperedTrace) {
  const auto r = cli({"certify", data("tampered.trace.jsonl").string(), "--out", dir_.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("progress"), std::string::npos);
}

TEST_F(Cli, CertifyRejectsMalformedTrace) {
  const fs::path bad = dir_ / "bad.trace.jsonl";
  std::ofstream(bad) << "{\"type\": \"header\"\n";
  EXPECT_EQ(cli({"certify", bad.string(), "--out", dir_.string()}).code, 2);
}

TEST_F(Cli, PlotdataColumns) {
  const auto r = cli({"plotdata", data("quad1d_hand.trace.jsonl").string(), "-q", "grad_norm"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# k grad_norm");
  int k = -1;
  double v = 0.0;
  in >> k >> v;
  EXPECT_EQ(k, 0);
  EXPECT_EQ(v, 1.0);
  in >> k >> v;
  EXPECT_EQ(k, 1);
  EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST_F(Cli, PlotdataGapAndErrors) {
  const auto r = cli({"plotdata", data("quad1d_hand.trace.jsonl").string(), "-q", "f_gap"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("# k f_gap\n", 0), 0u);
  EXPECT_EQ(cli({"plotdata", data("quad1d_hand.trace.jsonl").string(), "-q", "speed"}).code, 2);

  Trace t = load_trace(data("quad1d_hand.trace.jsonl"));
  t.header.F_star.reset();
  t.header.x_star.reset();
  save_trace(dir_ / "noref.trace.jsonl", t);
  EXPECT_EQ(cli({"plotdata", (dir_ / "noref.trace.jsonl").string(), "-q", "f_gap"}).code, 2);
}

TEST_F(Cli, PlotdataOnEmptyTraceIsHeaderOnly) {
  Trace t = load_trace(data("quad1d_hand.trace.jsonl"));
  t.records.clear();
  save_trace(dir_ / "empty.trace.jsonl", t);
  const fs::path out = dir_ / "out.dat";
  const auto r = cli({"plotdata", (dir_ / "empty.trace.jsonl").string(), "-q", "A", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(out), "# k A\n");
}

TEST_F(Cli, StrictModeIsQuietOnCleanRuns) {
  const fs::path m = dir_ / "m.yaml";
  std::ofstream(m) << "instances:\n  - name: q\n    constructor: quadratic\n    parameters: {Q: [[2.0]]}\n"
                      "    x0: [1.0]\nsolvers:\n  - mode: basic\n    H: \"1\"\n";
  EXPECT_EQ(cli({"run", "--manifest", m.string(), "--strict", "--out", dir_.string()}).code, 0);
}

// The accelerated scheme should need no more outer iterations than the basic
// method to reach a gap of 1e-6 on the logistic fixture.
TEST_F(Cli, CompareAcceleratedNotSlowerOnLogisticFixture) {
  const fs::path m = dir_ / "logistic.yaml";
  std::ofstream(m) << "instances:\n  - name: logistic\n    constructor: logistic\n    dataset: "
                   << data("sample.libsvm").string()
                   << "\n    parameters: {ridge: 0.1}\nsolvers:\n  - mode: basic\n    H: auto\n    delta: 0\n";
  const auto r = cli({"compare", "--manifest", m.string(), "--eps", "1e-6", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto first_hit = [](const Trace& t) {
    for (const auto& rec : t.records) {
      if (rec.F - *t.header.F_star <= 1e-6) return rec.k;
    }
    return 1 << 30;
  };
  const int basic = first_hit(load_trace(dir_ / "logistic.basic.trace.jsonl"));
  const int accel = first_hit(load_trace(dir_ / "logistic.accelerated.trace.jsonl"));
  EXPECT_LE(accel, basic) << "accelerated " << accel << " vs basic " << basic;
}

TEST(Manifest, HChoiceParsing) {
  EXPECT_EQ(cli::HChoice::parse("auto").rule, cli::HChoice::Rule::optimal);
  EXPECT_EQ(cli::HChoice::parse("auto-uc").rule, cli::HChoice::Rule::uniformly_convex);
  EXPECT_EQ(cli::HChoice::parse("2.5").rule, cli::HChoice::Rule::fixed);
  EXPECT_THROW(cli::HChoice::parse("0"), InvalidInput);
}

TEST(Manifest, DatasetPathsResolveAgainstTheManifest) {
  const auto m = cli::load_manifest(testing::data_dir() / "suite.yaml");
  ASSERT_EQ(m.instances.size(), 3u);
  ASSERT_TRUE(m.instances[1].dataset);
  EXPECT_TRUE(fs::exists(*m.instances[1].dataset));
  EXPECT_EQ(m.seed, 11u);
}

}  // namespace
}  // namespace gradreg
