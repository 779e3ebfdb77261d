#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "catalogue.hpp"
#include "gradreg/certificates.hpp"
#include "gradreg/errors.hpp"
#include "gradreg/methods.hpp"
#include "gradreg/trace_io.hpp"

namespace gradreg {
namespace {

Trace roundtrip(const Trace& t) {
  std::stringstream s;
  write_trace(s, t);
  return read_trace(s);
}

TEST(TraceIo, RoundTripIsExactForEveryMode) {
  const auto inst = testing::with_reference(testing::smoothed_chain(6, 0.1));
  for (Mode m : {Mode::basic, Mode::line_search, Mode::accelerated}) {
    SolverConfig cfg;
    cfg.mode = m;
    cfg.H = optimal_H(inst.problem.lips_hessian(), 1.0);
    cfg.H0 = 1.0;
    cfg.f_gap_tolerance = 1e-6;
    const Trace t = run(inst.problem, inst.x0, cfg);
    const Trace back = roundtrip(t);
    std::ostringstream a;
    std::ostringstream b;
    write_trace(a, t);
    write_trace(b, back);
    EXPECT_EQ(a.str(), b.str()) << to_string(m);
    ASSERT_EQ(back.records.size(), t.records.size());
    for (std::size_t i = 0; i < t.records.size(); ++i) {
      EXPECT_EQ(back.records[i].F, t.records[i].F);
      EXPECT_EQ(back.records[i].x.vec(), t.records[i].x.vec());
      EXPECT_EQ(back.records[i].certificates.size(), t.records[i].certificates.size());
    }
    EXPECT_EQ(back.header.F_star, t.header.F_star);
    EXPECT_EQ(back.header.mode, m);
  }
}

TEST(TraceIo, NonFiniteValuesSurvive) {
  Trace t;
  t.header.instance = "synthetic";
  t.header.n = 1;
  t.header.x0 = PrimalVector{0.0};
  t.header.scaling_diagonal = Vector::Ones(1);
  t.header.norm_weights = Vector::Ones(1);
  IterationRecord r;
  r.x = PrimalVector{std::numeric_limits<double>::infinity()};
  r.F = -std::numeric_limits<double>::infinity();
  r.f = std::numeric_limits<double>::quiet_NaN();
  t.records.push_back(r);
  std::stringstream s;
  write_trace(s, t);
  EXPECT_NE(s.str().find("\"inf\""), std::string::npos);
  EXPECT_NE(s.str().find("\"nan\""), std::string::npos);
  const Trace back = read_trace(s);
  EXPECT_TRUE(std::isinf(back.records[0].x[0]) && back.records[0].x[0] > 0);
  EXPECT_TRUE(std::isinf(back.records[0].F) && back.records[0].F < 0);
  EXPECT_TRUE(std::isnan(back.records[0].f));
}

TEST(TraceIo, MalformedLineIsReportedWithItsNumber) {
  const Trace t = load_trace(testing::data_dir() / "quad1d_hand.trace.jsonl");
  std::stringstream good;
  write_trace(good, t);
  std::string text = good.str();
  // Corrupt the third line.
  std::size_t pos = 0;
  for (int i = 0; i < 2; ++i) pos = text.find('\n', pos) + 1;
  text.insert(pos, "{not json");
  std::istringstream in(text);
  try {
    read_trace(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(TraceIo, MissingHeaderIsRejected) {
  std::istringstream in("");
  EXPECT_THROW(read_trace(in), ParseError);
  std::istringstream wrong("{\"k\": 0}\n");
  EXPECT_THROW(read_trace(wrong), ParseError);
}

TEST(TraceIo, ReportRoundTrip) {
  const Trace t = load_trace(testing::data_dir() / "quad1d_hand.trace.jsonl");
  const auto report = full_report(t);
  std::stringstream s;
  write_report(s, report);
  const auto back = read_report(s);
  ASSERT_EQ(back.size(), report.size());
  for (std::size_t i = 0; i < report.size(); ++i) {
    EXPECT_EQ(back[i].name, report[i].name);
    EXPECT_EQ(back[i].anchor, report[i].anchor);
    EXPECT_EQ(back[i].lhs, report[i].lhs);
    EXPECT_EQ(back[i].rhs, report[i].rhs);
    EXPECT_EQ(back[i].slack, report[i].slack);
    EXPECT_EQ(back[i].verdict, report[i].verdict);
    EXPECT_EQ(back[i].armed_conditions, report[i].armed_conditions);
  }
}

TEST(TraceIo, LoadingAMissingFileFails) {
  EXPECT_THROW(load_trace(testing::data_dir() / "does_not_exist.jsonl"), Error);
}

}  // namespace
}  // namespace gradreg
