#include <gtest/gtest.h>

#include <sstream>

#include "dpia/checker.hpp"
#include "dpia/harness.hpp"
#include "dpia/parser.hpp"

using namespace dpia;

TEST(Harness, GeneratorIsDeterministic) {
  for (uint64_t s = 1; s <= 20; ++s) {
    EXPECT_EQ(generate_program(s, 3, 8), generate_program(s, 3, 8));
  }
  EXPECT_NE(generate_program(1, 3, 8), generate_program(2, 3, 8));
}

TEST(Harness, GeneratedProgramsTypeCheck) {
  for (uint64_t s = 1; s <= 300; ++s) {
    std::string text = generate_program(s, 4, 8);
    EXPECT_NO_THROW(check_program(parse_program(text))) << text;
  }
}

TEST(Harness, CoverageOfFunctionalPrimitives) {
  std::map<std::string, size_t> total;
  for (uint64_t s = 1; s <= 500; ++s) {
    for (auto& [k, v] : prim_coverage(parse_program(generate_program(s, 3, 8)))) total[k] += v;
  }
  for (const char* p : {"+", "-", "*", "/", "negate", "map", "mapGlobal", "mapWorkgroup",
                        "mapLocal", "mapSeq", "reduce", "zip", "split", "join", "pair", "fst",
                        "snd", "idx", "toGlobal", "toLocal", "toPrivate", "asVector", "asScalar"}) {
    EXPECT_GT(total[p], 0u) << p;
  }
}

TEST(Harness, DifferentialCheckPasses) {
  for (uint64_t s = 1; s <= 50; ++s) {
    std::string text = generate_program(s, 3, 8);
    CheckReport r = differential_check(text);
    EXPECT_TRUE(r.pass) << r.stage << ": " << r.message << "\n" << text;
  }
}

TEST(Harness, InjectedSplitFaultIsCaught) {
  FuzzOptions o;
  o.seeds = 60;
  o.check.fault_flip_split = true;
  size_t failed = 0;
  for (auto& c : fuzz(o)) {
    if (c.report.pass) continue;
    ++failed;
    EXPECT_FALSE(c.shrunk.empty());
    EXPECT_LE(c.shrunk.size(), c.program.size() + 64);
  }
  EXPECT_GT(failed, 0u);
}

TEST(Harness, ShrinkKeepsFailureAndDoesNotGrow) {
  CheckOptions bad;
  bad.fault_flip_split = true;
  for (uint64_t s = 1; s <= 60; ++s) {
    std::string text = generate_program(s, 3, 16);
    CheckReport r = differential_check(text, bad);
    if (r.pass) continue;
    std::string small = shrink(s, 3, 16, bad);
    CheckReport rs = differential_check(small, bad);
    EXPECT_FALSE(rs.pass);
    EXPECT_LE(rs.input_leaves, r.input_leaves);
    return;
  }
  FAIL() << "no failing seed found";
}

TEST(Harness, EquivalenceSuite) {
  for (auto& r : equivalence_suite(3, 25, 8)) {
    EXPECT_EQ(r.instances, 25u);
    EXPECT_EQ(r.failures, 0u) << r.name << ": " << r.first_failure;
  }
}

TEST(Harness, JUnitReport) {
  FuzzOptions o;
  o.seeds = 3;
  auto cases = fuzz(o);
  FuzzCase bad = cases[0];
  bad.report.pass = false;
  bad.report.stage = "exec";
  bad.report.message = "out differs <&>";
  cases.push_back(bad);
  std::ostringstream os;
  write_junit(os, cases);
  std::string x = os.str();
  EXPECT_NE(x.find("<testsuite"), std::string::npos);
  EXPECT_NE(x.find("tests=\"4\""), std::string::npos) << x;
  EXPECT_NE(x.find("failures=\"1\""), std::string::npos);
  EXPECT_NE(x.find("&lt;&amp;&gt;"), std::string::npos);
}
