#include <gtest/gtest.h>

#include "dpia/eval_imp.hpp"
#include "dpia/lower.hpp"
#include "dpia/parser.hpp"
#include "test_util.hpp"

using namespace dpia;
using testutil::ints;

namespace {

ExecResult run(const std::string& text, Store s, const NatEnv& sigma = {}, bool check = true,
               bool reverse = false) {
  Program p = parse_program(text, check);
  ImpOptions o;
  o.reverse_parfor = reverse;
  return exec(lower(p.body), testutil::with_outputs(p, std::move(s), sigma), sigma, o);
}

}  // namespace

TEST(EvalImp, SkipLeavesStoreUnchanged) {
  ExecResult r = run("(param b (acc num)) skip", {});
  EXPECT_TRUE(value_equal(r.store.at("b"), value_num(0)));
}

TEST(EvalImp, NewCellsAreScopedAndZeroed) {
  ExecResult r = run(
      "(param b (acc num))"
      "(new num (lam t (seq (:= b t.2) (:= t.1 5))))",
      {});
  EXPECT_TRUE(value_equal(r.store.at("b"), value_num(0)));
  EXPECT_EQ(r.store.count("t"), 0u);
  EXPECT_EQ(r.store.size(), 1u);
}

TEST(EvalImp, EmptyParforDoesNothing) {
  ExecResult r = run(
      "(nat n) (param xs (exp (arr n num))) (param a (acc (arr n num)))"
      "(parfor a (lam i o (:= o (idx xs i))))",
      {{"xs", value_array({})}}, {{"n", 0}});
  EXPECT_TRUE(r.races.empty());
  EXPECT_TRUE(value_equal(r.store.at("a"), value_array({})));
}

TEST(EvalImp, ParforWritesEachElement) {
  for (bool reverse : {false, true}) {
    ExecResult r = run(
        "(param xs (exp (arr 4 num))) (param a (acc (arr 4 num)))"
        "(parfor a (lam i o (:= o (* 2 (idx xs i)))))",
        {{"xs", ints({1, 2, 3, 4})}}, {}, true, reverse);
    EXPECT_TRUE(r.races.empty());
    EXPECT_EQ(r.parallel_loops, 1u);
    EXPECT_TRUE(value_equal(r.store.at("a"), ints({2, 4, 6, 8})));
  }
}

TEST(EvalImp, RacyParforReportsViolation) {
  ExecResult r = run(testutil::read_program("racy.dpia"), {{"xs", ints({1, 2, 3})}}, {{"n", 3}},
                     false);
  ASSERT_FALSE(r.races.empty());
  EXPECT_EQ(r.races.front().address.cell, "b");
  EXPECT_NE(r.races.front().describe().find("b"), std::string::npos);
}

TEST(EvalImp, CheckRaceOnFootprints) {
  LeafAddress x{"a", {0}}, y{"a", {1}};
  EXPECT_FALSE(check_race({{x}, {y}}));
  auto v = check_race({{x}, {y}, {x}});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->iter_a, 0);
  EXPECT_EQ(v->iter_b, 2);
}

TEST(EvalImp, SequentialLoopAccumulates) {
  ExecResult r = run(
      "(param xs (exp (arr 4 num))) (param b (var num))"
      "(seq (:= b.1 0) (for 4 (lam i (:= b.1 (+ b.2 (idx xs i))))))",
      {{"xs", ints({1, 2, 3, 4})}});
  EXPECT_TRUE(value_equal(r.store.at("b"), value_num(10)));
}

TEST(EvalImp, VectorAssignmentReadsLanesFirst) {
  ExecResult r = run(
      "(param xs (exp (arr 8 num))) (param a (acc (arr 2 (vec 4))))"
      "(parfor a (lam i o (:= o (idx (asVector 4 xs) i))))",
      {{"xs", ints({1, 2, 3, 4, 5, 6, 7, 8})}});
  EXPECT_EQ(value_to_string(r.store.at("a")), "[<1, 2, 3, 4>, <5, 6, 7, 8>]");
}
