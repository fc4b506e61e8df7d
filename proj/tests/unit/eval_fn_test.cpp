#include <gtest/gtest.h>

#include "dpia/eval_fn.hpp"
#include "dpia/parser.hpp"
#include "test_util.hpp"

using namespace dpia;
using testutil::ints;

namespace {

Value run(const std::string& text, ValueEnv env, const NatEnv& sigma = {},
          NumMode mode = NumMode::Int) {
  Program p = parse_program(text);
  return eval_fn(p.body, env, sigma, mode);
}

}  // namespace

TEST(EvalFn, DotProduct) {
  Value r = run(testutil::read_program("dot.dpia"),
                {{"xs", ints({1, 2, 3})}, {"ys", ints({4, 5, 6})}}, {{"n", 3}});
  EXPECT_TRUE(value_equal(r, value_num(32))) << value_to_string(r);
}

TEST(EvalFn, TiledEqualsSimpleDot) {
  std::vector<Value> xs, ys;
  int64_t want = 0;
  for (int64_t k = 0; k < 64; ++k) {
    xs.push_back(value_num(k % 7 - 3));
    ys.push_back(value_num(k % 5 + 1));
    want += (k % 7 - 3) * (k % 5 + 1);
  }
  ValueEnv env{{"xs", value_array(xs)}, {"ys", value_array(ys)}};
  EXPECT_TRUE(value_equal(run(testutil::read_program("tiled.dpia"), env, {{"n", 2}}), value_num(want)));
  EXPECT_TRUE(value_equal(run(testutil::read_program("dot.dpia"), env, {{"n", 64}}), value_num(want)));
}

TEST(EvalFn, SplitJoinZip) {
  ValueEnv env{{"xs", ints({1, 2, 3, 4, 5, 6})}};
  Value s = run("(param xs (exp (arr 6 num))) (split 3 xs)", env);
  EXPECT_EQ(value_to_string(s), "[[1, 2, 3], [4, 5, 6]]");
  Value j = run("(param xs (exp (arr 6 num))) (join (split 2 xs))", env);
  EXPECT_TRUE(value_equal(j, env["xs"]));
  Value z = run("(param xs (exp (arr 6 num))) (map (lam p (- (fst p) (snd p))) (zip xs xs))", env);
  EXPECT_TRUE(value_equal(z, ints({0, 0, 0, 0, 0, 0})));
}

TEST(EvalFn, ReduceFoldsLeftWithElementFirst) {
  ValueEnv env{{"xs", ints({1, 2, 3})}};
  // f(3, f(2, f(1, 10))) with f x a = x - a.
  Value r = run("(param xs (exp (arr 3 num))) (reduce (lam x a (- x a)) 10 xs)", env);
  EXPECT_TRUE(value_equal(r, value_num(3 - (2 - (1 - 10)))));
}

TEST(EvalFn, VectorsAreLaneWise) {
  ValueEnv env{{"xs", ints({1, 2, 3, 4, 5, 6, 7, 8})}};
  Value r = run(
      "(param xs (exp (arr 8 num)))"
      "(asScalar 4 (map (lam v (* v (lit 2 (vec 4)))) (asVector 4 xs)))",
      env);
  EXPECT_TRUE(value_equal(r, ints({2, 4, 6, 8, 10, 12, 14, 16})));
}

TEST(EvalFn, IntegerDivisionByZeroIsZero) {
  Value r = run("(param x (exp num)) (/ x 0)", {{"x", value_num(7)}});
  EXPECT_TRUE(value_equal(r, value_num(0)));
}

TEST(EvalFn, FloatMode) {
  Value r = run("(param x (exp num)) (/ x 4)", {{"x", value_numf(1.0)}}, {}, NumMode::Float);
  EXPECT_DOUBLE_EQ(r.as_double(), 0.25);
}

TEST(EvalFn, IdxLiteral) {
  Value r = run("(param xs (exp (arr 4 num))) (idx xs (lit 2 (idx 4)))", {{"xs", ints({5, 6, 7, 8})}});
  EXPECT_TRUE(value_equal(r, value_num(7)));
}
