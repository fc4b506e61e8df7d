#include <gtest/gtest.h>

#include "dpia/checker.hpp"
#include "dpia/eval_fn.hpp"
#include "dpia/lower.hpp"
#include "dpia/parser.hpp"
#include "dpia/pipeline.hpp"
#include "dpia/pretty.hpp"
#include "dpia/translate.hpp"
#include "test_util.hpp"

using namespace dpia;

namespace {

size_t count(const Phrase& p, const std::string& name) {
  return count_prims(p, [&](const std::string& n) { return n == name; });
}

}  // namespace

TEST(Translate, DotStageOneShape) {
  Program p = parse_program(testutil::read_program("dot.dpia"));
  Stage1 s = translate_program(p);
  EXPECT_NO_THROW(recheck_comm(p, s.comm));
  EXPECT_EQ(count(s.comm, "map"), 0u);
  EXPECT_EQ(count(s.comm, "reduce"), 0u);
  EXPECT_EQ(count(s.comm, "mapI"), 1u);
  EXPECT_EQ(count(s.comm, "reduceI"), 1u);
  EXPECT_EQ(count(s.comm, "new"), 1u);
}

TEST(Translate, HierarchyIsPreserved) {
  Program p = parse_program(testutil::read_program("tiled.dpia"));
  Phrase c = translate_program(p).comm;
  EXPECT_EQ(count(c, "mapIWorkgroup"), 1u);
  EXPECT_EQ(count(c, "mapILocal"), 1u);
}

TEST(Translate, CommBodiesUnchanged) {
  Program p = parse_program(testutil::read_program("hoist.dpia"));
  EXPECT_TRUE(alpha_equal(translate_program(p).comm, p.body));
}

TEST(Translate, ArrayAssignmentsCountTheirCopyLoops) {
  Program p = parse_program("(param xs (exp (arr 4 num))) (zip xs xs)");
  Stage1 s = translate_program(p);
  EXPECT_GE(s.assign_mapIs, 1u);
}

TEST(Lower, ProducesPurelyImperativePhrases) {
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    SCOPED_TRACE(f);
    Program p = parse_program(testutil::read_program(f));
    Phrase s2 = lower(translate_program(p).comm);
    EXPECT_TRUE(is_purely_imperative(s2)) << pretty_print(s2);
    EXPECT_NO_THROW(recheck_comm(p, s2));
    EXPECT_EQ(count(s2, "mapI") + count(s2, "reduceI"), 0u);
  }
}

TEST(Lower, DotLoopStructure) {
  Program p = parse_program(testutil::read_program("dot.dpia"));
  Phrase s2 = lower(translate_program(p).comm);
  EXPECT_EQ(count(s2, "parfor"), 1u);
  EXPECT_EQ(count(s2, "for"), 1u);
  EXPECT_EQ(count(s2, "newPrivate"), 1u);
}

TEST(Lower, ExecMatchesEvalOnDot) {
  Program p = parse_program(testutil::read_program("dot.dpia"));
  Phrase s2 = lower(translate_program(p).comm);
  NatEnv sigma{{"n", 3}};
  Store in{{"xs", testutil::ints({1, 2, 3})}, {"ys", testutil::ints({4, 5, 6})}};
  ExecResult r = exec(s2, testutil::with_outputs(p, in, sigma), sigma);
  EXPECT_TRUE(r.races.empty());
  EXPECT_TRUE(value_equal(r.store.at("out"), value_num(32)));
}

TEST(Pipeline, StageErrorsNameTheStage) {
  PipelineOptions o;
  try {
    compile_source("(param xs (exp num)) (+ xs ys)", o);
    FAIL() << "accepted";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "parse");
    EXPECT_EQ(e.cls(), ErrorClass::Type);
  }
}

TEST(Pipeline, CheckOnlyStopsEarly) {
  PipelineOptions o;
  o.check_only = true;
  Compilation c = compile_source(testutil::read_program("dot.dpia"), o);
  EXPECT_FALSE(c.stage1);
  EXPECT_TRUE(c.code.empty());
}
