#include <gtest/gtest.h>

#include "dpia/error.hpp"
#include "dpia/parser.hpp"
#include "dpia/pretty.hpp"
#include "dpia/prims.hpp"
#include "test_util.hpp"

using namespace dpia;

namespace {

DpiaError parse_failure(const std::string& text) {
  try {
    parse_program(text);
  } catch (const DpiaError& e) {
    return e;
  }
  ADD_FAILURE() << "accepted: " << text;
  return DpiaError(ErrorClass::Internal, "");
}

}  // namespace

TEST(Parser, GoldenProgramsParse) {
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    SCOPED_TRACE(f);
    Program p = parse_program(testutil::read_program(f));
    EXPECT_EQ(p.nats, std::vector<std::string>{"n"});
    EXPECT_EQ(p.output, "out");
  }
}

TEST(Parser, ImplicitOutputForExpressionBody) {
  Program p = parse_program(testutil::read_program("dot.dpia"));
  const Param* out = p.find_param("out");
  ASSERT_NE(out, nullptr);
  EXPECT_EQ(out->type->k, PhraseTypeNode::K::Acc);
  EXPECT_TRUE(data_equal(out->type->data, dt::num()));
}

TEST(Parser, InfersSplitSizes) {
  Program p = parse_program(testutil::read_program("tiled.dpia"));
  EXPECT_GE(count_prims(p.body, [](const std::string& n) { return n == "split"; }), 2u);
  EXPECT_EQ(count_prims(p.body, [](const std::string& n) { return n == "mapWorkgroup"; }), 1u);
}

TEST(Parser, PrettyPrintRoundTrips) {
  for (const char* f : {"dot.dpia", "tiled.dpia", "dotvec.dpia", "hoist.dpia"}) {
    SCOPED_TRACE(f);
    Program p = parse_program(testutil::read_program(f));
    std::string text = program_to_text(p);
    Program q = parse_program(text);
    EXPECT_TRUE(alpha_equal(p.body, q.body)) << text;
    EXPECT_EQ(program_to_text(q), text);
  }
}

TEST(Parser, ErrorsCarryPositions) {
  DpiaError e = parse_failure("(param xs (exp (arr 4 num)))\n(map (lam x (+ x 1)) ys)");
  EXPECT_EQ(e.cls(), ErrorClass::Type);
  EXPECT_EQ(e.span().line, 2);
  EXPECT_NE(std::string(e.what()).find("ys"), std::string::npos);

  DpiaError u = parse_failure("(param xs (exp num)");
  EXPECT_EQ(u.cls(), ErrorClass::Parse);
}

TEST(Parser, RejectsIllTypedApplication) {
  DpiaError e = parse_failure("(param xs (exp (arr 4 num))) (+ xs 1)");
  EXPECT_EQ(e.cls(), ErrorClass::Type);
}

TEST(Parser, RejectsSplitOfIndivisibleLength) {
  DpiaError e = parse_failure("(param xs (exp (arr 6 num))) (split 4 xs)");
  EXPECT_EQ(e.cls(), ErrorClass::Type);
}

TEST(Parser, LiteralsAndVectors) {
  Program p = parse_program("(param xs (exp (arr 8 num))) (asVector 4 xs)");
  EXPECT_TRUE(data_equal(p.find_param("out")->type->data, dt::array(Nat(2), dt::vec(4))));
  Program q = parse_program("(param xs (exp (arr 8 num))) (idx xs (lit 3 (idx 8)))");
  EXPECT_TRUE(data_equal(q.find_param("out")->type->data, dt::num()));
}

TEST(Parser, CommentsAreIgnored) {
  Program p = parse_program(";; header\n(param xs (exp num)) ;; input\n(+ xs 1)");
  EXPECT_EQ(p.params.size(), 2u);
}
