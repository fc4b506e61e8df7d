#include <gtest/gtest.h>

#include "dpia/checker.hpp"
#include "dpia/error.hpp"
#include "dpia/parser.hpp"
#include "test_util.hpp"

using namespace dpia;

namespace {

std::string type_error_of(const std::string& text) {
  try {
    parse_program(text);
  } catch (const DpiaError& e) {
    EXPECT_EQ(e.cls(), ErrorClass::Type) << e.describe();
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return "";
}

}  // namespace

TEST(Checker, RacyParforRejectedNamingTheCell) {
  std::string m = type_error_of(testutil::read_program("racy.dpia"));
  EXPECT_NE(m.find("passiv"), std::string::npos) << m;
  EXPECT_NE(m.find("'b'"), std::string::npos) << m;
}

TEST(Checker, RacyParforParsesWithoutChecking) {
  EXPECT_NO_THROW(parse_program(testutil::read_program("racy.dpia"), false));
}

TEST(Checker, ParforThroughOwnAcceptorAccepted) {
  EXPECT_NO_THROW(parse_program(
      "(nat n) (param xs (exp (arr n num))) (param a (acc (arr n num)))"
      "(parfor a (lam i o (:= o (idx xs i))))"));
}

TEST(Checker, SequentialForMayWriteSharedCell) {
  EXPECT_NO_THROW(parse_program(
      "(nat n) (param xs (exp (arr n num))) (param b (acc num))"
      "(for n (lam i (:= b (idx xs i))))"));
}

TEST(Checker, ParforReadingItsOwnTargetRejected) {
  std::string m = type_error_of(
      "(param b (var (arr 4 num)))"
      "(parfor b.1 (lam i o (:= o (idx b.2 i))))");
  EXPECT_NE(m.find("interference"), std::string::npos) << m;
  EXPECT_NE(m.find("'b'"), std::string::npos) << m;
}

TEST(Checker, DisjointWritesInSequenceAccepted) {
  EXPECT_NO_THROW(parse_program("(param a (acc num)) (param b (acc num)) (seq (:= a 1) (:= b 2))"));
}

TEST(Checker, ProgramTypes) {
  Program dot = parse_program(testutil::read_program("dot.dpia"));
  CheckResult r = check_program(dot);
  EXPECT_EQ(r.type->k, PhraseTypeNode::K::Exp);
  Program hoist = parse_program(testutil::read_program("hoist.dpia"));
  EXPECT_EQ(check_program(hoist).type->k, PhraseTypeNode::K::Comm);
}

TEST(Checker, SynthesisMatchesChecking) {
  Program dot = parse_program(testutil::read_program("dot.dpia"));
  TypeEnv env;
  for (auto& p : dot.params) env[p.name] = p.type;
  EXPECT_TRUE(types_equal(synth_type(env, dot.body), check_program(dot).type));
}

TEST(Checker, UnboundIdentifier) {
  std::string m = type_error_of("(param xs (exp num)) (+ xs zs)");
  EXPECT_NE(m.find("zs"), std::string::npos);
}

TEST(Checker, AssignmentNeedsScalarType) {
  type_error_of("(param xs (exp (arr 4 num))) (param a (acc (arr 4 num))) (:= a xs)");
}
