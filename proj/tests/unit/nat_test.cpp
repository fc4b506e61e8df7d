#include <gtest/gtest.h>

#include "dpia/nat.hpp"
#include "dpia/parser.hpp"
#include "dpia/types.hpp"

using namespace dpia;

TEST(Nat, NormalFormIdentifiesCommutedProducts) {
  Nat n = Nat::var("n"), m = Nat::var("m");
  EXPECT_TRUE(nat_equal(n * m + Nat(2), Nat(2) + m * n));
  EXPECT_TRUE(nat_equal((n + Nat(1)) * m, n * m + m));
  EXPECT_FALSE(nat_equal(n * m, n + m));
}

TEST(Nat, ConstantFolding) {
  Nat e = Nat(3) * Nat(4) + Nat(5);
  ASSERT_TRUE(e.as_const());
  EXPECT_EQ(*nat_normalize(e).as_const(), 17u);
}

TEST(Nat, EvalUnderEnvironment) {
  Nat e = Nat::var("n") * Nat(1024) + Nat::var("m");
  EXPECT_EQ(nat_eval(e, {{"n", 3}, {"m", 5}}), 3077u);
}

TEST(Nat, ExactDivision) {
  Nat n = Nat::var("n");
  auto q = nat_div_exact(n * Nat(32) + Nat(64), Nat(32));
  ASSERT_TRUE(q);
  EXPECT_TRUE(nat_equal(*q, n + Nat(2)));
  EXPECT_FALSE(nat_div_exact(n * Nat(32) + Nat(3), Nat(32)));
  EXPECT_TRUE(nat_equal(*nat_div_exact(n * n, n), n));
}

TEST(Nat, SubstitutionAndFreeVars) {
  Nat e = Nat::var("n") * Nat::var("m");
  EXPECT_EQ(nat_free_vars(e), (std::set<std::string>{"m", "n"}));
  EXPECT_TRUE(nat_equal(nat_subst(e, "m", Nat(4)), Nat(4) * Nat::var("n")));
}

TEST(DataTypes, LeafCountAndEquality) {
  Data d = parse_data_text("(arr n (pair num (vec 4)))");
  EXPECT_EQ(data_leaf_count(d, {{"n", 3}}), 15u);
  EXPECT_TRUE(data_equal(d, dt::array(Nat::var("n"), dt::pair(dt::num(), dt::vec(4)))));
  EXPECT_FALSE(data_equal(d, dt::array(Nat::var("n"), dt::num())));
}

TEST(DataTypes, VectorWidths) {
  for (int w : {2, 3, 4, 8, 16}) EXPECT_TRUE(is_legal_vector_width(w));
  EXPECT_FALSE(is_legal_vector_width(5));
}

TEST(PhraseTypes, VarIsAccExpProduct) {
  PType v = pt::var(dt::num());
  ASSERT_EQ(v->k, PhraseTypeNode::K::Prod);
  EXPECT_EQ(v->a->k, PhraseTypeNode::K::Acc);
  EXPECT_EQ(v->b->k, PhraseTypeNode::K::Exp);
  ASSERT_TRUE(as_var_type(v));
  EXPECT_TRUE(data_equal(as_var_type(v), dt::num()));
}

TEST(PhraseTypes, Passivity) {
  EXPECT_TRUE(is_passive(pt::exp(dt::num())));
  EXPECT_FALSE(is_passive(pt::comm()));
  EXPECT_FALSE(is_passive(pt::acc(dt::num())));
  EXPECT_TRUE(is_passive(pt::pfn(pt::exp(dt::num()), pt::comm())));
}
