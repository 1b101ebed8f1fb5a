#include <gtest/gtest.h>

#include <random>

#include "sessium/session_type.hpp"

namespace sessium {
namespace {

const TypeUniverse& U() { return TypeUniverse::default_universe(); }
Type P(const char* s) { return parse_type(s, U()); }

bool has_violation(Type t, Violation::Kind k) {
  for (const auto& v : validate(t)) {
    if (v.kind == k) return true;
  }
  return false;
}

TEST(SessionType, ParsesConstants) {
  EXPECT_EQ(P("1"), done_type());
  EXPECT_EQ(P("0"), fail_type());
  EXPECT_EQ(P("(1)"), done_type());
}

TEST(SessionType, ParsesSellerProjection) {
  Type t = P("?String.!Int.?Address.!Date.1");
  ASSERT_EQ(t->kind, TypeKind::Prefix);
  EXPECT_EQ(t->action.kind, ActionKind::InVal);
  EXPECT_EQ(t->action.bt.name, "String");
  EXPECT_EQ(to_string(t), "?String.!Int.?Address.!Date.1");
  EXPECT_TRUE(validate(t).empty());
}

TEST(SessionType, RecursionTiesBackEdge) {
  Type t = P("rec X. !Int.X");
  ASSERT_EQ(t->kind, TypeKind::Rec);
  EXPECT_TRUE(validate(t).empty());
  Type h = hnf(t);
  ASSERT_EQ(h->kind, TypeKind::Prefix);
  EXPECT_EQ(h->cont(), t);
  EXPECT_EQ(to_string(t), "rec X.!Int.X");
}

TEST(SessionType, Precedence) {
  // "." binds tighter than "|", which binds tighter than "+", then "(+)".
  Type t = P("!Int.1 | ?Int.1 + 1 (+) 0");
  ASSERT_EQ(t->kind, TypeKind::Int);
  EXPECT_EQ(t->children.size(), 2u);
}

TEST(SessionType, CanonicalFormsModuloAcAndUnits) {
  EXPECT_EQ(P("!Int.1 + ?Bool.1"), P("?Bool.1 + !Int.1"));
  EXPECT_EQ(P("(!Int.1 | 1) | ?Int.1"), P("?Int.1 | !Int.1"));
  EXPECT_EQ(P("0 + ?Int.1"), P("?Int.1"));
  EXPECT_EQ(P("1 (+) (?Int.1 (+) 0)"), P("(1 (+) ?Int.1) (+) 0"));
  EXPECT_EQ(P("!empty.!Int.1"), fail_type());
  EXPECT_EQ(P("?empty.1"), fail_type());
  EXPECT_EQ(P("rec X. !Int.1"), P("!Int.1"));
  // 0 and a.0 are distinct terms.
  EXPECT_NE(P("!Int.0"), fail_type());
  // Internal choice keeps duplicates; external choice drops 0 only.
  EXPECT_EQ(P("1 (+) 1")->children.size(), 2u);
}

TEST(SessionType, ValidateExamples) {
  EXPECT_TRUE(has_violation(P("rec X. (X + X)"), Violation::Kind::Contractivity));
  EXPECT_TRUE(validate(P("rec X. !Int.X")).empty());
  EXPECT_TRUE(has_violation(P("rec X. (X | !Int.1)"), Violation::Kind::FiniteParallelism));
  EXPECT_TRUE(has_violation(P("rec X. !Int.(X | ?Bool.1 + ?Int.1)"), Violation::Kind::FiniteParallelism));
  EXPECT_TRUE(has_violation(P("rec X. ?[X].1"), Violation::Kind::PayloadRecursion));
  EXPECT_TRUE(has_violation(mk_var(0), Violation::Kind::Unbound));
  EXPECT_TRUE(validate(P("rec X.?Int.X | rec Y.!Int.Y")).empty());
  EXPECT_TRUE(validate(P("rec X.(1 (+) ?[!Int.1].X)")).empty());
  EXPECT_TRUE(validate(P("(!Int.1 | ?Int.1) + rec X.!Bool.X")).empty());
}

TEST(SessionType, NestedRecursionPrintsDistinctNames) {
  Type t = P("rec X. !Int.rec Y. (?Bool.X + ?Int.Y)");
  EXPECT_EQ(to_string(t), "rec X.!Int.rec Y.(?Bool.X + ?Int.Y)");
  EXPECT_EQ(P(to_string(t).c_str()), t);
}

TEST(SessionType, Weight) {
  EXPECT_EQ(weight(P("!Int.1")), 0u);
  EXPECT_EQ(weight(P("?[!Int.1].1")), 1u);
  EXPECT_EQ(weight(P("![?[!Bool.1].1].1")), 2u);
  EXPECT_EQ(weight(P("!Int.?[?[1].1].![1].1")), 2u);
}

TEST(SessionType, DenoteAndSubtype) {
  EXPECT_TRUE(denote(BasicType::empty(), U()).empty());
  EXPECT_EQ(denote(BasicType::named("Int"), U()), CellSet::single(*U().find_cell("int")));
  EXPECT_EQ(denote(BasicType::singleton("'abort'"), U()), CellSet::single(*U().find_cell("abort")));
  EXPECT_TRUE(bt_subtype(BasicType::named("Int"), BasicType::named("Real"), U()));
  EXPECT_TRUE(bt_subtype(BasicType::empty(), BasicType::named("Int"), U()));
  EXPECT_FALSE(bt_subtype(BasicType::named("Int"), BasicType::named("Bool"), U()));
  EXPECT_FALSE(bt_subtype(BasicType::named("Real"), BasicType::named("Int"), U()));
}

TEST(SessionType, ParseErrors) {
  EXPECT_THROW(P("!Nat.1"), ParseError);
  EXPECT_THROW(P("?'nothing'.1"), ParseError);
  EXPECT_THROW(P("!Int"), ParseError);
  EXPECT_THROW(P("1 +"), ParseError);
  EXPECT_THROW(P("X"), ParseError);
  try {
    P("!Int.1 | ?Foo.1");
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 11);
  }
}

TEST(SessionType, CommittedOutputSyntax) {
  Type t = P("!<int>.1 | ?Int.1");
  EXPECT_EQ(to_string(t), "?Int.1 | !<int>.1");
  EXPECT_EQ(to_string(P("?<int>.1")), "?<int>.1");
}

// Random closed terms for round-trip properties.
Type random_term(std::mt19937_64& rng, int budget, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  static const char* names[] = {"Int", "Bool", "Real", "String"};
  int k = budget <= 1 ? pick(rng) % 3 : pick(rng);
  auto sub = [&](int b) { return random_term(rng, b, depth); };
  switch (k) {
    case 0: return fail_type();
    case 1: return done_type();
    case 2:
      if (depth > 0) return mk_var(static_cast<unsigned>(rng() % depth));
      return done_type();
    case 3:
    case 4: {
      BasicType bt = BasicType::named(names[rng() % 4]);
      Action a = rng() % 2 ? in_val(bt) : out_val(bt);
      return mk_prefix(a, sub(budget - 1));
    }
    case 5: return mk_prefix(rng() % 2 ? in_ch(random_term(rng, 2, 0)) : out_ch(random_term(rng, 2, 0)), sub(budget - 3));
    case 6: return mk_ext(sub(budget / 2), sub(budget / 2));
    case 7: return mk_int(sub(budget / 2), sub(budget / 2));
    case 8: return mk_par(sub(budget / 2), sub(budget / 2));
    default: return mk_rec(random_term(rng, budget - 1, depth + 1));
  }
}

TEST(SessionTypeProperty, PrintParseRoundTrip) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    Type t = random_term(rng, 10, 0);
    std::string s = to_string(t);
    EXPECT_EQ(P(s.c_str()), t) << s;
    EXPECT_EQ(to_string(P(s.c_str())), s);
  }
}

TEST(SessionTypeProperty, WeightOfChannelPrefix) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Type rho = random_term(rng, 6, 0);
    Type s = random_term(rng, 6, 0);
    Type t = mk_prefix(in_ch(rho), s);
    EXPECT_EQ(weight(t), std::max(1 + weight(rho), weight(s)));
  }
}

TEST(SessionTypeProperty, BasicSubtypeIsPreorder) {
  std::vector<BasicType> bts = {BasicType::empty(), BasicType::named("Int"), BasicType::named("Real"),
                                BasicType::named("Bool"), BasicType::singleton("'abort'")};
  for (const auto& a : bts) {
    EXPECT_TRUE(bt_subtype(a, a, U()));
    for (const auto& b : bts) {
      for (const auto& c : bts) {
        if (bt_subtype(a, b, U()) && bt_subtype(b, c, U())) EXPECT_TRUE(bt_subtype(a, c, U()));
      }
    }
  }
}

TEST(SessionTypeProperty, HnfIsStableAndClosed) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    Type t = random_term(rng, 10, 0);
    if (!validate(t).empty()) continue;
    Type h = hnf(t);
    EXPECT_NE(h->kind, TypeKind::Rec);
    EXPECT_EQ(hnf(h), h);
    EXPECT_TRUE(h->closed());
  }
}

}  // namespace
}  // namespace sessium
