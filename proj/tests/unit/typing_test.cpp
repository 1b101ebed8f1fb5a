#include <gtest/gtest.h>

#include "sessium/corpus.hpp"
#include "sessium/typing.hpp"

namespace sessium {
namespace {

const TypeUniverse& U() { return TypeUniverse::default_universe(); }
Type T(const char* s) { return parse_type(s, U()); }
ProcPtr P(std::string_view s) { return parse_process(s, U()); }

Analyzer& az() {
  static Analyzer a(U());
  return a;
}

Type restricted(const TypeReport& r, const std::string& name) {
  for (const auto& [n, t] : r.restricted) {
    if (n == name) return t;
  }
  return nullptr;
}

const char* kEta = "?String.!Int.?Address.!Date.1";
const char* kRho = "!Address.?Date.1";
const char* kTheta = "?Int.?[!Address.?Date.1].1";

TEST(TypingInfer, Nil) { EXPECT_TRUE(infer({}, P("0"), az()).empty()); }

TEST(TypingInfer, DelegatedChannelCollectsBothCopies) {
  auto env = infer({}, P("a![c:!Int.1].a![c:!Bool.1].c?(x:Int).c?(y:Bool).0"), az());
  EXPECT_EQ(env.at("c"), T("!Int.1 | !Bool.1 | ?Int.?Bool.1"));
  EXPECT_EQ(env.at("a"), T("![!Int.1].![!Bool.1].1"));
}

TEST(TypingInfer, IntroductorySystem) {
  TypeReport rep = typecheck(P(corpus_text("seller_buyers")), {}, Mode::Strict, az());
  ASSERT_EQ(rep.status, TypeStatus::WellTyped) << rep.reason;
  std::string eta = kEta;
  std::string theta = kTheta;
  EXPECT_EQ(rep.env.at("a"), T(("?[" + eta + "].1 | ![" + eta + "].1").c_str()));
  EXPECT_EQ(rep.env.at("b"), T(("![" + theta + "].1 | ?[" + theta + "].1").c_str()));
  EXPECT_EQ(restricted(rep, "c"), T((eta + " | !String.?Int." + kRho).c_str()));
  EXPECT_EQ(restricted(rep, "d"), T((theta + " | !Int.![" + kRho + "].1").c_str()));
  EXPECT_EQ(rep.env.size(), 2u);
}

TEST(TypingInfer, ValueInputExtendsGamma) {
  auto env = infer({}, P("a?(x:Int).b!(x+1).0"), az());
  EXPECT_EQ(env.at("a"), T("?Int.1"));
  EXPECT_EQ(env.at("b"), T("!Int.1"));
  EXPECT_THROW(infer({}, P("a!(y).0"), az()), TypeError);
  auto g = infer({{"y", BasicType::named("Bool")}}, P("a!(y).0"), az());
  EXPECT_EQ(g.at("a"), T("!Bool.1"));
}

TEST(TypingInfer, ChoiceJoins) {
  auto env = infer({}, P("a!(1).b!(true).0 (+) a?(x:Int).0"), az());
  EXPECT_EQ(env.at("a"), T("!Int.1 (+) ?Int.1"));
  EXPECT_EQ(env.at("b"), T("!Bool.1 (+) 1"));
  auto ext = infer({}, P("a!(1).b!(true).0 + a?(x:Int).0"), az());
  EXPECT_EQ(ext.at("a"), T("!Int.1 + ?Int.1"));
  EXPECT_EQ(ext.at("b"), T("!Bool.1 (+) 1"));
}

TEST(TypingInfer, ShapeErrors) {
  try {
    infer({}, P(corpus_text("example3_ext")), az());
    FAIL() << "expected TExtShape";
  } catch (const TypeError& e) {
    EXPECT_EQ(e.rule(), "t-ext");
    EXPECT_NE(std::string(e.what()).find("TExtShape"), std::string::npos);
  }
  try {
    infer({}, P("a?[x].b!(1).0"), az());
    FAIL() << "expected TInputSShape";
  } catch (const TypeError& e) {
    EXPECT_EQ(e.rule(), "t-inputS");
  }
  try {
    infer({}, P("a![c].0"), az());
    FAIL() << "expected MissingAnnotation";
  } catch (const TypeError& e) {
    EXPECT_EQ(e.rule(), "t-outputS");
  }
}

TEST(TypingChecks, Restriction) {
  EXPECT_TRUE(check_restriction({{"c", T("?String.!Int.1 | !String.?Int.1")}}, "c", az()).is_yes());
  EXPECT_TRUE(check_restriction({{"c", T("1 | !Int.1")}}, "c", az()).is_no());
  EXPECT_TRUE(check_restriction({}, "c", az()).is_yes());
}

TEST(TypingChecks, Replication) {
  EXPECT_TRUE(check_replication(T("1"), std::nullopt, az()).is_yes());
  EXPECT_TRUE(check_replication(T("?Int.1"), std::nullopt, az()).is_no());
  Type s = T("rec X.(1 (+) ?[!Int.1].X)");
  EXPECT_TRUE(az().strong_subsession(s, T("?[!Int.1].1")).is_yes());
  EXPECT_FALSE(check_replication(T("?[!Int.1].1"), s, az()).is_no());
}

TEST(TypingChecks, Viability) {
  EXPECT_TRUE(env_viable({{"a", T("![1].1 | ?[!Int.1].1")}}, az()).is_no());
  std::string eta = kEta;
  EXPECT_TRUE(env_viable({{"a", T(("?[" + eta + "].1 | ![" + eta + "].1").c_str())}}, az()).is_yes());
  EXPECT_TRUE(env_viable({}, az()).is_yes());
}

TEST(TypingCorpus, Statuses) {
  auto run = [](const char* name, Mode mode) { return typecheck(P(corpus_text(name)), {}, mode, az()); };
  auto deadlock = run("deadlock", Mode::Strict);
  EXPECT_EQ(deadlock.status, TypeStatus::WellTyped) << deadlock.reason;
  EXPECT_EQ(deadlock.restricted.size(), 2u);

  auto ex2 = run("example2_nonviable", Mode::Strict);
  EXPECT_EQ(ex2.status, TypeStatus::Rejected);
  EXPECT_EQ(ex2.rule, "viability");
  EXPECT_TRUE(env_viable(ex2.env, az()).is_no());

  auto ex3 = run("example3_ext", Mode::Strict);
  EXPECT_EQ(ex3.status, TypeStatus::Rejected);
  EXPECT_EQ(ex3.rule, "t-ext");
  EXPECT_EQ(ex3.location, "3:6");

  auto multi = run("multiparty_prime", Mode::Strict);
  ASSERT_EQ(multi.status, TypeStatus::WellTyped) << multi.reason;
  const char* eta = "?Int.(!Bool.1 + ?'abort'.1)";
  std::string e = eta;
  EXPECT_EQ(restricted(multi, "a"), T(("![" + e + "].1 | ![" + e + "].1 | ?[" + e + "].1 | ?[" + e + "].1").c_str()));
  EXPECT_EQ(restricted(multi, "c"), T((e + " | !Int.1 | " + e + " | !Int.1 | ?Bool.!'abort'.1").c_str()));

  auto ex1 = run("example1_server", Mode::Permissive);
  EXPECT_EQ(ex1.status, TypeStatus::WellTypedWithWarnings) << ex1.reason;
  int unknown = 0;
  for (const auto& c : ex1.checks) {
    if (!c.verdict.definite()) {
      ++unknown;
      EXPECT_EQ(c.claim, "rec X.(1 (+) ?[!Int.1].X) ⊑ rec X.(1 (+) ?[!Int.1].X) | rec X.(1 (+) ?[!Int.1].X)");
    } else {
      EXPECT_TRUE(c.verdict.is_yes()) << c.claim;
    }
  }
  EXPECT_EQ(unknown, 1);
  EXPECT_EQ(run("example1_server", Mode::Strict).status, TypeStatus::Rejected);
}

TEST(TypingProperties, FreeNamesAreInTheEnvironment) {
  for (const auto& src : corpus_sources()) {
    ProcPtr p = P(src.text);
    SessionEnv env;
    try {
      env = infer({}, p, az());
    } catch (const TypeError&) {
      continue;
    }
    for (const auto& n : free_names(p)) EXPECT_TRUE(env.count(n)) << src.name << ": " << n;
  }
}

TEST(TypingProperties, Deterministic) {
  for (const auto& src : corpus_sources()) {
    auto a = typecheck(P(src.text), {}, Mode::Permissive, az());
    auto b = typecheck(P(src.text), {}, Mode::Permissive, az());
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.env, b.env);
    EXPECT_EQ(a.reason, b.reason);
  }
}

}  // namespace
}  // namespace sessium
