#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sessium/process.hpp"

namespace sessium {
namespace {

const TypeUniverse& U() { return TypeUniverse::default_universe(); }
ProcPtr P(const char* s) { return parse_process(s, U()); }

std::set<std::string> S(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

bool has_tau_to(const ProcPtr& p, const char* target) {
  auto want = canonical_key(P(target));
  for (const auto& t : tau_steps(p, U())) {
    if (canonical_key(t) == want) return true;
  }
  return false;
}

TEST(ProcessParse, IdleAndRoundTrip) {
  EXPECT_EQ(P("0")->kind, Process::Kind::Idle);
  for (const char* s : {"a?(x:Int).b!(x+1).0", "new c.(a![c:!Int.1].0 | c?(y:Bool).0)", "a!(3).0 + a?(z:'abort').0",
                        "*{server: rec X.(1 (+) ?[!Int.1].X)} server?[x].x!(3).0", "(a!(1).0 (+) a!(2).0) | b?[y].0"}) {
    auto p = P(s);
    EXPECT_EQ(to_string(P(to_string(p).c_str())), to_string(p)) << s;
  }
}

TEST(ProcessParse, BuyerTwoPrefixes) {
  auto p = P("b?[y].y?(contrib:Int).y?[z].z!(address).z?(d:Date).0");
  std::vector<std::string> prefixes;
  for (ProcPtr q = p; q->kind == Process::Kind::Act; q = q->left) prefixes.push_back(q->prefix.str());
  std::vector<std::string> want{"b?[y]", "y?(contrib:Int)", "y?[z]", "z!(address)", "z?(d:Date)"};
  EXPECT_EQ(prefixes, want);
}

TEST(ProcessParse, ReplicationAnnotation) {
  auto p = P("*{server: rec X.(1 (+) ?[!Int.1].X)} server?[x].x!(3).0");
  ASSERT_EQ(p->kind, Process::Kind::Repl);
  ASSERT_EQ(p->repl_ann.size(), 1u);
  EXPECT_EQ(p->repl_ann[0].first, "server");
  EXPECT_EQ(p->repl_ann[0].second, parse_type("rec X.(1 (+) ?[!Int.1].X)", U()));
}

TEST(ProcessParse, LetBindsConstantsUnlessShadowed) {
  auto p = P("let n = 7\nc!(n).c?(n:Int).c!(n).0");
  EXPECT_EQ(to_string(p), "c!(7).c?(n:Int).c!(n).0");
}

TEST(ProcessParse, Errors) {
  EXPECT_THROW(P("a?(x:Nope).0"), ParseError);
  EXPECT_THROW(P("a!(nofun(1)).0"), ParseError);
  EXPECT_THROW(P("a.0"), ParseError);
}

TEST(ProcessNames, FreeNames) {
  EXPECT_TRUE(free_names(P("0")).empty());
  EXPECT_EQ(free_names(P("new c.a![c].0")), S({"a"}));
  EXPECT_EQ(free_names(P("a!(3).b?(x:Int).0")), S({"a", "b"}));
  EXPECT_EQ(free_names(P("a?[x].x!(3).y![x].0")), S({"a", "y"}));
}

TEST(ProcessNames, Substitution) {
  EXPECT_EQ(to_string(substitute(P("x!(3).0"), "x", Message::of_name("c"))), "c!(3).0");
  auto shadow = P("c?[x].x!(3).0");
  EXPECT_EQ(to_string(substitute(shadow, "x", Message::of_name("d"))), to_string(shadow));
  // Buyer2 after receiving d on b: y becomes d throughout.
  auto body = P("y?(contrib:Int).y?[z].z!(address).z?(d2:Date).0");
  EXPECT_EQ(to_string(substitute(body, "y", Message::of_name("d"))),
            "d?(contrib:Int).d?[z].z!(address).z?(d2:Date).0");
  // Capture avoidance: the restricted c is renamed before d := c.
  auto cap = substitute(P("new c.(x!(1).0 | c!(2).0)"), "x", Message::of_name("c"));
  EXPECT_EQ(free_names(cap), S({"c"}));
  EXPECT_EQ(canonical_key(cap), canonical_key(P("new e.(c!(1).0 | e!(2).0)")));
  auto val = substitute(P("a!(x+1).0"), "x", Message::of_value(Value::make_integer(2)));
  EXPECT_EQ(eval(*val->prefix.expr, U()).str(), "3");
}

TEST(ProcessEval, Oracles) {
  std::map<std::string, Value> env{{"price", Value::make_integer(30)}};
  EXPECT_EQ(eval(*Expr::bin('/', Expr::var("price"), Expr::lit(Value::make_integer(2))), U(), env),
            Value::make_integer(15));
  EXPECT_EQ(eval(*Expr::lit(Value::make_boolean(true)), U()), Value::make_boolean(true));
  EXPECT_EQ(eval(*Expr::app("isprime", {Expr::lit(Value::make_integer(4))}), U()), Value::make_boolean(false));
  EXPECT_EQ(eval(*Expr::app("isprime", {Expr::lit(Value::make_integer(7))}), U()), Value::make_boolean(true));
  EXPECT_THROW(eval(*Expr::bin('/', Expr::lit(Value::make_integer(1)), Expr::lit(Value::make_integer(0))), U()),
               EvalError);
  EXPECT_THROW(eval(*Expr::var("nope"), U()), EvalError);
}

TEST(ProcessEval, ExpressionTypes) {
  std::map<std::string, BasicType> g{{"price", BasicType::named("Int")}, {"title", BasicType::named("String")}};
  EXPECT_EQ(expr_type(*Expr::bin('/', Expr::var("price"), Expr::lit(Value::make_integer(2))), U(), g).str(), "Int");
  EXPECT_EQ(expr_type(*Expr::app("price", {Expr::var("title")}), U(), g).str(), "Int");
  EXPECT_EQ(expr_type(*Expr::lit(Value::make_atom("abort")), U(), g).str(), "'abort'");
  EXPECT_EQ(expr_type(*Expr::lit(Value::make_decimal(1.5)), U(), g).str(), "Real");
  EXPECT_THROW(expr_type(*Expr::app("price", {Expr::var("price")}), U(), g), EvalError);
}

TEST(ProcessLts, InternalChoiceAndReplication) {
  EXPECT_TRUE(has_tau_to(P("a!(1).0 (+) b!(2).0"), "a!(1).0"));
  EXPECT_TRUE(has_tau_to(P("a!(1).0 (+) b!(2).0"), "b!(2).0"));
  auto bang = P("*a?(x:Int).0");
  auto succ = tau_steps(bang, U());
  ASSERT_EQ(succ.size(), 1u);
  EXPECT_EQ(canonical_key(succ[0]), canonical_key(P("*a?(x:Int).0 | a?(x:Int).0")));
}

TEST(ProcessLts, ScopeExtrusion) {
  auto p = P("new d.c![d].d!(1).0 | c?[x].x?(y:Int).0");
  EXPECT_TRUE(has_tau_to(p, "new d.(d!(1).0 | d?(y:Int).0)"));
  // Extruded name clashes with a free name of the receiver.
  auto q = P("new d.c![d].d!(1).0 | c?[x].(x?(y:Int).0 | d!(2).0)");
  auto succ = tau_steps(q, U());
  ASSERT_EQ(succ.size(), 1u);
  EXPECT_EQ(canonical_key(succ[0]), canonical_key(P("new e.(e!(1).0 | e?(y:Int).0 | d!(2).0)")));
  EXPECT_EQ(free_names(succ[0]), S({"d"}));
}

TEST(ProcessLts, ValueCommunicationRespectsTypes) {
  EXPECT_TRUE(has_tau_to(P("c!(3).0 | c?(x:Int).d!(x).0"), "d!(3).0"));
  EXPECT_TRUE(tau_steps(P("c!(true).0 | c?(x:Int).0"), U()).empty());
  EXPECT_TRUE(tau_steps(P("c!(1/0).0 | c?(x:Int).0"), U()).empty());
  EXPECT_TRUE(tau_steps(P("new c.c!(3).0 | c?(x:Int).0"), U()).empty());
}

TEST(ProcessLts, ExternalChoice) {
  auto p = P("(a!(1).0 + (b!(2).0 (+) 0)) | a?(x:Int).0");
  EXPECT_TRUE(has_tau_to(p, "0 | 0"));
  EXPECT_TRUE(has_tau_to(p, "(a!(1).0 + b!(2).0) | a?(x:Int).0"));
  // Visible steps discard the other branch.
  for (const auto& s : proc_steps(P("a!(1).0 + b?(y:Bool).c!(y).0"), U())) {
    EXPECT_NE(s.label.kind, ProcLabel::Kind::Tau);
    EXPECT_NE(s.target->kind, Process::Kind::Ext);
  }
}

TEST(ProcessLts, VisibleLabels) {
  auto steps = proc_steps(P("a?(x:Real).0 | new d.b![d].0"), U());
  std::set<std::string> labels;
  for (const auto& s : steps) labels.insert(s.label.str());
  EXPECT_EQ(labels, S({"a?3", "a?1.5", "b!(d)"}));
}

TEST(ProcessReady, Oracles) {
  EXPECT_TRUE(ready(P("c!(3).0"), "c"));
  EXPECT_FALSE(ready(P("a?(x:Int).b?(y:Bool).0 + b?(x:Int).a?(y:Bool).0"), "a"));
  EXPECT_TRUE(ready(P("0"), "c"));
  EXPECT_TRUE(ready(P("c!(1).0 | new c.d?(x:Int).c!(1).0"), "c"));
  EXPECT_FALSE(ready(P("c!(1).0 (+) c!(2).0"), "c"));
  EXPECT_FALSE(ready(P("d?(x:Int).c!(1).0"), "c"));
}

// Random closed terms over a few channels.
class Gen {
 public:
  explicit Gen(unsigned seed) : rng_(seed) {}

  std::string proc(int depth) {
    int k = depth <= 0 ? 0 : static_cast<int>(rng_() % 8);
    const char* ch[] = {"a", "b", "c"};
    std::string c = ch[rng_() % 3];
    switch (k) {
      case 0: return "0";
      case 1: return c + "!(" + std::to_string(rng_() % 3) + ")." + proc(depth - 1);
      case 2: return c + "?(x:Int)." + proc(depth - 1);
      case 3: return c + "![" + std::string(ch[rng_() % 3]) + "]." + proc(depth - 1);
      case 4: return c + "?[y].y!(1)." + proc(depth - 1);
      case 5: return "(" + proc(depth - 1) + " | " + proc(depth - 1) + ")";
      case 6: return "(" + proc(depth - 1) + " + " + proc(depth - 1) + ")";
      default: return "new " + c + ".(" + proc(depth - 1) + " | " + proc(depth - 1) + ")";
    }
  }

 private:
  std::mt19937 rng_;
};

TEST(ProcessProperties, TransitionsRespectFreeNames) {
  Gen g(11);
  for (int i = 0; i < 300; ++i) {
    auto p = P(g.proc(4).c_str());
    auto fn = free_names(p);
    for (const auto& s : proc_steps(p, U())) {
      auto allowed = fn;
      if (s.label.kind == ProcLabel::Kind::BoundOut || (s.label.kind == ProcLabel::Kind::FreeIn && s.label.message.is_name)) {
        allowed.insert(s.label.message.name);
      }
      for (const auto& n : free_names(s.target)) {
        EXPECT_TRUE(allowed.count(n)) << to_string(p) << " -" << s.label.str() << "-> " << to_string(s.target);
      }
    }
  }
}

TEST(ProcessProperties, CanonicalKeyIsStableUnderReparseAndFreshening) {
  Gen g(5);
  for (int i = 0; i < 300; ++i) {
    auto p = P(g.proc(4).c_str());
    EXPECT_EQ(canonical_key(p), canonical_key(P(to_string(p).c_str())));
    EXPECT_EQ(canonical_key(p), canonical_key(freshen(p)));
    EXPECT_EQ(canonical_key(p), canonical_key(normalize(p)));
  }
}

TEST(ProcessProperties, ReadyIsSyntaxDirected) {
  Gen g(9);
  for (int i = 0; i < 300; ++i) {
    auto p = P(g.proc(3).c_str());
    for (const char* c : {"a", "b", "c"}) {
      if (!free_names(p).count(c)) EXPECT_TRUE(ready(p, c));
      if (p->kind == Process::Kind::Par) {
        EXPECT_EQ(ready(p, c), ready(p->left, c) && ready(p->right, c));
      }
    }
  }
}

}  // namespace
}  // namespace sessium
