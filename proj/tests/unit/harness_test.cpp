#include <gtest/gtest.h>

#include "sessium/corpus.hpp"
#include "sessium/harness.hpp"

namespace sessium {
namespace {

const TypeUniverse& U() { return TypeUniverse::default_universe(); }
Type T(const char* s) { return parse_type(s, U()); }
ProcPtr P(std::string_view s) { return parse_process(s, U()); }

Analyzer& az() {
  static Analyzer a(U());
  return a;
}

TEST(HarnessSimulate, DeadlockIsStuckImmediately) {
  auto tr = simulate(P(corpus_text("deadlock")), 10, 0, az());
  EXPECT_EQ(tr.status, SimStatus::Stuck);
  EXPECT_TRUE(tr.steps.empty());
}

TEST(HarnessSimulate, SuccessAndBudget) {
  auto ok = simulate(P("a!(1).0 | a?(x:Int).0"), 10, 0, az());
  EXPECT_EQ(ok.status, SimStatus::Success);
  EXPECT_EQ(ok.steps.size(), 1u);
  ASSERT_TRUE(ok.steps[0].snapshot);
  EXPECT_EQ(ok.steps[0].snapshot->status, TypeStatus::WellTyped);
  auto loop = simulate(P("*(a!(1).0) | *(a?(x:Int).0)"), 5, 0, az(), false);
  EXPECT_EQ(loop.status, SimStatus::StepBudgetExhausted);
  EXPECT_EQ(loop.steps.size(), 5u);
}

TEST(HarnessSimulate, SeedDeterminesTheRun) {
  ProcPtr p = P(corpus_text("multiparty_prime"));
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    auto a = simulate(p, 50, seed, az(), false);
    auto b = simulate(p, 50, seed, az(), false);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
      EXPECT_EQ(canonical_key(a.steps[i].state), canonical_key(b.steps[i].state));
    }
    EXPECT_EQ(a.status, b.status);
  }
}

TEST(HarnessExplore, CountsStates) {
  auto ex = explore(P("a!(1).0 | a?(x:Int).0 | b!(true).0 | b?(y:Bool).0"), U(), 100);
  EXPECT_TRUE(ex.complete);
  EXPECT_EQ(ex.states.size(), 4u);
  auto capped = explore(P("*(a!(1).0) | *(a?(x:Int).b!(x).0)"), U(), 3);
  EXPECT_FALSE(capped.complete);
  EXPECT_EQ(capped.states.size(), 3u);
}

TEST(HarnessExplore, OpenRestrictions) {
  auto [names, body] = open_restrictions(P("new c.(c!(1).0 | new d.(c?(x:Int).d!(x).0 | d?(y:Int).0))"));
  ASSERT_EQ(names.size(), 2u);
  EXPECT_EQ(body->kind, Process::Kind::Par);
  for (const auto& n : names) EXPECT_TRUE(free_names(body).count(n));
}

TEST(HarnessSubjectReduction, IntroductoryAndMultiparty) {
  for (const char* name : {"seller_buyers", "multiparty_prime"}) {
    SrReport r = subject_reduction_check(P(corpus_text(name)), {}, az());
    EXPECT_TRUE(r.precondition_met) << name << ": " << r.precondition_note;
    EXPECT_TRUE(r.explored_all) << name;
    EXPECT_GT(r.steps_checked, 0u) << name;
    EXPECT_TRUE(r.ok()) << name << ": " << (r.violations.empty() ? "" : r.violations[0]);
  }
}

TEST(HarnessSubjectReduction, NonViableEnvironment) {
  ProcPtr p = P(corpus_text("example2_nonviable"));
  SrReport r = subject_reduction_check(p, {}, az());
  EXPECT_FALSE(r.precondition_met);
  EXPECT_EQ(r.steps_checked, 0u);
  SrOptions forced;
  forced.force = true;
  SrReport f = subject_reduction_check(p, forced, az());
  EXPECT_FALSE(f.ok());
}

TEST(HarnessSubjectReduction, RandomMode) {
  SrOptions opt;
  opt.exhaustive = false;
  opt.seed = 3;
  SrReport r = subject_reduction_check(P(corpus_text("seller_buyers")), opt, az());
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.steps_checked, 8u);
}

TEST(HarnessProgress, Oracles) {
  EXPECT_EQ(progress_check(P("a!(1).0 | a?(x:Int).0"), "a", az()).outcome, ProgressOutcome::Holds);
  EXPECT_EQ(progress_check(P("a!(1).0"), "b", az()).outcome, ProgressOutcome::Holds);
  EXPECT_EQ(progress_check(P("a!(1).0"), "a", az()).outcome, ProgressOutcome::PreconditionFailed);
  auto ex3 = progress_check(P(corpus_text("example3_ext")), "a", az());
  EXPECT_EQ(ex3.outcome, ProgressOutcome::PreconditionFailed);
}

TEST(HarnessProgress, ReplayOverCorpus) {
  for (const auto& src : corpus_sources()) {
    ProgressReport r = progress_replay(P(src.text), az(), 100);
    EXPECT_TRUE(r.ok()) << src.name << ": " << (r.violations.empty() ? "" : r.violations[0]);
  }
}

TEST(HarnessCorpus, AllExpectationsHold) {
  CorpusReport rep = run_corpus(az());
  ASSERT_EQ(rep.cases.size(), corpus_sources().size());
  for (const auto& c : rep.cases) {
    for (const auto& e : c.expectations) {
      EXPECT_TRUE(e.ok) << c.name << ": " << e.what << ": expected " << e.expected << ", got " << e.actual;
    }
  }
}

TEST(HarnessLaws, SmallSuite) {
  LawReport rep = law_suite(az(), 50, 1);
  for (const auto& l : rep.laws) EXPECT_TRUE(l.ok) << l.name << ": " << l.claim << " gave " << tag_name(l.verdict.tag);
  EXPECT_TRUE(rep.contradictions.empty()) << rep.contradictions[0];
  EXPECT_GE(rep.consistency_terms, 50u);
}

TEST(HarnessGenerators, RandomTypesAreWeightZeroAndSmall) {
  auto ts = random_weight0_types(300, 8, 5);
  ASSERT_EQ(ts.size(), 300u);
  for (Type t : ts) {
    EXPECT_EQ(weight(t), 0u) << to_string(t);
    EXPECT_TRUE(validate(t).empty()) << to_string(t);
  }
  EXPECT_EQ(random_weight0_types(20, 8, 5), random_weight0_types(20, 8, 5));
  EXPECT_EQ(T("1"), done_type());
}

}  // namespace
}  // namespace sessium
