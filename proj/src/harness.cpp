#include "sessium/harness.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>
#include <set>
#include <unordered_map>

#include "sessium/corpus.hpp"

namespace sessium {

const char* sim_status_name(SimStatus s) {
  switch (s) {
    case SimStatus::Success: return "Success";
    case SimStatus::Stuck: return "Stuck";
    case SimStatus::StepBudgetExhausted: return "StepBudgetExhausted";
  }
  return "Stuck";
}

const char* progress_outcome_name(ProgressOutcome o) {
  switch (o) {
    case ProgressOutcome::Holds: return "Holds";
    case ProgressOutcome::PreconditionFailed: return "PreconditionFailed";
    case ProgressOutcome::Violated: return "Violated";
  }
  return "Holds";
}

// ---------------------------------------------------------------------------
// Simulation

TypeReport snapshot(const ProcPtr& p, Analyzer& az) {
  TypeReport rep;
  try {
    rep.env = infer({}, p, az, &rep);
  } catch (const TypeError& e) {
    rep.status = TypeStatus::Rejected;
    rep.shape_error = true;
    rep.rule = e.rule();
    rep.location = e.location();
    rep.reason = e.what();
    return rep;
  }
  for (const auto& c : rep.checks) {
    if (c.verdict.is_no()) {
      rep.status = TypeStatus::Rejected;
      rep.rule = c.rule;
      rep.reason = c.subject + ": fails " + c.claim;
      break;
    }
    if (!c.verdict.definite()) rep.status = TypeStatus::WellTypedWithWarnings;
  }
  return rep;
}

namespace {

SimStatus final_status(const ProcPtr& p) {
  return normalize(p)->kind == Process::Kind::Idle ? SimStatus::Success : SimStatus::Stuck;
}

}  // namespace

SimulationTrace simulate(const ProcPtr& p, std::size_t steps, std::uint64_t seed, Analyzer& az, bool snapshots) {
  const TypeUniverse& u = az.universe();
  std::mt19937_64 rng(seed);
  SimulationTrace trace;
  trace.initial = p;
  ProcPtr state = p;
  for (std::size_t i = 0; i < steps; ++i) {
    auto succ = tau_steps(state, u);
    if (succ.empty()) {
      trace.status = final_status(state);
      return trace;
    }
    state = normalize(succ[rng() % succ.size()]);
    TraceStep step{ProcLabel{}, state, std::nullopt};
    if (snapshots) step.snapshot = snapshot(state, az);
    trace.steps.push_back(std::move(step));
  }
  trace.status = tau_steps(state, u).empty() ? final_status(state) : SimStatus::StepBudgetExhausted;
  return trace;
}

Exploration explore(const ProcPtr& p, const TypeUniverse& u, std::size_t max_states) {
  Exploration ex;
  std::unordered_map<std::string, std::size_t> index;
  auto add = [&](const ProcPtr& q) -> std::optional<std::size_t> {
    std::string k = canonical_key(q);
    if (auto it = index.find(k); it != index.end()) return it->second;
    if (ex.states.size() >= max_states) {
      ex.complete = false;
      return std::nullopt;
    }
    index.emplace(k, ex.states.size());
    ex.states.push_back(normalize(q));
    ex.edges.emplace_back();
    return ex.states.size() - 1;
  };
  add(p);
  for (std::size_t i = 0; i < ex.states.size(); ++i) {
    for (const auto& q : tau_steps(ex.states[i], u)) {
      if (auto j = add(q)) {
        auto& e = ex.edges[i];
        if (std::find(e.begin(), e.end(), *j) == e.end()) e.push_back(*j);
      }
    }
  }
  return ex;
}

namespace {

ProcPtr lift(const ProcPtr& p, std::vector<std::string>& names) {
  switch (p->kind) {
    case Process::Kind::New:
      names.push_back(p->name);
      return lift(p->left, names);
    case Process::Kind::Par: {
      ProcPtr l = lift(p->left, names);
      return Process::par(l, lift(p->right, names));
    }
    default: return p;
  }
}

}  // namespace

std::pair<std::vector<std::string>, ProcPtr> open_restrictions(const ProcPtr& p) {
  std::vector<std::string> names;
  ProcPtr body = lift(freshen(p), names);
  return {names, body};
}

// ---------------------------------------------------------------------------
// Subject reduction

SrReport subject_reduction_check(const ProcPtr& p, const SrOptions& opt, Analyzer& az) {
  SrReport rep;
  rep.exhaustive = opt.exhaustive;
  TypeReport top = typecheck(p, {}, Mode::Permissive, az);
  auto failed = std::find_if(top.checks.begin(), top.checks.end(),
                             [](const TypeCheck& c) { return c.rule != "viability" && c.verdict.is_no(); });
  if (top.shape_error) {
    rep.precondition_note = "not typable: " + top.reason;
  } else if (failed != top.checks.end()) {
    rep.precondition_note = "not typable: " + failed->subject + " fails " + failed->claim;
  } else {
    Verdict v = env_viable(top.env, az);
    rep.precondition_met = v.is_yes();
    if (!rep.precondition_met) rep.precondition_note = std::string("environment viability is ") + tag_name(v.tag);
    if (!v.note.empty() && !rep.precondition_met) rep.precondition_note += ": " + v.note;
  }
  if (!rep.precondition_met && !opt.force) return rep;

  // Restricted channels are compared by name with their binders opened.
  struct Snap {
    TypeReport report;
    SessionEnv opened;
  };
  std::unordered_map<std::string, std::optional<Snap>> snaps;
  std::set<std::string> seen_violations;
  auto snap_of = [&](const ProcPtr& q) -> const std::optional<Snap>& {
    std::string k = canonical_key(q);
    auto it = snaps.find(k);
    if (it == snaps.end()) {
      std::optional<Snap> r;
      try {
        Snap s;
        s.report.env = infer({}, q, az, &s.report);
        s.opened = infer({}, open_restrictions(q).second, az);
        r = std::move(s);
      } catch (const TypeError&) {
      }
      it = snaps.emplace(k, std::move(r)).first;
    }
    return it->second;
  };
  auto violation = [&](std::string msg) {
    if (seen_violations.insert(msg).second) rep.violations.push_back(std::move(msg));
  };
  auto check_step = [&](const ProcPtr& from, const ProcPtr& to) {
    ++rep.steps_checked;
    const auto& before_snap = snap_of(from);
    const auto& after_snap = snap_of(to);
    std::string edge = to_string(from) + " -tau-> " + to_string(to);
    if (!before_snap) return;
    if (!after_snap) {
      violation("residual is not typable after " + edge);
      return;
    }
    const Snap& before = *before_snap;
    const Snap& after = *after_snap;
    for (const auto& c : after.report.checks) {
      if (c.rule != "t-res") continue;
      if (c.verdict.is_no()) violation("restricted " + c.subject + ": " + c.claim + " fails after " + edge);
      if (!c.verdict.definite()) ++rep.unknown_checks;
    }
    for (const auto& [name, t] : before.opened) {
      auto it = after.opened.find(name);
      Type t2 = it == after.opened.end() ? done_type() : it->second;
      if (t2 == t) continue;
      ++rep.relation_checks;
      Verdict v = az.strong_subsession(t, t2);
      if (v.is_no()) {
        violation(name + ": " + to_string(t) + " ⊑ " + to_string(t2) + " refuted by " + to_string(v.witness) + " after " +
                  edge);
      }
      if (!v.definite()) ++rep.unknown_checks;
    }
  };

  if (opt.exhaustive) {
    Exploration ex = explore(p, az.universe(), opt.max_states);
    rep.states = ex.states.size();
    rep.explored_all = ex.complete;
    for (std::size_t i = 0; i < ex.states.size(); ++i) {
      for (std::size_t j : ex.edges[i]) check_step(ex.states[i], ex.states[j]);
    }
  } else {
    SimulationTrace tr = simulate(p, opt.steps, opt.seed, az, false);
    ProcPtr prev = normalize(p);
    rep.states = tr.steps.size() + 1;
    for (const auto& s : tr.steps) {
      check_step(prev, s.state);
      prev = s.state;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Progress

namespace {

ProgressResult progress_on(const ProcPtr& body, const SessionEnv* env, const std::string& type_error,
                           const std::string& c, Analyzer& az) {
  if (!free_names(body).count(c)) return {ProgressOutcome::Holds, c + " is not free"};
  std::vector<std::string> failed;
  if (!env) {
    failed.push_back("not typable (" + type_error + ")");
  } else {
    auto it = env->find(c);
    Type t = it == env->end() ? done_type() : it->second;
    try {
      if (!az.is_complete(t)) failed.push_back(c + " : " + to_string(t) + " is not complete");
    } catch (const std::exception& e) {
      failed.push_back(std::string("completeness of ") + c + " undecided: " + e.what());
    }
  }
  if (!ready(body, c)) failed.push_back("not ready on " + c);
  if (!failed.empty()) {
    std::string note;
    for (const auto& f : failed) note += (note.empty() ? "" : "; ") + f;
    return {ProgressOutcome::PreconditionFailed, note};
  }
  if (!tau_steps(body, az.universe()).empty()) return {ProgressOutcome::Holds, "a tau-step exists"};
  return {ProgressOutcome::Violated, "no tau-step although " + c + " is complete and ready in " + to_string(body)};
}

}  // namespace

ProgressResult progress_check(const ProcPtr& p, const std::string& c, Analyzer& az) {
  auto [names, body] = open_restrictions(p);
  try {
    SessionEnv env = infer({}, body, az);
    return progress_on(body, &env, "", c, az);
  } catch (const TypeError& e) {
    return progress_on(body, nullptr, e.what(), c, az);
  }
}

ProgressReport progress_replay(const ProcPtr& p, Analyzer& az, std::size_t max_states) {
  ProgressReport rep;
  Exploration ex = explore(p, az.universe(), max_states);
  rep.states = ex.states.size();
  rep.explored_all = ex.complete;
  std::set<std::string> notes;
  for (const auto& state : ex.states) {
    auto [names, body] = open_restrictions(state);
    std::optional<SessionEnv> env;
    std::string error;
    try {
      env = infer({}, body, az);
    } catch (const TypeError& e) {
      error = e.what();
    }
    for (const auto& c : free_names(body)) {
      ProgressResult r = progress_on(body, env ? &*env : nullptr, error, c, az);
      switch (r.outcome) {
        case ProgressOutcome::Holds: ++rep.checked; break;
        case ProgressOutcome::PreconditionFailed:
          ++rep.precondition_failed;
          if (notes.insert(r.note).second) rep.precondition_notes.push_back(r.note);
          break;
        case ProgressOutcome::Violated: rep.violations.push_back(r.note); break;
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Corpus

bool CaseResult::ok() const {
  return std::all_of(expectations.begin(), expectations.end(), [](const Expectation& e) { return e.ok; });
}

bool CorpusReport::ok() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.ok(); });
}

namespace {

class CaseBuilder {
 public:
  CaseBuilder(std::string name, std::string locus) { result_.name = std::move(name), result_.locus = std::move(locus); }

  void expect(std::string what, const std::string& expected, const std::string& actual) {
    result_.expectations.push_back({std::move(what), expected, actual, expected == actual});
  }
  void expect_true(std::string what, bool holds, const std::string& detail = {}) {
    result_.expectations.push_back({std::move(what), "true", holds ? "true" : "false" + (detail.empty() ? "" : " (" + detail + ")"), holds});
  }
  CaseResult take() { return std::move(result_); }

 private:
  CaseResult result_;
};

Type restricted_type(const TypeReport& r, const std::string& name) {
  for (const auto& [n, t] : r.restricted) {
    if (n == name) return t;
  }
  return done_type();
}

Type env_type(const TypeReport& r, const std::string& name) {
  auto it = r.env.find(name);
  return it == r.env.end() ? done_type() : it->second;
}

void expect_equivalent(CaseBuilder& b, Analyzer& az, const std::string& what, Type actual, const char* expected) {
  Type want = parse_type(expected, az.universe());
  Verdict v = az.equivalent(actual, want, Strength::Strong);
  b.expect(what + " ≃ " + to_string(want) + " (not No)", "not No", v.is_no() ? "No" : "not No");
}

CaseResult case_seller_buyers(Analyzer& az) {
  CaseBuilder b("seller_buyers", "introductory seller and two buyers");
  ProcPtr p = parse_process(corpus_text("seller_buyers"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Strict, az);
  b.expect("typecheck (strict)", "WellTyped", status_name(rep.status));
  const std::string eta = "?String.!Int.?Address.!Date.1";
  const std::string theta = "?Int.?[!Address.?Date.1].1";
  const std::string rho = "!Address.?Date.1";
  expect_equivalent(b, az, "a", env_type(rep, "a"), ("?[" + eta + "].1 | ![" + eta + "].1").c_str());
  expect_equivalent(b, az, "b", env_type(rep, "b"), ("![" + theta + "].1 | ?[" + theta + "].1").c_str());
  expect_equivalent(b, az, "c", restricted_type(rep, "c"), (eta + " | !String.?Int." + rho).c_str());
  expect_equivalent(b, az, "d", restricted_type(rep, "d"), (theta + " | !Int.![" + rho + "].1").c_str());
  SimulationTrace tr = simulate(p, 20, 0, az, false);
  b.expect("simulation with 20 steps", "Success", sim_status_name(tr.status));
  b.expect("communications in the run", "8", std::to_string(tr.steps.size()));
  SrReport sr = subject_reduction_check(p, {}, az);
  b.expect("subject reduction violations", "0", std::to_string(sr.violations.size()));
  ProgressReport pr = progress_replay(p, az);
  b.expect("progress violations", "0", std::to_string(pr.violations.size()));
  return b.take();
}

CaseResult case_example1(Analyzer& az) {
  CaseBuilder b("example1_server", "persistent service provider");
  ProcPtr p = parse_process(corpus_text("example1_server"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Permissive, az);
  b.expect("typecheck (permissive)", "WellTypedWithWarnings", status_name(rep.status));
  std::size_t unknown = 0;
  std::size_t yes = 0;
  std::string unknown_claim;
  for (const auto& c : rep.checks) {
    if (c.verdict.is_yes()) ++yes;
    if (!c.verdict.definite()) {
      ++unknown;
      unknown_claim = c.claim;
    }
  }
  b.expect("Unknown checks", "1", std::to_string(unknown));
  b.expect("other checks Yes", std::to_string(rep.checks.size() - unknown), std::to_string(yes));
  Type s = parse_type("rec X.(1 (+) ?[!Int.1].X)", az.universe());
  b.expect("the Unknown check", to_string(s) + " ⊑ " + to_string(mk_par(s, s)), unknown_claim);
  b.expect("typecheck (strict)", "Rejected", status_name(typecheck(p, {}, Mode::Strict, az).status));
  SimulationTrace tr = simulate(p, 3, 0, az, false);
  b.expect("simulation with 3 steps", "StepBudgetExhausted", sim_status_name(tr.status));
  return b.take();
}

CaseResult case_multiparty(Analyzer& az) {
  CaseBuilder b("multiparty_prime", "two primality servers and a client");
  ProcPtr p = parse_process(corpus_text("multiparty_prime"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Strict, az);
  b.expect("typecheck (strict)", "WellTyped", status_name(rep.status));
  const std::string eta = "?Int.(!Bool.1 + ?'abort'.1)";
  expect_equivalent(b, az, "a", restricted_type(rep, "a"),
                    ("![" + eta + "].1 | ![" + eta + "].1 | ?[" + eta + "].1 | ?[" + eta + "].1").c_str());
  expect_equivalent(b, az, "c", restricted_type(rep, "c"),
                    (eta + " | !Int.1 | " + eta + " | !Int.1 | ?Bool.!'abort'.1").c_str());
  SrReport sr = subject_reduction_check(p, {}, az);
  b.expect("subject reduction violations", "0", std::to_string(sr.violations.size()));
  ProgressReport pr = progress_replay(p, az);
  b.expect("progress violations", "0", std::to_string(pr.violations.size()));
  b.expect_true("progress checked somewhere", pr.checked > 0);
  return b.take();
}

CaseResult case_example2(Analyzer& az) {
  CaseBuilder b("example2_nonviable", "non-viable environment");
  ProcPtr p = parse_process(corpus_text("example2_nonviable"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Strict, az);
  b.expect("environment viability", "No", tag_name(env_viable(rep.env, az).tag));
  b.expect("typecheck (strict)", "Rejected", status_name(rep.status));
  b.expect("failing rule", "viability", rep.rule);
  SrReport sr = subject_reduction_check(p, {}, az);
  b.expect_true("subject reduction precondition fails", !sr.precondition_met, sr.precondition_note);
  SrOptions forced;
  forced.force = true;
  SrReport f = subject_reduction_check(p, forced, az);
  bool completeness = std::any_of(f.violations.begin(), f.violations.end(),
                                  [](const std::string& v) { return v.rfind("restricted ", 0) == 0; });
  b.expect_true("forced run finds a completeness failure after one step", completeness && f.steps_checked >= 1);
  return b.take();
}

CaseResult case_example3(Analyzer& az) {
  CaseBuilder b("example3_ext", "external choice on two subjects");
  ProcPtr p = parse_process(corpus_text("example3_ext"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Strict, az);
  b.expect("typecheck (strict)", "Rejected", status_name(rep.status));
  b.expect("failing rule", "t-ext", rep.rule);
  ProgressResult r = progress_check(p, "a", az);
  b.expect("progress on a", "PreconditionFailed", progress_outcome_name(r.outcome));
  b.expect_true("readiness on a fails", r.note.find("not ready on a") != std::string::npos, r.note);
  ProgressReport pr = progress_replay(p, az);
  b.expect("progress violations", "0", std::to_string(pr.violations.size()));
  return b.take();
}

CaseResult case_example4(Analyzer& az) {
  CaseBuilder b("example4_inputs", "two delegations of one channel");
  const TypeUniverse& u = az.universe();
  ProcPtr p = parse_process(corpus_text("example4_inputs"), u);
  SessionEnv left = infer({}, p->left, az);
  auto it = left.find("c");
  b.expect("c in the sender", to_string(parse_type("!Int.1 | !Bool.1 | ?Int.?Bool.1", u)),
           it == left.end() ? "1" : to_string(it->second));
  Exploration ex = explore(p, u, 1000);
  std::vector<std::size_t> depth(ex.states.size(), 0);
  std::size_t stuck = 0;
  bool all_two = true;
  std::deque<std::size_t> queue{0};
  std::vector<bool> seen(ex.states.size(), false);
  seen[0] = true;
  ProcPtr stuck_state;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    if (ex.edges[i].empty()) {
      ++stuck;
      all_two = all_two && depth[i] == 2;
      stuck_state = ex.states[i];
    }
    for (std::size_t j : ex.edges[i]) {
      if (!seen[j]) {
        seen[j] = true;
        depth[j] = depth[i] + 1;
        queue.push_back(j);
      }
    }
  }
  b.expect_true("every maximal run stops after exactly 2 tau-steps", stuck > 0 && all_two);
  SimulationTrace tr = simulate(p, 10, 0, az, false);
  b.expect("simulation", "Stuck", sim_status_name(tr.status));
  b.expect("tau-steps before getting stuck", "2", std::to_string(tr.steps.size()));
  if (stuck_state) {
    SessionEnv env = infer({}, stuck_state, az);
    Type c = env.count("c") ? env.at("c") : done_type();
    b.expect("c in the stuck state", to_string(parse_type("?Int.?Bool.1 | !Bool.!Int.1", u)), to_string(c));
    b.expect_true("c is not complete in the stuck state", !az.is_complete(c));
  }
  return b.take();
}

CaseResult case_deadlock(Analyzer& az) {
  CaseBuilder b("deadlock", "well typed but deadlocked");
  ProcPtr p = parse_process(corpus_text("deadlock"), az.universe());
  TypeReport rep = typecheck(p, {}, Mode::Strict, az);
  b.expect("typecheck (strict)", "WellTyped", status_name(rep.status));
  SimulationTrace tr = simulate(p, 10, 0, az, false);
  b.expect("simulation", "Stuck", sim_status_name(tr.status));
  b.expect("tau-steps", "0", std::to_string(tr.steps.size()));
  ProgressReport pr = progress_replay(p, az);
  b.expect("progress violations", "0", std::to_string(pr.violations.size()));
  return b.take();
}

}  // namespace

CorpusReport run_corpus(Analyzer& az) {
  CorpusReport rep;
  rep.cases = {case_deadlock(az),  case_example1(az),   case_example2(az),     case_example3(az),
               case_example4(az),  case_multiparty(az), case_seller_buyers(az)};
  std::sort(rep.cases.begin(), rep.cases.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return rep;
}

// ---------------------------------------------------------------------------
// Laws

bool LawReport::ok() const {
  return contradictions.empty() && std::all_of(laws.begin(), laws.end(), [](const LawResult& l) { return l.ok; });
}

std::vector<Type> random_weight0_types(std::size_t count, std::size_t max_size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const BasicType bts[] = {BasicType::named("Int"), BasicType::named("Bool"), BasicType::named("Real")};
  auto action = [&] {
    const BasicType& bt = bts[rng() % 3];
    return rng() % 2 ? in_val(bt) : out_val(bt);
  };
  std::function<Type(std::size_t)> gen = [&](std::size_t budget) -> Type {
    if (budget <= 1) return rng() % 3 ? done_type() : fail_type();
    switch (rng() % 10) {
      case 0:
      case 1: return rng() % 3 ? done_type() : fail_type();
      case 2:
      case 3:
      case 4: return mk_prefix(action(), gen(budget - 1));
      case 5:
        if (budget >= 5) return mk_rec(mk_prefix(action(), mk_int(mk_var(0), gen(budget - 4))));
        return mk_prefix(action(), gen(budget - 1));
      default: {
        std::size_t left = 1 + rng() % (budget - 1);
        Type l = gen(left);
        Type r = gen(std::max<std::size_t>(1, budget - 1 - left));
        switch (rng() % 3) {
          case 0: return mk_ext(l, r);
          case 1: return mk_int(l, r);
          default: return mk_par(l, r);
        }
      }
    }
  };
  std::vector<Type> out;
  while (out.size() < count) out.push_back(gen(1 + rng() % max_size));
  return out;
}

std::vector<Type> corpus_types(Analyzer& az) {
  std::vector<Type> out;
  auto add = [&](Type t) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  };
  for (const auto& src : corpus_sources()) {
    ProcPtr p = parse_process(src.text, az.universe());
    TypeReport rep;
    try {
      rep.env = infer({}, p, az, &rep);
    } catch (const TypeError&) {
      continue;
    }
    for (const auto& [n, t] : rep.env) add(t);
    for (const auto& [n, t] : rep.restricted) add(t);
  }
  return out;
}

LawReport law_suite(Analyzer& az, std::size_t random_terms, std::uint64_t seed, Bound consistency_bound) {
  const TypeUniverse& u = az.universe();
  auto T = [&](const char* s) { return parse_type(s, u); };
  LawReport rep;
  auto law = [&](std::string name, std::string claim, std::string expected, Verdict v) {
    bool ok = expected == "not No" ? !v.is_no() : tag_name(v.tag) == expected;
    rep.laws.push_back({std::move(name), std::move(claim), std::move(expected), std::move(v), ok});
  };
  auto complete = [&](std::string name, const char* s, bool expected) {
    bool c = az.is_complete(T(s));
    law(std::move(name), std::string(s) + " is complete", expected ? "Yes" : "No",
        c ? Verdict::yes({"exact"}) : Verdict::no(nullptr, nullptr, "exact"));
  };

  law("L1", "?Int.1 (+) !Bool.1 ⊑ ?Int.1", "Yes", az.strong_subsession(T("?Int.1 (+) !Bool.1"), T("?Int.1")));
  law("L6", "!Real.1 ⪯ !Int.1", "Yes", az.subsession(T("!Real.1"), T("!Int.1")));
  {
    Verdict v = az.subsession(T("?Int.1"), T("?Int.1 + ?Bool.1"));
    bool witness = v.is_no() && v.witness == T("!Int.1 + !Bool.0");
    law("interference", "?Int.1 ⪯ ?Int.1 + ?Bool.1", "No", v);
    rep.laws.back().ok = rep.laws.back().ok && witness;
  }
  law("+ precongruence", "0 ⪯ !Int.0", "Yes", az.subsession(T("0"), T("!Int.0")));
  law("+ precongruence", "0 ⊑ !Int.0", "No", az.strong_subsession(T("0"), T("!Int.0")));
  law("L3", "?Int.!Bool.1 + ?Int.!String.1 ≃ ?Int.(!Bool.1 (+) !String.1)", "Yes",
      az.equivalent(T("?Int.!Bool.1 + ?Int.!String.1"), T("?Int.(!Bool.1 (+) !String.1)"), Strength::Strong));
  law("expansion", "!Int.1 | !Bool.1 ≈ !Int.!Bool.1 + !Bool.!Int.1", "not No",
      az.equivalent(T("!Int.1 | !Bool.1"), T("!Int.!Bool.1 + !Bool.!Int.1"), Strength::Weak));
  complete("mutual completion", "(1 + ?Int.1) | (1 (+) !Int.1)", true);
  complete("maximal reduction", "?Int.1 | !Real.1", false);
  complete("fairness", "rec X.?Int.X | rec Y.!Int.Y", false);
  complete("unit", "1", true);

  std::vector<Type> terms = corpus_types(az);
  for (Type t : terms) {
    law("0 neutral for +", "0 + " + to_string(t) + " ≃ " + to_string(t), "Yes",
        az.equivalent(mk_ext(fail_type(), t), t, Strength::Strong));
  }

  Analyzer cons(u, consistency_bound);
  rep.consistency_bound = consistency_bound;
  auto randoms = random_weight0_types(random_terms, 8, seed);
  terms.insert(terms.end(), randoms.begin(), randoms.end());
  rep.consistency_terms = terms.size();
  auto tally = [&](const ConsistencyReport& r, std::size_t clauses) {
    rep.contradictions.insert(rep.contradictions.end(), r.contradictions.begin(), r.contradictions.end());
    rep.indefinite_checks += r.notes.size();
    rep.definite_checks += clauses - std::min(clauses, r.notes.size());
  };
  for (Type t : terms) tally(cons.check_prop5(t), 2);
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    tally(cons.check_thm6(terms[i], terms[i + 1]), 1);
    tally(cons.check_thm6(mk_int(terms[i], terms[i + 1]), terms[i]), 1);
    rep.consistency_pairs += 2;
  }
  return rep;
}

}  // namespace sessium
