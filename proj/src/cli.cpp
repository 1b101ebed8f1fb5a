#include "sessium/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sessium/parse_error.hpp"

namespace sessium {

using nlohmann::json;

namespace {

json type_or_null(Type t) { return t ? json(to_string(t)) : json(nullptr); }

Tag tag_from_name(const std::string& s) {
  if (s == "Yes") return Tag::Yes;
  if (s == "No") return Tag::No;
  return Tag::Unknown;
}

}  // namespace

// ---------------------------------------------------------------------------
// Serialization

json to_json(const Verdict& v) {
  return {{"tag", tag_name(v.tag)},
          {"derivation", v.derivation},
          {"witness", type_or_null(v.witness)},
          {"context", type_or_null(v.context)},
          {"note", v.note}};
}

Verdict verdict_from_json(const json& j, const TypeUniverse& u) {
  Verdict v;
  v.tag = tag_from_name(j.at("tag").get<std::string>());
  v.derivation = j.at("derivation").get<std::vector<std::string>>();
  if (!j.at("witness").is_null()) v.witness = parse_type(j.at("witness").get<std::string>(), u);
  if (!j.at("context").is_null()) v.context = parse_type(j.at("context").get<std::string>(), u);
  v.note = j.at("note").get<std::string>();
  return v;
}

json to_json(const TypeReport& r) {
  json env = json::object();
  for (const auto& [k, t] : r.env) env[k] = to_string(t);
  json restricted = json::array();
  for (const auto& [k, t] : r.restricted) restricted.push_back({{"name", k}, {"type", to_string(t)}});
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"rule", c.rule},
                      {"subject", c.subject},
                      {"location", c.location},
                      {"claim", c.claim},
                      {"verdict", to_json(c.verdict)},
                      {"undecided", c.undecided}});
  }
  return {{"status", status_name(r.status)},
          {"rule", r.rule},
          {"location", r.location},
          {"reason", r.reason},
          {"shape_error", r.shape_error},
          {"env", env},
          {"restricted", restricted},
          {"checks", checks},
          {"derivation", r.derivation}};
}

json to_json(const TypeStateGraph& g, TypeLts& lts) {
  json nodes = json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    json visible = json::array();
    for (const auto& [label, target] : lts.step_visible(g.nodes[i])) {
      visible.push_back({{"label", label.str(lts.universe())}, {"target", to_string(target)}});
    }
    nodes.push_back({{"id", i},
                     {"type", to_string(g.nodes[i])},
                     {"success", static_cast<bool>(g.success_enabled[i])},
                     {"internal", g.edges[i]},
                     {"visible", visible}});
  }
  return {{"root", to_string(g.root)}, {"node_count", g.nodes.size()}, {"edge_count", g.edge_count()}, {"nodes", nodes}};
}

json to_json(const SimulationTrace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) {
    json step = {{"state", to_string(s.state)}};
    if (s.snapshot) {
      step["typing"] = {{"status", status_name(s.snapshot->status)}, {"reason", s.snapshot->reason}};
    }
    steps.push_back(step);
  }
  return {{"initial", to_string(t.initial)}, {"status", sim_status_name(t.status)}, {"step_count", t.steps.size()},
          {"steps", steps}};
}

json to_json(const SrReport& r) {
  return {{"precondition_met", r.precondition_met},
          {"precondition_note", r.precondition_note},
          {"exhaustive", r.exhaustive},
          {"explored_all", r.explored_all},
          {"states", r.states},
          {"steps_checked", r.steps_checked},
          {"relation_checks", r.relation_checks},
          {"unknown_checks", r.unknown_checks},
          {"violations", r.violations}};
}

json to_json(const ProgressReport& r) {
  return {{"states", r.states},
          {"checked", r.checked},
          {"precondition_failed", r.precondition_failed},
          {"explored_all", r.explored_all},
          {"precondition_notes", r.precondition_notes},
          {"violations", r.violations}};
}

json to_json(const CorpusReport& r) {
  json cases = json::array();
  for (const auto& c : r.cases) {
    json exps = json::array();
    for (const auto& e : c.expectations) {
      exps.push_back({{"what", e.what}, {"expected", e.expected}, {"actual", e.actual}, {"ok", e.ok}});
    }
    cases.push_back({{"name", c.name}, {"locus", c.locus}, {"ok", c.ok()}, {"expectations", exps}});
  }
  return {{"ok", r.ok()}, {"cases", cases}};
}

json to_json(const LawReport& r) {
  json laws = json::array();
  for (const auto& l : r.laws) {
    laws.push_back(
        {{"name", l.name}, {"claim", l.claim}, {"expected", l.expected}, {"verdict", to_json(l.verdict)}, {"ok", l.ok}});
  }
  return {{"ok", r.ok()},
          {"laws", laws},
          {"consistency",
           {{"terms", r.consistency_terms},
            {"pairs", r.consistency_pairs},
            {"definite_checks", r.definite_checks},
            {"indefinite_checks", r.indefinite_checks},
            {"bound", {{"depth", r.consistency_bound.depth}, {"width", r.consistency_bound.width}, {"budget", r.consistency_bound.budget}}},
            {"contradictions", r.contradictions}}}};
}

// ---------------------------------------------------------------------------
// Commands

namespace {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  std::string verdict;
  json evidence;
  int exit = kExitOk;
  std::vector<std::string> text;
};

struct Context {
  CliConfig cfg;
  const TypeUniverse* u = nullptr;
  Analyzer* az = nullptr;
};

std::string read_input(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream in(arg);
  if (!in) throw UsageError("cannot read " + arg);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Type read_type(const Context& cx, const std::string& arg) {
  Type t = parse_type(read_input(arg), *cx.u);
  auto vs = validate(t);
  if (!vs.empty()) throw UsageError("ill-formed type " + to_string(t) + ": " + vs.front().message);
  return t;
}

ProcPtr read_process(const Context& cx, const std::string& arg) { return parse_process(read_input(arg), *cx.u); }

int verdict_exit(const Verdict& v, const CliConfig& cfg) {
  if (v.is_yes()) return kExitOk;
  if (v.is_no()) return kExitNegative;
  return cfg.mode == Mode::Strict ? kExitUndecided : kExitOk;
}

void verdict_text(Outcome& o, const Verdict& v) {
  o.text.push_back(std::string("verdict: ") + tag_name(v.tag));
  for (const auto& d : v.derivation) o.text.push_back("  by " + d);
  if (v.witness) o.text.push_back("  witness: " + to_string(v.witness));
  if (v.context) o.text.push_back("  context: " + to_string(v.context));
  if (!v.note.empty()) o.text.push_back("  note: " + v.note);
}

Outcome verdict_outcome(const Verdict& v, const CliConfig& cfg) {
  Outcome o{tag_name(v.tag), to_json(v), verdict_exit(v, cfg), {}};
  verdict_text(o, v);
  return o;
}

void need(const std::vector<std::string>& in, std::size_t n, const char* what) {
  if (in.size() != n) throw UsageError(std::string("expected ") + what);
}

Outcome cmd_validate(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one type");
  Type t = parse_type(read_input(in[0]), *cx.u);
  auto vs = validate(t);
  json violations = json::array();
  Outcome o;
  for (const auto& v : vs) {
    violations.push_back({{"kind", violation_name(v.kind)}, {"message", v.message}});
    o.text.push_back(std::string("  ") + violation_name(v.kind) + ": " + v.message);
  }
  o.verdict = vs.empty() ? "valid" : "invalid";
  o.exit = vs.empty() ? kExitOk : kExitNegative;
  o.evidence = {{"type", to_string(t)}, {"violations", violations}};
  if (vs.empty()) o.evidence["weight"] = weight(t);
  o.text.insert(o.text.begin(), to_string(t) + ": " + o.verdict);
  return o;
}

Outcome cmd_lts(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one type");
  Type t = read_type(cx, in[0]);
  TypeLts& lts = cx.az->lts();
  TypeStateGraph g = lts.build_graph(t);
  Outcome o{"ok", to_json(g, lts), kExitOk, {}};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    o.text.push_back("n" + std::to_string(i) + (g.success_enabled[i] ? " [ok] " : " ") + to_string(g.nodes[i]));
    for (std::size_t j : g.edges[i]) o.text.push_back("  n" + std::to_string(i) + " -> n" + std::to_string(j));
    for (const auto& [label, target] : lts.step_visible(g.nodes[i])) {
      o.text.push_back("  n" + std::to_string(i) + " -" + label.str(*cx.u) + "-> " + to_string(target));
    }
  }
  return o;
}

Outcome cmd_complete(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one type");
  Type t = read_type(cx, in[0]);
  bool c = cx.az->is_complete(t);
  TypeStateGraph g = cx.az->lts().build_graph(t, true);
  Outcome o{c ? "true" : "false", {{"type", to_string(t)}, {"closed_states", g.nodes.size()}}, c ? kExitOk : kExitNegative, {}};
  o.text.push_back(to_string(t) + (c ? " is complete" : " is not complete"));
  return o;
}

Outcome cmd_viable(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one type");
  return verdict_outcome(cx.az->is_viable(read_type(cx, in[0])), cx.cfg);
}

Outcome cmd_sub(Context& cx, const std::vector<std::string>& in) {
  need(in, 2, "two types");
  Type l = read_type(cx, in[0]);
  Type r = read_type(cx, in[1]);
  Outcome o = verdict_outcome(cx.cfg.strong ? cx.az->strong_subsession(l, r) : cx.az->subsession(l, r), cx.cfg);
  o.text.insert(o.text.begin(), to_string(l) + (cx.cfg.strong ? " ⊑ " : " ⪯ ") + to_string(r));
  return o;
}

Outcome cmd_equiv(Context& cx, const std::vector<std::string>& in) {
  need(in, 2, "two types");
  Type l = read_type(cx, in[0]);
  Type r = read_type(cx, in[1]);
  Outcome o = verdict_outcome(cx.az->equivalent(l, r, cx.cfg.strong ? Strength::Strong : Strength::Weak), cx.cfg);
  o.text.insert(o.text.begin(), to_string(l) + (cx.cfg.strong ? " ≃ " : " ≈ ") + to_string(r));
  return o;
}

Outcome cmd_typecheck(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one process");
  TypeReport r = typecheck(read_process(cx, in[0]), {}, cx.cfg.mode, *cx.az);
  Outcome o{status_name(r.status), to_json(r), kExitOk, {}};
  if (r.status == TypeStatus::Rejected) {
    bool refuted = r.shape_error ||
                   std::any_of(r.checks.begin(), r.checks.end(), [](const TypeCheck& c) { return c.verdict.is_no(); });
    o.exit = refuted ? kExitNegative : kExitUndecided;
  }
  o.text.push_back(std::string("status: ") + status_name(r.status));
  if (!r.rule.empty()) o.text.push_back("rule: " + r.rule + (r.location.empty() ? "" : " at " + r.location));
  if (!r.reason.empty()) o.text.push_back("reason: " + r.reason);
  for (const auto& [k, t] : r.env) o.text.push_back("  " + k + " : " + to_string(t));
  for (const auto& [k, t] : r.restricted) o.text.push_back("  (new " + k + ") : " + to_string(t));
  for (const auto& c : r.checks) {
    o.text.push_back("  [" + c.rule + "] " + c.subject + ": " + c.claim + " -> " + tag_name(c.verdict.tag));
  }
  return o;
}

Outcome cmd_simulate(Context& cx, const std::vector<std::string>& in) {
  need(in, 1, "one process");
  ProcPtr p = read_process(cx, in[0]);
  Outcome o;
  if (cx.cfg.exhaustive) {
    Exploration ex = explore(p, *cx.u, cx.cfg.steps);
    json stuck = json::array();
    std::size_t finished = 0;
    for (std::size_t i = 0; i < ex.states.size(); ++i) {
      if (!ex.edges[i].empty()) continue;
      if (ex.states[i]->kind == Process::Kind::Idle) {
        ++finished;
      } else {
        stuck.push_back(to_string(ex.states[i]));
      }
    }
    o.verdict = stuck.empty() ? "no-stuck-state" : "stuck-states";
    o.evidence = {{"states", ex.states.size()}, {"explored_all", ex.complete}, {"terminated", finished}, {"stuck", stuck}};
    o.text.push_back("states: " + std::to_string(ex.states.size()) + (ex.complete ? "" : " (cap reached)"));
    o.text.push_back("terminated: " + std::to_string(finished));
    for (const auto& s : stuck) o.text.push_back("stuck: " + s.get<std::string>());
    return o;
  }
  SimulationTrace t = simulate(p, cx.cfg.steps, cx.cfg.seed, *cx.az, true);
  o.verdict = sim_status_name(t.status);
  o.evidence = to_json(t);
  o.text.push_back(to_string(t.initial));
  for (const auto& s : t.steps) {
    o.text.push_back("  -tau-> " + to_string(s.state) +
                     (s.snapshot ? std::string("  [") + status_name(s.snapshot->status) + "]" : ""));
  }
  o.text.push_back(std::string("status: ") + sim_status_name(t.status));
  return o;
}

Outcome cmd_check_sr(Context& cx, const std::vector<std::string>& in, bool force) {
  need(in, 1, "one process");
  SrOptions opt;
  opt.exhaustive = cx.cfg.exhaustive;
  opt.steps = cx.cfg.steps;
  opt.seed = cx.cfg.seed;
  opt.force = force;
  SrReport r = subject_reduction_check(read_process(cx, in[0]), opt, *cx.az);
  Outcome o;
  bool ran = r.precondition_met || force;
  o.verdict = !ran ? "precondition-failed" : r.ok() ? "no-violation" : "violation";
  o.exit = r.ok() ? kExitOk : kExitNegative;
  o.evidence = to_json(r);
  o.text.push_back("subject reduction: " + o.verdict);
  if (!r.precondition_note.empty()) o.text.push_back("precondition: " + r.precondition_note);
  o.text.push_back("states: " + std::to_string(r.states) + ", steps checked: " + std::to_string(r.steps_checked) +
                   ", relation checks: " + std::to_string(r.relation_checks) + " (" + std::to_string(r.unknown_checks) +
                   " unknown)");
  for (const auto& v : r.violations) o.text.push_back("violation: " + v);
  return o;
}

Outcome cmd_check_progress(Context& cx, const std::vector<std::string>& in) {
  if (in.empty() || in.size() > 2) throw UsageError("expected a process and an optional channel");
  ProcPtr p = read_process(cx, in[0]);
  Outcome o;
  if (in.size() == 2) {
    ProgressResult r = progress_check(p, in[1], *cx.az);
    o.verdict = progress_outcome_name(r.outcome);
    o.exit = r.outcome == ProgressOutcome::Violated ? kExitNegative : kExitOk;
    o.evidence = {{"channel", in[1]}, {"note", r.note}};
    o.text.push_back("progress on " + in[1] + ": " + o.verdict + " (" + r.note + ")");
    return o;
  }
  ProgressReport r = progress_replay(p, *cx.az, cx.cfg.steps);
  o.verdict = r.ok() ? "no-violation" : "violation";
  o.exit = r.ok() ? kExitOk : kExitNegative;
  o.evidence = to_json(r);
  o.text.push_back("progress: " + o.verdict + " over " + std::to_string(r.states) + " states" +
                   (r.explored_all ? "" : " (cap reached)"));
  o.text.push_back("checked: " + std::to_string(r.checked) + ", precondition failed: " +
                   std::to_string(r.precondition_failed));
  for (const auto& n : r.precondition_notes) o.text.push_back("  precondition: " + n);
  for (const auto& v : r.violations) o.text.push_back("violation: " + v);
  return o;
}

Outcome cmd_corpus(Context& cx, const std::vector<std::string>& in) {
  need(in, 0, "no arguments");
  CorpusReport r = run_corpus(*cx.az);
  Outcome o{r.ok() ? "match" : "mismatch", to_json(r), r.ok() ? kExitOk : kExitNegative, {}};
  for (const auto& c : r.cases) {
    o.text.push_back((c.ok() ? "ok   " : "FAIL ") + c.name + " (" + c.locus + ")");
    for (const auto& e : c.expectations) {
      if (!e.ok) o.text.push_back("     " + e.what + ": expected " + e.expected + ", got " + e.actual);
    }
  }
  return o;
}

Outcome cmd_laws(Context& cx, const std::vector<std::string>& in) {
  need(in, 0, "no arguments");
  LawReport r = law_suite(*cx.az, cx.cfg.terms, cx.cfg.seed);
  Outcome o{r.ok() ? "hold" : "fail", to_json(r), r.ok() ? kExitOk : kExitNegative, {}};
  for (const auto& l : r.laws) {
    o.text.push_back(std::string(l.ok ? "ok   " : "FAIL ") + l.name + ": " + l.claim + " -> " + tag_name(l.verdict.tag) +
                     " (expected " + l.expected + ")");
  }
  o.text.push_back("consistency: " + std::to_string(r.consistency_terms) + " terms, " +
                   std::to_string(r.consistency_pairs) + " pairs, " + std::to_string(r.definite_checks) +
                   " definite, " + std::to_string(r.indefinite_checks) + " indefinite, " +
                   std::to_string(r.contradictions.size()) + " contradictions");
  for (const auto& c : r.contradictions) o.text.push_back("  contradiction: " + c);
  return o;
}

json config_json(const CliConfig& c) {
  return {{"universe", c.universe_path.empty() ? json("default") : json(c.universe_path)},
          {"bound", {{"depth", c.depth}, {"width", c.width}}},
          {"mode", c.mode == Mode::Strict ? "strict" : "permissive"},
          {"seed", c.seed},
          {"steps", c.steps},
          {"exhaustive", c.exhaustive},
          {"strong", c.strong}};
}

void emit(std::ostream& out, const CliConfig& cfg, const std::string& command, const std::vector<std::string>& inputs,
          const Outcome& o, std::optional<double> ms) {
  if (cfg.format == OutputFormat::Structured) {
    json doc = {{"command", command},
                {"inputs", inputs},
                {"config", config_json(cfg)},
                {"verdict", o.verdict},
                {"evidence", o.evidence},
                {"exit_code", o.exit},
                {"timing", ms ? json({{"wall_ms", *ms}}) : json(nullptr)}};
    out << doc.dump(2) << "\n";
    return;
  }
  for (const auto& line : o.text) out << line << "\n";
  if (ms) out << "time: " << *ms << " ms\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Session-type analyzer and pi-calculus typechecker", "sessium"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string bound;
  std::string mode;
  std::string format;
  bool force = false;
  app.add_option("--universe", cfg.universe_path, "basic-type universe file (.u)");
  app.add_option("--bound", bound, "tester depth and optional width: N[,W]");
  app.add_option("--mode", mode, "strict or permissive")->check(CLI::IsMember({"strict", "permissive"}));
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--steps", cfg.steps, "step budget or state cap");
  app.add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  app.add_flag("--exhaustive", cfg.exhaustive, "explore every interleaving");
  app.add_flag("--strong", cfg.strong, "strong subsession for sub and equiv");
  app.add_flag("--timing", cfg.timing, "report wall-clock time");
  app.add_option("--terms", cfg.terms, "random terms for the law suite");
  app.add_flag("--force", force, "check-sr: run even when the precondition fails");

  using Handler = std::function<Outcome(Context&, const std::vector<std::string>&)>;
  std::vector<std::pair<std::string, Handler>> handlers = {
      {"validate", cmd_validate},
      {"lts", cmd_lts},
      {"complete", cmd_complete},
      {"viable", cmd_viable},
      {"sub", cmd_sub},
      {"equiv", cmd_equiv},
      {"typecheck", cmd_typecheck},
      {"simulate", cmd_simulate},
      {"check-sr", [&force](Context& cx, const std::vector<std::string>& in) { return cmd_check_sr(cx, in, force); }},
      {"check-progress", cmd_check_progress},
      {"corpus", cmd_corpus},
      {"laws", cmd_laws}};
  std::vector<std::string> inputs;
  for (const auto& [name, h] : handlers) {
    app.add_subcommand(name)->add_option("inputs", inputs, "types, processes or files");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "sessium: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!bound.empty()) {
    try {
      std::size_t comma = bound.find(',');
      cfg.depth = static_cast<unsigned>(std::stoul(bound.substr(0, comma)));
      if (comma != std::string::npos) cfg.width = static_cast<unsigned>(std::stoul(bound.substr(comma + 1)));
    } catch (const std::exception&) {
      err << "sessium: --bound expects N[,W]\n";
      return kExitUsage;
    }
  }
  if (mode == "permissive") cfg.mode = Mode::Permissive;
  if (format == "structured") cfg.format = OutputFormat::Structured;

  std::string command = app.get_subcommands().front()->get_name();
  Handler handler;
  for (const auto& [name, h] : handlers) {
    if (name == command) handler = h;
  }

  auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    std::optional<TypeUniverse> loaded;
    if (!cfg.universe_path.empty()) loaded = TypeUniverse::load(cfg.universe_path);
    const TypeUniverse& u = loaded ? *loaded : TypeUniverse::default_universe();
    Bound b;
    b.depth = cfg.depth;
    b.width = cfg.width;
    Analyzer az(u, b);
    Context cx{cfg, &u, &az};
    try {
      o = handler(cx, inputs);
    } catch (const UndecidedSideCondition& e) {
      o.verdict = "Unknown";
      o.evidence = {{"undecided", e.what()}};
      o.exit = cfg.mode == Mode::Strict ? kExitUndecided : kExitOk;
      o.text.push_back(std::string("undecided: ") + e.what());
    } catch (const StateLimitExceeded& e) {
      o.verdict = "Unknown";
      o.evidence = {{"state_limit", e.what()}};
      o.exit = cfg.mode == Mode::Strict ? kExitUndecided : kExitOk;
      o.text.push_back(std::string("state limit: ") + e.what());
    }
  } catch (const std::exception& e) {
    // Parse, universe and usage errors.
    err << "sessium " << command << ": " << e.what() << "\n";
    o = Outcome{"error", {{"message", e.what()}}, kExitUsage, {}};
    if (cfg.format == OutputFormat::Text) return kExitUsage;
  }
  std::optional<double> ms;
  if (cfg.timing) {
    ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  emit(out, cfg, command, inputs, o, ms);
  return o.exit;
}

}  // namespace sessium
