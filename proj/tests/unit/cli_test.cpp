#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sessium/cli.hpp"
#include "sessium/corpus.hpp"

namespace sessium {
namespace {

using nlohmann::json;

const TypeUniverse& U() { return TypeUniverse::default_universe(); }
Type T(const char* s) { return parse_type(s, U()); }

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json structured(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "structured"});
  CliRun r = cli(args);
  json doc = json::parse(r.out);
  EXPECT_EQ(doc.at("exit_code").get<int>(), r.code);
  return doc;
}

std::string corpus_file(const std::string& name) {
  auto path = std::filesystem::temp_directory_path() / ("sessium_cli_test_" + name + ".pi");
  std::ofstream(path) << corpus_text(name);
  return path.string();
}

bool same(const Verdict& a, const Verdict& b) {
  return a.tag == b.tag && a.derivation == b.derivation && a.witness == b.witness && a.context == b.context &&
         a.note == b.note;
}

TEST(CliExitCodes, DocumentedExamples) {
  CliRun complete = cli({"complete", "?Int.1 | !Real.1"});
  EXPECT_EQ(complete.code, 1);
  EXPECT_EQ(structured({"complete", "?Int.1 | !Real.1"}).at("verdict"), "false");

  json sub = structured({"sub", "--bound", "4", "?Int.1", "?Int.1 + ?Bool.1"});
  EXPECT_EQ(sub.at("exit_code"), 1);
  EXPECT_EQ(sub.at("verdict"), "No");
  EXPECT_EQ(parse_type(sub.at("evidence").at("witness").get<std::string>(), U()), T("!Int.1 + !Bool.0"));

  EXPECT_EQ(cli({"typecheck", corpus_file("seller_buyers")}).code, 0);
  EXPECT_EQ(cli({"typecheck", corpus_file("example3_ext")}).code, 1);
  EXPECT_EQ(cli({"typecheck", corpus_file("example1_server")}).code, 3);
  EXPECT_EQ(cli({"typecheck", "--mode", "permissive", corpus_file("example1_server")}).code, 0);
  EXPECT_EQ(cli({"viable", "?Int.1"}).code, 0);
  EXPECT_EQ(cli({"viable", "!Int.0"}).code, 1);
  EXPECT_EQ(cli({"validate", "rec X.X"}).code, 1);
  EXPECT_EQ(cli({"validate", "rec X.!Int.X"}).code, 0);
}

TEST(CliExitCodes, UsageAndParseErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"viable"}).code, 2);
  EXPECT_EQ(cli({"sub", "?Int.1"}).code, 2);
  EXPECT_EQ(cli({"viable", "?Int."}).code, 2);
  EXPECT_EQ(cli({"viable", "?Nope.1"}).code, 2);
  EXPECT_EQ(cli({"--mode", "lenient", "viable", "1"}).code, 2);
  EXPECT_EQ(cli({"--bound", "x", "viable", "1"}).code, 2);
  EXPECT_EQ(cli({"--universe", "/nonexistent/u.u", "viable", "1"}).code, 2);
  json err = structured({"typecheck", "a!(.0"});
  EXPECT_EQ(err.at("verdict"), "error");
  EXPECT_EQ(err.at("exit_code"), 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(CliAdapter, VerdictsEqualLibraryCalls) {
  Analyzer az(U(), Bound{3, 2, 20000});
  const char* pairs[][2] = {
      {"?Int.1", "?Int.1 + ?Bool.1"}, {"!Real.1", "!Int.1"}, {"0", "!Int.0"}, {"?Int.1 (+) !Bool.1", "?Int.1"}};
  for (auto& p : pairs) {
    json weak = structured({"--bound", "3,2", "sub", p[0], p[1]});
    EXPECT_TRUE(same(verdict_from_json(weak.at("evidence"), U()), az.subsession(T(p[0]), T(p[1])))) << p[0];
    json strong = structured({"--bound", "3,2", "--strong", "sub", p[0], p[1]});
    EXPECT_TRUE(same(verdict_from_json(strong.at("evidence"), U()), az.strong_subsession(T(p[0]), T(p[1])))) << p[0];
    json eq = structured({"--bound", "3,2", "equiv", p[0], p[1]});
    EXPECT_TRUE(same(verdict_from_json(eq.at("evidence"), U()), az.equivalent(T(p[0]), T(p[1]), Strength::Weak)));
  }
  for (const char* s : {"?Int.1", "0", "![1].1 | ?[!Int.1].1"}) {
    json v = structured({"--bound", "3,2", "viable", s});
    EXPECT_TRUE(same(verdict_from_json(v.at("evidence"), U()), az.is_viable(T(s)))) << s;
  }
  for (const char* s : {"1", "?Int.1 | !Real.1", "(1 + ?Int.1) | (1 (+) !Int.1)"}) {
    json v = structured({"complete", s});
    EXPECT_EQ(v.at("verdict") == "true", az.is_complete(T(s))) << s;
  }
}

TEST(CliAdapter, ReportsEqualLibraryCalls) {
  Analyzer az(U());
  for (const auto& src : corpus_sources()) {
    std::string file = corpus_file(src.name);
    ProcPtr p = parse_process(src.text, U());
    json tc = structured({"--mode", "permissive", "typecheck", file});
    EXPECT_EQ(tc.at("evidence"), to_json(typecheck(p, {}, Mode::Permissive, az))) << src.name;
    json sim = structured({"--seed", "5", "--steps", "30", "simulate", file});
    EXPECT_EQ(sim.at("evidence"), to_json(simulate(p, 30, 5, az))) << src.name;
  }
  std::string sb = corpus_file("seller_buyers");
  SrOptions opt;
  EXPECT_EQ(structured({"--exhaustive", "check-sr", sb}).at("evidence"),
            to_json(subject_reduction_check(parse_process(corpus_text("seller_buyers"), U()), opt, az)));
  EXPECT_EQ(structured({"--steps", "50", "check-progress", sb}).at("evidence"),
            to_json(progress_replay(parse_process(corpus_text("seller_buyers"), U()), az, 50)));
  Type t = T("!Int.1 (+) ?Bool.1");
  EXPECT_EQ(structured({"lts", "!Int.1 (+) ?Bool.1"}).at("evidence"), to_json(az.lts().build_graph(t), az.lts()));
}

TEST(CliStructured, VerdictRoundTrips) {
  Analyzer az(U());
  std::vector<Verdict> vs = {az.subsession(T("?Int.1"), T("?Int.1 + ?Bool.1")),
                             az.strong_subsession(T("0"), T("!Int.0")),
                             az.strong_subsession(T("?Int.1 (+) !Bool.1"), T("?Int.1")), Verdict::unknown("budget")};
  for (const auto& v : vs) {
    json j = json::parse(to_json(v).dump());
    EXPECT_TRUE(same(verdict_from_json(j, U()), v));
  }
  json doc = structured({"--strong", "sub", "0", "!Int.0"});
  Verdict back = verdict_from_json(doc.at("evidence"), U());
  EXPECT_TRUE(back.is_no());
  ASSERT_TRUE(back.context);
  EXPECT_EQ(json::parse(doc.dump()), doc);
}

TEST(CliStructured, Deterministic) {
  std::string file = corpus_file("multiparty_prime");
  for (const auto& args : std::vector<std::vector<std::string>>{{"--format", "structured", "--seed", "9", "simulate", file},
                                                                {"--format", "structured", "typecheck", file},
                                                                {"--format", "structured", "sub", "?Int.1", "?Int.1 + ?Bool.1"}}) {
    CliRun a = cli(args);
    CliRun b = cli(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(json::parse(a.out).at("timing"), nullptr);
  }
  json timed = structured({"--timing", "viable", "1"});
  EXPECT_TRUE(timed.at("timing").at("wall_ms").is_number());
}

TEST(CliConfigTest, DefaultsAndFlags) {
  CliConfig c;
  EXPECT_EQ(c.depth, 4u);
  EXPECT_EQ(c.width, 2u);
  EXPECT_EQ(c.mode, Mode::Strict);
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.steps, 1000u);
  EXPECT_EQ(c.format, OutputFormat::Text);
  json cfg = structured({"--bound", "3,1", "--mode", "permissive", "--seed", "4", "--steps", "7", "viable", "1"})
                 .at("config");
  EXPECT_EQ(cfg.at("bound").at("depth"), 3);
  EXPECT_EQ(cfg.at("bound").at("width"), 1);
  EXPECT_EQ(cfg.at("mode"), "permissive");
  EXPECT_EQ(cfg.at("seed"), 4);
  EXPECT_EQ(cfg.at("steps"), 7);
}

TEST(CliConfigTest, UniverseFile) {
  auto path = std::filesystem::temp_directory_path() / "sessium_cli_test.u";
  std::ofstream(path) << "cell n\ntype Nat = n\ncarrier n = 1\nliteral integer -> n\n";
  EXPECT_EQ(cli({"--universe", path.string(), "complete", "?Nat.1 | !Nat.1"}).code, 0);
  EXPECT_EQ(cli({"--universe", path.string(), "complete", "?Int.1 | !Int.1"}).code, 2);
}

TEST(CliCommands, TextOutput) {
  CliRun r = cli({"simulate", "--exhaustive", corpus_file("deadlock")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("stuck: "), std::string::npos);
  CliRun p = cli({"check-progress", corpus_file("example3_ext"), "a"});
  EXPECT_NE(p.out.find("PreconditionFailed"), std::string::npos);
  CliRun sr = cli({"--force", "check-sr", corpus_file("example2_nonviable")});
  EXPECT_EQ(sr.code, 1);
  EXPECT_NE(sr.out.find("violation: restricted c"), std::string::npos);
  CliRun lts = cli({"lts", "!Int.1"});
  EXPECT_NE(lts.out.find("n0 -> n1"), std::string::npos);
}

}  // namespace
}  // namespace sessium
