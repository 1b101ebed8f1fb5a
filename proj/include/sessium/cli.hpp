#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "sessium/harness.hpp"

namespace sessium {

enum class OutputFormat { Text, Structured };

struct CliConfig {
  std::string universe_path;  // empty: the shipped universe
  unsigned depth = 4;
  unsigned width = 2;
  Mode mode = Mode::Strict;
  std::uint64_t seed = 0;
  std::size_t steps = 1000;
  OutputFormat format = OutputFormat::Text;
  bool exhaustive = false;
  bool strong = false;
  bool timing = false;  // wall-clock timing makes output non-reproducible
  std::size_t terms = 1000;
};

enum ExitCode : int { kExitOk = 0, kExitNegative = 1, kExitUsage = 2, kExitUndecided = 3 };

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j, const TypeUniverse& u);
nlohmann::json to_json(const TypeReport& r);
nlohmann::json to_json(const TypeStateGraph& g, TypeLts& lts);
nlohmann::json to_json(const SimulationTrace& t);
nlohmann::json to_json(const SrReport& r);
nlohmann::json to_json(const ProgressReport& r);
nlohmann::json to_json(const CorpusReport& r);
nlohmann::json to_json(const LawReport& r);

}  // namespace sessium
