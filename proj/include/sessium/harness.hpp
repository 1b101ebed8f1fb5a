#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sessium/process.hpp"
#include "sessium/relations.hpp"
#include "sessium/typing.hpp"

namespace sessium {

// ---------------------------------------------------------------------------
// Simulation

struct TraceStep {
  ProcLabel label;
  ProcPtr state;
  std::optional<TypeReport> snapshot;
};

enum class SimStatus { Success, Stuck, StepBudgetExhausted };
const char* sim_status_name(SimStatus s);

struct SimulationTrace {
  ProcPtr initial;
  std::vector<TraceStep> steps;
  SimStatus status = SimStatus::Stuck;
};

/// Environment and restriction checks of `p` without the viability pass.
TypeReport snapshot(const ProcPtr& p, Analyzer& az);

/// Random τ-run with uniform choice under a seeded generator. Success means
/// no τ-step remains and the state is 0 up to normalization.
SimulationTrace simulate(const ProcPtr& p, std::size_t steps, std::uint64_t seed, Analyzer& az, bool snapshots = true);

/// Reachable states by τ-steps, identified by canonical_key, breadth first.
struct Exploration {
  std::vector<ProcPtr> states;
  std::vector<std::vector<std::size_t>> edges;
  bool complete = true;  // false when the state cap was reached
};
Exploration explore(const ProcPtr& p, const TypeUniverse& u, std::size_t max_states);

/// Restricted names pulled out of top-level parallel components, and the
/// remaining body. Binders are freshened first.
std::pair<std::vector<std::string>, ProcPtr> open_restrictions(const ProcPtr& p);

// ---------------------------------------------------------------------------
// Subject reduction and progress

struct SrOptions {
  bool exhaustive = true;
  std::size_t max_states = 5000;
  std::size_t steps = 1000;  // random mode
  std::uint64_t seed = 0;
  bool force = false;  // run even when the environment is not viable
};

struct SrReport {
  bool precondition_met = false;
  std::string precondition_note;
  bool exhaustive = false;
  bool explored_all = true;
  std::size_t states = 0;
  std::size_t steps_checked = 0;
  std::size_t relation_checks = 0;
  std::size_t unknown_checks = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// After every τ-step: every restricted channel's residual type is complete,
/// and no entry of the environment is refuted to be strongly below its
/// re-inferred successor.
SrReport subject_reduction_check(const ProcPtr& p, const SrOptions& opt, Analyzer& az);

enum class ProgressOutcome { Holds, PreconditionFailed, Violated };
const char* progress_outcome_name(ProgressOutcome o);

struct ProgressResult {
  ProgressOutcome outcome = ProgressOutcome::Holds;
  std::string note;
};

/// One configuration and one channel: with a complete type on `c` and
/// readiness on `c`, either `c` is not free or a τ-step exists.
ProgressResult progress_check(const ProcPtr& p, const std::string& c, Analyzer& az);

struct ProgressReport {
  std::size_t states = 0;
  std::size_t checked = 0;
  std::size_t precondition_failed = 0;
  bool explored_all = true;
  std::vector<std::string> precondition_notes;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// progress_check over every reachable configuration and every channel.
ProgressReport progress_replay(const ProcPtr& p, Analyzer& az, std::size_t max_states = 5000);

// ---------------------------------------------------------------------------
// Corpus and laws

struct Expectation {
  std::string what;
  std::string expected;
  std::string actual;
  bool ok = false;
};

struct CaseResult {
  std::string name;
  std::string locus;
  std::vector<Expectation> expectations;

  bool ok() const;
};

struct CorpusReport {
  std::vector<CaseResult> cases;  // sorted by name
  bool ok() const;
};

CorpusReport run_corpus(Analyzer& az);

struct LawResult {
  std::string name;
  std::string claim;
  std::string expected;
  Verdict verdict;
  bool ok = false;
};

struct LawReport {
  std::vector<LawResult> laws;
  std::size_t consistency_terms = 0;
  std::size_t consistency_pairs = 0;
  std::size_t definite_checks = 0;
  std::size_t indefinite_checks = 0;
  Bound consistency_bound;
  std::vector<std::string> contradictions;

  bool ok() const;
};

/// Random closed types without channel prefixes, of at most `max_size`
/// constructors.
std::vector<Type> random_weight0_types(std::size_t count, std::size_t max_size, std::uint64_t seed);

/// Law instances under `az`, then the consistency checks over corpus types
/// plus `random_terms` random types under a separate analyzer with
/// `consistency_bound`.
LawReport law_suite(Analyzer& az, std::size_t random_terms = 1000, std::uint64_t seed = 0,
                    Bound consistency_bound = Bound{3, 2, 300});

/// Types that occur in the corpus: environments and restricted channels.
std::vector<Type> corpus_types(Analyzer& az);

}  // namespace sessium
