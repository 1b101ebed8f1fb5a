#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "sessium/type_lts.hpp"
#include "sessium/verdict.hpp"

namespace sessium {

/// Search limits: tester prefix depth, choice width, and the number of
/// candidate compositions checked per query.
struct Bound {
  unsigned depth = 4;
  unsigned width = 2;
  std::size_t budget = 20000;
};

/// Finite family of testers built from an action alphabet.
class TesterSpace {
 public:
  TesterSpace(std::vector<Action> alphabet, unsigned depth, unsigned width);

  /// Actions dual to those occurring in `terms`.
  static std::vector<Action> dual_alphabet(const std::vector<Type>& terms, const TypeUniverse& u);
  /// Actions occurring in `terms`, as they occur.
  static std::vector<Action> term_alphabet(const std::vector<Type>& terms);

  /// Calls `visit` on candidate testers by increasing depth, without
  /// duplicates. Top-level candidates are 1, prefixes and external choices;
  /// internal choices and 0 only occur below a prefix. Stops when `visit`
  /// returns false. Returns true iff every candidate up to the bound was
  /// visited.
  bool enumerate(const std::function<bool(Type)>& visit) const;

  const std::vector<Action>& alphabet() const { return alphabet_; }

  /// Materialized levels are capped at this many terms.
  static constexpr std::size_t kLevelCap = 20000;

 private:
  std::vector<Action> alphabet_;
  unsigned depth_;
  unsigned width_;
};

/// Dual of a type: inputs and outputs swapped, 0 replaced by 1. The classical
/// variant also swaps internal and external choice.
Type dual_type(Type t, bool classical);

enum class Strength { Weak, Strong };

struct ConsistencyReport {
  std::vector<std::string> contradictions;
  std::vector<std::string> notes;
  bool ok() const { return contradictions.empty(); }
};

/// Viability, subsession and strong subsession over one universe. Verdicts
/// are memoized; the memo never changes an answer. One instance may be
/// shared between threads.
class Analyzer {
 public:
  explicit Analyzer(const TypeUniverse& u, Bound bound = {});

  const TypeUniverse& universe() const { return u_; }
  const Bound& bound() const { return bound_; }
  TypeLts& lts() { return *lts_; }

  /// Exact; may throw UndecidedSideCondition or StateLimitExceeded.
  bool is_complete(Type s);

  std::optional<Type> find_completing_tester(Type s);
  Verdict is_viable(Type s);
  Verdict subsession(Type lhs, Type rhs);
  Verdict strong_subsession(Type lhs, Type rhs);
  Verdict equivalent(Type lhs, Type rhs, Strength strength);

  ConsistencyReport check_prop5(Type s);
  ConsistencyReport check_thm6(Type lhs, Type rhs);

  /// Side condition of delegation synchronizations: does `sent ⪯ expected`?
  PayloadRelation payload_relation(Type sent, Type expected);

 private:
  enum class Rel { Weak, Strong };
  using Derivation = std::vector<std::string>;

  std::optional<Derivation> derive(Type lhs, Type rhs, Rel rel);
  std::optional<Derivation> derive_strong(Type lhs, Type rhs);
  std::optional<Derivation> derive_weak(Type lhs, Type rhs);
  std::optional<Derivation> match_all(const std::vector<Type>& ls, const std::vector<Type>& rs, Rel rel);

  /// True, false, or nullopt when the composition cannot be decided.
  std::optional<bool> complete_or_unknown(Type s);
  bool non_viable_by_closure(Type s);
  Verdict viability_uncached(Type s);
  Verdict refute_weak(Type lhs, Type rhs);
  Verdict refute_strong(Type lhs, Type rhs);

  const TypeUniverse& u_;
  Bound bound_;
  std::unique_ptr<TypeLts> lts_;
  std::recursive_mutex mu_;
  std::map<std::tuple<int, Type, Type>, Verdict> verdicts_;
  std::map<Type, std::optional<Type>> testers_;
  std::map<std::tuple<int, Type, Type>, std::optional<Derivation>> derivations_;
  std::set<std::tuple<int, Type, Type>> in_progress_;
};

}  // namespace sessium
