#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sessium/process.hpp"
#include "sessium/relations.hpp"

namespace sessium {

using VarEnv = std::map<std::string, BasicType>;
/// Channel names and channel variables to session types; absent means 1.
using SessionEnv = std::map<std::string, Type>;

/// A shape error in a typing rule: the process has no derivation.
class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, std::string location, const std::string& msg)
      : std::runtime_error(rule + " at " + location + ": " + msg), rule_(std::move(rule)), location_(std::move(location)) {}
  const std::string& rule() const { return rule_; }
  const std::string& location() const { return location_; }

 private:
  std::string rule_;
  std::string location_;
};

enum class Mode { Strict, Permissive };

/// One side condition discharged while typing.
struct TypeCheck {
  std::string rule;     // t-res, t-bang, t-inputS, viability
  std::string subject;  // channel name
  std::string location;
  std::string claim;
  Verdict verdict;
  bool undecided = false;  // an UndecidedSideCondition was raised
};

enum class TypeStatus { WellTyped, WellTypedWithWarnings, Rejected };
const char* status_name(TypeStatus s);

struct TypeReport {
  SessionEnv env;
  /// Types of restricted channels, in source order, as checked at t-res.
  std::vector<std::pair<std::string, Type>> restricted;
  std::vector<TypeCheck> checks;
  std::vector<std::string> derivation;
  TypeStatus status = TypeStatus::WellTyped;
  std::string rule;  // failing rule when Rejected
  std::string location;
  std::string reason;
  bool shape_error = false;  // no derivation exists

  bool undecided() const;
};

/// Exact completeness of the restricted channel's type.
Verdict check_restriction(const SessionEnv& env, const std::string& c, Analyzer& az);

/// With an annotation S: S ⊑ entry and S ⊑ S | S. Without: entry ⊑ entry | entry.
Verdict check_replication(Type entry, std::optional<Type> annotation, Analyzer& az);

/// Viability of every type in the environment.
Verdict env_viable(const SessionEnv& env, Analyzer& az);

/// Syntax-directed environment inference. Side conditions are recorded in
/// `report` when given; shape errors throw TypeError.
SessionEnv infer(const VarEnv& gamma, const ProcPtr& p, Analyzer& az, TypeReport* report = nullptr);

TypeReport typecheck(const ProcPtr& p, const VarEnv& gamma, Mode mode, Analyzer& az);

}  // namespace sessium
