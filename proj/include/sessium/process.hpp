#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sessium/session_type.hpp"
#include "sessium/universe.hpp"

namespace sessium {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Value expressions: literals, variables, arithmetic, and table functions.
struct Expr {
  enum class Kind : std::uint8_t { Lit, Var, Bin, App };
  Kind kind = Kind::Lit;
  Value value;                // Lit
  std::string name;           // Var, App
  char op = 0;                // Bin: + - * /
  std::vector<ExprPtr> args;  // Bin (two), App

  static ExprPtr lit(Value v);
  static ExprPtr var(std::string name);
  static ExprPtr bin(char op, ExprPtr l, ExprPtr r);
  static ExprPtr app(std::string fn, std::vector<ExprPtr> args);

  std::string str() const;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates a closed expression. Division of two integers truncates.
Value eval(const Expr& e, const TypeUniverse& u, const std::map<std::string, Value>& env = {});

/// Cells an expression may evaluate to under `gamma`; throws EvalError on a
/// type error.
CellSet expr_cells(const Expr& e, const TypeUniverse& u, const std::map<std::string, BasicType>& gamma);

/// Basic type reported for an output of `e`: the singleton type for a
/// singleton literal, otherwise the smallest named type covering its cells.
BasicType expr_type(const Expr& e, const TypeUniverse& u, const std::map<std::string, BasicType>& gamma);

struct ProcPrefix {
  enum class Kind : std::uint8_t { InVal, OutVal, InCh, OutCh };
  Kind kind = Kind::InVal;
  std::string subject;
  std::string var;          // InVal/InCh binder, OutCh object
  BasicType bt;             // InVal
  ExprPtr expr;             // OutVal
  Type annotation = nullptr;  // InCh/OutCh, optional

  bool binds() const { return kind == Kind::InVal || kind == Kind::InCh; }
  std::string str() const;
};

struct Process;
using ProcPtr = std::shared_ptr<const Process>;

struct Process {
  enum class Kind : std::uint8_t { Idle, Act, Repl, Ext, Int, Par, New };
  Kind kind = Kind::Idle;
  ProcPrefix prefix;                                  // Act
  std::vector<std::pair<std::string, Type>> repl_ann;  // Repl
  std::string name;                                   // New
  ProcPtr left;                                       // Act continuation, Repl/New body, binary left
  ProcPtr right;
  int line = 0;
  int column = 0;

  static ProcPtr idle();
  static ProcPtr act(ProcPrefix prefix, ProcPtr cont, int line = 0, int column = 0);
  static ProcPtr repl(ProcPtr body, std::vector<std::pair<std::string, Type>> ann = {}, int line = 0, int column = 0);
  static ProcPtr ext(ProcPtr l, ProcPtr r, int line = 0, int column = 0);
  static ProcPtr intc(ProcPtr l, ProcPtr r);
  static ProcPtr par(ProcPtr l, ProcPtr r);
  static ProcPtr res(std::string name, ProcPtr body, int line = 0, int column = 0);

  std::string loc() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Surface syntax, re-parseable.
std::string to_string(const ProcPtr& p);

/// Process text with optional leading `let NAME = literal` lines, which bind
/// constants in expressions.
ProcPtr parse_process(std::string_view text, const TypeUniverse& u);

/// Free channel names and channel variables (subjects and delegated objects).
std::set<std::string> free_names(const ProcPtr& p);

/// A message exchanged in a communication: a value or a channel name.
struct Message {
  bool is_name = false;
  std::string name;
  Value value;

  static Message of_name(std::string n);
  static Message of_value(Value v);
  std::string str() const;
  bool operator==(const Message& o) const;
};

/// Capture-avoiding substitution of `m` for the variable `var`.
ProcPtr substitute(const ProcPtr& p, const std::string& var, const Message& m);

/// Renames bound names so that binders are pairwise distinct and distinct
/// from the free names. Free names and unclashing binders keep their names.
ProcPtr freshen(const ProcPtr& p);

/// Flattens `|`, drops 0 components and unused restrictions, and sorts the
/// components of `|`, `+` and `(+)`.
ProcPtr normalize(const ProcPtr& p);

/// Text identifying `normalize(p)` up to renaming of bound names.
std::string canonical_key(const ProcPtr& p);

struct ProcLabel {
  enum class Kind : std::uint8_t { Tau, FreeIn, FreeOut, BoundOut };
  Kind kind = Kind::Tau;
  std::string channel;
  Message message;

  std::string str() const;
};

struct ProcStep {
  ProcLabel label;
  ProcPtr target;
};

/// All transitions. Value inputs range over the carriers of the input type;
/// channel inputs over the free names of `p`.
std::vector<ProcStep> proc_steps(const ProcPtr& p, const TypeUniverse& u);

/// The τ-successors only.
std::vector<ProcPtr> tau_steps(const ProcPtr& p, const TypeUniverse& u);

/// Readiness of `p` on `c`.
bool ready(const ProcPtr& p, const std::string& c);

}  // namespace sessium
