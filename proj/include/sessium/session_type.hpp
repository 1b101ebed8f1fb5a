#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sessium/parse_error.hpp"
#include "sessium/universe.hpp"

namespace sessium {

/// A basic type: empty, a named type, a singleton literal, or a single cell.
/// Cell types print as `<cell>`; an output on a cell is a committed output.
struct BasicType {
  enum class Kind : std::uint8_t { Empty, Named, Singleton, Cell };
  Kind kind = Kind::Empty;
  std::string name;  // type name, quoted literal, or cell name
  unsigned cell = 0;

  static BasicType empty();
  static BasicType named(std::string name);
  static BasicType singleton(std::string quoted);
  static BasicType of_cell(unsigned cell, std::string cell_name);

  std::string str() const;
  bool operator==(const BasicType& o) const { return kind == o.kind && name == o.name && cell == o.cell; }
};

CellSet denote(const BasicType& bt, const TypeUniverse& u);
bool bt_subtype(const BasicType& a, const BasicType& b, const TypeUniverse& u);

enum class TypeKind : std::uint8_t { Fail, Done, Prefix, Ext, Int, Par, Rec, Var };
enum class ActionKind : std::uint8_t { InVal, OutVal, Sent, InCh, OutCh };

class TypeNode;
/// Session types are interned: two types are equal iff their pointers are.
using Type = const TypeNode*;

struct Action {
  ActionKind kind = ActionKind::InVal;
  BasicType bt;             // InVal, OutVal, Sent
  Type payload = nullptr;   // InCh, OutCh

  bool is_channel() const { return kind == ActionKind::InCh || kind == ActionKind::OutCh; }
  bool is_input() const { return kind == ActionKind::InVal || kind == ActionKind::InCh; }
  bool operator==(const Action& o) const { return kind == o.kind && bt == o.bt && payload == o.payload; }
  std::string str() const;
};

Action in_val(BasicType bt);
Action out_val(BasicType bt);
Action sent(unsigned cell, std::string cell_name);
Action in_ch(Type payload);
Action out_ch(Type payload);

/// Immutable hash-consed node. Recursion uses de Bruijn indices: Var(0)
/// refers to the nearest enclosing Rec.
class TypeNode {
 public:
  TypeKind kind;
  Action action;               // Prefix only
  std::vector<Type> children;  // Prefix: {cont}; Rec: {body}; Ext/Int/Par: operands
  unsigned var = 0;            // Var only
  std::size_t hash = 0;
  std::uint64_t id = 0;
  unsigned free_depth = 0;     // 0 iff closed
  unsigned size = 1;

  Type cont() const { return children[0]; }
  Type body() const { return children[0]; }
  bool closed() const { return free_depth == 0; }

  mutable std::atomic<Type> hnf_cache{nullptr};

  TypeNode(TypeKind k, Action a, std::vector<Type> ch, unsigned v)
      : kind(k), action(std::move(a)), children(std::move(ch)), var(v) {}
};

// Canonicalizing constructors. Ext drops 0 and flattens, Par drops 1 and
// flattens, Int flattens; operands are sorted. A value prefix on the empty
// type is 0, and a rec whose variable does not occur is dropped.
Type fail_type();
Type done_type();
Type mk_prefix(Action a, Type cont);
Type mk_ext(std::vector<Type> operands);
Type mk_int(std::vector<Type> operands);
Type mk_par(std::vector<Type> operands);
Type mk_ext(Type a, Type b);
Type mk_int(Type a, Type b);
Type mk_par(Type a, Type b);
Type mk_rec(Type body);
Type mk_var(unsigned index);

/// Total structural order, independent of construction history.
int compare(Type a, Type b);
struct TypeLess {
  bool operator()(Type a, Type b) const { return compare(a, b) < 0; }
};

std::string to_string(Type t);
Type parse_type(std::string_view text, const TypeUniverse& u);

/// One-step unfolding of a closed Rec.
Type unfold(Type rec);
/// Head normal form of a closed type: no Rec at the head or under the
/// head's choice and parallel operands.
Type hnf(Type t);

struct Violation {
  enum class Kind { Contractivity, FiniteParallelism, PayloadRecursion, Unbound };
  Kind kind;
  std::string message;
};
const char* violation_name(Violation::Kind k);

std::vector<Violation> validate(Type t);
unsigned weight(Type t);

/// Number of interned nodes so far (diagnostics).
std::size_t interned_count();

}  // namespace sessium
