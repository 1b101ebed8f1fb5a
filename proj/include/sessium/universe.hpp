#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sessium {

/// A set of cells of a TypeUniverse. Universes are limited to 64 cells.
class CellSet {
 public:
  constexpr CellSet() = default;
  static constexpr CellSet single(unsigned cell) { return CellSet(std::uint64_t{1} << cell); }

  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(unsigned cell) const { return (bits_ >> cell) & 1U; }
  constexpr bool subset_of(CellSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr CellSet operator|(CellSet o) const { return CellSet(bits_ | o.bits_); }
  constexpr CellSet operator&(CellSet o) const { return CellSet(bits_ & o.bits_); }
  CellSet& operator|=(CellSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool operator==(const CellSet&) const = default;
  constexpr std::uint64_t bits() const { return bits_; }
  int size() const { return __builtin_popcountll(bits_); }

  /// Cell indices in increasing order.
  std::vector<unsigned> cells() const;

 private:
  explicit constexpr CellSet(std::uint64_t bits) : bits_(bits) {}
  std::uint64_t bits_ = 0;
};

/// A basic value: the messages exchanged by processes that are not channels.
struct Value {
  enum class Kind : std::uint8_t { Integer, Decimal, Boolean, String, Atom };
  Kind kind = Kind::Integer;
  std::int64_t integer = 0;
  double decimal = 0.0;
  bool boolean = false;
  std::string text;  // String and Atom payload

  static Value make_integer(std::int64_t v);
  /// Integral decimals collapse to integers.
  static Value make_decimal(double v);
  static Value make_boolean(bool v);
  static Value make_string(std::string s);
  static Value make_atom(std::string s);

  bool is_numeric() const { return kind == Kind::Integer || kind == Kind::Decimal; }
  double as_double() const { return kind == Kind::Integer ? static_cast<double>(integer) : decimal; }

  /// Surface syntax: 3, 1.5, true, "text", 'atom'.
  std::string str() const;

  bool operator==(const Value& other) const;
  bool operator<(const Value& other) const { return str() < other.str(); }
};

/// Parses a single value literal; nullopt when `text` is not one.
std::optional<Value> parse_value_literal(std::string_view text);

class UniverseError : public std::runtime_error {
 public:
  UniverseError(const std::string& msg, int line)
      : std::runtime_error(line > 0 ? "universe line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A function symbol usable in process expressions, given by a finite table.
struct FunctionSymbol {
  std::string name;
  std::vector<std::string> param_types;  // named types
  std::string result_type;               // named type
  std::vector<std::pair<std::vector<Value>, Value>> table;
  std::optional<Value> fallback;  // the `_` row

  std::optional<Value> apply(const std::vector<Value>& args) const;
};

/// Finite lattice of basic types: pairwise-disjoint cells, named types as
/// unions of cells, singleton literals with a dedicated cell, and per-cell
/// carrier values used to enumerate value inputs.
class TypeUniverse {
 public:
  /// Line-oriented config:
  ///   cell NAME
  ///   type NAME = cell, cell, ...
  ///   singleton 'lit' in CELL
  ///   carrier CELL = lit, lit, ...
  ///   literal integer|decimal|boolean|string -> CELL
  ///   fun NAME(Type, ...) -> Type { lit, ... -> lit; _ -> lit }
  static TypeUniverse parse(std::string_view text);
  static TypeUniverse load(const std::string& path);
  /// The shipped universe (Int within Real, Bool, String, Address, Date, 'abort').
  static const TypeUniverse& default_universe();
  static std::string_view default_universe_text();

  std::size_t cell_count() const { return cells_.size(); }
  const std::string& cell_name(unsigned cell) const { return cells_.at(cell); }
  std::optional<unsigned> find_cell(std::string_view name) const;

  bool has_named_type(std::string_view name) const;
  CellSet named_type(std::string_view name) const;
  const std::map<std::string, CellSet, std::less<>>& named_types() const { return named_; }

  bool has_singleton(std::string_view literal) const;
  std::optional<unsigned> singleton_cell(std::string_view literal) const;

  const std::vector<Value>& carriers(unsigned cell) const { return carriers_.at(cell); }

  /// Cell occupied by a value: singleton declaration, then carrier lists,
  /// then the literal class of its kind.
  std::optional<unsigned> cell_of(const Value& v) const;

  /// Smallest named type whose cells include `cells` (ties broken by name).
  std::optional<std::string> smallest_named_type(CellSet cells) const;

  const FunctionSymbol* function(std::string_view name) const;
  std::optional<unsigned> literal_class_cell(Value::Kind kind) const;

 private:
  std::vector<std::string> cells_;
  std::map<std::string, CellSet, std::less<>> named_;
  std::map<std::string, unsigned, std::less<>> singletons_;
  std::vector<std::vector<Value>> carriers_;
  std::map<Value::Kind, unsigned> literal_classes_;
  std::map<std::string, FunctionSymbol, std::less<>> functions_;
};

}  // namespace sessium
