#include "sessium/universe.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "embedded.hpp"
#include "lexer.hpp"

namespace sessium {

using detail::Tok;
using detail::TokenStream;

std::vector<unsigned> CellSet::cells() const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < 64; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

Value Value::make_integer(std::int64_t v) {
  Value out;
  out.kind = Kind::Integer;
  out.integer = v;
  return out;
}

Value Value::make_decimal(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
    return make_integer(static_cast<std::int64_t>(v));
  }
  Value out;
  out.kind = Kind::Decimal;
  out.decimal = v;
  return out;
}

Value Value::make_boolean(bool v) {
  Value out;
  out.kind = Kind::Boolean;
  out.boolean = v;
  return out;
}

Value Value::make_string(std::string s) {
  Value out;
  out.kind = Kind::String;
  out.text = std::move(s);
  return out;
}

Value Value::make_atom(std::string s) {
  Value out;
  out.kind = Kind::Atom;
  out.text = std::move(s);
  return out;
}

std::string Value::str() const {
  switch (kind) {
    case Kind::Integer: return std::to_string(integer);
    case Kind::Decimal: {
      std::ostringstream os;
      os << decimal;
      std::string s = os.str();
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      return s;
    }
    case Kind::Boolean: return boolean ? "true" : "false";
    case Kind::String: return "\"" + text + "\"";
    case Kind::Atom: return "'" + text + "'";
  }
  return {};
}

bool Value::operator==(const Value& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Integer: return integer == other.integer;
    case Kind::Decimal: return decimal == other.decimal;
    case Kind::Boolean: return boolean == other.boolean;
    case Kind::String:
    case Kind::Atom: return text == other.text;
  }
  return false;
}

namespace {

std::optional<Value> read_literal(TokenStream& ts) {
  bool negative = false;
  if (ts.at(Tok::Minus) && (ts.at(Tok::Integer, 1) || ts.at(Tok::Decimal, 1))) {
    ts.next();
    negative = true;
  }
  const auto& t = ts.peek();
  switch (t.kind) {
    case Tok::Integer: {
      auto v = std::stoll(ts.next().text);
      return Value::make_integer(negative ? -v : v);
    }
    case Tok::Decimal: {
      auto v = std::stod(ts.next().text);
      return Value::make_decimal(negative ? -v : v);
    }
    case Tok::String: return Value::make_string(ts.next().text);
    case Tok::Atom: return Value::make_atom(ts.next().text);
    case Tok::Ident:
      if (t.text == "true" || t.text == "false") return Value::make_boolean(ts.next().text == "true");
      return std::nullopt;
    default: return std::nullopt;
  }
}

}  // namespace

std::optional<Value> parse_value_literal(std::string_view text) {
  try {
    TokenStream ts(detail::tokenize(text));
    auto v = read_literal(ts);
    if (!v || !ts.at(Tok::End)) return std::nullopt;
    return v;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

std::optional<Value> FunctionSymbol::apply(const std::vector<Value>& args) const {
  for (const auto& [inputs, output] : table) {
    if (inputs == args) return output;
  }
  return fallback;
}

TypeUniverse TypeUniverse::parse(std::string_view text) {
  TypeUniverse u;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::vector<std::vector<Value>> carriers_by_cell;

  auto cell_index = [&](const std::string& name, int line) -> unsigned {
    auto c = u.find_cell(name);
    if (!c) throw UniverseError("unknown cell '" + name + "'", line);
    return *c;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::vector<detail::Token> toks;
    try {
      toks = detail::tokenize(raw);
    } catch (const ParseError& e) {
      throw UniverseError(e.what(), lineno);
    }
    TokenStream ts(std::move(toks));
    if (ts.at(Tok::End)) continue;
    try {
      auto head = ts.expect(Tok::Ident, "declaration keyword").text;
      if (head == "cell") {
        auto name = ts.expect(Tok::Ident, "cell name").text;
        if (u.find_cell(name)) throw UniverseError("duplicate cell '" + name + "'", lineno);
        if (u.cells_.size() >= 64) throw UniverseError("at most 64 cells are supported", lineno);
        u.cells_.push_back(name);
        carriers_by_cell.emplace_back();
      } else if (head == "type") {
        auto name = ts.expect(Tok::Ident, "type name").text;
        if (name == "empty") throw UniverseError("'empty' is reserved", lineno);
        if (u.named_.count(name)) throw UniverseError("duplicate type '" + name + "'", lineno);
        ts.expect(Tok::Equals, "'='");
        CellSet cells;
        do {
          cells |= CellSet::single(cell_index(ts.expect(Tok::Ident, "cell name").text, lineno));
        } while (ts.accept(Tok::Comma));
        u.named_.emplace(name, cells);
      } else if (head == "singleton") {
        auto lit = ts.expect(Tok::Atom, "quoted singleton literal").text;
        auto in_kw = ts.expect(Tok::Ident, "'in'");
        if (in_kw.text != "in") throw UniverseError("expected 'in'", lineno);
        unsigned cell = cell_index(ts.expect(Tok::Ident, "cell name").text, lineno);
        for (const auto& [other, c] : u.singletons_) {
          if (c == cell) throw UniverseError("cell already holds singleton '" + other + "'", lineno);
        }
        u.singletons_["'" + lit + "'"] = cell;
      } else if (head == "carrier") {
        unsigned cell = cell_index(ts.expect(Tok::Ident, "cell name").text, lineno);
        ts.expect(Tok::Equals, "'='");
        do {
          auto v = read_literal(ts);
          if (!v) ts.fail("expected a value literal");
          carriers_by_cell[cell].push_back(*v);
        } while (ts.accept(Tok::Comma));
      } else if (head == "literal") {
        auto cls = ts.expect(Tok::Ident, "literal class").text;
        ts.expect(Tok::Arrow, "'->'");
        unsigned cell = cell_index(ts.expect(Tok::Ident, "cell name").text, lineno);
        Value::Kind kind;
        if (cls == "integer") kind = Value::Kind::Integer;
        else if (cls == "decimal") kind = Value::Kind::Decimal;
        else if (cls == "boolean") kind = Value::Kind::Boolean;
        else if (cls == "string") kind = Value::Kind::String;
        else throw UniverseError("unknown literal class '" + cls + "'", lineno);
        u.literal_classes_[kind] = cell;
      } else if (head == "fun") {
        FunctionSymbol f;
        f.name = ts.expect(Tok::Ident, "function name").text;
        ts.expect(Tok::LParen, "'('");
        if (!ts.at(Tok::RParen)) {
          do {
            f.param_types.push_back(ts.expect(Tok::Ident, "parameter type").text);
          } while (ts.accept(Tok::Comma));
        }
        ts.expect(Tok::RParen, "')'");
        ts.expect(Tok::Arrow, "'->'");
        f.result_type = ts.expect(Tok::Ident, "result type").text;
        for (const auto& t : f.param_types) {
          if (!u.named_.count(t)) throw UniverseError("unknown type '" + t + "'", lineno);
        }
        if (!u.named_.count(f.result_type)) throw UniverseError("unknown type '" + f.result_type + "'", lineno);
        ts.expect(Tok::LBrace, "'{'");
        while (!ts.at(Tok::RBrace)) {
          if (ts.at_ident("_")) {
            ts.next();
            ts.expect(Tok::Arrow, "'->'");
            auto out = read_literal(ts);
            if (!out) ts.fail("expected a value literal");
            f.fallback = *out;
          } else {
            std::vector<Value> inputs;
            do {
              auto v = read_literal(ts);
              if (!v) ts.fail("expected a value literal");
              inputs.push_back(*v);
            } while (ts.accept(Tok::Comma));
            if (inputs.size() != f.param_types.size()) throw UniverseError("arity mismatch in table of " + f.name, lineno);
            ts.expect(Tok::Arrow, "'->'");
            auto out = read_literal(ts);
            if (!out) ts.fail("expected a value literal");
            f.table.emplace_back(std::move(inputs), *out);
          }
          if (!ts.accept(Tok::Semi)) break;
        }
        ts.expect(Tok::RBrace, "'}'");
        u.functions_.emplace(f.name, std::move(f));
      } else {
        throw UniverseError("unknown declaration '" + head + "'", lineno);
      }
      if (!ts.at(Tok::End)) ts.fail("trailing input");
    } catch (const ParseError& e) {
      throw UniverseError(e.what(), lineno);
    }
  }

  u.carriers_ = std::move(carriers_by_cell);
  for (unsigned c = 0; c < u.cells_.size(); ++c) {
    if (u.carriers_[c].empty()) throw UniverseError("cell '" + u.cells_[c] + "' has no carrier values", 0);
  }
  // Every carrier value must land in the cell that lists it.
  for (unsigned c = 0; c < u.cells_.size(); ++c) {
    for (const auto& v : u.carriers_[c]) {
      auto at = u.cell_of(v);
      if (!at || *at != c) {
        throw UniverseError("carrier value " + v.str() + " of cell '" + u.cells_[c] + "' belongs to another cell", 0);
      }
    }
  }
  return u;
}

TypeUniverse TypeUniverse::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UniverseError("cannot open universe file '" + path + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string_view TypeUniverse::default_universe_text() { return embedded::default_universe; }

const TypeUniverse& TypeUniverse::default_universe() {
  static const TypeUniverse u = parse(embedded::default_universe);
  return u;
}

std::optional<unsigned> TypeUniverse::find_cell(std::string_view name) const {
  for (unsigned i = 0; i < cells_.size(); ++i) {
    if (cells_[i] == name) return i;
  }
  return std::nullopt;
}

bool TypeUniverse::has_named_type(std::string_view name) const { return named_.find(name) != named_.end(); }

CellSet TypeUniverse::named_type(std::string_view name) const {
  auto it = named_.find(name);
  return it == named_.end() ? CellSet{} : it->second;
}

bool TypeUniverse::has_singleton(std::string_view literal) const { return singletons_.find(literal) != singletons_.end(); }

std::optional<unsigned> TypeUniverse::singleton_cell(std::string_view literal) const {
  auto it = singletons_.find(literal);
  if (it == singletons_.end()) return std::nullopt;
  return it->second;
}

std::optional<unsigned> TypeUniverse::cell_of(const Value& v) const {
  if (auto s = singleton_cell(v.str())) return s;
  for (unsigned c = 0; c < carriers_.size(); ++c) {
    for (const auto& w : carriers_[c]) {
      if (w == v) return c;
    }
  }
  if (v.kind == Value::Kind::Atom) return std::nullopt;
  return literal_class_cell(v.kind);
}

std::optional<unsigned> TypeUniverse::literal_class_cell(Value::Kind kind) const {
  auto it = literal_classes_.find(kind);
  if (it == literal_classes_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> TypeUniverse::smallest_named_type(CellSet cells) const {
  std::optional<std::string> best;
  int best_size = 65;
  for (const auto& [name, set] : named_) {
    if (cells.subset_of(set) && set.size() < best_size) {
      best = name;
      best_size = set.size();
    }
  }
  return best;
}

const FunctionSymbol* TypeUniverse::function(std::string_view name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

}  // namespace sessium
