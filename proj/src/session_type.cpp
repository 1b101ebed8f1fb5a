#include "sessium/session_type.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "type_parse.hpp"

namespace sessium {

BasicType BasicType::empty() { return BasicType{}; }

BasicType BasicType::named(std::string name) {
  BasicType b;
  b.kind = Kind::Named;
  b.name = std::move(name);
  return b;
}

BasicType BasicType::singleton(std::string quoted) {
  BasicType b;
  b.kind = Kind::Singleton;
  b.name = std::move(quoted);
  return b;
}

BasicType BasicType::of_cell(unsigned cell, std::string cell_name) {
  BasicType b;
  b.kind = Kind::Cell;
  b.cell = cell;
  b.name = std::move(cell_name);
  return b;
}

std::string BasicType::str() const {
  switch (kind) {
    case Kind::Empty: return "empty";
    case Kind::Named:
    case Kind::Singleton: return name;
    case Kind::Cell: return "<" + name + ">";
  }
  return {};
}

CellSet denote(const BasicType& bt, const TypeUniverse& u) {
  switch (bt.kind) {
    case BasicType::Kind::Empty: return {};
    case BasicType::Kind::Named: return u.named_type(bt.name);
    case BasicType::Kind::Singleton: {
      auto c = u.singleton_cell(bt.name);
      return c ? CellSet::single(*c) : CellSet{};
    }
    case BasicType::Kind::Cell: return CellSet::single(bt.cell);
  }
  return {};
}

bool bt_subtype(const BasicType& a, const BasicType& b, const TypeUniverse& u) {
  return denote(a, u).subset_of(denote(b, u));
}

Action in_val(BasicType bt) { return Action{ActionKind::InVal, std::move(bt), nullptr}; }
Action out_val(BasicType bt) { return Action{ActionKind::OutVal, std::move(bt), nullptr}; }
Action sent(unsigned cell, std::string cell_name) {
  return Action{ActionKind::Sent, BasicType::of_cell(cell, std::move(cell_name)), nullptr};
}
Action in_ch(Type payload) { return Action{ActionKind::InCh, {}, payload}; }
Action out_ch(Type payload) { return Action{ActionKind::OutCh, {}, payload}; }

std::string Action::str() const {
  switch (kind) {
    case ActionKind::InVal: return "?" + bt.str();
    case ActionKind::OutVal:
    case ActionKind::Sent: return "!" + bt.str();
    case ActionKind::InCh: return "?[" + to_string(payload) + "]";
    case ActionKind::OutCh: return "![" + to_string(payload) + "]";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Interning

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

struct Table {
  std::mutex mu;
  std::unordered_multimap<std::size_t, const TypeNode*> index;
  std::vector<std::unique_ptr<TypeNode>> nodes;
};

Table& table() {
  static Table t;
  return t;
}

std::size_t action_hash(const Action& a) {
  std::size_t h = static_cast<std::size_t>(a.kind);
  h = mix(h, static_cast<std::size_t>(a.bt.kind));
  h = mix(h, std::hash<std::string>{}(a.bt.name));
  h = mix(h, a.bt.cell);
  h = mix(h, a.payload ? a.payload->id : 0);
  return h;
}

Type intern(TypeKind kind, Action action, std::vector<Type> children, unsigned var) {
  std::size_t h = mix(static_cast<std::size_t>(kind) + 1, var);
  if (kind == TypeKind::Prefix) h = mix(h, action_hash(action));
  for (Type c : children) h = mix(h, c->id);

  auto& tab = table();
  std::lock_guard<std::mutex> lock(tab.mu);
  auto range = tab.index.equal_range(h);
  for (auto it = range.first; it != range.second; ++it) {
    const TypeNode* n = it->second;
    if (n->kind == kind && n->var == var && n->children == children && (kind != TypeKind::Prefix || n->action == action)) {
      return n;
    }
  }
  auto node = std::make_unique<TypeNode>(kind, std::move(action), std::move(children), var);
  node->hash = h;
  node->id = tab.nodes.size() + 1;
  unsigned fd = 0;
  unsigned size = 1;
  for (Type c : node->children) {
    fd = std::max(fd, c->free_depth);
    size += c->size;
  }
  if (kind == TypeKind::Var) fd = var + 1;
  if (kind == TypeKind::Rec) fd = fd > 0 ? fd - 1 : 0;
  if (kind == TypeKind::Prefix && node->action.payload) {
    fd = std::max(fd, node->action.payload->free_depth);
    size += node->action.payload->size;
  }
  node->free_depth = fd;
  node->size = size;
  const TypeNode* out = node.get();
  tab.index.emplace(h, out);
  tab.nodes.push_back(std::move(node));
  return out;
}

void flatten_into(TypeKind kind, Type t, std::vector<Type>& out) {
  if (t->kind == kind) {
    for (Type c : t->children) flatten_into(kind, c, out);
  } else {
    out.push_back(t);
  }
}

void sort_types(std::vector<Type>& v) { std::stable_sort(v.begin(), v.end(), TypeLess{}); }

}  // namespace

std::size_t interned_count() {
  auto& tab = table();
  std::lock_guard<std::mutex> lock(tab.mu);
  return tab.nodes.size();
}

Type fail_type() {
  static const Type t = intern(TypeKind::Fail, {}, {}, 0);
  return t;
}

Type done_type() {
  static const Type t = intern(TypeKind::Done, {}, {}, 0);
  return t;
}

Type mk_prefix(Action a, Type cont) {
  if ((a.kind == ActionKind::InVal || a.kind == ActionKind::OutVal) && a.bt.kind == BasicType::Kind::Empty) {
    return fail_type();
  }
  if (!a.is_channel()) a.payload = nullptr;
  return intern(TypeKind::Prefix, std::move(a), {cont}, 0);
}

Type mk_ext(std::vector<Type> operands) {
  std::vector<Type> flat;
  for (Type t : operands) flatten_into(TypeKind::Ext, t, flat);
  flat.erase(std::remove(flat.begin(), flat.end(), fail_type()), flat.end());
  if (flat.empty()) return fail_type();
  if (flat.size() == 1) return flat[0];
  sort_types(flat);
  return intern(TypeKind::Ext, {}, std::move(flat), 0);
}

Type mk_int(std::vector<Type> operands) {
  if (operands.empty()) throw std::invalid_argument("internal choice needs at least one operand");
  std::vector<Type> flat;
  for (Type t : operands) flatten_into(TypeKind::Int, t, flat);
  if (flat.size() == 1) return flat[0];
  sort_types(flat);
  return intern(TypeKind::Int, {}, std::move(flat), 0);
}

Type mk_par(std::vector<Type> operands) {
  std::vector<Type> flat;
  for (Type t : operands) flatten_into(TypeKind::Par, t, flat);
  flat.erase(std::remove(flat.begin(), flat.end(), done_type()), flat.end());
  if (flat.empty()) return done_type();
  if (flat.size() == 1) return flat[0];
  sort_types(flat);
  return intern(TypeKind::Par, {}, std::move(flat), 0);
}

Type mk_ext(Type a, Type b) { return mk_ext(std::vector<Type>{a, b}); }
Type mk_int(Type a, Type b) { return mk_int(std::vector<Type>{a, b}); }
Type mk_par(Type a, Type b) { return mk_par(std::vector<Type>{a, b}); }

Type mk_var(unsigned index) { return intern(TypeKind::Var, {}, {}, index); }

namespace {

bool occurs(Type t, unsigned k) {
  if (t->free_depth <= k) return false;
  switch (t->kind) {
    case TypeKind::Var: return t->var == k;
    case TypeKind::Rec: return occurs(t->body(), k + 1);
    case TypeKind::Prefix:
      if (t->action.payload && occurs(t->action.payload, k)) return true;
      return occurs(t->cont(), k);
    default:
      for (Type c : t->children) {
        if (occurs(c, k)) return true;
      }
      return false;
  }
}

// Rebuilds t with each variable rewritten by `f(index, binder_depth)`.
Type map_vars(Type t, unsigned depth, const std::function<Type(unsigned, unsigned)>& f,
              std::unordered_map<std::uint64_t, Type>& memo) {
  if (t->free_depth <= depth) return t;
  std::uint64_t key = (t->id << 8) ^ depth;
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  Type out = t;
  switch (t->kind) {
    case TypeKind::Var: out = f(t->var, depth); break;
    case TypeKind::Rec: out = mk_rec(map_vars(t->body(), depth + 1, f, memo)); break;
    case TypeKind::Prefix: {
      Action a = t->action;
      if (a.payload) a.payload = map_vars(a.payload, depth, f, memo);
      out = mk_prefix(std::move(a), map_vars(t->cont(), depth, f, memo));
      break;
    }
    case TypeKind::Ext:
    case TypeKind::Int:
    case TypeKind::Par: {
      std::vector<Type> ch;
      for (Type c : t->children) ch.push_back(map_vars(c, depth, f, memo));
      out = t->kind == TypeKind::Ext ? mk_ext(ch) : t->kind == TypeKind::Int ? mk_int(ch) : mk_par(ch);
      break;
    }
    default: break;
  }
  memo.emplace(key, out);
  return out;
}

}  // namespace

Type mk_rec(Type body) {
  if (!occurs(body, 0)) {
    std::unordered_map<std::uint64_t, Type> memo;
    return map_vars(body, 0, [](unsigned i, unsigned d) { return i > d ? mk_var(i - 1) : mk_var(i); }, memo);
  }
  return intern(TypeKind::Rec, {}, {body}, 0);
}

Type unfold(Type rec) {
  if (rec->kind != TypeKind::Rec) return rec;
  if (!rec->closed()) throw std::logic_error("unfold of an open recursive type");
  std::unordered_map<std::uint64_t, Type> memo;
  return map_vars(rec->body(), 0,
                  [rec](unsigned i, unsigned d) -> Type {
                    if (i == d) return rec;
                    return i > d ? mk_var(i - 1) : mk_var(i);
                  },
                  memo);
}

namespace {

Type hnf_rec(Type t, int fuel) {
  if (Type c = t->hnf_cache.load(std::memory_order_acquire)) return c;
  if (fuel <= 0) throw std::runtime_error("type is not contractive: " + to_string(t));
  Type out = t;
  switch (t->kind) {
    case TypeKind::Var: throw std::logic_error("head normal form of an open type");
    case TypeKind::Rec: out = hnf_rec(unfold(t), fuel - 1); break;
    case TypeKind::Ext:
    case TypeKind::Int:
    case TypeKind::Par: {
      std::vector<Type> ch;
      bool changed = false;
      for (Type c : t->children) {
        Type h = hnf_rec(c, fuel - 1);
        changed |= h != c;
        ch.push_back(h);
      }
      if (changed) {
        out = t->kind == TypeKind::Ext ? mk_ext(ch) : t->kind == TypeKind::Int ? mk_int(ch) : mk_par(ch);
        if (out != t) out = hnf_rec(out, fuel - 1);
      }
      break;
    }
    default: break;
  }
  t->hnf_cache.store(out, std::memory_order_release);
  return out;
}

}  // namespace

Type hnf(Type t) { return hnf_rec(t, 4096); }

// ---------------------------------------------------------------------------
// Ordering

namespace {

int cmp_str(const std::string& a, const std::string& b) { return a < b ? -1 : (b < a ? 1 : 0); }

int compare_action(const Action& a, const Action& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.bt.kind != b.bt.kind) return a.bt.kind < b.bt.kind ? -1 : 1;
  if (int c = cmp_str(a.bt.name, b.bt.name)) return c;
  if (a.bt.cell != b.bt.cell) return a.bt.cell < b.bt.cell ? -1 : 1;
  if (a.payload != b.payload) {
    if (!a.payload) return -1;
    if (!b.payload) return 1;
    return compare(a.payload, b.payload);
  }
  return 0;
}

}  // namespace

int compare(Type a, Type b) {
  if (a == b) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case TypeKind::Var: return a->var < b->var ? -1 : 1;
    case TypeKind::Prefix:
      if (int c = compare_action(a->action, b->action)) return c;
      return compare(a->cont(), b->cont());
    default: {
      std::size_t n = std::min(a->children.size(), b->children.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (int c = compare(a->children[i], b->children[i])) return c;
      }
      if (a->children.size() != b->children.size()) return a->children.size() < b->children.size() ? -1 : 1;
      return 0;
    }
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string binder_name(unsigned depth) {
  static const char* base[] = {"X", "Y", "Z", "W"};
  if (depth < 4) return base[depth];
  return "X" + std::to_string(depth - 3);
}

void print(Type t, int level, unsigned depth, std::string& out) {
  switch (t->kind) {
    case TypeKind::Fail: out += "0"; return;
    case TypeKind::Done: out += "1"; return;
    case TypeKind::Var:
      if (t->var < depth) out += binder_name(depth - 1 - t->var);
      else out += "#" + std::to_string(t->var - depth);
      return;
    case TypeKind::Prefix: {
      const Action& a = t->action;
      switch (a.kind) {
        case ActionKind::InVal: out += "?" + a.bt.str(); break;
        case ActionKind::OutVal:
        case ActionKind::Sent: out += "!" + a.bt.str(); break;
        case ActionKind::InCh:
        case ActionKind::OutCh:
          out += a.kind == ActionKind::InCh ? "?[" : "![";
          print(a.payload, 0, depth, out);
          out += "]";
          break;
      }
      out += ".";
      print(t->cont(), 3, depth, out);
      return;
    }
    case TypeKind::Rec:
      out += "rec " + binder_name(depth) + ".";
      print(t->body(), 3, depth + 1, out);
      return;
    case TypeKind::Ext:
    case TypeKind::Int:
    case TypeKind::Par: {
      int own = t->kind == TypeKind::Int ? 0 : t->kind == TypeKind::Ext ? 1 : 2;
      const char* sep = t->kind == TypeKind::Int ? " (+) " : t->kind == TypeKind::Ext ? " + " : " | ";
      bool parens = level > own;
      if (parens) out += "(";
      for (std::size_t i = 0; i < t->children.size(); ++i) {
        if (i) out += sep;
        print(t->children[i], own + 1, depth, out);
      }
      if (parens) out += ")";
      return;
    }
  }
}

std::string print_at(Type t, unsigned depth) {
  std::string out;
  print(t, 0, depth, out);
  return out;
}

}  // namespace

std::string to_string(Type t) { return print_at(t, 0); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

using detail::Tok;
using detail::TokenStream;

class TypeParser {
 public:
  TypeParser(TokenStream& ts, const TypeUniverse& u) : ts_(ts), u_(u) {}

  Type oplus() {
    std::vector<Type> ops{plus()};
    while (ts_.accept(Tok::OPlus)) ops.push_back(plus());
    return ops.size() == 1 ? ops[0] : mk_int(ops);
  }

  BasicType basic_type() { return basic(); }

 private:
  Type plus() {
    std::vector<Type> ops{bar()};
    while (ts_.accept(Tok::Plus)) ops.push_back(bar());
    return ops.size() == 1 ? ops[0] : mk_ext(ops);
  }

  Type bar() {
    std::vector<Type> ops{unary()};
    while (ts_.accept(Tok::Bar)) ops.push_back(unary());
    return ops.size() == 1 ? ops[0] : mk_par(ops);
  }

  Type unary() {
    const auto& t = ts_.peek();
    switch (t.kind) {
      case Tok::Integer:
        if (t.text == "0") {
          ts_.next();
          return fail_type();
        }
        if (t.text == "1") {
          ts_.next();
          return done_type();
        }
        ts_.fail("expected 0 or 1, found '" + t.text + "'");
      case Tok::LParen: {
        ts_.next();
        Type inner = oplus();
        ts_.expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Bang:
      case Tok::Query: {
        bool input = ts_.next().kind == Tok::Query;
        Action a;
        if (ts_.accept(Tok::LBracket)) {
          Type payload = oplus();
          ts_.expect(Tok::RBracket, "']'");
          a = input ? in_ch(payload) : out_ch(payload);
        } else {
          BasicType bt = basic();
          if (bt.kind == BasicType::Kind::Cell && !input) {
            a = sent(bt.cell, bt.name);
          } else {
            a = input ? in_val(bt) : out_val(bt);
          }
        }
        ts_.expect(Tok::Dot, "'.' after prefix");
        return mk_prefix(std::move(a), unary());
      }
      case Tok::Ident: {
        if (t.text == "rec") {
          ts_.next();
          auto name = ts_.expect(Tok::Ident, "recursion variable").text;
          ts_.expect(Tok::Dot, "'.'");
          env_.push_back(name);
          Type body = unary();
          env_.pop_back();
          return mk_rec(body);
        }
        for (std::size_t i = env_.size(); i-- > 0;) {
          if (env_[i] == t.text) {
            ts_.next();
            return mk_var(static_cast<unsigned>(env_.size() - 1 - i));
          }
        }
        ts_.fail("unbound recursion variable '" + t.text + "'");
      }
      default:
        ts_.fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
  }

  BasicType basic() {
    auto t = ts_.peek();
    if (t.kind == Tok::Ident) {
      ts_.next();
      if (t.text == "empty") return BasicType::empty();
      if (!u_.has_named_type(t.text)) ts_.fail_at(t, "unknown basic type '" + t.text + "'");
      return BasicType::named(t.text);
    }
    if (t.kind == Tok::Atom) {
      ts_.next();
      std::string quoted = "'" + t.text + "'";
      if (!u_.has_singleton(quoted)) ts_.fail_at(t, "unknown singleton " + quoted);
      return BasicType::singleton(quoted);
    }
    if (t.kind == Tok::Less) {
      ts_.next();
      auto name = ts_.expect(Tok::Ident, "cell name");
      auto cell = u_.find_cell(name.text);
      if (!cell) ts_.fail_at(name, "unknown cell '" + name.text + "'");
      ts_.expect(Tok::Greater, "'>'");
      return BasicType::of_cell(*cell, name.text);
    }
    ts_.fail("expected a basic type");
  }

  TokenStream& ts_;
  const TypeUniverse& u_;
  std::vector<std::string> env_;
};

}  // namespace

namespace detail {

Type parse_type_tokens(TokenStream& ts, const TypeUniverse& u) { return TypeParser(ts, u).oplus(); }

BasicType parse_basic_tokens(TokenStream& ts, const TypeUniverse& u) { return TypeParser(ts, u).basic_type(); }

}  // namespace detail

Type parse_type(std::string_view text, const TypeUniverse& u) {
  TokenStream ts(detail::tokenize(text));
  TypeParser p(ts, u);
  Type t = p.oplus();
  if (!ts.at(Tok::End)) ts.fail("unexpected '" + ts.peek().text + "' after type");
  return t;
}

// ---------------------------------------------------------------------------
// Well-formedness

const char* violation_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::Contractivity: return "contractivity";
    case Violation::Kind::FiniteParallelism: return "finite-parallelism";
    case Violation::Kind::PayloadRecursion: return "payload-recursion";
    case Violation::Kind::Unbound: return "unbound-variable";
  }
  return "violation";
}

namespace {

bool unguarded(Type t, unsigned k) {
  if (t->free_depth <= k) return false;
  switch (t->kind) {
    case TypeKind::Var: return t->var == k;
    case TypeKind::Prefix: return false;
    case TypeKind::Rec: return unguarded(t->body(), k + 1);
    default:
      for (Type c : t->children) {
        if (unguarded(c, k)) return true;
      }
      return false;
  }
}

bool under_par(Type t, unsigned k, bool in_par) {
  if (t->free_depth <= k) return false;
  switch (t->kind) {
    case TypeKind::Var: return in_par && t->var == k;
    case TypeKind::Prefix: return under_par(t->cont(), k, in_par);
    case TypeKind::Rec: return under_par(t->body(), k + 1, in_par);
    default:
      for (Type c : t->children) {
        if (under_par(c, k, in_par || t->kind == TypeKind::Par)) return true;
      }
      return false;
  }
}

void check(Type t, unsigned depth, std::set<std::pair<std::uint64_t, unsigned>>& seen, std::vector<Violation>& out) {
  if (!seen.insert({t->id, depth}).second) return;
  switch (t->kind) {
    case TypeKind::Rec: {
      std::string shown = print_at(t, depth);
      std::string var = binder_name(depth);
      if (unguarded(t->body(), 0)) {
        out.push_back({Violation::Kind::Contractivity, "variable " + var + " occurs unguarded in " + shown});
      }
      if (under_par(t->body(), 0, false)) {
        out.push_back({Violation::Kind::FiniteParallelism, "variable " + var + " recurs through '|' in " + shown});
      }
      check(t->body(), depth + 1, seen, out);
      return;
    }
    case TypeKind::Prefix:
      if (t->action.payload) {
        if (!t->action.payload->closed()) {
          out.push_back({Violation::Kind::PayloadRecursion,
                         "channel payload mentions an enclosing recursion variable in " + print_at(t, depth)});
        }
        check(t->action.payload, depth, seen, out);
      }
      check(t->cont(), depth, seen, out);
      return;
    default:
      for (Type c : t->children) check(c, depth, seen, out);
  }
}

}  // namespace

std::vector<Violation> validate(Type t) {
  std::vector<Violation> out;
  if (!t->closed()) out.push_back({Violation::Kind::Unbound, "type has unbound recursion variables: " + to_string(t)});
  std::set<std::pair<std::uint64_t, unsigned>> seen;
  check(t, 0, seen, out);
  return out;
}

namespace {

unsigned weight_rec(Type t, std::unordered_map<Type, unsigned>& memo) {
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  unsigned w = 0;
  for (Type c : t->children) w = std::max(w, weight_rec(c, memo));
  if (t->kind == TypeKind::Prefix && t->action.payload) w = std::max(w, 1 + weight_rec(t->action.payload, memo));
  memo.emplace(t, w);
  return w;
}

}  // namespace

unsigned weight(Type t) {
  std::unordered_map<Type, unsigned> memo;
  return weight_rec(t, memo);
}

}  // namespace sessium
