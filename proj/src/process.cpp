#include "sessium/process.hpp"

#include <algorithm>
#include <functional>

#include "type_parse.hpp"

namespace sessium {

using detail::Tok;
using detail::TokenStream;

// ---------------------------------------------------------------------------
// Expressions

ExprPtr Expr::lit(Value v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Lit;
  e->value = std::move(v);
  return e;
}

ExprPtr Expr::var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::bin(char op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->args = {std::move(l), std::move(r)};
  return e;
}

ExprPtr Expr::app(std::string fn, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::App;
  e->name = std::move(fn);
  e->args = std::move(args);
  return e;
}

std::string Expr::str() const {
  switch (kind) {
    case Kind::Lit: return value.str();
    case Kind::Var: return name;
    case Kind::Bin: {
      auto side = [](const ExprPtr& e) { return e->kind == Kind::Bin ? "(" + e->str() + ")" : e->str(); };
      return side(args[0]) + op + side(args[1]);
    }
    case Kind::App: {
      std::string out = name + "(";
      for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i]->str();
      return out + ")";
    }
  }
  return "";
}

Value eval(const Expr& e, const TypeUniverse& u, const std::map<std::string, Value>& env) {
  switch (e.kind) {
    case Expr::Kind::Lit: return e.value;
    case Expr::Kind::Var: {
      auto it = env.find(e.name);
      if (it == env.end()) throw EvalError("unbound variable '" + e.name + "'");
      return it->second;
    }
    case Expr::Kind::Bin: {
      Value a = eval(*e.args[0], u, env);
      Value b = eval(*e.args[1], u, env);
      if (!a.is_numeric() || !b.is_numeric()) throw EvalError("arithmetic on non-numeric value in " + e.str());
      bool ints = a.kind == Value::Kind::Integer && b.kind == Value::Kind::Integer;
      if (e.op == '/' && b.as_double() == 0.0) throw EvalError("division by zero in " + e.str());
      if (ints) {
        switch (e.op) {
          case '+': return Value::make_integer(a.integer + b.integer);
          case '-': return Value::make_integer(a.integer - b.integer);
          case '*': return Value::make_integer(a.integer * b.integer);
          default: return Value::make_integer(a.integer / b.integer);
        }
      }
      double x = a.as_double();
      double y = b.as_double();
      switch (e.op) {
        case '+': return Value::make_decimal(x + y);
        case '-': return Value::make_decimal(x - y);
        case '*': return Value::make_decimal(x * y);
        default: return Value::make_decimal(x / y);
      }
    }
    case Expr::Kind::App: {
      const FunctionSymbol* f = u.function(e.name);
      if (!f) throw EvalError("unknown function '" + e.name + "'");
      std::vector<Value> args;
      for (const auto& a : e.args) args.push_back(eval(*a, u, env));
      auto r = f->apply(args);
      if (!r) throw EvalError("no table entry for " + e.str());
      return *r;
    }
  }
  throw EvalError("bad expression");
}

namespace {

CellSet numeric_cells(const TypeUniverse& u) {
  CellSet out;
  if (auto c = u.literal_class_cell(Value::Kind::Integer)) out |= CellSet::single(*c);
  if (auto c = u.literal_class_cell(Value::Kind::Decimal)) out |= CellSet::single(*c);
  return out;
}

}  // namespace

CellSet expr_cells(const Expr& e, const TypeUniverse& u, const std::map<std::string, BasicType>& gamma) {
  switch (e.kind) {
    case Expr::Kind::Lit: {
      auto c = u.cell_of(e.value);
      if (!c) throw EvalError("literal " + e.value.str() + " belongs to no cell");
      return CellSet::single(*c);
    }
    case Expr::Kind::Var: {
      auto it = gamma.find(e.name);
      if (it == gamma.end()) throw EvalError("untyped variable '" + e.name + "'");
      return denote(it->second, u);
    }
    case Expr::Kind::Bin: {
      CellSet a = expr_cells(*e.args[0], u, gamma);
      CellSet b = expr_cells(*e.args[1], u, gamma);
      CellSet num = numeric_cells(u);
      if (!a.subset_of(num) || !b.subset_of(num)) throw EvalError("arithmetic on non-numeric operand in " + e.str());
      auto ic = u.literal_class_cell(Value::Kind::Integer);
      if (ic && a.subset_of(CellSet::single(*ic)) && b.subset_of(CellSet::single(*ic))) return CellSet::single(*ic);
      return num;
    }
    case Expr::Kind::App: {
      const FunctionSymbol* f = u.function(e.name);
      if (!f) throw EvalError("unknown function '" + e.name + "'");
      if (f->param_types.size() != e.args.size()) throw EvalError("wrong number of arguments in " + e.str());
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (!expr_cells(*e.args[i], u, gamma).subset_of(u.named_type(f->param_types[i]))) {
          throw EvalError("argument " + std::to_string(i + 1) + " of " + e.str() + " is not of type " +
                          f->param_types[i]);
        }
      }
      return u.named_type(f->result_type);
    }
  }
  throw EvalError("bad expression");
}

BasicType expr_type(const Expr& e, const TypeUniverse& u, const std::map<std::string, BasicType>& gamma) {
  if (e.kind == Expr::Kind::Var) {
    auto it = gamma.find(e.name);
    if (it != gamma.end()) return it->second;
  }
  if (e.kind == Expr::Kind::Lit && u.has_singleton(e.value.str())) return BasicType::singleton(e.value.str());
  if (e.kind == Expr::Kind::App) {
    if (const FunctionSymbol* f = u.function(e.name)) {
      expr_cells(e, u, gamma);
      return BasicType::named(f->result_type);
    }
  }
  CellSet cells = expr_cells(e, u, gamma);
  if (auto name = u.smallest_named_type(cells)) return BasicType::named(*name);
  if (cells.size() == 1) {
    unsigned c = cells.cells()[0];
    return BasicType::of_cell(c, u.cell_name(c));
  }
  throw EvalError("no basic type covers " + e.str());
}

// ---------------------------------------------------------------------------
// Terms

std::string ProcPrefix::str() const {
  std::string ann = annotation ? ":" + to_string(annotation) : "";
  switch (kind) {
    case Kind::InVal: return subject + "?(" + var + ":" + bt.str() + ")";
    case Kind::OutVal: return subject + "!(" + expr->str() + ")";
    case Kind::InCh: return subject + "?[" + var + ann + "]";
    case Kind::OutCh: return subject + "![" + var + ann + "]";
  }
  return "";
}

ProcPtr Process::idle() {
  static const ProcPtr zero = std::make_shared<Process>();
  return zero;
}

ProcPtr Process::act(ProcPrefix prefix, ProcPtr cont, int line, int column) {
  auto p = std::make_shared<Process>();
  p->kind = Kind::Act;
  p->prefix = std::move(prefix);
  p->left = std::move(cont);
  p->line = line;
  p->column = column;
  return p;
}

ProcPtr Process::repl(ProcPtr body, std::vector<std::pair<std::string, Type>> ann, int line, int column) {
  auto p = std::make_shared<Process>();
  p->line = line;
  p->column = column;
  p->kind = Kind::Repl;
  p->left = std::move(body);
  p->repl_ann = std::move(ann);
  return p;
}

namespace {

ProcPtr binary(Process::Kind kind, ProcPtr l, ProcPtr r, int line = 0, int column = 0) {
  auto p = std::make_shared<Process>();
  p->kind = kind;
  p->left = std::move(l);
  p->right = std::move(r);
  p->line = line;
  p->column = column;
  return p;
}

}  // namespace

ProcPtr Process::ext(ProcPtr l, ProcPtr r, int line, int column) {
  return binary(Kind::Ext, std::move(l), std::move(r), line, column);
}
ProcPtr Process::intc(ProcPtr l, ProcPtr r) { return binary(Kind::Int, std::move(l), std::move(r)); }
ProcPtr Process::par(ProcPtr l, ProcPtr r) { return binary(Kind::Par, std::move(l), std::move(r)); }

ProcPtr Process::res(std::string name, ProcPtr body, int line, int column) {
  auto p = std::make_shared<Process>();
  p->line = line;
  p->column = column;
  p->kind = Kind::New;
  p->name = std::move(name);
  p->left = std::move(body);
  return p;
}

namespace {

int level(const Process& p) {
  switch (p.kind) {
    case Process::Kind::Int: return 0;
    case Process::Kind::Ext: return 1;
    case Process::Kind::Par: return 2;
    default: return 3;
  }
}

std::string print(const ProcPtr& p, int min_level) {
  std::string out;
  switch (p->kind) {
    case Process::Kind::Idle: out = "0"; break;
    case Process::Kind::Act: out = p->prefix.str() + "." + print(p->left, 3); break;
    case Process::Kind::Repl: {
      out = "*";
      if (!p->repl_ann.empty()) {
        out += "{";
        for (std::size_t i = 0; i < p->repl_ann.size(); ++i) {
          out += (i ? ", " : "") + p->repl_ann[i].first + ": " + to_string(p->repl_ann[i].second);
        }
        out += "} ";
      }
      out += print(p->left, 3);
      break;
    }
    case Process::Kind::New: out = "new " + p->name + "." + print(p->left, 3); break;
    case Process::Kind::Int: out = print(p->left, 0) + " (+) " + print(p->right, 1); break;
    case Process::Kind::Ext: out = print(p->left, 1) + " + " + print(p->right, 2); break;
    case Process::Kind::Par: out = print(p->left, 2) + " | " + print(p->right, 3); break;
  }
  return level(*p) < min_level ? "(" + out + ")" : out;
}

}  // namespace

std::string to_string(const ProcPtr& p) { return print(p, 0); }

// ---------------------------------------------------------------------------
// Parser

namespace {

class ProcParser {
 public:
  ProcParser(TokenStream& ts, const TypeUniverse& u) : ts_(ts), u_(u) {}

  ProcPtr file() {
    while (ts_.at_ident("let")) {
      ts_.next();
      auto name = ts_.expect(Tok::Ident, "constant name").text;
      ts_.expect(Tok::Equals, "'='");
      lets_[name] = literal();
    }
    ProcPtr p = oplus();
    if (!ts_.at(Tok::End)) ts_.fail("unexpected '" + ts_.peek().text + "' after process");
    return p;
  }

 private:
  ProcPtr oplus() {
    ProcPtr p = plus();
    while (ts_.accept(Tok::OPlus)) p = Process::intc(p, plus());
    return p;
  }

  ProcPtr plus() {
    const auto& start = ts_.peek();
    int line = start.line;
    int column = start.column;
    ProcPtr p = bar();
    while (ts_.accept(Tok::Plus)) p = Process::ext(p, bar(), line, column);
    return p;
  }

  ProcPtr bar() {
    ProcPtr p = unary();
    while (ts_.accept(Tok::Bar)) p = Process::par(p, unary());
    return p;
  }

  ProcPtr unary() {
    const auto t = ts_.peek();
    switch (t.kind) {
      case Tok::Integer:
        if (t.text != "0") ts_.fail("expected process, found '" + t.text + "'");
        ts_.next();
        return Process::idle();
      case Tok::LParen: {
        ts_.next();
        ProcPtr p = oplus();
        ts_.expect(Tok::RParen, "')'");
        return p;
      }
      case Tok::Star: {
        ts_.next();
        std::vector<std::pair<std::string, Type>> ann;
        if (ts_.accept(Tok::LBrace)) {
          do {
            auto name = ts_.expect(Tok::Ident, "channel name").text;
            ts_.expect(Tok::Colon, "':'");
            ann.emplace_back(name, detail::parse_type_tokens(ts_, u_));
          } while (ts_.accept(Tok::Comma));
          ts_.expect(Tok::RBrace, "'}'");
        }
        return Process::repl(unary(), std::move(ann), t.line, t.column);
      }
      case Tok::Ident: {
        if (t.text == "new") {
          ts_.next();
          auto name = ts_.expect(Tok::Ident, "channel name").text;
          ts_.expect(Tok::Dot, "'.'");
          scope_.push_back(name);
          ProcPtr body = unary();
          scope_.pop_back();
          return Process::res(name, body, t.line, t.column);
        }
        return action();
      }
      default:
        ts_.fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
  }

  ProcPtr action() {
    auto subj = ts_.next();
    ProcPrefix pre;
    pre.subject = subj.text;
    bool input;
    if (ts_.accept(Tok::Query)) {
      input = true;
    } else if (ts_.accept(Tok::Bang)) {
      input = false;
    } else {
      ts_.fail("expected '?' or '!' after '" + subj.text + "'");
    }
    if (ts_.accept(Tok::LParen)) {
      if (input) {
        pre.kind = ProcPrefix::Kind::InVal;
        pre.var = ts_.expect(Tok::Ident, "variable").text;
        ts_.expect(Tok::Colon, "':'");
        pre.bt = detail::parse_basic_tokens(ts_, u_);
      } else {
        pre.kind = ProcPrefix::Kind::OutVal;
        pre.expr = expr();
      }
      ts_.expect(Tok::RParen, "')'");
    } else {
      ts_.expect(Tok::LBracket, "'(' or '['");
      pre.kind = input ? ProcPrefix::Kind::InCh : ProcPrefix::Kind::OutCh;
      pre.var = ts_.expect(Tok::Ident, input ? "variable" : "channel").text;
      if (ts_.accept(Tok::Colon)) pre.annotation = detail::parse_type_tokens(ts_, u_);
      ts_.expect(Tok::RBracket, "']'");
    }
    ProcPtr cont = Process::idle();
    if (ts_.accept(Tok::Dot)) {
      if (pre.binds()) scope_.push_back(pre.var);
      cont = unary();
      if (pre.binds()) scope_.pop_back();
    }
    return Process::act(std::move(pre), cont, subj.line, subj.column);
  }

  Value literal() {
    auto t = ts_.next();
    switch (t.kind) {
      case Tok::Integer: return Value::make_integer(std::stoll(t.text));
      case Tok::Decimal: return Value::make_decimal(std::stod(t.text));
      case Tok::String: return Value::make_string(t.text);
      case Tok::Atom: return Value::make_atom(t.text);
      case Tok::Ident:
        if (t.text == "true" || t.text == "false") return Value::make_boolean(t.text == "true");
        [[fallthrough]];
      default: ts_.fail_at(t, "expected a literal");
    }
  }

  ExprPtr expr() {
    ExprPtr e = term();
    while (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
      char op = ts_.next().kind == Tok::Plus ? '+' : '-';
      e = Expr::bin(op, e, term());
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (ts_.at(Tok::Star) || ts_.at(Tok::Slash)) {
      char op = ts_.next().kind == Tok::Star ? '*' : '/';
      e = Expr::bin(op, e, factor());
    }
    return e;
  }

  ExprPtr factor() {
    const auto t = ts_.peek();
    if (t.kind == Tok::LParen) {
      ts_.next();
      ExprPtr e = expr();
      ts_.expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind == Tok::Minus) {
      ts_.next();
      return Expr::bin('-', Expr::lit(Value::make_integer(0)), factor());
    }
    if (t.kind == Tok::Ident && t.text != "true" && t.text != "false") {
      ts_.next();
      if (ts_.accept(Tok::LParen)) {
        if (!u_.function(t.text)) ts_.fail_at(t, "unknown function '" + t.text + "'");
        std::vector<ExprPtr> args;
        if (!ts_.at(Tok::RParen)) {
          do {
            args.push_back(expr());
          } while (ts_.accept(Tok::Comma));
        }
        ts_.expect(Tok::RParen, "')'");
        return Expr::app(t.text, std::move(args));
      }
      bool bound = std::find(scope_.begin(), scope_.end(), t.text) != scope_.end();
      if (!bound) {
        if (auto it = lets_.find(t.text); it != lets_.end()) return Expr::lit(it->second);
      }
      return Expr::var(t.text);
    }
    return Expr::lit(literal());
  }

  TokenStream& ts_;
  const TypeUniverse& u_;
  std::map<std::string, Value> lets_;
  std::vector<std::string> scope_;
};

}  // namespace

ProcPtr parse_process(std::string_view text, const TypeUniverse& u) {
  TokenStream ts(detail::tokenize(text));
  return ProcParser(ts, u).file();
}

// ---------------------------------------------------------------------------
// Names and substitution

namespace {

void expr_vars(const Expr& e, std::set<std::string>& out) {
  if (e.kind == Expr::Kind::Var) out.insert(e.name);
  for (const auto& a : e.args) expr_vars(*a, out);
}

// Free identifiers in every position; with `channels_only` expression
// variables are skipped.
void free_idents(const ProcPtr& p, bool channels_only, std::set<std::string>& bound, std::set<std::string>& out) {
  auto add = [&](const std::string& n) {
    if (!bound.count(n)) out.insert(n);
  };
  auto under = [&](const std::string& b, const ProcPtr& body) {
    bool fresh = bound.insert(b).second;
    free_idents(body, channels_only, bound, out);
    if (fresh) bound.erase(b);
  };
  switch (p->kind) {
    case Process::Kind::Idle: return;
    case Process::Kind::Act: {
      const auto& pre = p->prefix;
      add(pre.subject);
      if (pre.kind == ProcPrefix::Kind::OutCh) add(pre.var);
      if (pre.kind == ProcPrefix::Kind::OutVal && !channels_only) {
        std::set<std::string> vs;
        expr_vars(*pre.expr, vs);
        for (const auto& v : vs) add(v);
      }
      if (pre.binds()) {
        under(pre.var, p->left);
      } else {
        free_idents(p->left, channels_only, bound, out);
      }
      return;
    }
    case Process::Kind::Repl: free_idents(p->left, channels_only, bound, out); return;
    case Process::Kind::New: under(p->name, p->left); return;
    default:
      free_idents(p->left, channels_only, bound, out);
      free_idents(p->right, channels_only, bound, out);
  }
}

std::set<std::string> all_free(const ProcPtr& p) {
  std::set<std::string> bound;
  std::set<std::string> out;
  free_idents(p, false, bound, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  std::string stem = base;
  if (auto pos = stem.rfind('_'); pos != std::string::npos && pos + 1 < stem.size() &&
                                  std::all_of(stem.begin() + pos + 1, stem.end(), ::isdigit)) {
    stem.resize(pos);
  }
  for (int i = 1;; ++i) {
    std::string n = stem + "_" + std::to_string(i);
    if (!avoid.count(n)) return n;
  }
}

ExprPtr subst_expr(const ExprPtr& e, const std::string& x, const Message& m) {
  switch (e->kind) {
    case Expr::Kind::Lit: return e;
    case Expr::Kind::Var:
      if (e->name != x) return e;
      return m.is_name ? Expr::var(m.name) : Expr::lit(m.value);
    default: {
      std::vector<ExprPtr> args;
      bool changed = false;
      for (const auto& a : e->args) {
        args.push_back(subst_expr(a, x, m));
        changed |= args.back() != a;
      }
      if (!changed) return e;
      auto copy = std::make_shared<Expr>(*e);
      copy->args = std::move(args);
      return copy;
    }
  }
}

}  // namespace

std::set<std::string> free_names(const ProcPtr& p) {
  std::set<std::string> bound;
  std::set<std::string> out;
  free_idents(p, true, bound, out);
  return out;
}

ProcPtr substitute(const ProcPtr& p, const std::string& x, const Message& m) {
  switch (p->kind) {
    case Process::Kind::Idle: return p;
    case Process::Kind::Act: {
      ProcPrefix pre = p->prefix;
      if (m.is_name) {
        if (pre.subject == x) pre.subject = m.name;
        if (pre.kind == ProcPrefix::Kind::OutCh && pre.var == x) pre.var = m.name;
      }
      if (pre.kind == ProcPrefix::Kind::OutVal) pre.expr = subst_expr(pre.expr, x, m);
      ProcPtr cont = p->left;
      if (!pre.binds() || pre.var != x) {
        if (pre.binds() && m.is_name && pre.var == m.name && all_free(cont).count(x)) {
          std::set<std::string> avoid = all_free(cont);
          avoid.insert(m.name);
          avoid.insert(x);
          std::string b = fresh_name(pre.var, avoid);
          cont = substitute(cont, pre.var, Message::of_name(b));
          pre.var = b;
        }
        cont = substitute(cont, x, m);
      }
      return Process::act(std::move(pre), cont, p->line, p->column);
    }
    case Process::Kind::Repl: {
      auto ann = p->repl_ann;
      if (m.is_name) {
        for (auto& [name, t] : ann) {
          if (name == x) name = m.name;
        }
      }
      return Process::repl(substitute(p->left, x, m), std::move(ann));
    }
    case Process::Kind::New: {
      if (p->name == x) return p;
      std::string name = p->name;
      ProcPtr body = p->left;
      if (m.is_name && name == m.name && all_free(body).count(x)) {
        std::set<std::string> avoid = all_free(body);
        avoid.insert(m.name);
        avoid.insert(x);
        std::string b = fresh_name(name, avoid);
        body = substitute(body, name, Message::of_name(b));
        name = b;
      }
      return Process::res(name, substitute(body, x, m));
    }
    case Process::Kind::Ext:
      return Process::ext(substitute(p->left, x, m), substitute(p->right, x, m), p->line, p->column);
    case Process::Kind::Int: return Process::intc(substitute(p->left, x, m), substitute(p->right, x, m));
    case Process::Kind::Par: return Process::par(substitute(p->left, x, m), substitute(p->right, x, m));
  }
  return p;
}

namespace {

ProcPtr freshen_rec(const ProcPtr& p, std::set<std::string>& used) {
  auto rebind = [&](const std::string& name, ProcPtr body, std::string& out_name) {
    out_name = name;
    if (used.count(name)) {
      std::set<std::string> avoid = used;
      for (const auto& n : all_free(body)) avoid.insert(n);
      out_name = fresh_name(name, avoid);
      body = substitute(body, name, Message::of_name(out_name));
    }
    used.insert(out_name);
    return freshen_rec(body, used);
  };
  switch (p->kind) {
    case Process::Kind::Idle: return p;
    case Process::Kind::Act: {
      ProcPrefix pre = p->prefix;
      ProcPtr cont;
      if (pre.binds()) {
        std::string name;
        cont = rebind(pre.var, p->left, name);
        pre.var = name;
      } else {
        cont = freshen_rec(p->left, used);
      }
      return Process::act(std::move(pre), cont, p->line, p->column);
    }
    case Process::Kind::Repl: return Process::repl(freshen_rec(p->left, used), p->repl_ann);
    case Process::Kind::New: {
      std::string name;
      ProcPtr body = rebind(p->name, p->left, name);
      return Process::res(name, body);
    }
    case Process::Kind::Ext: {
      ProcPtr l = freshen_rec(p->left, used);
      return Process::ext(l, freshen_rec(p->right, used), p->line, p->column);
    }
    case Process::Kind::Int: {
      ProcPtr l = freshen_rec(p->left, used);
      return Process::intc(l, freshen_rec(p->right, used));
    }
    case Process::Kind::Par: {
      ProcPtr l = freshen_rec(p->left, used);
      return Process::par(l, freshen_rec(p->right, used));
    }
  }
  return p;
}

void flatten(const ProcPtr& p, Process::Kind kind, std::vector<ProcPtr>& out) {
  if (p->kind == kind) {
    flatten(p->left, kind, out);
    flatten(p->right, kind, out);
  } else {
    out.push_back(p);
  }
}

ProcPtr rebuild(Process::Kind kind, const std::vector<ProcPtr>& ops, int line, int column) {
  if (ops.empty()) return Process::idle();
  ProcPtr acc = ops[0];
  for (std::size_t i = 1; i < ops.size(); ++i) acc = binary(kind, acc, ops[i], line, column);
  return acc;
}

std::string key(const ProcPtr& p, std::map<std::string, std::string>& env, int depth) {
  auto nm = [&](const std::string& n) {
    auto it = env.find(n);
    return it == env.end() ? n : it->second;
  };
  auto under = [&](const std::string& b, const ProcPtr& body, std::string& shown) {
    auto saved = env.find(b) == env.end() ? std::optional<std::string>() : std::optional<std::string>(env[b]);
    shown = "$" + std::to_string(depth);
    env[b] = shown;
    std::string out = key(body, env, depth + 1);
    if (saved) {
      env[b] = *saved;
    } else {
      env.erase(b);
    }
    return out;
  };
  std::function<std::string(const Expr&)> ekey = [&](const Expr& e) -> std::string {
    switch (e.kind) {
      case Expr::Kind::Lit: return e.value.str();
      case Expr::Kind::Var: return nm(e.name);
      case Expr::Kind::Bin: return "(" + ekey(*e.args[0]) + e.op + ekey(*e.args[1]) + ")";
      case Expr::Kind::App: {
        std::string out = e.name + "(";
        for (const auto& a : e.args) out += ekey(*a) + ",";
        return out + ")";
      }
    }
    return "";
  };
  switch (p->kind) {
    case Process::Kind::Idle: return "0";
    case Process::Kind::Act: {
      const auto& pre = p->prefix;
      std::string s = nm(pre.subject);
      switch (pre.kind) {
        case ProcPrefix::Kind::OutVal: return s + "!(" + ekey(*pre.expr) + ")." + key(p->left, env, depth);
        case ProcPrefix::Kind::OutCh: return s + "![" + nm(pre.var) + "]." + key(p->left, env, depth);
        default: {
          std::string b;
          std::string body = under(pre.var, p->left, b);
          std::string head = pre.kind == ProcPrefix::Kind::InVal ? "?(" + b + ":" + pre.bt.str() + ")" : "?[" + b + "]";
          return s + head + "." + body;
        }
      }
    }
    case Process::Kind::Repl: return "*" + key(p->left, env, depth);
    case Process::Kind::New: {
      std::string b;
      std::string body = under(p->name, p->left, b);
      return "new " + b + "." + body;
    }
    default: {
      std::vector<ProcPtr> ops;
      flatten(p, p->kind, ops);
      std::vector<std::string> keys;
      for (const auto& o : ops) keys.push_back(key(o, env, depth));
      std::sort(keys.begin(), keys.end());
      std::string out = p->kind == Process::Kind::Par ? "(|" : p->kind == Process::Kind::Ext ? "(+" : "(o";
      for (const auto& k : keys) out += " " + k;
      return out + ")";
    }
  }
}

std::string plain_key(const ProcPtr& p) {
  std::map<std::string, std::string> env;
  return key(p, env, 0);
}

}  // namespace

ProcPtr freshen(const ProcPtr& p) {
  std::set<std::string> used = all_free(p);
  return freshen_rec(p, used);
}

ProcPtr normalize(const ProcPtr& p) {
  switch (p->kind) {
    case Process::Kind::Idle: return p;
    case Process::Kind::Act: return Process::act(p->prefix, normalize(p->left), p->line, p->column);
    case Process::Kind::Repl: return Process::repl(normalize(p->left), p->repl_ann);
    case Process::Kind::New: {
      ProcPtr body = normalize(p->left);
      if (!all_free(body).count(p->name)) return body;
      return Process::res(p->name, body);
    }
    default: {
      std::vector<ProcPtr> raw;
      flatten(p, p->kind, raw);
      std::vector<ProcPtr> ops;
      for (const auto& o : raw) {
        ProcPtr n = normalize(o);
        if (p->kind == Process::Kind::Par) {
          if (n->kind == Process::Kind::Idle) continue;
          if (n->kind == Process::Kind::Par) {
            flatten(n, Process::Kind::Par, ops);
            continue;
          }
        }
        ops.push_back(n);
      }
      std::stable_sort(ops.begin(), ops.end(),
                       [](const ProcPtr& a, const ProcPtr& b) { return plain_key(a) < plain_key(b); });
      return rebuild(p->kind, ops, p->line, p->column);
    }
  }
}

std::string canonical_key(const ProcPtr& p) { return plain_key(normalize(p)); }

// ---------------------------------------------------------------------------
// Transitions

Message Message::of_name(std::string n) {
  Message m;
  m.is_name = true;
  m.name = std::move(n);
  return m;
}

Message Message::of_value(Value v) {
  Message m;
  m.value = std::move(v);
  return m;
}

std::string Message::str() const { return is_name ? name : value.str(); }

bool Message::operator==(const Message& o) const {
  return is_name == o.is_name && (is_name ? name == o.name : value == o.value);
}

std::string ProcLabel::str() const {
  switch (kind) {
    case Kind::Tau: return "tau";
    case Kind::FreeIn: return channel + "?" + message.str();
    case Kind::FreeOut: return channel + "!" + message.str();
    case Kind::BoundOut: return channel + "!(" + message.str() + ")";
  }
  return "";
}

namespace {

struct OutCap {
  std::string chan;
  Message msg;
  std::optional<std::string> extruded;
  ProcPtr residual;
};

using InFn = std::function<ProcPtr(const Message&)>;

struct InCap {
  std::string chan;
  bool channel = false;
  BasicType bt;
  InFn residual;
};

struct Caps {
  std::vector<OutCap> outs;
  std::vector<InCap> ins;
};

Caps caps(const ProcPtr& p, const TypeUniverse& u) {
  Caps out;
  switch (p->kind) {
    case Process::Kind::Act: {
      const auto& pre = p->prefix;
      ProcPtr cont = p->left;
      switch (pre.kind) {
        case ProcPrefix::Kind::OutVal:
          try {
            out.outs.push_back({pre.subject, Message::of_value(eval(*pre.expr, u)), std::nullopt, cont});
          } catch (const EvalError&) {
          }
          break;
        case ProcPrefix::Kind::OutCh: out.outs.push_back({pre.subject, Message::of_name(pre.var), std::nullopt, cont}); break;
        default: {
          std::string var = pre.var;
          out.ins.push_back({pre.subject, pre.kind == ProcPrefix::Kind::InCh, pre.bt,
                             [cont, var](const Message& m) { return substitute(cont, var, m); }});
        }
      }
      break;
    }
    case Process::Kind::Ext: {
      Caps l = caps(p->left, u);
      Caps r = caps(p->right, u);
      out = std::move(l);
      out.outs.insert(out.outs.end(), r.outs.begin(), r.outs.end());
      out.ins.insert(out.ins.end(), r.ins.begin(), r.ins.end());
      break;
    }
    case Process::Kind::Par: {
      ProcPtr left = p->left;
      ProcPtr right = p->right;
      Caps l = caps(left, u);
      for (auto& c : l.outs) {
        c.residual = Process::par(c.residual, right);
        out.outs.push_back(std::move(c));
      }
      for (auto& c : l.ins) {
        auto f = std::make_shared<const InFn>(std::move(c.residual));
        c.residual = [f, right](const Message& m) { return Process::par((*f)(m), right); };
        out.ins.push_back(std::move(c));
      }
      Caps r = caps(right, u);
      for (auto& c : r.outs) {
        c.residual = Process::par(left, c.residual);
        out.outs.push_back(std::move(c));
      }
      for (auto& c : r.ins) {
        auto f = std::make_shared<const InFn>(std::move(c.residual));
        c.residual = [f, left](const Message& m) { return Process::par(left, (*f)(m)); };
        out.ins.push_back(std::move(c));
      }
      break;
    }
    case Process::Kind::New: {
      std::string name = p->name;
      Caps b = caps(p->left, u);
      for (auto& c : b.outs) {
        if (c.chan == name) continue;
        if (c.msg.is_name && c.msg.name == name && !c.extruded) {
          c.extruded = name;
        } else {
          c.residual = Process::res(name, c.residual);
        }
        out.outs.push_back(std::move(c));
      }
      for (auto& c : b.ins) {
        if (c.chan == name) continue;
        auto f = std::make_shared<const InFn>(std::move(c.residual));
        c.residual = [f, name](const Message& m) { return Process::res(name, (*f)(m)); };
        out.ins.push_back(std::move(c));
      }
      break;
    }
    default: break;
  }
  return out;
}

bool accepts(const InCap& in, const Message& m, const TypeUniverse& u) {
  if (in.channel != m.is_name) return false;
  if (m.is_name) return true;
  auto cell = u.cell_of(m.value);
  return cell && denote(in.bt, u).contains(*cell);
}

void taus(const ProcPtr& p, const TypeUniverse& u, std::vector<ProcPtr>& out) {
  switch (p->kind) {
    case Process::Kind::Int:
      out.push_back(p->left);
      out.push_back(p->right);
      return;
    case Process::Kind::Repl: out.push_back(Process::par(p, p->left)); return;
    case Process::Kind::Ext: {
      std::vector<ProcPtr> l;
      taus(p->left, u, l);
      for (auto& t : l) out.push_back(Process::ext(t, p->right, p->line, p->column));
      std::vector<ProcPtr> r;
      taus(p->right, u, r);
      for (auto& t : r) out.push_back(Process::ext(p->left, t, p->line, p->column));
      return;
    }
    case Process::Kind::Par: {
      std::vector<ProcPtr> comps;
      flatten(p, Process::Kind::Par, comps);
      auto with = [&](std::size_t i, ProcPtr pi, std::size_t j, ProcPtr pj) {
        std::vector<ProcPtr> next = comps;
        next[i] = std::move(pi);
        if (j < next.size()) next[j] = std::move(pj);
        return rebuild(Process::Kind::Par, next, p->line, p->column);
      };
      std::vector<Caps> cs;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        std::vector<ProcPtr> local;
        taus(comps[i], u, local);
        for (auto& t : local) out.push_back(with(i, t, comps.size(), nullptr));
        cs.push_back(caps(comps[i], u));
      }
      for (std::size_t i = 0; i < comps.size(); ++i) {
        for (const auto& o : cs[i].outs) {
          for (std::size_t j = 0; j < comps.size(); ++j) {
            if (j == i) continue;
            for (const auto& in : cs[j].ins) {
              if (o.chan != in.chan || !accepts(in, o.msg, u)) continue;
              ProcPtr joined = with(i, o.residual, j, in.residual(o.msg));
              if (o.extruded) joined = Process::res(*o.extruded, joined);
              out.push_back(joined);
            }
          }
        }
      }
      return;
    }
    case Process::Kind::New: {
      std::vector<ProcPtr> b;
      taus(p->left, u, b);
      for (auto& t : b) out.push_back(Process::res(p->name, t));
      return;
    }
    default: return;
  }
}

}  // namespace

std::vector<ProcPtr> tau_steps(const ProcPtr& p, const TypeUniverse& u) {
  std::vector<ProcPtr> out;
  taus(freshen(p), u, out);
  return out;
}

std::vector<ProcStep> proc_steps(const ProcPtr& p, const TypeUniverse& u) {
  ProcPtr q = freshen(p);
  std::vector<ProcStep> out;
  std::vector<ProcPtr> t;
  taus(q, u, t);
  for (auto& r : t) out.push_back({ProcLabel{}, r});
  Caps c = caps(q, u);
  for (const auto& o : c.outs) {
    ProcLabel l;
    l.kind = o.extruded ? ProcLabel::Kind::BoundOut : ProcLabel::Kind::FreeOut;
    l.channel = o.chan;
    l.message = o.msg;
    out.push_back({l, o.residual});
  }
  std::set<std::string> names = free_names(q);
  for (const auto& i : c.ins) {
    ProcLabel l;
    l.kind = ProcLabel::Kind::FreeIn;
    l.channel = i.chan;
    if (i.channel) {
      for (const auto& n : names) {
        l.message = Message::of_name(n);
        out.push_back({l, i.residual(l.message)});
      }
    } else {
      for (unsigned cell : denote(i.bt, u).cells()) {
        for (const auto& v : u.carriers(cell)) {
          l.message = Message::of_value(v);
          out.push_back({l, i.residual(l.message)});
        }
      }
    }
  }
  return out;
}

bool ready(const ProcPtr& p, const std::string& c) {
  if (!free_names(p).count(c)) return true;
  switch (p->kind) {
    case Process::Kind::Act: return p->prefix.subject == c;
    case Process::Kind::Ext:
    case Process::Kind::Par: return ready(p->left, c) && ready(p->right, c);
    case Process::Kind::New: return p->name != c && ready(p->left, c);
    default: return false;
  }
}

}  // namespace sessium
