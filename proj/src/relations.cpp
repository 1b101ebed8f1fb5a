#include "sessium/relations.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sessium {

// ---------------------------------------------------------------------------
// Tester space

namespace {

void collect_actions(Type t, std::vector<Action>& out, std::unordered_set<Type>& seen) {
  if (!seen.insert(t).second) return;
  if (t->kind == TypeKind::Prefix && std::find(out.begin(), out.end(), t->action) == out.end()) {
    out.push_back(t->action);
  }
  for (Type c : t->children) collect_actions(c, out, seen);
}

void add_action(std::vector<Action>& out, Action a) {
  if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(std::move(a));
}

void sort_actions(std::vector<Action>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Action& a, const Action& b) {
    return compare(mk_prefix(a, done_type()), mk_prefix(b, done_type())) < 0;
  });
}

// Calls f on each strictly increasing index combination of size 2..width.
bool for_each_combo(std::size_t n, unsigned width, const std::function<bool(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx;
  std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
    if (idx.size() >= 2 && !f(idx)) return false;
    if (idx.size() == width) return true;
    for (std::size_t i = start; i < n; ++i) {
      idx.push_back(i);
      bool go = rec(i + 1);
      idx.pop_back();
      if (!go) return false;
    }
    return true;
  };
  return rec(0);
}

bool distinct_actions(const std::vector<Type>& branches, const std::vector<std::size_t>& idx) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      Type x = branches[idx[a]];
      Type y = branches[idx[b]];
      if (x->kind == TypeKind::Prefix && y->kind == TypeKind::Prefix && x->action == y->action) return false;
    }
  }
  return true;
}

}  // namespace

TesterSpace::TesterSpace(std::vector<Action> alphabet, unsigned depth, unsigned width)
    : alphabet_(std::move(alphabet)), depth_(depth), width_(std::max(width, 1u)) {
  sort_actions(alphabet_);
}

std::vector<Action> TesterSpace::term_alphabet(const std::vector<Type>& terms) {
  std::vector<Action> out;
  std::unordered_set<Type> seen;
  for (Type t : terms) collect_actions(t, out, seen);
  sort_actions(out);
  return out;
}

std::vector<Action> TesterSpace::dual_alphabet(const std::vector<Type>& terms, const TypeUniverse& u) {
  std::vector<Action> out;
  for (const Action& a : term_alphabet(terms)) {
    switch (a.kind) {
      case ActionKind::InVal: {
        add_action(out, out_val(a.bt));
        CellSet cells = denote(a.bt, u);
        if (cells.size() > 1) {
          for (unsigned c : cells.cells()) add_action(out, sent(c, u.cell_name(c)));
        }
        break;
      }
      case ActionKind::OutVal: {
        add_action(out, in_val(a.bt));
        CellSet cells = denote(a.bt, u);
        if (cells.size() > 1) {
          for (unsigned c : cells.cells()) add_action(out, in_val(BasicType::of_cell(c, u.cell_name(c))));
        }
        break;
      }
      case ActionKind::Sent: add_action(out, in_val(BasicType::of_cell(a.bt.cell, a.bt.name))); break;
      case ActionKind::InCh: add_action(out, out_ch(a.payload)); break;
      case ActionKind::OutCh: add_action(out, in_ch(a.payload)); break;
    }
  }
  sort_actions(out);
  return out;
}

bool TesterSpace::enumerate(const std::function<bool(Type)>& visit) const {
  std::unordered_set<Type> seen;
  bool stopped = false;
  auto emit = [&](Type t) {
    if (!seen.insert(t).second) return true;
    if (!visit(t)) {
      stopped = true;
      return false;
    }
    return true;
  };
  if (!emit(done_type())) return false;

  std::vector<Type> below{done_type(), fail_type()};
  for (unsigned d = 1; d <= depth_; ++d) {
    std::vector<Type> branches{done_type()};
    for (const Action& a : alphabet_) {
      for (Type t : below) branches.push_back(mk_prefix(a, t));
    }
    for (std::size_t i = 1; i < branches.size(); ++i) {
      if (!emit(branches[i])) return false;
    }
    bool go = for_each_combo(branches.size(), width_, [&](const std::vector<std::size_t>& idx) {
      if (!distinct_actions(branches, idx)) return true;
      std::vector<Type> ops;
      for (std::size_t i : idx) ops.push_back(branches[i]);
      return emit(mk_ext(ops));
    });
    if (!go) return false;
    if (d == depth_) break;

    // Materialize the next level: everything above plus internal choices.
    std::vector<Type> next = below;
    std::unordered_set<Type> in_next(below.begin(), below.end());
    bool capped = false;
    auto keep = [&](Type t) {
      if (in_next.insert(t).second) next.push_back(t);
      if (next.size() > kLevelCap) capped = true;
      return !capped;
    };
    for (std::size_t i = 1; i < branches.size() && !capped; ++i) keep(branches[i]);
    if (!capped) {
      for_each_combo(branches.size(), width_, [&](const std::vector<std::size_t>& idx) {
        if (!distinct_actions(branches, idx)) return true;
        std::vector<Type> ops;
        for (std::size_t i : idx) ops.push_back(branches[i]);
        return keep(mk_ext(ops));
      });
    }
    if (!capped) {
      for_each_combo(branches.size(), width_, [&](const std::vector<std::size_t>& idx) {
        std::vector<Type> ops;
        for (std::size_t i : idx) ops.push_back(branches[i]);
        return keep(mk_int(ops));
      });
    }
    if (capped) return false;
    below = std::move(next);
  }
  return !stopped;
}

Type dual_type(Type t, bool classical) {
  switch (t->kind) {
    case TypeKind::Fail:
    case TypeKind::Done: return done_type();
    case TypeKind::Var: return t;
    case TypeKind::Rec: return mk_rec(dual_type(t->body(), classical));
    case TypeKind::Prefix: {
      const Action& a = t->action;
      Action d;
      switch (a.kind) {
        case ActionKind::InVal: d = out_val(a.bt); break;
        case ActionKind::OutVal: d = in_val(a.bt); break;
        case ActionKind::Sent: d = in_val(a.bt); break;
        case ActionKind::InCh: d = out_ch(a.payload); break;
        case ActionKind::OutCh: d = in_ch(a.payload); break;
      }
      return mk_prefix(d, dual_type(t->cont(), classical));
    }
    case TypeKind::Ext:
    case TypeKind::Int:
    case TypeKind::Par: {
      std::vector<Type> ch;
      for (Type c : t->children) ch.push_back(dual_type(c, classical));
      if (t->kind == TypeKind::Par) return mk_par(ch);
      bool ext = (t->kind == TypeKind::Ext) != classical;
      return ext ? mk_ext(ch) : mk_int(ch);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Analyzer

namespace {

constexpr int kViable = 0;
constexpr int kSub = 1;
constexpr int kStrong = 2;

std::string rel_text(Type l, const char* op, Type r) { return to_string(l) + " " + op + " " + to_string(r); }

// Rewrites ?t.a + ?t.b into ?t.(a (+) b) everywhere.
Type merge_inputs(Type t, const TypeUniverse& u, std::unordered_map<Type, Type>& memo) {
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  Type out = t;
  switch (t->kind) {
    case TypeKind::Prefix: out = mk_prefix(t->action, merge_inputs(t->cont(), u, memo)); break;
    case TypeKind::Rec: out = mk_rec(merge_inputs(t->body(), u, memo)); break;
    case TypeKind::Int:
    case TypeKind::Par: {
      std::vector<Type> ch;
      for (Type c : t->children) ch.push_back(merge_inputs(c, u, memo));
      out = t->kind == TypeKind::Int ? mk_int(ch) : mk_par(ch);
      break;
    }
    case TypeKind::Ext: {
      std::vector<Type> ch;
      for (Type c : t->children) ch.push_back(merge_inputs(c, u, memo));
      std::vector<Type> merged;
      std::vector<bool> used(ch.size(), false);
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (used[i]) continue;
        Type a = ch[i];
        if (a->kind != TypeKind::Prefix || a->action.kind != ActionKind::InVal) {
          merged.push_back(a);
          continue;
        }
        std::vector<Type> conts{a->cont()};
        for (std::size_t j = i + 1; j < ch.size(); ++j) {
          Type b = ch[j];
          if (!used[j] && b->kind == TypeKind::Prefix && b->action.kind == ActionKind::InVal &&
              denote(b->action.bt, u) == denote(a->action.bt, u)) {
            used[j] = true;
            conts.push_back(b->cont());
          }
        }
        merged.push_back(conts.size() == 1 ? a : mk_prefix(a->action, mk_int(conts)));
      }
      out = mk_ext(merged);
      break;
    }
    default: break;
  }
  memo.emplace(t, out);
  return out;
}

std::vector<Type> operands(Type t, TypeKind kind) {
  if (t->kind == kind) return t->children;
  return {t};
}

}  // namespace

Analyzer::Analyzer(const TypeUniverse& u, Bound bound) : u_(u), bound_(bound) {
  lts_ = std::make_unique<TypeLts>(u_, [this](Type a, Type b) { return payload_relation(a, b); });
}

bool Analyzer::is_complete(Type s) { return lts_->is_complete(s); }

std::optional<bool> Analyzer::complete_or_unknown(Type s) {
  try {
    return lts_->is_complete(s);
  } catch (const UndecidedSideCondition&) {
    return std::nullopt;
  } catch (const StateLimitExceeded&) {
    return std::nullopt;
  }
}

PayloadRelation Analyzer::payload_relation(Type sent, Type expected) {
  if (sent == expected) return PayloadRelation::Sub;
  Verdict v = subsession(sent, expected);
  if (v.is_yes()) return PayloadRelation::Sub;
  if (v.is_no()) return PayloadRelation::NotSub;
  return PayloadRelation::Unknown;
}

bool Analyzer::non_viable_by_closure(Type s) {
  TypeStateGraph g;
  try {
    g = lts_->build_graph(s, true);
  } catch (const UndecidedSideCondition&) {
    return false;
  } catch (const StateLimitExceeded&) {
    return false;
  }
  std::vector<std::vector<std::size_t>> rev(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    for (std::size_t m : g.edges[n]) rev[m].push_back(n);
  }
  std::vector<bool> hopeful(g.nodes.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (g.success_enabled[n]) {
      hopeful[n] = true;
      stack.push_back(n);
    }
  }
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    for (std::size_t p : rev[n]) {
      if (!hopeful[p]) {
        hopeful[p] = true;
        stack.push_back(p);
      }
    }
  }
  // Any state reached by internal steps alone from which even a fully
  // cooperative environment cannot lead to success.
  std::unordered_map<Type, std::size_t> index;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) index.emplace(g.nodes[n], n);
  std::vector<bool> seen(g.nodes.size(), false);
  stack.push_back(0);
  seen[0] = true;
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    if (!hopeful[n]) return true;
    for (Type next : lts_->step_internal(g.nodes[n])) {
      std::size_t m = index.at(next);
      if (!seen[m]) {
        seen[m] = true;
        stack.push_back(m);
      }
    }
  }
  return false;
}

std::optional<Type> Analyzer::find_completing_tester(Type s) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  s = hnf(s);
  if (auto it = testers_.find(s); it != testers_.end()) return it->second;
  std::optional<Type> found;
  std::size_t spent = 0;
  auto try_candidate = [&](Type cand) {
    ++spent;
    if (complete_or_unknown(mk_par(s, cand)) == std::optional<bool>(true)) {
      found = cand;
      return false;
    }
    return spent < bound_.budget;
  };
  std::vector<Type> first{dual_type(s, false), dual_type(s, true), done_type()};
  bool go = true;
  for (Type c : first) {
    if (!(go = try_candidate(c))) break;
  }
  if (go) {
    TesterSpace space(TesterSpace::dual_alphabet({s}, u_), bound_.depth, bound_.width);
    space.enumerate(try_candidate);
  }
  testers_.emplace(s, found);
  return found;
}

Verdict Analyzer::viability_uncached(Type s) {
  if (non_viable_by_closure(s)) {
    Verdict v = Verdict::no(nullptr, nullptr, "no success state is reachable even when every visible action is matched");
    return v;
  }
  if (auto t = find_completing_tester(s)) {
    return Verdict::yes({"completed by " + to_string(*t)}, *t);
  }
  std::ostringstream os;
  os << "no completing tester up to depth " << bound_.depth << ", width " << bound_.width << ", budget "
     << bound_.budget;
  return Verdict::unknown(os.str());
}

Verdict Analyzer::is_viable(Type s) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  s = hnf(s);
  auto key = std::make_tuple(kViable, s, s);
  if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
  Verdict v = viability_uncached(s);
  verdicts_.emplace(key, v);
  return v;
}

// ---------------------------------------------------------------------------
// Positive engine

std::optional<Analyzer::Derivation> Analyzer::derive(Type lhs, Type rhs, Rel rel) {
  lhs = hnf(lhs);
  rhs = hnf(rhs);
  auto key = std::make_tuple(static_cast<int>(rel), lhs, rhs);
  if (auto it = derivations_.find(key); it != derivations_.end()) return it->second;
  if (in_progress_.count(key)) return std::nullopt;
  in_progress_.insert(key);
  std::size_t before = in_progress_.size();
  auto out = rel == Rel::Strong ? derive_strong(lhs, rhs) : derive_weak(lhs, rhs);
  in_progress_.erase(key);
  // Failures observed while an enclosing goal was pending may depend on it.
  if (out || before == 1) derivations_.emplace(key, out);
  return out;
}

std::optional<Analyzer::Derivation> Analyzer::match_all(const std::vector<Type>& ls, const std::vector<Type>& rs,
                                                       Rel rel) {
  if (ls.size() != rs.size()) return std::nullopt;
  std::vector<bool> used(rs.size(), false);
  Derivation acc;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == ls.size()) return true;
    for (std::size_t j = 0; j < rs.size(); ++j) {
      if (used[j]) continue;
      auto d = derive(ls[i], rs[j], rel);
      if (!d) continue;
      used[j] = true;
      std::size_t mark = acc.size();
      acc.insert(acc.end(), d->begin(), d->end());
      if (go(i + 1)) return true;
      acc.resize(mark);
      used[j] = false;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return acc;
}

std::optional<Analyzer::Derivation> Analyzer::derive_strong(Type l, Type r) {
  auto with = [](std::string head, Derivation rest) {
    rest.insert(rest.begin(), std::move(head));
    return rest;
  };
  if (l == r) return Derivation{"L2: " + rel_text(l, "≃", r) + " (same normal form)"};

  std::unordered_map<Type, Type> memo;
  Type ml = hnf(merge_inputs(l, u_, memo));
  Type mr = hnf(merge_inputs(r, u_, memo));
  if (ml != l || mr != r) {
    if (auto d = derive(ml, mr, Rel::Strong)) {
      return with("L3: merge input branches, " + rel_text(l, "≃", ml) + " and " + rel_text(r, "≃", mr), *d);
    }
  }

  if (l->kind == TypeKind::Int) {
    for (Type c : l->children) {
      if (auto d = derive(c, r, Rel::Strong)) return with("L1: " + rel_text(l, "⊑", c), *d);
    }
    // A sub-multiset of branches on the right.
    if (r->kind == TypeKind::Int && r->children.size() < l->children.size()) {
      std::vector<Type> rest = l->children;
      bool all = true;
      for (Type c : r->children) {
        auto it = std::find(rest.begin(), rest.end(), c);
        if (it == rest.end()) {
          all = false;
          break;
        }
        rest.erase(it);
      }
      if (all) return Derivation{"L1: " + rel_text(l, "⊑", r) + " (drops branches of (+))"};
    }
  }

  // Internal steps only shrink the reachable states, under either choice context.
  if (l->kind == TypeKind::Par) {
    try {
      TypeStateGraph g = lts_->build_graph(l);
      if (std::find(g.nodes.begin() + 1, g.nodes.end(), r) != g.nodes.end()) {
        return Derivation{"R: " + to_string(l) + " reaches " + to_string(r) + " by internal steps"};
      }
    } catch (const UndecidedSideCondition&) {
    } catch (const StateLimitExceeded&) {
    }
  }

  if (l->kind == TypeKind::Ext || r->kind == TypeKind::Ext) {
    std::vector<Type> ls = operands(l, TypeKind::Ext);
    std::vector<Type> rs = operands(r, TypeKind::Ext);
    std::vector<Type> common;
    for (auto it = ls.begin(); it != ls.end();) {
      auto jt = std::find(rs.begin(), rs.end(), *it);
      if (jt != rs.end()) {
        common.push_back(*it);
        rs.erase(jt);
        it = ls.erase(it);
      } else {
        ++it;
      }
    }
    if (!ls.empty() && ls.size() == rs.size() && (!common.empty() || ls.size() > 1)) {
      if (auto d = match_all(ls, rs, Rel::Strong)) {
        return with("L5: " + rel_text(l, "⊑", r) + " (+ precongruence)", *d);
      }
    }
  }

  if (r == fail_type() && non_viable_by_closure(l)) {
    return Derivation{"P5: " + to_string(l) + " is not viable, so " + rel_text(l, "⊑", r)};
  }

  if (auto d = derive(l, r, Rel::Weak)) {
    Verdict v = is_viable(l);
    if (v.is_yes()) {
      return with("T6: " + to_string(l) + " is viable (tester " + to_string(v.witness) + "), lift ⪯ to ⊑", *d);
    }
  }
  return std::nullopt;
}

std::optional<Analyzer::Derivation> Analyzer::derive_weak(Type l, Type r) {
  auto with = [](std::string head, Derivation rest) {
    rest.insert(rest.begin(), std::move(head));
    return rest;
  };
  if (auto d = derive(l, r, Rel::Strong)) return d;
  if (non_viable_by_closure(l)) {
    return Derivation{"T6: " + to_string(l) + " is not viable, so " + rel_text(l, "⪯", r)};
  }

  if (l->kind == TypeKind::Prefix && r->kind == TypeKind::Prefix) {
    const Action& a = l->action;
    const Action& b = r->action;
    auto cont = [&](std::string head) -> std::optional<Derivation> {
      if (auto d = derive(l->cont(), r->cont(), Rel::Weak)) return with(std::move(head), *d);
      return std::nullopt;
    };
    bool out_a = a.kind == ActionKind::OutVal || a.kind == ActionKind::Sent;
    bool out_b = b.kind == ActionKind::OutVal || b.kind == ActionKind::Sent;
    if (out_a && out_b) {
      CellSet da = denote(a.bt, u_);
      CellSet db = denote(b.bt, u_);
      if (!db.empty() && db.subset_of(da)) {
        std::string rule = da == db && a == b ? "L4: prefix " : "L6: output covariance and prefix, ";
        if (auto d = cont(rule + rel_text(l, "⪯", r))) return d;
      }
    } else if (a.kind == ActionKind::InVal && b.kind == ActionKind::InVal) {
      if (denote(a.bt, u_) == denote(b.bt, u_)) {
        if (auto d = cont("L4: prefix " + rel_text(l, "⪯", r))) return d;
      }
    } else if (a.is_channel() && a.kind == b.kind && a.payload == b.payload) {
      if (auto d = cont("L4: prefix " + rel_text(l, "⪯", r))) return d;
    }
  }

  if (l->kind == TypeKind::Int && r->kind == TypeKind::Int) {
    if (auto d = match_all(l->children, r->children, Rel::Weak)) return with("L4: (+) precongruence", *d);
  }
  if (l->kind == TypeKind::Int) {
    for (Type c : l->children) {
      if (auto d = derive(c, r, Rel::Weak)) return with("L1: " + rel_text(l, "⊑", c), *d);
    }
  }
  if (r->kind == TypeKind::Int) {
    Derivation acc{"L4: (+) precongruence with " + rel_text(l, "≈", mk_int(std::vector<Type>(r->children.size(), l)))};
    bool all = true;
    for (Type c : r->children) {
      auto d = derive(l, c, Rel::Weak);
      if (!d) {
        all = false;
        break;
      }
      acc.insert(acc.end(), d->begin(), d->end());
    }
    if (all) return acc;
  }
  if (l->kind == TypeKind::Par && r->kind == TypeKind::Par) {
    if (auto d = match_all(l->children, r->children, Rel::Weak)) return with("L4: | precongruence", *d);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Refutation

Verdict Analyzer::refute_weak(Type l, Type r) {
  std::size_t spent = 0;
  bool undecided = false;
  Type witness = nullptr;
  auto try_tester = [&](Type rho) {
    ++spent;
    auto cl = complete_or_unknown(mk_par(l, rho));
    if (!cl) undecided = true;
    if (cl == std::optional<bool>(true)) {
      auto cr = complete_or_unknown(mk_par(r, rho));
      if (!cr) undecided = true;
      if (cr == std::optional<bool>(false)) {
        witness = rho;
        return false;
      }
    }
    return spent < bound_.budget;
  };
  bool go = true;
  for (Type c : {dual_type(l, false), dual_type(l, true), done_type()}) {
    if (!(go = try_tester(c))) break;
  }
  bool exhausted = false;
  if (go) {
    TesterSpace space(TesterSpace::dual_alphabet({l, r}, u_), bound_.depth, bound_.width);
    exhausted = space.enumerate(try_tester);
  }
  if (witness) return Verdict::no(witness, nullptr, "completes " + to_string(l) + " but not " + to_string(r));
  std::ostringstream os;
  os << "not refuted by " << spent << " testers up to depth " << bound_.depth << ", width " << bound_.width;
  if (!exhausted) os << " (budget " << bound_.budget << " reached)";
  if (undecided) os << "; some compositions were undecided";
  return Verdict::unknown(os.str());
}

Verdict Analyzer::subsession(Type lhs, Type rhs) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  Type l = hnf(lhs);
  Type r = hnf(rhs);
  auto key = std::make_tuple(kSub, l, r);
  if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
  Verdict v;
  if (auto d = derive(l, r, Rel::Weak)) {
    v = Verdict::yes(*d);
  } else {
    v = refute_weak(l, r);
  }
  verdicts_.emplace(key, v);
  return v;
}

Verdict Analyzer::refute_strong(Type l, Type r) {
  std::size_t spent = 0;
  bool undecided = false;
  Type witness = nullptr;
  Type context = nullptr;
  std::size_t limit = bound_.budget;

  auto search = [&](Type rho) -> bool {
    Type lr = mk_ext(l, rho);
    Type rr = mk_ext(r, rho);
    if (non_viable_by_closure(lr)) return true;
    auto try_tester = [&](Type sigma) {
      ++spent;
      auto cl = complete_or_unknown(mk_par(lr, sigma));
      if (!cl) undecided = true;
      if (cl == std::optional<bool>(true)) {
        auto cr = complete_or_unknown(mk_par(rr, sigma));
        if (!cr) undecided = true;
        if (cr == std::optional<bool>(false)) {
          witness = sigma;
          context = rho;
          return false;
        }
      }
      return spent < limit;
    };
    for (Type c : {dual_type(lr, false), dual_type(lr, true), done_type()}) {
      if (!try_tester(c)) return false;
    }
    unsigned depth = rho == fail_type() ? bound_.depth : std::min(bound_.depth, 2u);
    TesterSpace space(TesterSpace::dual_alphabet({l, r, rho}, u_), depth, bound_.width);
    space.enumerate(try_tester);
    return !witness && spent < limit;
  };

  // Plain subsession refutations first, then small choice contexts.
  limit = bound_.budget / 2;
  bool go = search(fail_type());
  bool exhausted_contexts = true;
  if (go && !witness) {
    limit = bound_.budget;
    std::vector<Type> contexts;
    TesterSpace rho_space(TesterSpace::term_alphabet({l, r}), 1, bound_.width);
    rho_space.enumerate([&](Type t) {
      contexts.push_back(t);
      return true;
    });
    std::stable_partition(contexts.begin(), contexts.end(), [](Type t) { return t->kind == TypeKind::Prefix; });
    for (Type rho : contexts) {
      if (!search(rho)) break;
    }
    exhausted_contexts = spent < limit;
  }
  if (witness) {
    return Verdict::no(witness, context,
                       "completes " + to_string(mk_ext(l, context)) + " but not " + to_string(mk_ext(r, context)));
  }
  std::ostringstream os;
  os << "not refuted by " << spent << " (context, tester) pairs up to depth " << bound_.depth << ", width "
     << bound_.width;
  if (!exhausted_contexts) os << " (budget " << bound_.budget << " reached)";
  if (undecided) os << "; some compositions were undecided";
  return Verdict::unknown(os.str());
}

Verdict Analyzer::strong_subsession(Type lhs, Type rhs) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  Type l = hnf(lhs);
  Type r = hnf(rhs);
  auto key = std::make_tuple(kStrong, l, r);
  if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
  Verdict v;
  if (auto d = derive(l, r, Rel::Strong)) {
    v = Verdict::yes(*d);
  } else {
    v = refute_strong(l, r);
  }
  verdicts_.emplace(key, v);
  return v;
}

Verdict Analyzer::equivalent(Type lhs, Type rhs, Strength strength) {
  bool strong = strength == Strength::Strong;
  Verdict fwd = strong ? strong_subsession(lhs, rhs) : subsession(lhs, rhs);
  Verdict bwd = strong ? strong_subsession(rhs, lhs) : subsession(rhs, lhs);
  const char* op = strong ? "⊑" : "⪯";
  if (fwd.is_no()) {
    fwd.note = "fails " + rel_text(lhs, op, rhs) + ": " + fwd.note;
    return fwd;
  }
  if (bwd.is_no()) {
    bwd.note = "fails " + rel_text(rhs, op, lhs) + ": " + bwd.note;
    return bwd;
  }
  if (fwd.is_yes() && bwd.is_yes()) {
    Derivation d;
    d.push_back("=> " + rel_text(lhs, op, rhs));
    d.insert(d.end(), fwd.derivation.begin(), fwd.derivation.end());
    d.push_back("<= " + rel_text(rhs, op, lhs));
    d.insert(d.end(), bwd.derivation.begin(), bwd.derivation.end());
    return Verdict::yes(d);
  }
  std::string note = fwd.is_yes() ? "only " + rel_text(lhs, op, rhs) + " derived; " + bwd.note
                     : bwd.is_yes() ? "only " + rel_text(rhs, op, lhs) + " derived; " + fwd.note
                                    : fwd.note;
  return Verdict::unknown(note);
}

// ---------------------------------------------------------------------------
// Consistency checks

ConsistencyReport Analyzer::check_prop5(Type s) {
  ConsistencyReport rep;
  Verdict viable = is_viable(s);
  Verdict below_zero = strong_subsession(s, fail_type());
  if (viable.definite() && below_zero.definite()) {
    if (viable.is_no() != below_zero.is_yes()) {
      rep.contradictions.push_back("non-viability of " + to_string(s) + " is " + tag_name(viable.tag) +
                                   " but s ⊑ 0 is " + tag_name(below_zero.tag));
    }
  } else {
    rep.notes.push_back("clause 1 not checked for " + to_string(s) + ": an indefinite verdict");
  }
  auto complete = complete_or_unknown(s);
  Verdict unit = strong_subsession(mk_ext(done_type(), s), s);
  if (complete && unit.definite()) {
    if (*complete != unit.is_yes()) {
      rep.contradictions.push_back(std::string("completeness of ") + to_string(s) + " is " +
                                   (*complete ? "true" : "false") + " but 1 + s ⊑ s is " + tag_name(unit.tag));
    }
  } else {
    rep.notes.push_back("clause 2 not checked for " + to_string(s) + ": an indefinite verdict");
  }
  return rep;
}

ConsistencyReport Analyzer::check_thm6(Type lhs, Type rhs) {
  ConsistencyReport rep;
  Verdict weak = subsession(lhs, rhs);
  Verdict zero = strong_subsession(lhs, fail_type());
  Verdict strong = strong_subsession(lhs, rhs);
  std::string pair = "(" + to_string(lhs) + ", " + to_string(rhs) + ")";
  if (weak.is_no() && (zero.is_yes() || strong.is_yes())) {
    rep.contradictions.push_back("⪯ refuted but a disjunct holds for " + pair);
  }
  if (weak.is_yes() && zero.is_no() && strong.is_no()) {
    rep.contradictions.push_back("⪯ derived but both disjuncts refuted for " + pair);
  }
  if (!weak.definite() || (!zero.definite() && !strong.is_yes()) || (!strong.definite() && !zero.is_yes())) {
    rep.notes.push_back("indefinite verdicts for " + pair);
  }
  return rep;
}

}  // namespace sessium
