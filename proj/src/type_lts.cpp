#include "sessium/type_lts.hpp"

#include <algorithm>
#include <deque>
#include <unordered_set>

namespace sessium {

std::string TypeLabel::str(const TypeUniverse& u) const {
  switch (kind) {
    case Kind::Success: return "✓";
    case Kind::InCell: return "?<" + u.cell_name(cell) + ">";
    case Kind::OutCell: return "!<" + u.cell_name(cell) + ">";
    case Kind::InCh: return "?[" + to_string(payload) + "]";
    case Kind::OutCh: return "![" + to_string(payload) + "]";
  }
  return {};
}

std::size_t TypeStateGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges) n += e.size();
  return n;
}

PayloadOracle syntactic_payload_oracle() {
  return [](Type a, Type b) { return a == b ? PayloadRelation::Sub : PayloadRelation::Unknown; };
}

TypeLts::TypeLts(const TypeUniverse& u, PayloadOracle oracle, std::size_t max_nodes)
    : u_(u), oracle_(std::move(oracle)), max_nodes_(max_nodes) {}

namespace {

void push_unique(std::vector<Type>& out, Type t) {
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
}

std::vector<Type> replaced(const std::vector<Type>& v, std::size_t i, Type t) {
  std::vector<Type> out = v;
  out[i] = t;
  return out;
}

}  // namespace

const std::vector<Type>& TypeLts::internal_cached(Type s) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (auto it = internal_.find(s); it != internal_.end()) return it->second;
  auto out = compute_internal(s);
  return internal_.emplace(s, std::move(out)).first->second;
}

const TypeLts::Visible& TypeLts::visible_cached(Type s) {
  std::lock_guard<std::recursive_mutex> lock(mu_);
  if (auto it = visible_.find(s); it != visible_.end()) return it->second;
  auto out = compute_visible(s);
  return visible_.emplace(s, std::move(out)).first->second;
}

std::vector<Type> TypeLts::step_internal(Type s) { return internal_cached(hnf(s)); }
std::vector<std::pair<TypeLabel, Type>> TypeLts::step_visible(Type s) { return visible_cached(hnf(s)); }

bool TypeLts::success_enabled(Type s) {
  for (const auto& [label, next] : visible_cached(hnf(s))) {
    if (label.kind == TypeLabel::Kind::Success) return true;
  }
  return false;
}

std::vector<Type> TypeLts::compute_internal(Type s) {
  std::vector<Type> out;
  switch (s->kind) {
    case TypeKind::Prefix:
      if (s->action.kind == ActionKind::OutVal) {
        for (unsigned c : denote(s->action.bt, u_).cells()) {
          push_unique(out, hnf(mk_prefix(sent(c, u_.cell_name(c)), s->cont())));
        }
      }
      break;
    case TypeKind::Int:
      for (Type c : s->children) push_unique(out, hnf(c));
      break;
    case TypeKind::Ext:
      for (std::size_t i = 0; i < s->children.size(); ++i) {
        for (Type next : internal_cached(s->children[i])) {
          push_unique(out, hnf(mk_ext(replaced(s->children, i, next))));
        }
      }
      break;
    case TypeKind::Par: {
      const auto& ch = s->children;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        for (Type next : internal_cached(ch[i])) push_unique(out, hnf(mk_par(replaced(ch, i, next))));
      }
      for (std::size_t i = 0; i < ch.size(); ++i) {
        for (std::size_t j = 0; j < ch.size(); ++j) {
          if (i == j) continue;
          for (const auto& [li, ni] : visible_cached(ch[i])) {
            if (li.kind != TypeLabel::Kind::OutCell && li.kind != TypeLabel::Kind::OutCh) continue;
            for (const auto& [lj, nj] : visible_cached(ch[j])) {
              bool sync = false;
              bool error = false;
              if (li.kind == TypeLabel::Kind::OutCell && lj.kind == TypeLabel::Kind::InCell && li.cell == lj.cell) {
                sync = true;
              } else if (li.kind == TypeLabel::Kind::OutCh && lj.kind == TypeLabel::Kind::InCh) {
                switch (oracle_(li.payload, lj.payload)) {
                  case PayloadRelation::Sub: sync = true; break;
                  case PayloadRelation::NotSub: error = true; break;
                  case PayloadRelation::Unknown: throw UndecidedSideCondition(li.payload, lj.payload);
                }
              }
              if (!sync && !error) continue;
              std::vector<Type> rest;
              for (std::size_t k = 0; k < ch.size(); ++k) {
                if (k != i && k != j) rest.push_back(ch[k]);
              }
              if (sync) {
                rest.push_back(ni);
                rest.push_back(nj);
              } else {
                rest.push_back(fail_type());
              }
              push_unique(out, hnf(mk_par(rest)));
            }
          }
        }
      }
      break;
    }
    default: break;
  }
  return out;
}

TypeLts::Visible TypeLts::compute_visible(Type s) {
  Visible out;
  auto add = [&out](TypeLabel l, Type t) {
    for (const auto& [l2, t2] : out) {
      if (l2 == l && t2 == t) return;
    }
    out.emplace_back(l, t);
  };
  switch (s->kind) {
    case TypeKind::Done: add({TypeLabel::Kind::Success, 0, nullptr}, s); break;
    case TypeKind::Prefix: {
      const Action& a = s->action;
      Type next = hnf(s->cont());
      switch (a.kind) {
        case ActionKind::InVal:
          for (unsigned c : denote(a.bt, u_).cells()) add({TypeLabel::Kind::InCell, c, nullptr}, next);
          break;
        case ActionKind::Sent: add({TypeLabel::Kind::OutCell, a.bt.cell, nullptr}, next); break;
        case ActionKind::InCh: add({TypeLabel::Kind::InCh, 0, a.payload}, next); break;
        case ActionKind::OutCh: add({TypeLabel::Kind::OutCh, 0, a.payload}, next); break;
        case ActionKind::OutVal: break;
      }
      break;
    }
    case TypeKind::Ext:
      for (Type c : s->children) {
        for (const auto& [l, t] : visible_cached(c)) add(l, t);
      }
      break;
    case TypeKind::Par: {
      const auto& ch = s->children;
      std::vector<std::vector<Type>> done_succ(ch.size());
      bool all_done = true;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        for (const auto& [l, t] : visible_cached(ch[i])) {
          if (l.kind == TypeLabel::Kind::Success) {
            push_unique(done_succ[i], t);
          } else {
            add(l, hnf(mk_par(replaced(ch, i, t))));
          }
        }
        all_done = all_done && !done_succ[i].empty();
      }
      if (all_done) {
        std::vector<std::size_t> idx(ch.size(), 0);
        while (true) {
          std::vector<Type> pick;
          for (std::size_t i = 0; i < ch.size(); ++i) pick.push_back(done_succ[i][idx[i]]);
          add({TypeLabel::Kind::Success, 0, nullptr}, hnf(mk_par(pick)));
          std::size_t k = 0;
          while (k < ch.size() && ++idx[k] == done_succ[k].size()) idx[k++] = 0;
          if (k == ch.size()) break;
        }
      }
      break;
    }
    default: break;
  }
  return out;
}

TypeStateGraph TypeLts::build_graph(Type root, bool context_closed) {
  TypeStateGraph g;
  g.root = hnf(root);
  std::unordered_map<Type, std::size_t> index;
  std::deque<std::size_t> queue;
  auto intern_node = [&](Type t) {
    auto [it, fresh] = index.emplace(t, g.nodes.size());
    if (fresh) {
      if (g.nodes.size() >= max_nodes_) throw StateLimitExceeded(max_nodes_);
      g.nodes.push_back(t);
      g.edges.emplace_back();
      g.success_enabled.push_back(false);
      queue.push_back(it->second);
    }
    return it->second;
  };
  intern_node(g.root);
  while (!queue.empty()) {
    std::size_t n = queue.front();
    queue.pop_front();
    Type t = g.nodes[n];
    std::vector<std::size_t> succ;
    for (Type next : internal_cached(t)) succ.push_back(intern_node(next));
    for (const auto& [label, next] : visible_cached(t)) {
      if (label.kind == TypeLabel::Kind::Success) {
        g.success_enabled[n] = true;
      } else if (context_closed) {
        succ.push_back(intern_node(next));
      }
    }
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    g.edges[n] = std::move(succ);
  }
  return g;
}

bool TypeLts::is_complete(Type s) {
  Type root = hnf(s);
  {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (auto it = complete_.find(root); it != complete_.end()) return it->second;
  }
  TypeStateGraph g = build_graph(root);
  std::vector<std::vector<std::size_t>> rev(g.nodes.size());
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    for (std::size_t m : g.edges[n]) rev[m].push_back(n);
  }
  std::vector<bool> good(g.nodes.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t n = 0; n < g.nodes.size(); ++n) {
    if (g.success_enabled[n]) {
      good[n] = true;
      stack.push_back(n);
    }
  }
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    for (std::size_t p : rev[n]) {
      if (!good[p]) {
        good[p] = true;
        stack.push_back(p);
      }
    }
  }
  bool result = std::all_of(good.begin(), good.end(), [](bool b) { return b; });
  std::lock_guard<std::recursive_mutex> lock(mu_);
  complete_.emplace(root, result);
  return result;
}

}  // namespace sessium
