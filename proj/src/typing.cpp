#include "sessium/typing.hpp"

#include <algorithm>

namespace sessium {

const char* status_name(TypeStatus s) {
  switch (s) {
    case TypeStatus::WellTyped: return "WellTyped";
    case TypeStatus::WellTypedWithWarnings: return "WellTypedWithWarnings";
    case TypeStatus::Rejected: return "Rejected";
  }
  return "Rejected";
}

bool TypeReport::undecided() const {
  return std::any_of(checks.begin(), checks.end(), [](const TypeCheck& c) { return c.undecided; });
}

namespace {

Type lookup(const SessionEnv& env, const std::string& u) {
  auto it = env.find(u);
  return it == env.end() ? done_type() : it->second;
}

std::vector<std::string> keys_of(const std::vector<SessionEnv>& envs) {
  std::set<std::string> keys;
  for (const auto& e : envs) {
    for (const auto& [k, v] : e) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

void flatten(const ProcPtr& p, Process::Kind kind, std::vector<ProcPtr>& out) {
  if (p->kind == kind) {
    flatten(p->left, kind, out);
    flatten(p->right, kind, out);
  } else {
    out.push_back(p);
  }
}

std::string rel(Type a, const char* op, Type b) { return to_string(a) + " " + op + " " + to_string(b); }

class Inferrer {
 public:
  Inferrer(Analyzer& az, TypeReport* report) : az_(az), report_(report) {}

  SessionEnv go(const VarEnv& gamma, const ProcPtr& p) {
    switch (p->kind) {
      case Process::Kind::Idle: return {};
      case Process::Kind::Act: return prefix(gamma, p);
      case Process::Kind::Ext: return ext(gamma, p);
      case Process::Kind::Int: {
        std::vector<ProcPtr> branches;
        flatten(p, Process::Kind::Int, branches);
        std::vector<SessionEnv> envs;
        for (const auto& b : branches) envs.push_back(go(gamma, b));
        SessionEnv out;
        for (const auto& k : keys_of(envs)) {
          std::vector<Type> ts;
          for (const auto& e : envs) ts.push_back(lookup(e, k));
          out[k] = mk_int(ts);
        }
        note("t-int: pointwise (+) over " + std::to_string(branches.size()) + " branches");
        return out;
      }
      case Process::Kind::Par: {
        SessionEnv l = go(gamma, p->left);
        SessionEnv r = go(gamma, p->right);
        for (const auto& [k, t] : r) l[k] = l.count(k) ? mk_par(l[k], t) : t;
        return l;
      }
      case Process::Kind::Repl: return repl(gamma, p);
      case Process::Kind::New: {
        SessionEnv body = go(gamma, p->left);
        Type t = lookup(body, p->name);
        TypeCheck c{"t-res", p->name, p->loc(), to_string(t) + " is complete", {}};
        try {
          c.verdict = check_restriction(body, p->name, az_);
        } catch (const UndecidedSideCondition& e) {
          c.verdict = Verdict::unknown(e.what());
          c.undecided = true;
        } catch (const StateLimitExceeded& e) {
          c.verdict = Verdict::unknown(e.what());
        }
        record(std::move(c));
        if (report_) report_->restricted.emplace_back(p->name, t);
        note("t-res: " + p->name + " : " + to_string(t));
        body.erase(p->name);
        return body;
      }
    }
    return {};
  }

 private:
  SessionEnv prefix(const VarEnv& gamma, const ProcPtr& p) {
    const ProcPrefix& pre = p->prefix;
    const TypeUniverse& u = az_.universe();
    switch (pre.kind) {
      case ProcPrefix::Kind::InVal: {
        VarEnv g = gamma;
        g[pre.var] = pre.bt;
        SessionEnv env = go(g, p->left);
        if (env.count(pre.var)) {
          throw TypeError("t-input", p->loc(), "value variable '" + pre.var + "' is used as a channel");
        }
        env[pre.subject] = mk_prefix(in_val(pre.bt), lookup(env, pre.subject));
        return env;
      }
      case ProcPrefix::Kind::OutVal: {
        BasicType bt;
        try {
          bt = expr_type(*pre.expr, u, gamma);
        } catch (const EvalError& e) {
          throw TypeError("t-output", p->loc(), e.what());
        }
        SessionEnv env = go(gamma, p->left);
        Action a = out_val(bt);
        env[pre.subject] = mk_prefix(a, lookup(env, pre.subject));
        return env;
      }
      case ProcPrefix::Kind::InCh: {
        auto fn = free_names(p->left);
        fn.erase(pre.var);
        if (!fn.empty()) {
          throw TypeError("t-inputS", p->loc(),
                          "TInputSShape: continuation of " + pre.str() + " uses '" + *fn.begin() + "'");
        }
        SessionEnv body = go(gamma, p->left);
        Type inferred = lookup(body, pre.var);
        Type rho = inferred;
        if (pre.annotation) {
          rho = pre.annotation;
          TypeCheck c{"t-inputS", pre.var, p->loc(), rel(rho, "⊑", inferred), az_.strong_subsession(rho, inferred)};
          record(std::move(c));
        }
        note("t-inputS: " + pre.var + " : " + to_string(rho));
        SessionEnv env;
        env[pre.subject] = mk_prefix(in_ch(rho), done_type());
        return env;
      }
      case ProcPrefix::Kind::OutCh: {
        if (!pre.annotation) {
          throw TypeError("t-outputS", p->loc(), "MissingAnnotation: delegation " + pre.str() + " needs a type");
        }
        SessionEnv env = go(gamma, p->left);
        Type rho = pre.annotation;
        env[pre.subject] = mk_prefix(out_ch(rho), lookup(env, pre.subject));
        env[pre.var] = mk_par(lookup(env, pre.var), rho);
        return env;
      }
    }
    return {};
  }

  SessionEnv ext(const VarEnv& gamma, const ProcPtr& p) {
    std::vector<ProcPtr> branches;
    flatten(p, Process::Kind::Ext, branches);
    std::string subject;
    for (const auto& b : branches) {
      if (b->kind != Process::Kind::Act) {
        throw TypeError("t-ext", p->loc(), "TExtShape: branch " + to_string(b) + " is not a prefix");
      }
      if (subject.empty()) subject = b->prefix.subject;
      if (b->prefix.subject != subject) {
        throw TypeError("t-ext", p->loc(),
                        "TExtShape: branches start on '" + subject + "' and '" + b->prefix.subject + "'");
      }
    }
    std::vector<SessionEnv> envs;
    for (const auto& b : branches) envs.push_back(go(gamma, b));
    SessionEnv out;
    for (const auto& k : keys_of(envs)) {
      std::vector<Type> ts;
      for (const auto& e : envs) ts.push_back(lookup(e, k));
      out[k] = k == subject ? mk_ext(ts) : mk_int(ts);
    }
    note("t-ext: + on " + subject);
    return out;
  }

  SessionEnv repl(const VarEnv& gamma, const ProcPtr& p) {
    SessionEnv body = go(gamma, p->left);
    std::map<std::string, Type> ann(p->repl_ann.begin(), p->repl_ann.end());
    std::set<std::string> names;
    for (const auto& [k, t] : body) names.insert(k);
    for (const auto& [k, t] : ann) names.insert(k);
    SessionEnv out;
    for (const auto& k : names) {
      Type entry = lookup(body, k);
      auto it = ann.find(k);
      if (it != ann.end()) {
        Type s = it->second;
        record({"t-bang", k, p->loc(), rel(s, "⊑", entry), az_.strong_subsession(s, entry)});
        record({"t-bang", k, p->loc(), rel(s, "⊑", mk_par(s, s)), az_.strong_subsession(s, mk_par(s, s))});
        out[k] = s;
      } else {
        record({"t-bang", k, p->loc(), rel(entry, "⊑", mk_par(entry, entry)), check_replication(entry, {}, az_)});
        out[k] = entry;
      }
      note("t-bang: " + k + " : " + to_string(out[k]));
    }
    return out;
  }

  void record(TypeCheck c) {
    if (report_) report_->checks.push_back(std::move(c));
  }

  void note(std::string line) {
    if (report_) report_->derivation.push_back(std::move(line));
  }

  Analyzer& az_;
  TypeReport* report_;
};

}  // namespace

Verdict check_restriction(const SessionEnv& env, const std::string& c, Analyzer& az) {
  Type t = lookup(env, c);
  if (az.is_complete(t)) return Verdict::yes({to_string(t) + " is complete"});
  return Verdict::no(nullptr, nullptr, to_string(t) + " is not complete");
}

Verdict check_replication(Type entry, std::optional<Type> annotation, Analyzer& az) {
  if (annotation) {
    Type s = *annotation;
    return conjoin(az.strong_subsession(s, entry), az.strong_subsession(s, mk_par(s, s)));
  }
  return az.strong_subsession(entry, mk_par(entry, entry));
}

Verdict env_viable(const SessionEnv& env, Analyzer& az) {
  Verdict out = Verdict::yes({});
  for (const auto& [k, t] : env) {
    Verdict v = az.is_viable(t);
    if (!v.definite() || v.is_no()) v.note = k + " : " + to_string(t) + ": " + v.note;
    out = conjoin(out, v);
    if (out.is_no()) break;
  }
  return out;
}

SessionEnv infer(const VarEnv& gamma, const ProcPtr& p, Analyzer& az, TypeReport* report) {
  return Inferrer(az, report).go(gamma, p);
}

TypeReport typecheck(const ProcPtr& p, const VarEnv& gamma, Mode mode, Analyzer& az) {
  TypeReport rep;
  try {
    rep.env = infer(gamma, p, az, &rep);
  } catch (const TypeError& e) {
    rep.status = TypeStatus::Rejected;
    rep.shape_error = true;
    rep.rule = e.rule();
    rep.location = e.location();
    rep.reason = e.what();
    return rep;
  }
  for (const auto& [k, t] : rep.env) {
    rep.checks.push_back({"viability", k, "", to_string(t) + " is viable", az.is_viable(t)});
  }
  const TypeCheck* unknown = nullptr;
  for (const auto& c : rep.checks) {
    if (c.verdict.is_no()) {
      rep.status = TypeStatus::Rejected;
      rep.rule = c.rule;
      rep.location = c.location;
      rep.reason = c.subject + ": fails " + c.claim + (c.verdict.note.empty() ? "" : " (" + c.verdict.note + ")");
      return rep;
    }
    if (!c.verdict.definite() && !unknown) unknown = &c;
  }
  if (unknown) {
    if (mode == Mode::Strict) {
      rep.status = TypeStatus::Rejected;
      rep.rule = unknown->rule;
      rep.location = unknown->location;
      rep.reason = unknown->subject + ": cannot decide " + unknown->claim + " (" + unknown->verdict.note + ")";
    } else {
      rep.status = TypeStatus::WellTypedWithWarnings;
      rep.reason = unknown->subject + ": assumed " + unknown->claim;
    }
  }
  return rep;
}

}  // namespace sessium
