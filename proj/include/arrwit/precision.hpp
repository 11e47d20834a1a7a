#pragma once

#include <arrwit/analysis.hpp>
#include <arrwit/ast.hpp>
#include <arrwit/dataflow.hpp>
#include <arrwit/errors.hpp>
#include <arrwit/printer.hpp>

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace arrwit {

/// An array read `array[index]` in the statement at `loc`; `occurrence`
/// tells apart textually identical reads in one statement.
struct ArrayAccessRef {
  LocId loc = 0;
  std::string array;
  std::string index;
  int occurrence = 0;

  auto operator<=>(const ArrayAccessRef&) const = default;
};

struct DependenceClosure {
  LocId assertion_loop = 0;
  std::set<std::string> v_imp;
  std::set<ArrayAccessRef> e_imp;
  std::set<LocId> s_def;
  /// Every statement the assertion depends on (itself included).
  std::set<LocId> sites;
};

struct RuleViolation {
  std::string rule;
  LocId location = 0;
  std::string note;

  auto operator<=>(const RuleViolation&) const = default;
};

struct PrecisionVerdict {
  bool precise = true;
  std::vector<RuleViolation> violated_rules;
};

namespace detail {

struct SiteIndex {
  std::map<LocId, const Stmt*> stmt;
  std::map<LocId, std::vector<const Stmt*>> parents;

  explicit SiteIndex(const Program& p) {
    walk_stmts(p.body, [&](const Stmt& s, const std::vector<const Stmt*>& ps) {
      stmt[s.loc] = &s;
      parents[s.loc] = ps;
    });
  }

  /// Loops around `loc`, outermost first. A loop counts as enclosing its own
  /// header.
  std::vector<const Stmt*> loops(LocId loc) const {
    std::vector<const Stmt*> out;
    for (const Stmt* p : parents.at(loc))
      if (p->kind == StmtKind::For) out.push_back(p);
    if (stmt.at(loc)->kind == StmtKind::For) out.push_back(stmt.at(loc));
    return out;
  }

  bool inside(LocId loc, LocId loop) const {
    for (const Stmt* l : loops(loc))
      if (l->loc == loop) return true;
    return false;
  }
};

inline std::set<std::string> scalar_uses(const Stmt& s) {
  std::set<std::string> out;
  for (const Expr* e : own_exprs(s))
    for_each_expr(*e, [&](const Expr& x) {
      if (x.kind == ExprKind::Var) out.insert(x.name);
    });
  return out;
}

inline std::vector<const Expr*> array_reads(const Stmt& s) {
  std::vector<const Expr*> out;
  for (const Expr* e : own_exprs(s))
    for_each_expr(*e, [&](const Expr& x) {
      if (x.kind == ExprKind::ArrayRead) out.push_back(&x);
    });
  return out;
}

/// Scalars assigned on every path from the body entry of `loop` to each
/// statement of that body, within a single iteration.
class MustDefs {
 public:
  std::map<LocId, std::set<std::string>> in;

  MustDefs(const Stmt& loop, const std::map<LocId, LoopSummary>& summaries) : summaries_(summaries) {
    run(loop.body, std::set<std::string>{});
  }

 private:
  using Flow = std::optional<std::set<std::string>>;

  static Flow meet(const Flow& a, const Flow& b) {
    if (!a) return b;
    if (!b) return a;
    std::set<std::string> out;
    std::set_intersection(a->begin(), a->end(), b->begin(), b->end(), std::inserter(out, out.end()));
    return out;
  }

  void record(LocId loc, const Flow& f) {
    if (!f) return;
    auto [it, fresh] = in.emplace(loc, *f);
    if (!fresh) {
      std::set<std::string> out;
      std::set_intersection(it->second.begin(), it->second.end(), f->begin(), f->end(), std::inserter(out, out.end()));
      it->second = std::move(out);
    }
  }

  Flow run(const std::vector<Stmt>& ss, Flow f) {
    for (const auto& s : ss) f = step(s, std::move(f));
    return f;
  }

  Flow step(const Stmt& s, Flow f) {
    record(s.loc, f);
    if (!f) return f;
    switch (s.kind) {
      case StmtKind::Assign:
        if (!s.target.is_array()) f->insert(s.target.name);
        return f;
      case StmtKind::If: run(s.body, f); return f;
      case StmtKind::IfElse: return meet(run(s.body, f), run(s.orelse, f));
      case StmtKind::Break:
      case StmtKind::Continue: return std::nullopt;
      case StmtKind::For: {
        const LoopSummary& sum = summaries_.at(s.loc);
        Flow body = f;
        if (sum.full_access) body->insert(s.iterator);
        for (const auto& d : sum.defs) body->erase(d);
        run(s.body, body);
        // After the loop its havocked variables are unknown again; the
        // iterator itself ends at a fixed value only in the full-access case.
        for (const auto& d : sum.defs) f->erase(d);
        if (!sum.full_access) f->erase(s.iterator);
        return f;
      }
      default: return f;
    }
  }

  const std::map<LocId, LoopSummary>& summaries_;
};

struct ClosureWork {
  DependenceClosure closure;
  std::set<LocId> def_sites;
};

inline ClosureWork closure_of(const SiteIndex& idx, const ReachingDefs& rd, LocId assertion) {
  auto found = idx.stmt.find(assertion);
  if (found == idx.stmt.end() || found->second->kind != StmtKind::Assert)
    throw AssertionNotInLoop(assertion);
  auto loops = idx.loops(assertion);
  if (loops.empty()) throw AssertionNotInLoop(assertion);

  ClosureWork w;
  DependenceClosure& c = w.closure;
  c.assertion_loop = loops.back()->loc;

  std::vector<LocId> work{assertion};
  auto add = [&](LocId loc) {
    if (c.sites.insert(loc).second) work.push_back(loc);
  };
  c.sites.insert(assertion);
  while (!work.empty()) {
    LocId loc = work.back();
    work.pop_back();
    const Stmt& s = *idx.stmt.at(loc);
    // Control dependence: enclosing branches. Loop headers enter only through
    // the iterator's definitions; every loop around a site is checked anyway.
    for (const Stmt* par : idx.parents.at(loc))
      if (par->kind == StmtKind::If || par->kind == StmtKind::IfElse) add(par->loc);
    for (const auto& v : scalar_uses(s))
      for (LocId d : rd.at(loc, v)) {
        w.def_sites.insert(d);
        add(d);
      }
    for (const Expr* r : array_reads(s))
      for (LocId d : rd.at(loc, r->name)) {
        w.def_sites.insert(d);
        add(d);
      }
  }

  for (LocId loc : c.sites) {
    if (!idx.inside(loc, c.assertion_loop)) continue;
    const Stmt& s = *idx.stmt.at(loc);
    for (const auto& v : scalar_uses(s)) c.v_imp.insert(v);
    for (const Expr* r : array_reads(s)) {
      ArrayAccessRef ref{loc, r->name, print_expr(r->index()), 0};
      while (c.e_imp.count(ref)) ++ref.occurrence;
      c.e_imp.insert(std::move(ref));
    }
  }
  for (LocId d : w.def_sites)
    for (const Stmt* l : idx.loops(d))
      if (l->loc != c.assertion_loop) c.s_def.insert(l->loc);
  return w;
}

}  // namespace detail

/// Variables, array reads and defining loops the assertion at `assertion`
/// depends on. Throws AssertionNotInLoop for assertions outside loops.
inline DependenceClosure dependence_closure(const Program& p, LocId assertion) {
  detail::SiteIndex idx(p);
  return detail::closure_of(idx, reaching_definitions(p), assertion).closure;
}

/// Decides whether the transformation is exact for the assertion. Every rule
/// is checked over all statements in the dependence closure; a scalar that a
/// loop havocs is tolerated only when the same iteration redefines it on
/// every path before the use.
inline PrecisionVerdict classify(const Program& p, LocId assertion) {
  detail::SiteIndex idx(p);
  ReachingDefs rd = reaching_definitions(p);
  detail::ClosureWork w = detail::closure_of(idx, rd, assertion);
  const DependenceClosure& c = w.closure;

  auto arrays = collect_arrays(p);
  auto summaries = summarize_loops(p, arrays);
  std::map<LocId, detail::MustDefs> must;
  auto must_at = [&](LocId loop, LocId site) -> const std::set<std::string>* {
    auto it = must.find(loop);
    if (it == must.end()) it = must.emplace(loop, detail::MustDefs(*idx.stmt.at(loop), summaries)).first;
    auto s = it->second.in.find(site);
    return s == it->second.in.end() ? nullptr : &s->second;
  };

  std::set<RuleViolation> found;
  auto violate = [&](std::string rule, LocId loc, std::string note) { found.insert({std::move(rule), loc, std::move(note)}); };

  std::set<LocId> checked_loops;
  for (LocId loc : c.sites)
    for (const Stmt* l : idx.loops(loc)) checked_loops.insert(l->loc);
  for (LocId l : checked_loops)
    if (!summaries.at(l).full_access) violate("l1", l, "loop does not access every array element");

  // Havocked value of `var` (scalar or array) may reach a use at `loc`.
  auto havocked = [&](const std::string& var, LocId loc, bool scalar) -> std::optional<std::string> {
    for (const Stmt* l : idx.loops(loc)) {
      if (!summaries.at(l->loc).defs.count(var)) continue;
      if (scalar && l->loc != loc) {
        const auto* defined = must_at(l->loc, loc);
        if (defined && defined->count(var)) continue;
      }
      return "'" + var + "' is modified by the enclosing loop at " + std::to_string(l->loc);
    }
    for (LocId d : rd.at(loc, var))
      for (const Stmt* l : idx.loops(d)) {
        if (idx.inside(loc, l->loc) || !summaries.at(l->loc).defs.count(var)) continue;
        return "'" + var + "' reaches from the loop at " + std::to_string(l->loc);
      }
    return std::nullopt;
  };

  for (LocId loc : c.sites) {
    const Stmt& s = *idx.stmt.at(loc);
    const bool in_loop = idx.inside(loc, c.assertion_loop);
    auto loops = idx.loops(loc);

    for (const auto& v : detail::scalar_uses(s))
      if (auto why = havocked(v, loc, true)) violate(in_loop ? "s4" : "d6", loc, *why);

    for (const Expr* r : detail::array_reads(s)) {
      if (loops.empty()) {
        violate("d5", loc, "array read '" + r->name + "' outside loops");
        continue;
      }
      if (!r->index().is_var(loops.back()->iterator))
        violate(in_loop ? "a2" : "d5", loc,
                "index of '" + r->name + "' is '" + print_expr(r->index()) + "', not the loop iterator");
      if (auto why = havocked(r->name, loc, false)) violate(in_loop ? "a3" : "d5", loc, *why);
    }

    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) && s.target.is_array()) {
      if (loops.empty())
        violate("d5", loc, "array write '" + s.target.name + "' outside loops");
      else if (!s.target.index->is_var(loops.back()->iterator))
        violate("d5", loc, "write index of '" + s.target.name + "' is not the loop iterator");
    }
  }

  PrecisionVerdict v;
  v.violated_rules.assign(found.begin(), found.end());
  std::stable_sort(v.violated_rules.begin(), v.violated_rules.end(),
                   [](const RuleViolation& a, const RuleViolation& b) {
                     return std::tie(a.location, a.rule) < std::tie(b.location, b.rule);
                   });
  v.precise = v.violated_rules.empty();
  return v;
}

/// Locations of every assertion in the program, in source order.
inline std::vector<LocId> assertions(const Program& p) {
  std::vector<LocId> out;
  walk_stmts(p.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::Assert) out.push_back(s.loc);
  });
  return out;
}

}  // namespace arrwit
