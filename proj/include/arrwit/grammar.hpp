#pragma once

#include <arrwit/ast.hpp>

#include <set>
#include <string>
#include <vector>

namespace arrwit {

struct GrammarViolation {
  LocId loc = 0;
  std::string message;
};

struct ConformanceReport {
  bool conformant = true;
  int for_count = 0;
  int array_access_count = 0;
  /// Every witness-index initialisation sits in the leading run of statements.
  bool witness_init_first = true;
  std::vector<GrammarViolation> violations;
};

/// Checks `p` against the loop-free, array-free output grammar. When
/// `witness_indices` is non-empty, each of them must be initialised by the
/// leading `i_a = ... = nd(l, u)` statements.
inline ConformanceReport validate_output_grammar(const Program& p, const std::vector<std::string>& witness_indices = {}) {
  ConformanceReport r;
  auto violate = [&](LocId loc, std::string msg) {
    r.conformant = false;
    r.violations.push_back({loc, std::move(msg)});
  };

  std::size_t prefix = 0;
  std::set<std::string> initialised;
  while (prefix < p.body.size() && p.body[prefix].kind == StmtKind::WitnessInit) {
    const Stmt& s = p.body[prefix];
    if (s.value.kind != ExprKind::NdRange) violate(s.loc, "witness index initialised without nd(l, u)");
    initialised.insert(s.names.begin(), s.names.end());
    ++prefix;
  }
  for (const auto& w : witness_indices) {
    if (!initialised.count(w)) {
      r.witness_init_first = false;
      violate(p.body.empty() ? 0 : p.body.front().loc, "witness index '" + w + "' is not initialised first");
    }
  }

  for (const auto& d : p.decls)
    if (d.is_array()) violate(0, "array declaration '" + d.name + "' in output program");

  std::vector<const Stmt*> parents;
  std::size_t top_index = 0;
  std::function<void(const std::vector<Stmt>&, bool, int)> visit = [&](const std::vector<Stmt>& ss, bool top, int trip_depth) {
    for (const auto& s : ss) {
      if (top) {
        if (s.kind == StmtKind::WitnessInit && top_index >= prefix) {
          r.witness_init_first = false;
          violate(s.loc, "witness index initialisation after the first statement");
        }
        ++top_index;
      } else if (s.kind == StmtKind::WitnessInit) {
        r.witness_init_first = false;
        violate(s.loc, "nested witness index initialisation");
      }
      if (s.kind == StmtKind::For) {
        ++r.for_count;
        violate(s.loc, "loop statement");
      }
      if ((s.kind == StmtKind::Break || s.kind == StmtKind::Continue) && trip_depth == 0)
        violate(s.loc, "break/continue outside a single-trip block");
      if ((s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) && s.target.is_array()) {
        ++r.array_access_count;
        violate(s.loc, "array element write '" + s.target.name + "[...]'");
      }
      for (const Expr* e : own_exprs(s)) {
        for_each_expr(*e, [&](const Expr& x) {
          if (x.kind == ExprKind::ArrayRead) {
            ++r.array_access_count;
            violate(s.loc, "array element read '" + x.name + "[...]'");
          }
        });
      }
      int inner = trip_depth + (s.kind == StmtKind::SingleTrip || s.kind == StmtKind::For ? 1 : 0);
      visit(s.body, false, inner);
      visit(s.orelse, false, inner);
    }
  };
  visit(p.body, true, 0);
  if (!r.witness_init_first) r.conformant = false;
  return r;
}

/// True when `p` uses only the input grammar (no ternaries, nd, guarded or
/// single-trip statements, witness initialisations).
inline bool is_input_grammar(const Program& p, std::string* why = nullptr) {
  bool ok = true;
  walk_stmts(p.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::GuardedAssign || s.kind == StmtKind::SingleTrip || s.kind == StmtKind::WitnessInit) {
      if (ok && why) *why = "output-only statement at location " + std::to_string(s.loc);
      ok = false;
    }
    for (const Expr* e : own_exprs(s)) {
      for_each_expr(*e, [&](const Expr& x) {
        if (x.kind == ExprKind::Ternary || x.kind == ExprKind::Nd || x.kind == ExprKind::NdRange) {
          if (ok && why) *why = "output-only expression at location " + std::to_string(s.loc);
          ok = false;
        }
      });
    }
  });
  return ok;
}

}  // namespace arrwit
