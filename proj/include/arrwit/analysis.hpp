#pragma once

#include <arrwit/ast.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace arrwit {

/// An array together with its witness pair: `witness_var` stands for the
/// element at the nondeterministically fixed index `witness_idx`.
struct ArrayInfo {
  std::string name;
  Value size = 1;
  std::string witness_var;
  std::string witness_idx;

  bool operator==(const ArrayInfo&) const = default;
};

/// Highest valid index of the array.
inline Value lastof(const ArrayInfo& a) { return a.size - 1; }

/// Closed integer range of iterator values a loop takes, or one of the two
/// degenerate answers.
struct IndexRange {
  enum class Kind { Known, Empty, Unknown };
  Kind kind = Kind::Unknown;
  Value lo = 0;
  Value hi = 0;

  bool operator==(const IndexRange&) const = default;

  static IndexRange known(Value lo, Value hi) { return {Kind::Known, lo, hi}; }
  static IndexRange empty() { return {Kind::Empty, 0, 0}; }
  static IndexRange unknown() { return {Kind::Unknown, 0, 0}; }
  bool is_known() const { return kind == Kind::Known; }
};

struct LoopSummary {
  LocId loop_loc = 0;
  std::string iterator;
  bool full_access = false;
  std::set<std::string> defs;
  IndexRange bound;
};

namespace detail {

inline std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!taken.count(cand)) return cand;
  }
}

/// Calls `fn(array, index, is_write)` for every array access in the loop
/// body, descending into nested statements.
template <class Fn>
void for_each_access(const std::vector<Stmt>& body, Fn&& fn) {
  walk_stmts(body, [&](const Stmt& s) {
    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) && s.target.is_array())
      fn(s.target.name, *s.target.index, true);
    for (const Expr* e : own_exprs(s))
      for_each_expr(*e, [&](const Expr& x) {
        if (x.kind == ExprKind::ArrayRead) fn(x.name, x.index(), false);
      });
  });
}

/// break/continue statements that belong to this loop (not to a nested one).
inline bool has_own_jump(const std::vector<Stmt>& body) {
  for (const auto& s : body) {
    if (s.kind == StmtKind::Break || s.kind == StmtKind::Continue) return true;
    if (s.kind == StmtKind::For || s.kind == StmtKind::SingleTrip) continue;
    if (has_own_jump(s.body) || has_own_jump(s.orelse)) return true;
  }
  return false;
}

inline bool assigns_var(const std::vector<Stmt>& body, const std::string& v) {
  bool hit = false;
  walk_stmts(body, [&](const Stmt& s) {
    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) && !s.target.is_array() && s.target.name == v)
      hit = true;
    if (s.kind == StmtKind::For && s.iterator == v) hit = true;
    if (s.kind == StmtKind::WitnessInit && std::count(s.names.begin(), s.names.end(), v)) hit = true;
  });
  return hit;
}

inline bool reads_var(const Expr& e, const std::string& v) {
  bool hit = false;
  for_each_expr(e, [&](const Expr& x) { hit = hit || x.is_var(v); });
  return hit;
}

inline bool stmt_reads_var(const Stmt& s, const std::string& v) {
  bool hit = false;
  for (const Expr* e : own_exprs(s)) hit = hit || reads_var(*e, v);
  walk_stmts(s.body, [&](const Stmt& c) {
    for (const Expr* e : own_exprs(c)) hit = hit || reads_var(*e, v);
  });
  walk_stmts(s.orelse, [&](const Stmt& c) {
    for (const Expr* e : own_exprs(c)) hit = hit || reads_var(*e, v);
  });
  return hit;
}

/// Constant increment `c` when `step` is `it + c` with c > 0.
inline std::optional<Value> unit_increment(const Stmt& loop) {
  const Expr& s = loop.step;
  if (s.kind == ExprKind::Binary && s.op == BinOp::Add && s.args[0].is_var(loop.iterator) &&
      s.args[1].kind == ExprKind::Const && s.args[1].value > 0)
    return s.args[1].value;
  return std::nullopt;
}

/// Exclusive upper limit when the test is `it < c` or `it <= c`.
inline std::optional<Value> exclusive_limit(const Stmt& loop) {
  const Expr& t = loop.cond;
  if (t.kind != ExprKind::Binary || !t.args[0].is_var(loop.iterator) || t.args[1].kind != ExprKind::Const)
    return std::nullopt;
  if (t.op == BinOp::Lt) return t.args[1].value;
  if (t.op == BinOp::Le) return t.args[1].value + 1;
  return std::nullopt;
}

}  // namespace detail

/// One ArrayInfo per declared array, in declaration order, with witness
/// names `x_<a>` / `i_<a>` made unique against every declared name.
inline std::vector<ArrayInfo> collect_arrays(const Program& p) {
  std::set<std::string> taken;
  for (const auto& d : p.decls) taken.insert(d.name);
  std::vector<ArrayInfo> out;
  for (const auto& d : p.decls) {
    if (!d.is_array()) continue;
    ArrayInfo a;
    a.name = d.name;
    a.size = d.size;
    a.witness_var = detail::fresh_name("x_" + d.name, taken);
    taken.insert(a.witness_var);
    a.witness_idx = detail::fresh_name("i_" + d.name, taken);
    taken.insert(a.witness_idx);
    out.push_back(std::move(a));
  }
  return out;
}

inline const ArrayInfo* find_array(const std::vector<ArrayInfo>& arrays, const std::string& name) {
  for (const auto& a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

/// Iterator range of `for(i = c1; i < c2; i += c3)` (or `<=`) with constant
/// c1, c2 and c3 > 0. Any other header shape yields Unknown.
inline IndexRange loop_bound(const Stmt& loop) {
  if (loop.kind != StmtKind::For || loop.init.kind != ExprKind::Const) return IndexRange::unknown();
  auto inc = detail::unit_increment(loop);
  auto limit = detail::exclusive_limit(loop);
  if (!inc || !limit) return IndexRange::unknown();
  Value lo = loop.init.value;
  if (lo >= *limit) return IndexRange::empty();
  Value hi = lo + ((*limit - 1 - lo) / *inc) * *inc;
  return IndexRange::known(lo, hi);
}

/// Whether the loop provably touches every index of every array it accesses.
/// Decided syntactically: `for(i=0; i<K; i++)` (or `i<=K-1`), all accessed
/// arrays of size K, all indices exactly `i`, no own break/continue, no
/// assignment to `i` in the body, and no nested loop over the same arrays.
inline bool full_array_access(const Stmt& loop, const std::vector<ArrayInfo>& arrays) {
  if (loop.kind != StmtKind::For) return false;
  if (loop.init.kind != ExprKind::Const || loop.init.value != 0) return false;
  auto inc = detail::unit_increment(loop);
  auto limit = detail::exclusive_limit(loop);
  if (!inc || *inc != 1 || !limit) return false;
  const Value k = *limit;

  bool any = false;
  bool ok = true;
  std::set<std::string> accessed;
  detail::for_each_access(loop.body, [&](const std::string& a, const Expr& idx, bool) {
    any = true;
    accessed.insert(a);
    const ArrayInfo* info = find_array(arrays, a);
    if (!info || info->size != k) ok = false;
    if (!idx.is_var(loop.iterator)) ok = false;
  });
  if (!any || !ok) return false;
  if (detail::has_own_jump(loop.body)) return false;
  if (detail::assigns_var(loop.body, loop.iterator)) return false;

  bool nested_overlap = false;
  walk_stmts(loop.body, [&](const Stmt& s) {
    if (s.kind != StmtKind::For) return;
    detail::for_each_access(s.body, [&](const std::string& a, const Expr&, bool) {
      if (accessed.count(a)) nested_overlap = true;
    });
  });
  return !nested_overlap;
}

namespace detail {

/// A scalar whose body assignments all store the same constant may stay out
/// of loopdefs, provided one of those stores is unconditional at the top of
/// the body, nothing reads the scalar before that store, and the loop has no
/// own break/continue. Otherwise a later iteration could observe a value the
/// single transformed iteration never produces.
inline bool constant_only_def(const Stmt& loop, const std::string& v) {
  std::optional<Value> constant;
  bool all_const = true;
  walk_stmts(loop.body, [&](const Stmt& s) {
    if ((s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) && !s.target.is_array() && s.target.name == v) {
      if (s.value.kind != ExprKind::Const || (constant && *constant != s.value.value)) {
        all_const = false;
      } else {
        constant = s.value.value;
      }
    }
    if (s.kind == StmtKind::For && s.iterator == v) all_const = false;
  });
  if (!all_const || !constant) return false;
  if (has_own_jump(loop.body)) return false;
  if (reads_var(loop.cond, v) || reads_var(loop.step, v)) return false;
  for (const auto& s : loop.body) {
    if (s.kind == StmtKind::Assign && !s.target.is_array() && s.target.name == v) return true;
    if (stmt_reads_var(s, v)) return false;
  }
  return false;
}

}  // namespace detail

/// Over-approximation of the variables a loop may modify. Contains every
/// scalar assigned in the body (nested iterators included) except the loop's
/// own iterator and constant-only scalars, plus every array written at an
/// index other than the iterator.
inline std::set<std::string> loop_defs(const Stmt& loop) {
  std::set<std::string> out;
  std::set<std::string> scalars;
  walk_stmts(loop.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::Assign || s.kind == StmtKind::GuardedAssign) {
      if (s.target.is_array()) {
        if (!s.target.index->is_var(loop.iterator)) out.insert(s.target.name);
      } else {
        scalars.insert(s.target.name);
      }
    }
    if (s.kind == StmtKind::For) scalars.insert(s.iterator);
    if (s.kind == StmtKind::WitnessInit) scalars.insert(s.names.begin(), s.names.end());
  });
  for (const auto& v : scalars) {
    if (v == loop.iterator) continue;
    if (detail::constant_only_def(loop, v)) continue;
    out.insert(v);
  }
  return out;
}

inline LoopSummary summarize_loop(const Stmt& loop, const std::vector<ArrayInfo>& arrays) {
  LoopSummary s;
  s.loop_loc = loop.loc;
  s.iterator = loop.iterator;
  s.bound = loop_bound(loop);
  s.full_access = s.bound.is_known() && full_array_access(loop, arrays);
  s.defs = loop_defs(loop);
  return s;
}

/// Summaries for every loop in the program, keyed by location.
inline std::map<LocId, LoopSummary> summarize_loops(const Program& p, const std::vector<ArrayInfo>& arrays) {
  std::map<LocId, LoopSummary> out;
  walk_stmts(p.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::For) out.emplace(s.loc, summarize_loop(s, arrays));
  });
  return out;
}

}  // namespace arrwit
