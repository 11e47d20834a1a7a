#pragma once

#include <arrwit/analysis.hpp>
#include <arrwit/ast.hpp>
#include <arrwit/errors.hpp>
#include <arrwit/grammar.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arrwit {

struct TransformContext {
  std::vector<ArrayInfo> arrays;
  std::map<LocId, LoopSummary> summaries;
  std::optional<LocId> current_loop;

  static TransformContext build(const Program& p) {
    TransformContext ctx;
    ctx.arrays = collect_arrays(p);
    ctx.summaries = summarize_loops(p, ctx.arrays);
    return ctx;
  }

  const ArrayInfo& array(const std::string& name) const {
    const ArrayInfo* a = find_array(arrays, name);
    if (!a) throw TransformError("'" + name + "' is not a declared array");
    return *a;
  }
};

// Array reads become `(idx == i_a) ? x_a : nd()`, everything else is
// rebuilt around transformed operands.
inline Expr transform_expr(const Expr& e, const TransformContext& ctx) {
  switch (e.kind) {
    case ExprKind::Binary:
      return Expr::binary(e.op, transform_expr(e.args[0], ctx), transform_expr(e.args[1], ctx));
    case ExprKind::ArrayRead: {
      const ArrayInfo& a = ctx.array(e.name);
      Expr guard = Expr::binary(BinOp::Eq, transform_expr(e.index(), ctx), Expr::var(a.witness_idx));
      return Expr::ternary(std::move(guard), Expr::var(a.witness_var), Expr::nd());
    }
    case ExprKind::Const:
    case ExprKind::Var:
    case ExprKind::Input: return e;
    case ExprKind::Ternary:
    case ExprKind::Nd:
    case ExprKind::NdRange: throw TransformError("input program already contains nondeterministic expressions");
  }
  return e;
}

inline Stmt transform_loop(const Stmt& loop, TransformContext& ctx);

inline std::vector<Stmt> transform_stmts(const std::vector<Stmt>& ss, TransformContext& ctx);

inline Stmt transform_stmt(const Stmt& s, TransformContext& ctx) {
  switch (s.kind) {
    case StmtKind::Assign:
      if (s.target.is_array()) {
        const ArrayInfo& a = ctx.array(s.target.name);
        Expr guard = Expr::binary(BinOp::Eq, transform_expr(*s.target.index, ctx), Expr::var(a.witness_idx));
        return Stmt::guarded_assign(std::move(guard), LValue::var(a.witness_var), transform_expr(s.value, ctx));
      }
      return Stmt::assign(s.target, transform_expr(s.value, ctx));
    case StmtKind::For: return transform_loop(s, ctx);
    case StmtKind::If: return Stmt::if_(transform_expr(s.cond, ctx), transform_stmts(s.body, ctx));
    case StmtKind::IfElse:
      return Stmt::if_else(transform_expr(s.cond, ctx), transform_stmts(s.body, ctx), transform_stmts(s.orelse, ctx));
    case StmtKind::Seq: return Stmt::seq(transform_stmts(s.body, ctx));
    case StmtKind::Assert: return Stmt::assert_(transform_expr(s.cond, ctx));
    default: return s;
  }
}

inline std::vector<Stmt> transform_stmts(const std::vector<Stmt>& ss, TransformContext& ctx) {
  std::vector<Stmt> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(transform_stmt(s, ctx));
  return out;
}

namespace detail {

inline std::vector<Stmt> havoc(const LoopSummary& sum, const TransformContext& ctx) {
  std::vector<Stmt> out;
  for (const auto& u : sum.defs) {
    if (const ArrayInfo* a = find_array(ctx.arrays, u))
      out.push_back(Stmt::assign(a->witness_var, Expr::nd()));
    else
      out.push_back(Stmt::assign(u, Expr::nd()));
  }
  return out;
}

/// Arrays accessed anywhere in the loop body, in declaration order.
inline std::vector<const ArrayInfo*> accessed_arrays(const Stmt& loop, const TransformContext& ctx) {
  std::set<std::string> names;
  for_each_access(loop.body, [&](const std::string& a, const Expr&, bool) { names.insert(a); });
  std::vector<const ArrayInfo*> out;
  for (const auto& a : ctx.arrays)
    if (names.count(a.name)) out.push_back(&a);
  return out;
}

}  // namespace detail

// Full-access and guarded loops, plus break/continue and strides. The header is
// dropped; the transformed body runs once for a representative iteration,
// bracketed by nd() assignments to everything the loop may modify.
inline Stmt transform_loop(const Stmt& loop, TransformContext& ctx) {
  auto found = ctx.summaries.find(loop.loc);
  if (found == ctx.summaries.end()) throw TransformError("no loop summary for location " + std::to_string(loop.loc));
  const LoopSummary sum = found->second;
  const std::string& it = loop.iterator;

  auto saved = ctx.current_loop;
  ctx.current_loop = loop.loc;
  std::vector<Stmt> body = transform_stmts(loop.body, ctx);
  ctx.current_loop = saved;

  const auto accessed = detail::accessed_arrays(loop, ctx);
  const bool jumps = detail::has_own_jump(loop.body);
  const bool iterator_written = detail::assigns_var(loop.body, it);
  const auto inc = detail::unit_increment(loop);

  std::vector<Stmt> out;
  if (sum.full_access) {
    out = detail::havoc(sum, ctx);
    for (const ArrayInfo* a : accessed) out.push_back(Stmt::assign(it, Expr::var(a->witness_idx)));
    for (auto& s : body) out.push_back(std::move(s));
    for (auto& s : detail::havoc(sum, ctx)) out.push_back(std::move(s));
    out.push_back(Stmt::assign(it, Expr::constant(sum.bound.hi + 1)));
    return Stmt::seq(std::move(out));
  }

  IndexRange range = iterator_written ? IndexRange::unknown() : sum.bound;
  Expr pick;
  if (range.is_known()) {
    pick = Expr::nd_range(range.lo, range.hi);
  } else if (range.kind == IndexRange::Kind::Unknown && accessed.size() == 1) {
    pick = Expr::nd_range(0, lastof(*accessed.front()));
  } else {
    pick = Expr::nd();
  }

  if (range.is_known() && inc && *inc > 1) {
    Expr lattice = range.lo >= 0
                       ? Expr::binary(BinOp::Eq, Expr::binary(BinOp::Mod, Expr::var(it), Expr::constant(*inc)),
                                      Expr::constant(range.lo % *inc))
                       : Expr::binary(BinOp::Eq,
                                      Expr::binary(BinOp::Mod,
                                                   Expr::binary(BinOp::Sub, Expr::var(it), Expr::constant(range.lo)),
                                                   Expr::constant(*inc)),
                                      Expr::constant(0));
    std::vector<Stmt> guarded;
    guarded.push_back(Stmt::if_(std::move(lattice), std::move(body)));
    body = std::move(guarded);
  }
  if (jumps) {
    std::vector<Stmt> once;
    once.push_back(Stmt::single_trip(std::move(body)));
    body = std::move(once);
  }

  std::vector<Stmt> taken = detail::havoc(sum, ctx);
  taken.push_back(Stmt::assign(it, std::move(pick)));
  for (auto& s : body) taken.push_back(std::move(s));
  out.push_back(Stmt::if_(Expr::nd_range(0, 1), std::move(taken)));
  for (auto& s : detail::havoc(sum, ctx)) out.push_back(std::move(s));

  // Value of the iterator once the loop has finished.
  Expr exit_value = Expr::nd();
  if (!iterator_written && sum.bound.kind == IndexRange::Kind::Empty && loop.init.kind == ExprKind::Const) {
    exit_value = loop.init;
  } else if (!iterator_written && sum.bound.is_known() && inc) {
    exit_value = jumps ? Expr::nd_range(sum.bound.lo, sum.bound.hi + *inc) : Expr::constant(sum.bound.hi + *inc);
  }
  out.push_back(Stmt::assign(it, std::move(exit_value)));
  return Stmt::seq(std::move(out));
}

/// Rewrites an input-grammar program into the loop-free, array-free output
/// grammar. Witness indices of equally sized arrays share one initialisation.
inline Program transform_program(const Program& p) {
  std::string why;
  if (!is_input_grammar(p, &why)) throw TransformError(why);
  bool stray_jump = false;
  std::function<void(const std::vector<Stmt>&, int)> check = [&](const std::vector<Stmt>& ss, int depth) {
    for (const auto& s : ss) {
      if ((s.kind == StmtKind::Break || s.kind == StmtKind::Continue) && depth == 0) stray_jump = true;
      int d = depth + (s.kind == StmtKind::For ? 1 : 0);
      check(s.body, d);
      check(s.orelse, d);
    }
  };
  check(p.body, 0);
  if (stray_jump) throw TransformError("break/continue outside a loop");

  TransformContext ctx = TransformContext::build(p);

  Program out;
  for (const auto& a : ctx.arrays) out.decls.push_back(Decl::scalar(a.witness_var));
  for (const auto& a : ctx.arrays) out.decls.push_back(Decl::scalar(a.witness_idx));
  for (const auto& d : p.decls)
    if (!d.is_array()) out.decls.push_back(d);

  std::vector<Value> sizes;
  for (const auto& a : ctx.arrays)
    if (std::find(sizes.begin(), sizes.end(), a.size) == sizes.end()) sizes.push_back(a.size);
  for (Value size : sizes) {
    std::vector<std::string> names;
    for (const auto& a : ctx.arrays)
      if (a.size == size) names.push_back(a.witness_idx);
    out.body.push_back(Stmt::witness_init(std::move(names), Expr::nd_range(0, size - 1)));
  }
  for (auto& s : transform_stmts(p.body, ctx)) out.body.push_back(std::move(s));
  out.body = flatten(std::move(out.body));
  renumber(out);
  return out;
}

}  // namespace arrwit
