#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arrwit {

using Value = std::int64_t;
using LocId = int;

enum class BinOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

inline std::string_view spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

/// Binding strength used by both the parser and the printer.
inline int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div:
    case BinOp::Mod: return 6;
  }
  return 0;
}

enum class ExprKind {
  Const,      // value
  Var,        // name
  ArrayRead,  // name[args[0]]
  Binary,     // args[0] op args[1]
  Ternary,    // args[0] ? args[1] : args[2]   (output grammar only)
  Nd,         // nd()                            (output grammar only)
  NdRange,    // nd(args[0], args[1])            (output grammar only)
  Input,      // input() / user_input(): an environment-provided value
};

struct Expr {
  ExprKind kind = ExprKind::Const;
  BinOp op = BinOp::Add;
  Value value = 0;
  std::string name;
  std::vector<Expr> args;

  bool operator==(const Expr&) const = default;

  static Expr constant(Value v) {
    Expr e;
    e.kind = ExprKind::Const;
    e.value = v;
    return e;
  }
  static Expr var(std::string n) {
    Expr e;
    e.kind = ExprKind::Var;
    e.name = std::move(n);
    return e;
  }
  static Expr array_read(std::string array, Expr index) {
    Expr e;
    e.kind = ExprKind::ArrayRead;
    e.name = std::move(array);
    e.args.push_back(std::move(index));
    return e;
  }
  static Expr binary(BinOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.op = op;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }
  static Expr ternary(Expr c, Expr t, Expr f) {
    Expr e;
    e.kind = ExprKind::Ternary;
    e.args.push_back(std::move(c));
    e.args.push_back(std::move(t));
    e.args.push_back(std::move(f));
    return e;
  }
  static Expr nd() {
    Expr e;
    e.kind = ExprKind::Nd;
    return e;
  }
  static Expr nd_range(Expr lo, Expr hi) {
    Expr e;
    e.kind = ExprKind::NdRange;
    e.args.push_back(std::move(lo));
    e.args.push_back(std::move(hi));
    return e;
  }
  static Expr nd_range(Value lo, Value hi) { return nd_range(constant(lo), constant(hi)); }
  static Expr input(std::string fn = "input") {
    Expr e;
    e.kind = ExprKind::Input;
    e.name = std::move(fn);
    return e;
  }

  bool is_var(std::string_view n) const { return kind == ExprKind::Var && name == n; }
  const Expr& index() const { return args.at(0); }
};

struct LValue {
  std::string name;
  std::optional<Expr> index;  // engaged for a[e]

  bool operator==(const LValue&) const = default;

  bool is_array() const { return index.has_value(); }
  static LValue var(std::string n) { return LValue{std::move(n), std::nullopt}; }
  static LValue element(std::string a, Expr idx) { return LValue{std::move(a), std::move(idx)}; }
  Expr as_read() const {
    return index ? Expr::array_read(name, *index) : Expr::var(name);
  }
};

enum class StmtKind {
  Seq,            // body
  If,             // cond, body
  IfElse,         // cond, body, orelse
  For,            // iterator, init, cond (test), step (new iterator value), body
  Assign,         // target = value
  GuardedAssign,  // (cond) ? target = value : value      (output grammar only)
  Assert,         // cond
  Break,
  Continue,
  SingleTrip,     // body executed at most once; break/continue leave it
  WitnessInit,    // names[0] = names[1] = ... = value    (value is NdRange)
};

struct Stmt {
  StmtKind kind = StmtKind::Seq;
  LocId loc = 0;
  LValue target;
  Expr cond;
  Expr value;
  std::string iterator;
  Expr init;
  Expr step;
  std::vector<Stmt> body;
  std::vector<Stmt> orelse;
  std::vector<std::string> names;

  bool operator==(const Stmt&) const = default;

  static Stmt seq(std::vector<Stmt> items = {}) {
    Stmt s;
    s.kind = StmtKind::Seq;
    s.body = std::move(items);
    return s;
  }
  static Stmt if_(Expr c, std::vector<Stmt> then) {
    Stmt s;
    s.kind = StmtKind::If;
    s.cond = std::move(c);
    s.body = std::move(then);
    return s;
  }
  static Stmt if_else(Expr c, std::vector<Stmt> then, std::vector<Stmt> otherwise) {
    Stmt s;
    s.kind = StmtKind::IfElse;
    s.cond = std::move(c);
    s.body = std::move(then);
    s.orelse = std::move(otherwise);
    return s;
  }
  static Stmt for_(std::string it, Expr init, Expr test, Expr step, std::vector<Stmt> body) {
    Stmt s;
    s.kind = StmtKind::For;
    s.iterator = std::move(it);
    s.init = std::move(init);
    s.cond = std::move(test);
    s.step = std::move(step);
    s.body = std::move(body);
    return s;
  }
  static Stmt assign(LValue lv, Expr v) {
    Stmt s;
    s.kind = StmtKind::Assign;
    s.target = std::move(lv);
    s.value = std::move(v);
    return s;
  }
  static Stmt assign(std::string var, Expr v) { return assign(LValue::var(std::move(var)), std::move(v)); }
  static Stmt guarded_assign(Expr guard, LValue lv, Expr v) {
    Stmt s;
    s.kind = StmtKind::GuardedAssign;
    s.cond = std::move(guard);
    s.target = std::move(lv);
    s.value = std::move(v);
    return s;
  }
  static Stmt assert_(Expr c) {
    Stmt s;
    s.kind = StmtKind::Assert;
    s.cond = std::move(c);
    return s;
  }
  static Stmt break_() {
    Stmt s;
    s.kind = StmtKind::Break;
    return s;
  }
  static Stmt continue_() {
    Stmt s;
    s.kind = StmtKind::Continue;
    return s;
  }
  static Stmt single_trip(std::vector<Stmt> body) {
    Stmt s;
    s.kind = StmtKind::SingleTrip;
    s.body = std::move(body);
    return s;
  }
  static Stmt witness_init(std::vector<std::string> idx_names, Expr range) {
    Stmt s;
    s.kind = StmtKind::WitnessInit;
    s.names = std::move(idx_names);
    s.value = std::move(range);
    return s;
  }
};

enum class DeclKind { Scalar, Array };

struct Decl {
  std::string name;
  DeclKind kind = DeclKind::Scalar;
  Value size = 0;                 // arrays only
  std::optional<Value> init;      // scalars only; globals default to zero

  bool operator==(const Decl&) const = default;

  bool is_array() const { return kind == DeclKind::Array; }
  static Decl scalar(std::string n, std::optional<Value> init = std::nullopt) {
    return Decl{std::move(n), DeclKind::Scalar, 0, init};
  }
  static Decl array(std::string n, Value size) { return Decl{std::move(n), DeclKind::Array, size, std::nullopt}; }
};

struct Program {
  std::vector<Decl> decls;
  std::vector<Stmt> body;

  bool operator==(const Program&) const = default;

  const Decl* find_decl(std::string_view n) const {
    for (const auto& d : decls)
      if (d.name == n) return &d;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Traversal helpers

/// Visits every expression node (pre-order) reachable from `e`.
inline void for_each_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& a : e.args) for_each_expr(a, fn);
}

/// Expressions owned directly by a statement (not by nested statements),
/// in evaluation order.
inline std::vector<const Expr*> own_exprs(const Stmt& s) {
  std::vector<const Expr*> out;
  switch (s.kind) {
    case StmtKind::If:
    case StmtKind::IfElse:
    case StmtKind::Assert: out.push_back(&s.cond); break;
    case StmtKind::For:
      out.push_back(&s.init);
      out.push_back(&s.cond);
      out.push_back(&s.step);
      break;
    case StmtKind::Assign:
      if (s.target.index) out.push_back(&*s.target.index);
      out.push_back(&s.value);
      break;
    case StmtKind::GuardedAssign:
      out.push_back(&s.cond);
      if (s.target.index) out.push_back(&*s.target.index);
      out.push_back(&s.value);
      break;
    case StmtKind::WitnessInit: out.push_back(&s.value); break;
    default: break;
  }
  return out;
}

/// Pre-order walk over statements. The callback receives the statement and
/// the chain of enclosing statements (outermost first).
inline void walk_stmts(const std::vector<Stmt>& stmts,
                       const std::function<void(const Stmt&, const std::vector<const Stmt*>&)>& fn,
                       std::vector<const Stmt*>& parents) {
  for (const auto& s : stmts) {
    fn(s, parents);
    parents.push_back(&s);
    walk_stmts(s.body, fn, parents);
    walk_stmts(s.orelse, fn, parents);
    parents.pop_back();
  }
}

inline void walk_stmts(const std::vector<Stmt>& stmts,
                       const std::function<void(const Stmt&, const std::vector<const Stmt*>&)>& fn) {
  std::vector<const Stmt*> parents;
  walk_stmts(stmts, fn, parents);
}

inline void walk_stmts(const std::vector<Stmt>& stmts, const std::function<void(const Stmt&)>& fn) {
  walk_stmts(stmts, [&](const Stmt& s, const std::vector<const Stmt*>&) { fn(s); });
}

/// Splices nested Seq statements into their parents. The parser and the
/// transformer both produce this normal form.
inline std::vector<Stmt> flatten(std::vector<Stmt> stmts) {
  std::vector<Stmt> out;
  for (auto& s : stmts) {
    s.body = flatten(std::move(s.body));
    s.orelse = flatten(std::move(s.orelse));
    if (s.kind == StmtKind::Seq) {
      for (auto& c : s.body) out.push_back(std::move(c));
    } else {
      out.push_back(std::move(s));
    }
  }
  return out;
}

/// Assigns location ids 1, 2, ... in source (pre-order) order.
inline void renumber(std::vector<Stmt>& stmts, LocId& next) {
  for (auto& s : stmts) {
    s.loc = next++;
    renumber(s.body, next);
    renumber(s.orelse, next);
  }
}

inline void renumber(Program& p) {
  LocId next = 1;
  renumber(p.body, next);
}

/// A one-name witness initialisation prints as `i_a = nd(l, u);`. Reading
/// it back, the leading run of such assignments is taken as initialisation.
inline void lift_witness_prefix(std::vector<Stmt>& body) {
  for (auto& s : body) {
    if (s.kind == StmtKind::WitnessInit) continue;
    if (s.kind != StmtKind::Assign || s.target.is_array() || s.value.kind != ExprKind::NdRange) return;
    s = Stmt::witness_init({s.target.name}, std::move(s.value));
  }
}

inline const Stmt* find_stmt(const std::vector<Stmt>& stmts, LocId loc) {
  const Stmt* found = nullptr;
  walk_stmts(stmts, [&](const Stmt& s) {
    if (s.loc == loc) found = &s;
  });
  return found;
}

/// Scalar variable names read by `e` (including those inside index expressions).
inline void collect_scalar_reads(const Expr& e, std::vector<std::string>& out) {
  for_each_expr(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Var) out.push_back(x.name);
  });
}

inline bool contains_kind(const Expr& e, ExprKind k) {
  bool hit = false;
  for_each_expr(e, [&](const Expr& x) { hit = hit || x.kind == k; });
  return hit;
}

}  // namespace arrwit
