#pragma once

#include <arrwit/ast.hpp>

#include <sstream>
#include <string>

namespace arrwit {

namespace detail {

inline void print_expr(std::ostream& os, const Expr& e, int ctx_prec);

inline void print_operand(std::ostream& os, const Expr& e, int min_prec) {
  bool wrap = e.kind == ExprKind::Ternary || (e.kind == ExprKind::Binary && precedence(e.op) < min_prec);
  if (wrap) os << '(';
  print_expr(os, e, wrap ? 0 : min_prec);
  if (wrap) os << ')';
}

inline void print_expr(std::ostream& os, const Expr& e, int /*ctx_prec*/) {
  switch (e.kind) {
    case ExprKind::Const: os << e.value; break;
    case ExprKind::Var: os << e.name; break;
    case ExprKind::ArrayRead:
      os << e.name << '[';
      print_expr(os, e.index(), 0);
      os << ']';
      break;
    case ExprKind::Binary: {
      int p = precedence(e.op);
      // Left associative: the right operand needs strictly higher precedence.
      print_operand(os, e.args[0], p);
      os << ' ' << spelling(e.op) << ' ';
      print_operand(os, e.args[1], p + 1);
      break;
    }
    case ExprKind::Ternary:
      os << '(';
      print_expr(os, e.args[0], 0);
      os << ") ? ";
      print_operand(os, e.args[1], 1);
      os << " : ";
      print_operand(os, e.args[2], 1);
      break;
    case ExprKind::Nd: os << "nd()"; break;
    case ExprKind::NdRange:
      os << "nd(";
      print_expr(os, e.args[0], 0);
      os << ", ";
      print_expr(os, e.args[1], 0);
      os << ')';
      break;
    case ExprKind::Input: os << e.name << "()"; break;
  }
}

inline void print_lvalue(std::ostream& os, const LValue& lv) {
  os << lv.name;
  if (lv.index) {
    os << '[';
    print_expr(os, *lv.index, 0);
    os << ']';
  }
}

inline void print_step(std::ostream& os, const Stmt& f) {
  const Expr& s = f.step;
  if (s.kind == ExprKind::Binary && (s.op == BinOp::Add || s.op == BinOp::Sub) && s.args[0].is_var(f.iterator)) {
    const Expr& amount = s.args[1];
    if (amount.kind == ExprKind::Const && amount.value == 1) {
      os << f.iterator << (s.op == BinOp::Add ? "++" : "--");
      return;
    }
    os << f.iterator << (s.op == BinOp::Add ? " += " : " -= ");
    print_expr(os, amount, 0);
    return;
  }
  os << f.iterator << " = ";
  print_expr(os, s, 0);
}

inline void print_stmts(std::ostream& os, const std::vector<Stmt>& ss, int indent);

inline void print_block(std::ostream& os, const std::vector<Stmt>& ss, int indent) {
  os << "{\n";
  print_stmts(os, ss, indent + 1);
  os << std::string(2 * indent, ' ') << '}';
}

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  std::string pad(2 * indent, ' ');
  switch (s.kind) {
    case StmtKind::Seq: print_stmts(os, s.body, indent); return;
    case StmtKind::If:
    case StmtKind::IfElse:
      os << pad << "if (";
      print_expr(os, s.cond, 0);
      os << ") ";
      print_block(os, s.body, indent);
      if (s.kind == StmtKind::IfElse) {
        os << " else ";
        print_block(os, s.orelse, indent);
      }
      os << '\n';
      return;
    case StmtKind::For:
      os << pad << "for (" << s.iterator << " = ";
      print_expr(os, s.init, 0);
      os << "; ";
      print_expr(os, s.cond, 0);
      os << "; ";
      print_step(os, s);
      os << ") ";
      print_block(os, s.body, indent);
      os << '\n';
      return;
    case StmtKind::Assign:
      os << pad;
      print_lvalue(os, s.target);
      os << " = ";
      print_expr(os, s.value, 0);
      os << ";\n";
      return;
    case StmtKind::GuardedAssign:
      os << pad << '(';
      print_expr(os, s.cond, 0);
      os << ") ? ";
      print_lvalue(os, s.target);
      os << " = ";
      print_operand(os, s.value, 1);
      os << " : ";
      print_operand(os, s.value, 1);
      os << ";\n";
      return;
    case StmtKind::Assert:
      os << pad << "assert(";
      print_expr(os, s.cond, 0);
      os << ");\n";
      return;
    case StmtKind::Break: os << pad << "break;\n"; return;
    case StmtKind::Continue: os << pad << "continue;\n"; return;
    case StmtKind::SingleTrip:
      os << pad << "do ";
      print_block(os, s.body, indent);
      os << " while (0);\n";
      return;
    case StmtKind::WitnessInit:
      os << pad;
      for (const auto& n : s.names) os << n << " = ";
      print_expr(os, s.value, 0);
      os << ";\n";
      return;
  }
}

inline void print_stmts(std::ostream& os, const std::vector<Stmt>& ss, int indent) {
  for (const auto& s : ss) print_stmt(os, s, indent);
}

inline void print_decls(std::ostream& os, const std::vector<Decl>& decls) {
  for (const auto& d : decls) {
    os << "int " << d.name;
    if (d.is_array()) os << '[' << d.size << ']';
    if (d.init) os << " = " << *d.init;
    os << ";\n";
  }
}

}  // namespace detail

inline std::string print_expr(const Expr& e) {
  std::ostringstream os;
  detail::print_expr(os, e, 0);
  return os.str();
}

inline std::string print_stmt(const Stmt& s) {
  std::ostringstream os;
  detail::print_stmt(os, s, 0);
  return os.str();
}

/// Renders a program in the C-like concrete syntax accepted by `parse`.
inline std::string print_program(const Program& p) {
  std::ostringstream os;
  detail::print_decls(os, p.decls);
  if (!p.decls.empty()) os << '\n';
  os << "main() ";
  detail::print_block(os, p.body, 0);
  os << '\n';
  return os.str();
}

}  // namespace arrwit
