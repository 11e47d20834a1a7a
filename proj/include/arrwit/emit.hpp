#pragma once

#include <arrwit/ast.hpp>
#include <arrwit/errors.hpp>
#include <arrwit/grammar.hpp>
#include <arrwit/parser.hpp>
#include <arrwit/printer.hpp>

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace arrwit {

enum class NdStyle { Cbmc, Svcomp, Stub };

struct EmitConfig {
  NdStyle nd_style = NdStyle::Cbmc;
  bool header_comment = true;
};

inline std::string_view style_name(NdStyle s) {
  switch (s) {
    case NdStyle::Cbmc: return "cbmc";
    case NdStyle::Svcomp: return "svcomp";
    case NdStyle::Stub: return "stub";
  }
  return "cbmc";
}

inline bool parse_style(std::string_view name, NdStyle& out) {
  for (NdStyle s : {NdStyle::Cbmc, NdStyle::Svcomp, NdStyle::Stub})
    if (style_name(s) == name) {
      out = s;
      return true;
    }
  return false;
}

/// Everything between these markers is support code (includes, verifier
/// prototypes, stub definitions) and is skipped by read_verifiable.
inline constexpr std::string_view kSupportBegin = "/* arrwit: support begin */";
inline constexpr std::string_view kSupportEnd = "/* arrwit: support end */";

namespace detail {

struct StyleNames {
  std::string nondet;
  std::string assume;
};

inline StyleNames names_for(NdStyle s) {
  switch (s) {
    case NdStyle::Cbmc: return {"nondet_int", "__CPROVER_assume"};
    case NdStyle::Svcomp: return {"__VERIFIER_nondet_int", "__VERIFIER_assume"};
    case NdStyle::Stub: return {"stub_nondet_int", "stub_assume"};
  }
  return {"nondet_int", "__CPROVER_assume"};
}

inline const char* kStubSupport = R"(#include <stdio.h>
#include <stdlib.h>

/* Choices come from ND_CHOICES, a comma- or space-separated list of
   integers; once it runs out every further choice is 0. A failed
   assumption ends the run quietly. */
static int stub_nondet_int(void) {
  static const char* cursor = 0;
  static int started = 0;
  char* end;
  long v;
  if (!started) {
    cursor = getenv("ND_CHOICES");
    started = 1;
  }
  if (!cursor) return 0;
  while (*cursor == ',' || *cursor == ' ') ++cursor;
  if (!*cursor) return 0;
  v = strtol(cursor, &end, 10);
  if (end == cursor) return 0;
  cursor = end;
  return (int)v;
}

static void stub_assume(int cond) {
  if (!cond) exit(0);
}
)";

class CEmitter {
 public:
  CEmitter(const Program& p, const EmitConfig& cfg) : p_(p), cfg_(cfg), names_(names_for(cfg.nd_style)) {
    for (const auto& d : p.decls) taken_.insert(d.name);
  }

  std::string run() {
    std::ostringstream body;
    block(body, p_.body, 1);

    std::ostringstream os;
    if (cfg_.header_comment)
      os << "/* Array-free, loop-free program produced by arrwit (nd style: " << style_name(cfg_.nd_style)
         << "). */\n";
    os << kSupportBegin << '\n';
    os << "#include <assert.h>\n";
    switch (cfg_.nd_style) {
      case NdStyle::Cbmc:
        os << "int nondet_int(void);\n";
        os << "#if !defined(__CPROVER) && !defined(__CPROVER__)\n";
        os << "void __CPROVER_assume(int);\n";
        os << "#endif\n";
        break;
      case NdStyle::Svcomp:
        os << "extern int __VERIFIER_nondet_int(void);\n";
        os << "extern void __VERIFIER_assume(int);\n";
        break;
      case NdStyle::Stub: os << kStubSupport; break;
    }
    for (const auto& fn : inputs_) os << "static int " << fn << "(void) { return " << names_.nondet << "(); }\n";
    os << kSupportEnd << "\n\n";
    for (const auto& d : p_.decls) {
      os << "int " << d.name;
      if (d.init) os << " = " << *d.init;
      os << ";\n";
    }
    os << "\nint main(void) {\n" << body.str() << "  return 0;\n}\n";
    return os.str();
  }

 private:
  std::string fresh_temp() {
    for (;;) {
      std::string n = "nd_tmp" + std::to_string(counter_++);
      if (!taken_.count(n)) {
        taken_.insert(n);
        return n;
      }
    }
  }

  /// Replaces nd(l, u) by a temporary declared (and constrained) in `pre`,
  /// and nd() by a call to the style's nondet function.
  Expr lower(const Expr& e, std::ostream& pre, const std::string& pad) {
    switch (e.kind) {
      case ExprKind::Nd: return Expr::input(names_.nondet);
      case ExprKind::NdRange: {
        Expr lo = lower(e.args[0], pre, pad);
        Expr hi = lower(e.args[1], pre, pad);
        std::string t = fresh_temp();
        pre << pad << "int " << t << " = " << names_.nondet << "();\n";
        Expr bound = Expr::binary(BinOp::And, Expr::binary(BinOp::Ge, Expr::var(t), std::move(lo)),
                                  Expr::binary(BinOp::Le, Expr::var(t), std::move(hi)));
        pre << pad << names_.assume << '(' << print_expr(bound) << ");\n";
        return Expr::var(t);
      }
      case ExprKind::Input:
        inputs_.insert(e.name);
        return e;
      default: {
        Expr out = e;
        for (auto& a : out.args) a = lower(a, pre, pad);
        return out;
      }
    }
  }

  void block(std::ostream& os, const std::vector<Stmt>& ss, int indent) {
    for (const auto& s : ss) stmt(os, s, indent);
  }

  void braced(std::ostream& os, const std::vector<Stmt>& ss, int indent) {
    os << "{\n";
    block(os, ss, indent + 1);
    os << std::string(2 * indent, ' ') << '}';
  }

  void stmt(std::ostream& os, const Stmt& s, int indent) {
    const std::string pad(2 * indent, ' ');
    switch (s.kind) {
      case StmtKind::Seq: block(os, s.body, indent); return;
      case StmtKind::Assign: {
        Expr v = lower(s.value, os, pad);
        os << pad << s.target.name << " = " << print_expr(v) << ";\n";
        return;
      }
      case StmtKind::GuardedAssign: {
        Expr g = lower(s.cond, os, pad);
        Expr v = lower(s.value, os, pad);
        os << pad << "if (" << print_expr(g) << ") {\n";
        os << pad << "  " << s.target.name << " = " << print_expr(v) << ";\n";
        os << pad << "} else {\n";
        os << pad << "  (void)(" << print_expr(v) << ");\n";
        os << pad << "}\n";
        return;
      }
      case StmtKind::WitnessInit: {
        Expr v = lower(s.value, os, pad);
        os << pad;
        for (const auto& n : s.names) os << n << " = ";
        os << print_expr(v) << ";\n";
        return;
      }
      case StmtKind::If:
      case StmtKind::IfElse: {
        Expr c = lower(s.cond, os, pad);
        os << pad << "if (" << print_expr(c) << ") ";
        braced(os, s.body, indent);
        if (s.kind == StmtKind::IfElse) {
          os << " else ";
          braced(os, s.orelse, indent);
        }
        os << '\n';
        return;
      }
      case StmtKind::Assert: {
        Expr c = lower(s.cond, os, pad);
        os << pad << "assert(" << print_expr(c) << ");\n";
        return;
      }
      case StmtKind::Break: os << pad << "break;\n"; return;
      case StmtKind::Continue: os << pad << "continue;\n"; return;
      case StmtKind::SingleTrip:
        os << pad << "do ";
        braced(os, s.body, indent);
        os << " while (0);\n";
        return;
      case StmtKind::For: throw EmitError("loop statement in a program to be emitted");
    }
  }

  const Program& p_;
  const EmitConfig& cfg_;
  StyleNames names_;
  std::set<std::string> taken_;
  std::set<std::string> inputs_;
  int counter_ = 0;
};

// ---------------------------------------------------------------------------
// Reading emitted text back

inline Expr substitute(const Expr& e, const std::map<std::string, Expr>& temps) {
  if (e.kind == ExprKind::Var) {
    auto it = temps.find(e.name);
    if (it != temps.end()) return it->second;
  }
  Expr out = e;
  for (auto& a : out.args) a = substitute(a, temps);
  return out;
}

/// Matches `t >= l && t <= u` and yields nd(l, u).
inline bool range_of(const Expr& c, const std::string& t, Expr& out) {
  if (c.kind != ExprKind::Binary || c.op != BinOp::And) return false;
  const Expr& lo = c.args[0];
  const Expr& hi = c.args[1];
  if (lo.kind != ExprKind::Binary || lo.op != BinOp::Ge || !lo.args[0].is_var(t)) return false;
  if (hi.kind != ExprKind::Binary || hi.op != BinOp::Le || !hi.args[0].is_var(t)) return false;
  out = Expr::nd_range(lo.args[1], hi.args[1]);
  return true;
}

inline bool is_marker(const Stmt& s, std::string_view target) {
  return s.kind == StmtKind::Assign && !s.target.is_array() && s.target.name == target;
}

inline std::vector<Stmt> unlower(std::vector<Stmt> ss, const std::set<std::string>& temps,
                                 std::map<std::string, Expr>& bound) {
  std::vector<Stmt> out;
  for (std::size_t k = 0; k < ss.size(); ++k) {
    Stmt& s = ss[k];
    if (s.kind == StmtKind::Assign && temps.count(s.target.name) && s.value.kind == ExprKind::Nd) {
      Expr range;
      if (k + 1 < ss.size() && is_marker(ss[k + 1], kAssumeTarget) && range_of(ss[k + 1].value, s.target.name, range)) {
        range.args[0] = substitute(range.args[0], bound);
        range.args[1] = substitute(range.args[1], bound);
        bound[s.target.name] = std::move(range);
        ++k;
        continue;
      }
      throw EmitError("temporary '" + s.target.name + "' without a matching assume");
    }
    if (is_marker(s, kAssumeTarget)) throw EmitError("stray assume statement");
    if (s.kind == StmtKind::IfElse && s.body.size() == 1 && s.orelse.size() == 1 &&
        s.body[0].kind == StmtKind::Assign && is_marker(s.orelse[0], kDiscardTarget) &&
        s.body[0].value == s.orelse[0].value) {
      Stmt g = Stmt::guarded_assign(substitute(s.cond, bound), s.body[0].target, substitute(s.body[0].value, bound));
      out.push_back(std::move(g));
      continue;
    }
    for (auto* e : {&s.cond, &s.value, &s.init, &s.step}) *e = substitute(*e, bound);
    if (s.target.index) *s.target.index = substitute(*s.target.index, bound);
    s.body = unlower(std::move(s.body), temps, bound);
    s.orelse = unlower(std::move(s.orelse), temps, bound);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Renders an output-grammar program as compilable C99 for the chosen
/// verifier conventions.
inline std::string emit_verifiable(const Program& p, const EmitConfig& cfg = {}) {
  ConformanceReport r = validate_output_grammar(p);
  if (!r.conformant) {
    const auto& v = r.violations.front();
    throw EmitError("not an output-grammar program: " + v.message);
  }
  return detail::CEmitter(p, cfg).run();
}

/// Inverse of emit_verifiable: drops the support section and folds the
/// lowered constructs (temporaries with assumes, if/else guarded writes)
/// back into output-grammar statements.
inline Program read_verifiable(std::string_view text) {
  std::string src(text);
  auto b = src.find(kSupportBegin);
  auto e = src.find(kSupportEnd);
  if (b != std::string::npos && e != std::string::npos && e > b)
    for (auto k = b; k < e + kSupportEnd.size(); ++k)
      if (src[k] != '\n') src[k] = ' ';

  ParseOptions opts;
  opts.verifier_dialect = true;
  for (NdStyle s : {NdStyle::Cbmc, NdStyle::Svcomp, NdStyle::Stub}) {
    auto n = detail::names_for(s);
    opts.nondet_functions.insert(n.nondet);
    opts.assume_functions.insert(n.assume);
  }
  Parser parser(src, opts);
  Program p = parser.parse_program();
  std::map<std::string, Expr> bound;
  p.body = detail::unlower(std::move(p.body), parser.temporaries(), bound);
  p.body = flatten(std::move(p.body));
  lift_witness_prefix(p.body);
  renumber(p);
  return p;
}

}  // namespace arrwit
