#pragma once

#include <arrwit/ast.hpp>
#include <arrwit/errors.hpp>

#include <cctype>
#include <charconv>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace arrwit {

namespace detail {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  Lexer(std::string_view src, bool skip_directives) : src_(src), skip_directives_(skip_directives) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          t.text += advance();
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Number;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
        // Integer suffixes carry no meaning for us.
        while (pos_ < src_.size() && (src_[pos_] == 'u' || src_[pos_] == 'U' || src_[pos_] == 'l' || src_[pos_] == 'L'))
          advance();
      } else {
        t.kind = Tok::Punct;
        static constexpr std::string_view two[] = {"==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-="};
        std::string_view rest = src_.substr(pos_);
        bool matched = false;
        for (auto p : two) {
          if (rest.substr(0, 2) == p) {
            t.text = std::string(p);
            advance();
            advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (std::string_view("+-*/%<>=!(){}[];,?:").find(c) == std::string_view::npos)
            throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
          t.text = std::string(1, advance());
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    for (;;) {
      if (pos_ >= src_.size()) return;
      char c = src_[pos_];
      if (c == '#' && skip_directives_ && col_ == 1) {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        int l = line_, cl = col_;
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) throw ParseError(l, cl, "unterminated comment");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  bool skip_directives_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace detail

/// Options for reading program text.
struct ParseOptions {
  /// Accept the scaffolding produced by the verifier emitter: directives,
  /// prototypes, `int main(void)`, `return`, local temporaries and the
  /// nondeterminism/assume library calls. Used by `read_verifiable`.
  bool verifier_dialect = false;
  std::set<std::string> nondet_functions;
  std::set<std::string> assume_functions;
};

/// Name used for `(void)(e);` statements while reading emitted code.
inline constexpr std::string_view kDiscardTarget = "(void)";
/// Name used for assume calls while reading emitted code.
inline constexpr std::string_view kAssumeTarget = "(assume)";

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts = {})
      : toks_(detail::Lexer(src, opts.verifier_dialect).run()), opts_(std::move(opts)) {}

  Program parse_program() {
    Program p;
    for (;;) {
      if (peek_ident("main")) break;
      if (peek_ident("int") && peek_ident("main", 1)) {
        next();
        break;
      }
      if (opts_.verifier_dialect && is_prototype()) {
        skip_prototype();
        continue;
      }
      // unsigned is accepted and read as int
      if (peek_ident("unsigned") && !opts_.verifier_dialect) {
        next();
        if (!peek_ident("int")) {
          parse_declarators(p);
          continue;
        }
      }
      if (!peek_ident("int")) fail(cur(), "expected declaration or main()");
      next();
      parse_declarators(p);
    }
    expect_ident("main");
    expect("(");
    if (peek_ident("void")) next();
    expect(")");
    decls_ = &p.decls;
    p.body = parse_block();
    if (cur().kind != detail::Tok::End) fail(cur(), "trailing input after main()");
    p.body = flatten(std::move(p.body));
    if (!opts_.verifier_dialect) lift_witness_prefix(p.body);
    renumber(p);
    return p;
  }

  const std::set<std::string>& temporaries() const { return temps_; }

 private:
  using Token = detail::Token;
  using Tok = detail::Tok;

  const Token& cur() const { return toks_[pos_]; }
  const Token& at(std::size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

  bool peek(std::string_view punct, std::size_t k = 0) const {
    return at(k).kind == Tok::Punct && at(k).text == punct;
  }
  bool peek_ident(std::string_view id, std::size_t k = 0) const {
    return at(k).kind == Tok::Ident && at(k).text == id;
  }
  void expect(std::string_view punct) {
    if (!peek(punct)) fail(cur(), "expected '" + std::string(punct) + "'" + found());
    next();
  }
  void expect_ident(std::string_view id) {
    if (!peek_ident(id)) fail(cur(), "expected '" + std::string(id) + "'" + found());
    next();
  }
  std::string found() const {
    if (cur().kind == Tok::End) return " at end of input";
    return " but found '" + cur().text + "'";
  }
  std::string ident() {
    if (cur().kind != Tok::Ident || is_keyword(cur().text)) fail(cur(), "expected identifier" + found());
    return next().text;
  }
  Value number() {
    if (cur().kind != Tok::Number) fail(cur(), "expected integer literal" + found());
    const auto& t = next();
    Value v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) fail(t, "integer literal out of range");
    return v;
  }
  Value signed_number() {
    bool neg = false;
    if (peek("-")) {
      next();
      neg = true;
    }
    Value v = number();
    return neg ? -v : v;
  }

  static bool is_keyword(std::string_view s) {
    static const std::set<std::string_view> kw = {"int", "main", "for", "if", "else", "assert", "break",
                                                  "continue", "do", "while", "return", "nd", "void",
                                                  "unsigned"};
    return kw.count(s) > 0;
  }

  bool is_prototype() const {
    // int|void name ( ... ) ;
    if (!(peek_ident("int") || peek_ident("void") || peek_ident("extern"))) return false;
    std::size_t k = peek_ident("extern") ? 2 : 1;
    if (at(k).kind != Tok::Ident || at(k).text == "main") return false;
    return peek("(", k + 1);
  }
  void skip_prototype() {
    while (!peek(";")) {
      if (cur().kind == Tok::End) fail(cur(), "unterminated prototype");
      next();
    }
    next();
  }

  void parse_declarators(Program& p) {
    for (;;) {
      const Token& at_name = cur();
      std::string name = ident();
      if (p.find_decl(name)) fail(at_name, "duplicate declaration of '" + name + "'");
      if (peek("[")) {
        next();
        const Token& sz_tok = cur();
        Value size = number();
        if (size < 1) fail(sz_tok, "array size must be at least 1");
        expect("]");
        p.decls.push_back(Decl::array(name, size));
      } else if (peek("=")) {
        next();
        p.decls.push_back(Decl::scalar(name, signed_number()));
      } else {
        p.decls.push_back(Decl::scalar(name));
      }
      if (peek(",")) {
        next();
        continue;
      }
      expect(";");
      return;
    }
  }

  const Decl* lookup(const Token& t, const std::string& name) const {
    for (const auto& d : *decls_)
      if (d.name == name) return &d;
    if (temps_.count(name)) return nullptr;
    fail(t, "use of undeclared identifier '" + name + "'");
  }

  std::vector<Stmt> parse_block() {
    expect("{");
    std::vector<Stmt> out;
    while (!peek("}")) {
      if (cur().kind == Tok::End) fail(cur(), "expected '}'");
      out.push_back(parse_stmt());
    }
    next();
    return out;
  }

  std::vector<Stmt> parse_else() {
    if (peek_ident("if")) {
      std::vector<Stmt> v;
      v.push_back(parse_stmt());
      return v;
    }
    return parse_block();
  }

  Stmt parse_stmt() {
    const Token& t = cur();
    if (peek("{")) return Stmt::seq(parse_block());
    if (peek_ident("for")) return parse_for();
    if (peek_ident("if")) {
      next();
      expect("(");
      Expr c = parse_expr();
      expect(")");
      auto then = parse_block();
      if (peek_ident("else")) {
        next();
        auto other = parse_else();
        return Stmt::if_else(std::move(c), std::move(then), std::move(other));
      }
      return Stmt::if_(std::move(c), std::move(then));
    }
    if (peek_ident("assert")) {
      next();
      expect("(");
      Expr c = parse_expr();
      expect(")");
      expect(";");
      return Stmt::assert_(std::move(c));
    }
    if (peek_ident("break")) {
      next();
      expect(";");
      return Stmt::break_();
    }
    if (peek_ident("continue")) {
      next();
      expect(";");
      return Stmt::continue_();
    }
    if (peek_ident("do")) {
      next();
      auto body = parse_block();
      expect_ident("while");
      expect("(");
      const Token& zt = cur();
      if (number() != 0) fail(zt, "only 'do { ... } while (0)' is supported");
      expect(")");
      expect(";");
      return Stmt::single_trip(std::move(body));
    }
    if (opts_.verifier_dialect && peek_ident("return")) {
      next();
      parse_expr();
      expect(";");
      return Stmt::seq();
    }
    if (opts_.verifier_dialect && peek_ident("int")) {
      next();
      std::string name = ident();
      temps_.insert(name);
      expect("=");
      Expr v = parse_expr();
      expect(";");
      return Stmt::assign(name, std::move(v));
    }
    if (opts_.verifier_dialect && peek("(") && peek_ident("void", 1) && peek(")", 2)) {
      next();
      next();
      next();
      Expr v = parse_primary();
      expect(";");
      return Stmt::assign(std::string(kDiscardTarget), std::move(v));
    }
    if (opts_.verifier_dialect && cur().kind == Tok::Ident && opts_.assume_functions.count(cur().text)) {
      next();
      expect("(");
      Expr c = parse_expr();
      expect(")");
      expect(";");
      return Stmt::assign(std::string(kAssumeTarget), std::move(c));
    }
    if (peek("(")) {
      // (guard) ? x = e : e;
      next();
      Expr guard = parse_expr();
      expect(")");
      expect("?");
      LValue lv = parse_lvalue();
      expect("=");
      Expr v = parse_binary(1);
      expect(":");
      const Token& et = cur();
      Expr again = parse_binary(1);
      if (!(again == v)) fail(et, "guarded assignment must repeat its right-hand side after ':'");
      expect(";");
      return Stmt::guarded_assign(std::move(guard), std::move(lv), std::move(v));
    }
    if (cur().kind == Tok::Ident) return parse_assignment();
    fail(t, "expected statement" + found());
  }

  LValue parse_lvalue() {
    const Token& t = cur();
    std::string name = ident();
    const Decl* d = lookup(t, name);
    if (peek("[")) {
      if (d && !d->is_array()) fail(t, "indexing scalar '" + name + "'");
      next();
      Expr idx = parse_expr();
      expect("]");
      return LValue::element(name, std::move(idx));
    }
    if (d && d->is_array()) fail(t, "array '" + name + "' used without an index");
    return LValue::var(name);
  }

  Stmt parse_assignment() {
    const Token& t = cur();
    LValue lv = parse_lvalue();
    Stmt s;
    if (peek("++") || peek("--")) {
      BinOp op = cur().text == "++" ? BinOp::Add : BinOp::Sub;
      next();
      s = Stmt::assign(lv, Expr::binary(op, lv.as_read(), Expr::constant(1)));
    } else if (peek("+=") || peek("-=")) {
      BinOp op = cur().text == "+=" ? BinOp::Add : BinOp::Sub;
      next();
      s = Stmt::assign(lv, Expr::binary(op, lv.as_read(), parse_expr()));
    } else {
      expect("=");
      if (cur().kind == Tok::Ident && peek("=", 1)) {
        // chained initialisation: a = b = ... = nd(l, u)
        if (lv.is_array()) fail(t, "chained assignment to an array element");
        std::vector<std::string> names{lv.name};
        while (cur().kind == Tok::Ident && peek("=", 1)) {
          const Token& nt = cur();
          std::string n = ident();
          const Decl* d = lookup(nt, n);
          if (d && d->is_array()) fail(nt, "chained assignment to an array");
          names.push_back(n);
          next();
        }
        const Token& vt = cur();
        Expr v = parse_expr();
        if (v.kind != ExprKind::NdRange && !opts_.verifier_dialect) fail(vt, "chained assignment must end in nd(l, u)");
        s = Stmt::witness_init(std::move(names), std::move(v));
      } else {
        s = Stmt::assign(lv, parse_expr());
      }
    }
    expect(";");
    return s;
  }

  Stmt parse_for() {
    expect_ident("for");
    expect("(");
    const Token& it_tok = cur();
    std::string it = ident();
    const Decl* d = lookup(it_tok, it);
    if (d && d->is_array()) fail(it_tok, "loop iterator '" + it + "' must be a scalar");
    expect("=");
    Expr init = parse_expr();
    expect(";");
    Expr test = parse_expr();
    expect(";");
    const Token& st = cur();
    if (ident() != it) fail(st, "loop step must update the iterator '" + it + "'");
    Expr step;
    if (peek("++") || peek("--")) {
      BinOp op = cur().text == "++" ? BinOp::Add : BinOp::Sub;
      next();
      step = Expr::binary(op, Expr::var(it), Expr::constant(1));
    } else if (peek("+=") || peek("-=")) {
      BinOp op = cur().text == "+=" ? BinOp::Add : BinOp::Sub;
      next();
      step = Expr::binary(op, Expr::var(it), parse_expr());
    } else {
      expect("=");
      step = parse_expr();
    }
    expect(")");
    auto body = parse_block();
    return Stmt::for_(it, std::move(init), std::move(test), std::move(step), std::move(body));
  }

  Expr parse_expr() {
    Expr c = parse_binary(1);
    if (peek("?")) {
      next();
      Expr t = parse_expr();
      expect(":");
      Expr f = parse_expr();
      return Expr::ternary(std::move(c), std::move(t), std::move(f));
    }
    return c;
  }

  static bool binop_of(const Token& t, BinOp& op) {
    if (t.kind != Tok::Punct) return false;
    static const std::pair<std::string_view, BinOp> table[] = {
        {"+", BinOp::Add}, {"-", BinOp::Sub}, {"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Mod},
        {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<", BinOp::Lt},  {"<=", BinOp::Le}, {">", BinOp::Gt},
        {">=", BinOp::Ge}, {"&&", BinOp::And}, {"||", BinOp::Or}};
    for (auto& [s, o] : table)
      if (t.text == s) {
        op = o;
        return true;
      }
    return false;
  }

  // Precedence climbing; all binary operators are left associative.
  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    for (;;) {
      BinOp op;
      if (!binop_of(cur(), op) || precedence(op) < min_prec) return lhs;
      next();
      Expr rhs = parse_binary(precedence(op) + 1);
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary() {
    if (peek("-")) {
      next();
      if (cur().kind == Tok::Number) return Expr::constant(-number());
      return Expr::binary(BinOp::Sub, Expr::constant(0), parse_unary());
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& t = cur();
    if (t.kind == Tok::Number) return Expr::constant(number());
    if (peek("(")) {
      next();
      Expr e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t, "expected expression" + found());
    if (t.text == "nd") {
      next();
      expect("(");
      if (peek(")")) {
        next();
        return Expr::nd();
      }
      Expr lo = parse_expr();
      expect(",");
      Expr hi = parse_expr();
      expect(")");
      return Expr::nd_range(std::move(lo), std::move(hi));
    }
    if (t.text == "input" || t.text == "user_input") {
      std::string fn = next().text;
      expect("(");
      expect(")");
      return Expr::input(fn);
    }
    if (opts_.verifier_dialect && opts_.nondet_functions.count(t.text)) {
      next();
      expect("(");
      expect(")");
      return Expr::nd();
    }
    std::string name = ident();
    const Decl* d = lookup(t, name);
    if (peek("[")) {
      if (d && !d->is_array()) fail(t, "indexing scalar '" + name + "'");
      next();
      Expr idx = parse_expr();
      expect("]");
      return Expr::array_read(name, std::move(idx));
    }
    if (d && d->is_array()) fail(t, "array '" + name + "' used without an index");
    return Expr::var(name);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  const std::vector<Decl>* decls_ = nullptr;
  std::set<std::string> temps_;
};

/// Parses a program in the C-like input or output subset. Throws ParseError.
inline Program parse(std::string_view source) { return Parser(source).parse_program(); }

}  // namespace arrwit
