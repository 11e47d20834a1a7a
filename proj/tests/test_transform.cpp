#include <arrwit/grammar.hpp>
#include <arrwit/parser.hpp>
#include <arrwit/printer.hpp>
#include <arrwit/transform.hpp>

#include "fixtures.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace arrwit;
using arrwit::testing::load_fixture;

namespace {

const char* kDecls = "int a[4]; int b[4]; int c[2]; int i; int j; int k; int x; int y;\n";

Program program(const std::string& body) { return parse(std::string(kDecls) + "main() {\n" + body + "\n}\n"); }

std::string transformed_expr(const std::string& rhs) {
  Program p = program("x = " + rhs + ";");
  TransformContext ctx = TransformContext::build(p);
  return print_expr(transform_expr(p.body[0].value, ctx));
}

std::string transformed_stmt(const std::string& stmt) {
  Program p = program(stmt);
  TransformContext ctx = TransformContext::build(p);
  return print_stmt(transform_stmt(p.body[0], ctx));
}

std::string joined(const std::vector<Stmt>& ss) {
  std::string out;
  for (const auto& s : ss) out += print_stmt(s);
  return out;
}

bool is_nd_assign(const Stmt& s, const std::string& target) {
  return s.kind == StmtKind::Assign && !s.target.is_array() && s.target.name == target && s.value.kind == ExprKind::Nd;
}

/// Names targeted by the run of `x = nd()` statements starting at `from`.
std::set<std::string> nd_run(const std::vector<Stmt>& ss, std::size_t from) {
  std::set<std::string> out;
  for (std::size_t k = from; k < ss.size() && ss[k].kind == StmtKind::Assign && ss[k].value.kind == ExprKind::Nd; ++k)
    out.insert(ss[k].target.name);
  return out;
}

}  // namespace

TEST(TransformExpr, ArrayReadBecomesWitnessTernary) {
  EXPECT_EQ(transformed_expr("a[i]"), "(i == i_a) ? x_a : nd()");
}

TEST(TransformExpr, ConstantUnchanged) { EXPECT_EQ(transformed_expr("5"), "5"); }

TEST(TransformExpr, BinaryRecursesIntoBothSides) {
  EXPECT_EQ(transformed_expr("a[i] + a[j]"), "((i == i_a) ? x_a : nd()) + ((j == i_a) ? x_a : nd())");
}

TEST(TransformExpr, IndexIsTransformedToo) {
  EXPECT_EQ(transformed_expr("a[c[i]]"), "(((i == i_c) ? x_c : nd()) == i_a) ? x_a : nd()");
}

TEST(TransformStmt, ArrayWriteBecomesGuardedAssignment) {
  EXPECT_EQ(transformed_stmt("a[i] = k;"), "(i == i_a) ? x_a = k : k;\n");
}

TEST(TransformStmt, ScalarAssignmentKeepsTarget) {
  EXPECT_EQ(transformed_stmt("x = a[i];"), "x = (i == i_a) ? x_a : nd();\n");
}

TEST(TransformStmt, AssertConditionTransformed) {
  EXPECT_EQ(transformed_stmt("assert(a[i] == 0);"), "assert(((i == i_a) ? x_a : nd()) == 0);\n");
}

TEST(TransformStmt, ConditionalsRecurse) {
  EXPECT_EQ(transformed_stmt("if (a[i] > 0) { x = 1; } else { b[j] = 2; }"),
            "if (((i == i_a) ? x_a : nd()) > 0) {\n  x = 1;\n} else {\n  (j == i_b) ? x_b = 2 : 2;\n}\n");
}

TEST(TransformLoop, Fig1SecondLoopSelectsWitnessIndices) {
  Program p = load_fixture("fig1.c");
  TransformContext ctx = TransformContext::build(p);
  Stmt out = transform_loop(p.body[1], ctx);
  ASSERT_EQ(out.kind, StmtKind::Seq);
  EXPECT_EQ(joined(out.body),
            "i = i_a_p;\n"
            "i = i_a_q;\n"
            "assert(((i == i_a_q) ? x_a_q : nd()) == ((i == i_a_p) ? x_a_p : nd()) * ((i == i_a_p) ? x_a_p : nd()));\n"
            "i = 100000;\n");
}

TEST(TransformLoop, Fig1FirstLoopBracketsK) {
  Program p = load_fixture("fig1.c");
  TransformContext ctx = TransformContext::build(p);
  Stmt out = transform_loop(p.body[0], ctx);
  ASSERT_GE(out.body.size(), 6u);
  EXPECT_TRUE(is_nd_assign(out.body.front(), "k"));
  EXPECT_TRUE(is_nd_assign(out.body[out.body.size() - 2], "k"));
  EXPECT_EQ(print_stmt(out.body[1]), "i = i_a_p;\n");
  EXPECT_EQ(print_stmt(out.body[2]), "i = i_a_q;\n");
  EXPECT_EQ(print_stmt(out.body[4]), "(i == i_a_p) ? x_a_p = k : k;\n");
}

TEST(TransformLoop, Fig7Loop1IsGuarded) {
  Program p = load_fixture("fig7.c");
  TransformContext ctx = TransformContext::build(p);
  const Stmt& loop1 = p.body[2];
  ASSERT_EQ(loop1.kind, StmtKind::For);
  Stmt out = transform_loop(loop1, ctx);
  ASSERT_EQ(out.body.size(), 5u);
  const Stmt& guard = out.body[0];
  ASSERT_EQ(guard.kind, StmtKind::If);
  EXPECT_EQ(print_expr(guard.cond), "nd(0, 1)");
  EXPECT_EQ(nd_run(guard.body, 0), (std::set<std::string>{"x_a", "x", "y"}));
  EXPECT_EQ(print_stmt(guard.body[3]), "i = nd(0, 49999);\n");
  EXPECT_EQ(nd_run(out.body, 1), (std::set<std::string>{"x_a", "x", "y"}));
  EXPECT_EQ(print_stmt(out.body[4]), "i = 50000;\n");
}

TEST(TransformLoop, ZeroTripLoopStillHavocsAfterwards) {
  Program p = program("for (i = 0; i < 0; i++) { x = y; }");
  TransformContext ctx = TransformContext::build(p);
  Stmt out = transform_loop(p.body[0], ctx);
  ASSERT_EQ(out.body.size(), 3u);
  EXPECT_EQ(out.body[0].kind, StmtKind::If);
  EXPECT_TRUE(is_nd_assign(out.body[1], "x"));
  EXPECT_EQ(print_stmt(out.body[2]), "i = 0;\n");
}

TEST(TransformLoop, StrideGuardAndSingleTrip) {
  Program p = program("for (i = 1; i < 4; i += 2) { if (x > 1) { break; } a[i] = x; }");
  TransformContext ctx = TransformContext::build(p);
  Stmt out = transform_loop(p.body[0], ctx);
  const Stmt& guard = out.body[0];
  ASSERT_EQ(guard.kind, StmtKind::If);
  EXPECT_EQ(print_stmt(guard.body[0]), "i = nd(1, 3);\n");
  const Stmt& once = guard.body[1];
  ASSERT_EQ(once.kind, StmtKind::SingleTrip);
  ASSERT_EQ(once.body.size(), 1u);
  EXPECT_EQ(print_expr(once.body[0].cond), "i % 2 == 1");
  EXPECT_EQ(print_stmt(out.body.back()), "i = nd(1, 5);\n");
}

TEST(TransformLoop, UnknownBoundFallsBackToArrayRange) {
  Program p = program("for (i = 0; i < 4; i++) { c[i] = x; i = i + 1; }");
  TransformContext ctx = TransformContext::build(p);
  Stmt out = transform_loop(p.body[0], ctx);
  ASSERT_EQ(out.body[0].kind, StmtKind::If);
  EXPECT_EQ(print_stmt(out.body[0].body[0]), "i = nd(0, 1);\n");
  EXPECT_EQ(print_expr(out.body.back().value), "nd()");
}

TEST(TransformProgram, Fig5ChainsWitnessIndices) {
  Program t = transform_program(load_fixture("fig5.c"));
  ASSERT_FALSE(t.body.empty());
  EXPECT_EQ(print_stmt(t.body[0]), "i_a = i_b = i_c = nd(0, 99999);\n");
  EXPECT_EQ(arrwit::testing::count_stmts(t.body, StmtKind::If), 0);
  EXPECT_TRUE(validate_output_grammar(t, {"i_a", "i_b", "i_c"}).conformant);
}

TEST(TransformProgram, DeclarationOrder) {
  Program t = transform_program(load_fixture("fig7.c"));
  std::vector<std::string> names;
  for (const auto& d : t.decls) names.push_back(d.name);
  EXPECT_EQ(names, (std::vector<std::string>{"x_a", "x_b", "i_a", "i_b", "i", "x", "y"}));
  EXPECT_EQ(print_stmt(t.body[0]), "i_a = nd(0, 99999);\n");
  EXPECT_EQ(print_stmt(t.body[1]), "i_b = nd(0, 49999);\n");
}

TEST(TransformProgram, NoArraysNoLoopsIsIdentity) {
  Program p = parse("int x; int y; main() { x = 1; if (x > 0) { y = x; } assert(y == 1); }");
  EXPECT_EQ(transform_program(p), p);
}

TEST(TransformProgram, RejectsOutputGrammarInput) {
  Program p = parse("int x; main() { x = nd(); }");
  EXPECT_THROW(transform_program(p), TransformError);
}

// Every loop's defs are assigned nd() right before the (possibly guarded)
// body and again right after it.
TEST(TransformProperties, NdBracketing) {
  fuzz::Generator gen(5);
  int loops = 0;
  for (int n = 0; n < 300; ++n) {
    Program p = gen.next();
    TransformContext ctx = TransformContext::build(p);
    walk_stmts(p.body, [&](const Stmt& s) {
      if (s.kind != StmtKind::For) return;
      ++loops;
      std::set<std::string> expected;
      for (const auto& d : ctx.summaries.at(s.loc).defs) {
        const ArrayInfo* a = find_array(ctx.arrays, d);
        expected.insert(a ? a->witness_var : d);
      }
      TransformContext local = ctx;
      Stmt out = transform_loop(s, local);
      const std::vector<Stmt>& seq = out.body;
      ASSERT_FALSE(seq.empty());
      std::set<std::string> before, after;
      if (ctx.summaries.at(s.loc).full_access) {
        before = nd_run(seq, 0);
        std::size_t k = seq.size() - 1;  // the iterator's exit value
        while (k > 0 && seq[k - 1].kind == StmtKind::Assign && seq[k - 1].value.kind == ExprKind::Nd) --k;
        after = nd_run(seq, k);
      } else {
        ASSERT_EQ(seq[0].kind, StmtKind::If);
        // An unconstrained iterator pick may directly follow the havoc run.
        before = nd_run(seq[0].body, 0);
        before.erase(s.iterator);
        after = nd_run(seq, 1);
        after.erase(s.iterator);
      }
      EXPECT_EQ(before, expected) << print_stmt(s);
      EXPECT_EQ(after, expected) << print_stmt(s);
    });
  }
  EXPECT_GT(loops, 300);
}

TEST(TransformProperties, OutputConformsAndWitnessInitComesFirst) {
  fuzz::Generator gen(6);
  for (int n = 0; n < 300; ++n) {
    Program p = gen.next();
    Program t = transform_program(p);
    std::vector<std::string> idx;
    for (const auto& a : collect_arrays(p)) idx.push_back(a.witness_idx);
    ConformanceReport r = validate_output_grammar(t, idx);
    ASSERT_TRUE(r.conformant) << print_program(t);
    EXPECT_TRUE(r.witness_init_first);
  }
}

TEST(TransformProperties, Deterministic) {
  fuzz::Generator gen(8);
  for (int n = 0; n < 100; ++n) {
    Program p = gen.next();
    EXPECT_EQ(print_program(transform_program(p)), print_program(transform_program(p)));
  }
}
