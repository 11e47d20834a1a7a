#include <arrwit/dataflow.hpp>
#include <arrwit/oracle.hpp>
#include <arrwit/parser.hpp>
#include <arrwit/precision.hpp>
#include <arrwit/printer.hpp>

#include "fixtures.hpp"
#include "fuzz.hpp"

#include <gtest/gtest.h>

using namespace arrwit;
using arrwit::testing::load_fixture;

namespace {

LocId only_assertion(const Program& p) {
  auto as = assertions(p);
  EXPECT_EQ(as.size(), 1u);
  return as.empty() ? 0 : as.front();
}

std::set<std::string> rules_of(const PrecisionVerdict& v) {
  std::set<std::string> out;
  for (const auto& r : v.violated_rules) out.insert(r.rule);
  return out;
}

PrecisionVerdict classify_text(const std::string& body) {
  Program p = parse("int a[4]; int b[4]; int c[2]; int i; int j; int k; int x; int y;\nmain() {\n" + body + "\n}\n");
  return classify(p, only_assertion(p));
}

}  // namespace

TEST(ReachingDefs, StrongScalarWeakArray) {
  Program p = parse("int a[2]; int x; int y; main() { x = 1; a[0] = 1; x = 2; a[1] = 2; y = x + a[0]; }");
  ReachingDefs rd = reaching_definitions(p);
  LocId use = p.body[4].loc;
  EXPECT_EQ(rd.at(use, "x"), (std::set<LocId>{p.body[2].loc}));
  EXPECT_EQ(rd.at(use, "a"), (std::set<LocId>{p.body[1].loc, p.body[3].loc}));
}

TEST(ReachingDefs, LoopCarriedAndBreak) {
  Program p = parse(
      "int i; int x; int y; main() { x = 0; for (i = 0; i < 3; i++) { y = x; if (y > 1) { break; } x = x + 1; } y = x; }");
  ReachingDefs rd = reaching_definitions(p);
  const Stmt& loop = p.body[1];
  LocId inner_use = loop.body[0].loc;
  LocId incr = loop.body[2].loc;
  EXPECT_EQ(rd.at(inner_use, "x"), (std::set<LocId>{p.body[0].loc, incr}));
  EXPECT_EQ(rd.at(inner_use, "i"), (std::set<LocId>{loop.loc}));
  EXPECT_EQ(rd.at(p.body[2].loc, "x"), (std::set<LocId>{p.body[0].loc, incr}));
}

TEST(DependenceClosure, Fig1) {
  Program p = load_fixture("fig1.c");
  LocId a = only_assertion(p);
  DependenceClosure c = dependence_closure(p, a);
  EXPECT_EQ(c.e_imp.size(), 3u);
  for (const auto& ref : c.e_imp) {
    EXPECT_EQ(ref.loc, a);
    EXPECT_EQ(ref.index, "i");
  }
  EXPECT_EQ(c.v_imp, (std::set<std::string>{"i"}));
  EXPECT_EQ(c.s_def, (std::set<LocId>{p.body[0].loc}));
  EXPECT_EQ(c.assertion_loop, p.body[1].loc);
}

TEST(DependenceClosure, ConstantAssertionHasEmptySets) {
  Program p = parse("int a[4]; int i; main() { for (i = 0; i < 4; i++) { a[i] = 1; assert(0 == 0); } }");
  DependenceClosure c = dependence_closure(p, only_assertion(p));
  EXPECT_TRUE(c.v_imp.empty());
  EXPECT_TRUE(c.e_imp.empty());
  EXPECT_TRUE(c.s_def.empty());
}

TEST(DependenceClosure, Fig7DefiningLoop) {
  Program p = load_fixture("fig7.c");
  DependenceClosure c = dependence_closure(p, only_assertion(p));
  EXPECT_EQ(c.s_def, (std::set<LocId>{p.body[2].loc}));
}

TEST(DependenceClosure, AssertionOutsideLoops) {
  Program p = parse("int x; main() { assert(x == 0); }");
  EXPECT_THROW(dependence_closure(p, only_assertion(p)), AssertionNotInLoop);
  EXPECT_THROW(classify(p, only_assertion(p)), AssertionNotInLoop);
}

TEST(Classify, Fig1IsPrecise) {
  Program p = load_fixture("fig1.c");
  PrecisionVerdict v = classify(p, only_assertion(p));
  EXPECT_TRUE(v.precise);
  EXPECT_TRUE(v.violated_rules.empty());
}

TEST(Classify, Fig5IsPrecise) {
  Program p = load_fixture("fig5.c");
  EXPECT_TRUE(classify(p, only_assertion(p)).precise);
}

TEST(Classify, Fig7ViolatesL1) {
  Program p = load_fixture("fig7.c");
  PrecisionVerdict v = classify(p, only_assertion(p));
  EXPECT_FALSE(v.precise);
  EXPECT_TRUE(rules_of(v).count("l1"));
  bool loop1 = false;
  for (const auto& r : v.violated_rules) loop1 |= r.rule == "l1" && r.location == p.body[2].loc;
  EXPECT_TRUE(loop1);
}

TEST(Classify, ConstantAssertionInFullLoop) {
  PrecisionVerdict v = classify_text("for (i = 0; i < 4; i++) { a[i] = 1; assert(1 == 1); }");
  EXPECT_TRUE(v.precise);
}

TEST(Classify, IndividualRules) {
  EXPECT_EQ(rules_of(classify_text("for (i = 0; i < 4; i++) { assert(a[i] == 0); } ")), std::set<std::string>{});
  // a2: read at a non-iterator index inside the assertion loop.
  EXPECT_TRUE(rules_of(classify_text("for (i = 0; i < 4; i++) { x = a[0]; assert(x == a[i]); }")).count("a2"));
  // a3: the array is modified at another index by the assertion loop, which
  // also breaks full access.
  EXPECT_EQ(rules_of(classify_text("for (i = 0; i < 4; i++) { a[0] = 1; assert(a[i] == 1); }")),
            (std::set<std::string>{"a3", "d5", "l1"}));
  // s4: a scalar carried across iterations.
  EXPECT_TRUE(rules_of(classify_text("for (i = 0; i < 4; i++) { assert(a[i] == x); x = a[i]; }")).count("s4"));
  // d5: a defining loop reads a shifted index.
  EXPECT_TRUE(rules_of(classify_text("for (i = 0; i < 4; i++) { x = 1; }\n"
                                     "for (i = 0; i < 4; i++) { b[i] = y; a[i] = b[i]; }\n"
                                     "a[0] = b[1];\n"
                                     "for (i = 0; i < 4; i++) { assert(a[i] == b[i]); }"))
                  .count("d5"));
  // d6: a defining loop uses a scalar it carries across iterations.
  EXPECT_TRUE(rules_of(classify_text("for (i = 0; i < 4; i++) { a[i] = x; x = x + 1; }\n"
                                     "for (i = 0; i < 4; i++) { assert(a[i] >= 0); }"))
                  .count("d6"));
}

TEST(Classify, RelaxationAcceptsDefinitionBeforeUse) {
  // k is redefined from the iterator before each use.
  EXPECT_TRUE(classify_text("for (i = 0; i < 4; i++) { k = i; a[i] = k; }\n"
                            "for (i = 0; i < 4; i++) { assert(a[i] == i); }")
                  .precise);
  // Defined on one branch only: the value from the previous iteration leaks.
  EXPECT_FALSE(classify_text("for (i = 0; i < 4; i++) { if (y > 0) { k = i; } a[i] = k; }\n"
                             "for (i = 0; i < 4; i++) { assert(a[i] == i); }")
                   .precise);
}

TEST(Classify, ViolationsAreSortedAndDeterministic) {
  Program p = load_fixture("fig7.c");
  PrecisionVerdict v1 = classify(p, only_assertion(p));
  PrecisionVerdict v2 = classify(p, only_assertion(p));
  ASSERT_EQ(v1.violated_rules, v2.violated_rules);
  for (std::size_t k = 1; k < v1.violated_rules.size(); ++k)
    EXPECT_LE(v1.violated_rules[k - 1].location, v1.violated_rules[k].location);
}

// Injecting a statement that touches only a fresh scalar, outside every loop,
// never turns a precise verdict imprecise and leaves the closure unchanged.
TEST(ClassifyProperties, MonotoneUnderUnrelatedStatements) {
  fuzz::Generator gen(31);
  int precise = 0;
  for (int n = 0; n < 1500 && precise < 60; ++n) {
    Program p = gen.next();
    auto as = assertions(p);
    if (as.empty()) continue;
    PrecisionVerdict v;
    try {
      v = classify(p, as.front());
    } catch (const AssertionNotInLoop&) {
      continue;
    }
    if (!v.precise) continue;
    ++precise;
    for (std::size_t pos = 0; pos <= p.body.size(); ++pos) {
      Program q = p;
      q.decls.push_back(Decl::scalar("unrelated"));
      q.body.insert(q.body.begin() + static_cast<std::ptrdiff_t>(pos),
                    Stmt::assign("unrelated", Expr::binary(BinOp::Add, Expr::var("unrelated"), Expr::constant(1))));
      renumber(q);
      LocId moved = assertions(q).front();
      PrecisionVerdict w = classify(q, moved);
      EXPECT_TRUE(w.precise) << print_program(q);
      DependenceClosure before = dependence_closure(p, as.front());
      DependenceClosure after = dependence_closure(q, moved);
      EXPECT_EQ(before.v_imp, after.v_imp);
      EXPECT_EQ(before.e_imp.size(), after.e_imp.size());
      EXPECT_EQ(before.s_def.size(), after.s_def.size());
    }
  }
  EXPECT_GE(precise, 30);
}

namespace {

// Rewrites `ss` so that every scalar definition records its location in
// `tag_<v>`, and every use of v first asserts that no definition outside the
// statically computed reaching set produced the current value.
class ReachCheck {
 public:
  ReachCheck(const Program& p, const ReachingDefs& rd) : rd_(rd) {
    walk_stmts(p.body, [&](const Stmt& s) {
      if (s.kind == StmtKind::Assign && !s.target.is_array()) defs_[s.target.name].insert(s.loc);
      if (s.kind == StmtKind::For) defs_[s.iterator].insert(s.loc);
    });
  }

  std::vector<Stmt> rewrite(const std::vector<Stmt>& ss) {
    std::vector<Stmt> out;
    for (const auto& s : ss) {
      if (s.kind != StmtKind::For)
        for (const Expr* e : own_exprs(s))
          for_each_expr(*e, [&](const Expr& x) {
            if (x.kind != ExprKind::Var || !defs_.count(x.name)) return;
            const auto& reach = rd_.at(s.loc, x.name);
            for (LocId d : defs_[x.name])
              if (!reach.count(d))
                out.push_back(Stmt::assert_(Expr::binary(BinOp::Ne, Expr::var(tag(x.name)), Expr::constant(d))));
            ++checks;
          });
      Stmt t = s;
      t.body = rewrite(s.body);
      t.orelse = rewrite(s.orelse);
      if (s.kind == StmtKind::Assert) t = Stmt::assign("sink", s.cond);
      if (s.kind == StmtKind::For) t.body.insert(t.body.begin(), mark(s.iterator, s.loc));
      out.push_back(std::move(t));
      if (s.kind == StmtKind::Assign && !s.target.is_array()) out.push_back(mark(s.target.name, s.loc));
      if (s.kind == StmtKind::For) out.push_back(mark(s.iterator, s.loc));
    }
    return out;
  }

  std::vector<std::string> tagged() const {
    std::vector<std::string> out;
    for (const auto& [v, d] : defs_) out.push_back(tag(v));
    return out;
  }

  int checks = 0;

 private:
  static std::string tag(const std::string& v) { return "tag_" + v; }
  static Stmt mark(const std::string& v, LocId loc) { return Stmt::assign(tag(v), Expr::constant(loc)); }

  const ReachingDefs& rd_;
  std::map<std::string, std::set<LocId>> defs_;
};

}  // namespace

// Every definition that concretely reaches a use, in some run of the
// exhaustive oracle, is in the statically computed reaching set.
TEST(ReachingDefs, CoverConcreteRuns) {
  fuzz::Generator gen(41);
  int checks = 0;
  for (int n = 0; n < 200; ++n) {
    Program p = gen.next();
    ReachingDefs rd = reaching_definitions(p);
    ReachCheck rc(p, rd);
    Program q;
    q.decls = p.decls;
    q.decls.push_back(Decl::scalar("sink"));
    for (const auto& t : rc.tagged()) q.decls.push_back(Decl::scalar(t));
    q.body = rc.rewrite(p.body);
    renumber(q);
    OracleConfig cfg;
    cfg.value_domain = IndexRange::known(0, 2);
    cfg.max_steps = 2'000'000;
    Verdict v;
    try {
      v = enumerate_runs(q, cfg);
    } catch (const OracleError&) {
      continue;
    }
    EXPECT_TRUE(v.safe()) << print_program(q);
    checks += rc.checks;
  }
  EXPECT_GT(checks, 1000);
}
