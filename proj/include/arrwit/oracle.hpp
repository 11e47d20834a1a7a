#pragma once

#include <arrwit/analysis.hpp>
#include <arrwit/ast.hpp>
#include <arrwit/errors.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace arrwit {

struct OracleConfig {
  /// Values produced by input() and, unless `nd_values` is set, by nd().
  IndexRange value_domain = IndexRange::known(0, 3);
  /// Total instruction executions allowed across the whole exploration.
  std::size_t max_steps = 20'000'000;
  /// Shrinks every declared array (the largest to this size, the others in
  /// proportion) and rewrites size-derived constants accordingly.
  std::optional<Value> array_size_override;
  /// Explicit candidate set for unranged nd(); overrides value_domain for nd().
  std::optional<std::vector<Value>> nd_values;
  /// Reject loops whose iterator range is not statically constant.
  bool require_constant_bounds = true;
};

enum class Outcome { Safe, Unsafe };

enum class FailureKind { Assertion, DivisionByZero };

struct Trace {
  std::vector<Value> nd_choices;
  LocId failing_assert = 0;
  FailureKind kind = FailureKind::Assertion;
  std::map<std::string, Value> final_state;

  bool operator==(const Trace&) const = default;
};

struct Verdict {
  Outcome outcome = Outcome::Safe;
  std::optional<Trace> witness;
  /// Distinct (location, state) pairs explored.
  std::size_t states = 0;
  /// Runs cut short by an out-of-bounds access or an empty nd range.
  std::size_t blocked = 0;

  bool safe() const { return outcome == Outcome::Safe; }
};

// ---------------------------------------------------------------------------
// Array-size scaling

/// Maps declared array sizes (and constants equal to a size or size - 1) to
/// smaller values so a large fixture fits the oracle.
struct SizeScaling {
  std::map<Value, Value> sizes;

  Value map_constant(Value c) const {
    if (auto it = sizes.find(c); it != sizes.end()) return it->second;
    if (auto it = sizes.find(c + 1); it != sizes.end()) return it->second - 1;
    return c;
  }

  void apply(Expr& e) const {
    if (e.kind == ExprKind::Const) e.value = map_constant(e.value);
    for (auto& a : e.args) apply(a);
  }

  void apply(std::vector<Stmt>& ss) const {
    for (auto& s : ss) {
      apply(s.cond);
      apply(s.value);
      apply(s.init);
      apply(s.step);
      if (s.target.index) apply(*s.target.index);
      apply(s.body);
      apply(s.orelse);
    }
  }

  Program apply(Program p) const {
    for (auto& d : p.decls)
      if (d.is_array()) d.size = sizes.count(d.size) ? sizes.at(d.size) : d.size;
    apply(p.body);
    return p;
  }
};

inline SizeScaling make_scaling(const Program& p, Value target) {
  SizeScaling sc;
  Value largest = 0;
  for (const auto& d : p.decls)
    if (d.is_array()) largest = std::max(largest, d.size);
  if (largest <= target) return sc;
  for (const auto& d : p.decls) {
    if (!d.is_array() || d.size <= target) continue;
    Value scaled = (d.size * target + largest / 2) / largest;
    sc.sizes[d.size] = std::max<Value>(1, scaled);
  }
  return sc;
}

namespace detail {

// ---------------------------------------------------------------------------
// Straight-line code for the interpreter

struct Instr {
  enum class Op { Assign, Guarded, SetIter, Branch, Jump, Assert, Init, Halt };
  Op op = Op::Halt;
  const Stmt* stmt = nullptr;
  const Expr* expr = nullptr;
  int slot = -1;
  int target = -1;
};

class Compiler {
 public:
  explicit Compiler(const std::unordered_map<std::string, int>& slots) : slots_(slots) {}

  std::vector<Instr> run(const std::vector<Stmt>& body) {
    emit_all(body);
    code_.push_back({Instr::Op::Halt});
    return std::move(code_);
  }

 private:
  struct LoopLabels {
    std::vector<int> breaks;
    std::vector<int> continues;
  };

  int here() const { return static_cast<int>(code_.size()); }
  int push(Instr i) {
    code_.push_back(i);
    return here() - 1;
  }

  void emit_all(const std::vector<Stmt>& ss) {
    for (const auto& s : ss) emit(s);
  }

  void emit(const Stmt& s) {
    using Op = Instr::Op;
    switch (s.kind) {
      case StmtKind::Seq: emit_all(s.body); break;
      case StmtKind::Assign: push({Op::Assign, &s}); break;
      case StmtKind::GuardedAssign: push({Op::Guarded, &s}); break;
      case StmtKind::Assert: push({Op::Assert, &s, &s.cond}); break;
      case StmtKind::WitnessInit: push({Op::Init, &s}); break;
      case StmtKind::If: {
        int br = push({Op::Branch, &s, &s.cond});
        emit_all(s.body);
        code_[br].target = here();
        break;
      }
      case StmtKind::IfElse: {
        int br = push({Op::Branch, &s, &s.cond});
        emit_all(s.body);
        int j = push({Op::Jump, &s});
        code_[br].target = here();
        emit_all(s.orelse);
        code_[j].target = here();
        break;
      }
      case StmtKind::For: {
        int it = slots_.at(s.iterator);
        push({Op::SetIter, &s, &s.init, it});
        int head = push({Op::Branch, &s, &s.cond});
        loops_.emplace_back();
        emit_all(s.body);
        int cont = push({Op::SetIter, &s, &s.step, it});
        push({Op::Jump, &s, nullptr, -1, head});
        code_[head].target = here();
        finish_loop(cont, here());
        break;
      }
      case StmtKind::SingleTrip: {
        loops_.emplace_back();
        emit_all(s.body);
        finish_loop(here(), here());
        break;
      }
      case StmtKind::Break:
      case StmtKind::Continue: {
        if (loops_.empty()) throw TransformError("break/continue outside a loop");
        int j = push({Op::Jump, &s});
        (s.kind == StmtKind::Break ? loops_.back().breaks : loops_.back().continues).push_back(j);
        break;
      }
    }
  }

  void finish_loop(int cont, int exit) {
    for (int j : loops_.back().breaks) code_[j].target = exit;
    for (int j : loops_.back().continues) code_[j].target = cont;
    loops_.pop_back();
  }

  const std::unordered_map<std::string, int>& slots_;
  std::vector<Instr> code_;
  std::vector<LoopLabels> loops_;
};

/// Replays or enumerates the nondeterministic choices made while executing
/// a single instruction (an explicit stack of choice points, advanced like
/// an odometer).
class ChoiceCursor {
 public:
  void restart() {
    cursor_ = 0;
    chosen_.clear();
  }

  /// Index into a candidate list of size n (n >= 1).
  std::size_t pick(std::size_t n) {
    if (cursor_ == path_.size()) {
      path_.push_back(0);
      arity_.push_back(n);
    }
    return path_[cursor_++];
  }

  bool advance() {
    path_.resize(cursor_);
    arity_.resize(cursor_);
    while (!path_.empty()) {
      if (path_.back() + 1 < arity_.back()) {
        ++path_.back();
        return true;
      }
      path_.pop_back();
      arity_.pop_back();
    }
    return false;
  }

  std::vector<Value> chosen_;

 private:
  std::vector<std::size_t> path_;
  std::vector<std::size_t> arity_;
  std::size_t cursor_ = 0;
};

using State = std::vector<Value>;

struct StateKeyHash {
  std::size_t operator()(const std::pair<int, State>& k) const {
    std::size_t h = std::hash<int>()(k.first);
    for (Value v : k.second) h ^= std::hash<Value>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

enum class Status { Ok, Fault, Blocked };

struct Step {
  enum class Kind { Next, Fail, Blocked, Halt } kind = Kind::Next;
  int pc = 0;
  State state;
  std::vector<Value> choices;
  LocId loc = 0;
  FailureKind failure = FailureKind::Assertion;
};

class Machine {
 public:
  Machine(const Program& p, const OracleConfig& cfg) : cfg_(cfg) {
    for (const auto& d : p.decls) {
      names_.push_back(d.name);
      if (d.is_array()) {
        arrays_[d.name] = {static_cast<int>(initial_.size()), d.size};
        for (Value k = 0; k < d.size; ++k) {
          labels_.push_back(d.name + "[" + std::to_string(k) + "]");
          initial_.push_back(0);
        }
      } else {
        slots_[d.name] = static_cast<int>(initial_.size());
        labels_.push_back(d.name);
        initial_.push_back(d.init.value_or(0));
      }
    }
    code_ = Compiler(slots_).run(p.body);
    for (Value v = cfg.value_domain.lo; v <= cfg.value_domain.hi; ++v) domain_.push_back(v);
    nd_domain_ = cfg.nd_values ? *cfg.nd_values : domain_;
    if (domain_.empty() || nd_domain_.empty()) throw OracleError(OracleError::Kind::BudgetExceeded, "empty value domain");
  }

  const State& initial() const { return initial_; }
  const std::vector<Instr>& code() const { return code_; }

  std::map<std::string, Value> describe(const State& s) const {
    std::map<std::string, Value> out;
    for (std::size_t k = 0; k < s.size(); ++k) out[labels_[k]] = s[k];
    return out;
  }

  /// All outcomes of executing instruction `pc` in `state`, in ascending
  /// choice order. Throws once more than `budget` of them would be produced.
  std::vector<Step> expand(int pc, const State& state, std::size_t budget = SIZE_MAX) {
    std::vector<Step> out;
    ChoiceCursor cur;
    do {
      if (out.size() >= budget)
        throw OracleError(OracleError::Kind::BudgetExceeded, "enumeration budget exceeded while branching");
      cur.restart();
      out.push_back(exec(pc, state, cur));
      out.back().choices = cur.chosen_;
    } while (cur.advance());
    return out;
  }

  /// Executes `pc` with a fixed sequence of choices (used for replay).
  Step exec_with(int pc, const State& state, const std::vector<Value>& values, std::size_t& used, bool& ok) {
    replay_ = &values;
    replay_pos_ = &used;
    replay_ok_ = true;
    ChoiceCursor cur;
    cur.restart();
    Step s = exec(pc, state, cur);
    s.choices = cur.chosen_;
    replay_ = nullptr;
    ok = replay_ok_;
    return s;
  }

 private:
  struct Eval {
    Status status = Status::Ok;
    Value v = 0;
  };

  Value choose(ChoiceCursor& cur, const std::vector<Value>& candidates) {
    Value v;
    if (replay_) {
      if (*replay_pos_ >= replay_->size() ||
          std::find(candidates.begin(), candidates.end(), (*replay_)[*replay_pos_]) == candidates.end()) {
        replay_ok_ = false;
        v = candidates.front();
      } else {
        v = (*replay_)[(*replay_pos_)++];
      }
    } else {
      v = candidates[cur.pick(candidates.size())];
    }
    cur.chosen_.push_back(v);
    return v;
  }

  Value choose_range(ChoiceCursor& cur, Value lo, Value hi) {
    std::vector<Value> c;
    for (Value v = lo; v <= hi; ++v) c.push_back(v);
    return choose(cur, c);
  }

  Eval eval(const Expr& e, const State& s, ChoiceCursor& cur) {
    switch (e.kind) {
      case ExprKind::Const: return {Status::Ok, e.value};
      case ExprKind::Var: return {Status::Ok, s[slots_.at(e.name)]};
      case ExprKind::ArrayRead: {
        Eval i = eval(e.index(), s, cur);
        if (i.status != Status::Ok) return i;
        auto [base, size] = arrays_.at(e.name);
        if (i.v < 0 || i.v >= size) return {Status::Blocked, 0};
        return {Status::Ok, s[base + i.v]};
      }
      case ExprKind::Binary: {
        Eval l = eval(e.args[0], s, cur);
        if (l.status != Status::Ok) return l;
        if (e.op == BinOp::And && l.v == 0) return {Status::Ok, 0};
        if (e.op == BinOp::Or && l.v != 0) return {Status::Ok, 1};
        Eval r = eval(e.args[1], s, cur);
        if (r.status != Status::Ok) return r;
        return apply(e.op, l.v, r.v);
      }
      case ExprKind::Ternary: {
        Eval c = eval(e.args[0], s, cur);
        if (c.status != Status::Ok) return c;
        return eval(e.args[c.v != 0 ? 1 : 2], s, cur);
      }
      case ExprKind::Nd: return {Status::Ok, choose(cur, nd_domain_)};
      case ExprKind::NdRange: {
        Eval lo = eval(e.args[0], s, cur);
        if (lo.status != Status::Ok) return lo;
        Eval hi = eval(e.args[1], s, cur);
        if (hi.status != Status::Ok) return hi;
        if (hi.v < lo.v) return {Status::Blocked, 0};
        return {Status::Ok, choose_range(cur, lo.v, hi.v)};
      }
      case ExprKind::Input: return {Status::Ok, choose(cur, domain_)};
    }
    return {Status::Blocked, 0};
  }

  static Eval apply(BinOp op, Value a, Value b) {
    Value r = 0;
    switch (op) {
      case BinOp::Add:
        if (__builtin_add_overflow(a, b, &r)) return {Status::Blocked, 0};
        return {Status::Ok, r};
      case BinOp::Sub:
        if (__builtin_sub_overflow(a, b, &r)) return {Status::Blocked, 0};
        return {Status::Ok, r};
      case BinOp::Mul:
        if (__builtin_mul_overflow(a, b, &r)) return {Status::Blocked, 0};
        return {Status::Ok, r};
      case BinOp::Div:
        if (b == 0) return {Status::Fault, 0};
        return {Status::Ok, a / b};
      case BinOp::Mod:
        if (b == 0) return {Status::Fault, 0};
        return {Status::Ok, a % b};
      case BinOp::Eq: return {Status::Ok, a == b};
      case BinOp::Ne: return {Status::Ok, a != b};
      case BinOp::Lt: return {Status::Ok, a < b};
      case BinOp::Le: return {Status::Ok, a <= b};
      case BinOp::Gt: return {Status::Ok, a > b};
      case BinOp::Ge: return {Status::Ok, a >= b};
      case BinOp::And: return {Status::Ok, a != 0 && b != 0};
      case BinOp::Or: return {Status::Ok, a != 0 || b != 0};
    }
    return {Status::Blocked, 0};
  }

  static Step bad(const Eval& e, LocId loc) {
    Step s;
    if (e.status == Status::Fault) {
      s.kind = Step::Kind::Fail;
      s.failure = FailureKind::DivisionByZero;
      s.loc = loc;
    } else {
      s.kind = Step::Kind::Blocked;
    }
    return s;
  }

  bool store(const LValue& lv, Value v, State& s, const State& pre, ChoiceCursor& cur, Eval& err) {
    if (!lv.index) {
      s[slots_.at(lv.name)] = v;
      return true;
    }
    Eval i = eval(*lv.index, pre, cur);
    if (i.status != Status::Ok) {
      err = i;
      return false;
    }
    auto [base, size] = arrays_.at(lv.name);
    if (i.v < 0 || i.v >= size) {
      err = {Status::Blocked, 0};
      return false;
    }
    s[base + i.v] = v;
    return true;
  }

  Step exec(int pc, const State& pre, ChoiceCursor& cur) {
    using Op = Instr::Op;
    const Instr& in = code_[pc];
    Step out;
    out.pc = pc + 1;
    LocId loc = in.stmt ? in.stmt->loc : 0;
    switch (in.op) {
      case Op::Halt: out.kind = Step::Kind::Halt; return out;
      case Op::Jump: out.pc = in.target; out.state = pre; return out;
      case Op::SetIter: {
        Eval v = eval(*in.expr, pre, cur);
        if (v.status != Status::Ok) return bad(v, loc);
        out.state = pre;
        out.state[in.slot] = v.v;
        return out;
      }
      case Op::Branch: {
        Eval c = eval(*in.expr, pre, cur);
        if (c.status != Status::Ok) return bad(c, loc);
        out.state = pre;
        if (c.v == 0) out.pc = in.target;
        return out;
      }
      case Op::Assert: {
        Eval c = eval(*in.expr, pre, cur);
        if (c.status != Status::Ok) return bad(c, loc);
        if (c.v == 0) {
          out.kind = Step::Kind::Fail;
          out.loc = loc;
          out.state = pre;
          return out;
        }
        out.state = pre;
        return out;
      }
      case Op::Init: {
        Eval v = eval(in.stmt->value, pre, cur);
        if (v.status != Status::Ok) return bad(v, loc);
        out.state = pre;
        for (const auto& n : in.stmt->names) out.state[slots_.at(n)] = v.v;
        return out;
      }
      case Op::Assign:
      case Op::Guarded: {
        const Stmt& st = *in.stmt;
        bool take = true;
        if (in.op == Op::Guarded) {
          Eval g = eval(st.cond, pre, cur);
          if (g.status != Status::Ok) return bad(g, loc);
          take = g.v != 0;
        }
        out.state = pre;
        Eval err;
        if (take && st.target.index) {
          // Index is evaluated before the right-hand side.
          Eval i = eval(*st.target.index, pre, cur);
          if (i.status != Status::Ok) return bad(i, loc);
          auto [base, size] = arrays_.at(st.target.name);
          if (i.v < 0 || i.v >= size) return bad({Status::Blocked, 0}, loc);
          Eval v = eval(st.value, pre, cur);
          if (v.status != Status::Ok) return bad(v, loc);
          out.state[base + i.v] = v.v;
          return out;
        }
        Eval v = eval(st.value, pre, cur);
        if (v.status != Status::Ok) return bad(v, loc);
        if (take && !store(st.target, v.v, out.state, pre, cur, err)) return bad(err, loc);
        return out;
      }
    }
    return out;
  }

  const OracleConfig& cfg_;
  std::vector<std::string> names_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> slots_;
  std::unordered_map<std::string, std::pair<int, Value>> arrays_;
  State initial_;
  std::vector<Instr> code_;
  std::vector<Value> domain_;
  std::vector<Value> nd_domain_;
  const std::vector<Value>* replay_ = nullptr;
  std::size_t* replay_pos_ = nullptr;
  bool replay_ok_ = true;
};

inline void check_bounds(const Program& p) {
  walk_stmts(p.body, [&](const Stmt& s) {
    if (s.kind == StmtKind::For && loop_bound(s).kind == IndexRange::Kind::Unknown)
      throw OracleError(OracleError::Kind::NonConstantBound,
                        "loop at location " + std::to_string(s.loc) + " has no constant iteration range");
  });
}

struct Exploration {
  Verdict verdict;
  std::set<Value> observed;
  std::set<State> finals;
};

enum class Mode { FirstFailure, Exhaustive, FinalStates };

/// Depth-first search over (pc, state). A node already visited has had its
/// whole subtree explored without finding a failure (or we would have
/// stopped), so pruning it keeps the first failure lexicographically first.
inline Exploration explore(const OracleConfig& cfg, Mode mode, Machine& m) {
  const bool exhaustive = mode != Mode::FirstFailure;
  Exploration ex;
  std::unordered_set<std::pair<int, State>, StateKeyHash> seen;
  std::size_t steps = 0;

  struct Frame {
    int pc;
    State state;
    std::vector<Value> arrived_by;
    std::vector<Step> succ;
    std::size_t next = 0;
    bool expanded = false;
  };
  std::vector<Frame> stack;
  stack.push_back({0, m.initial(), {}, {}, 0, false});
  seen.insert({0, m.initial()});
  if (exhaustive) ex.observed.insert(m.initial().begin(), m.initial().end());

  while (!stack.empty()) {
    Frame& f = stack.back();
    if (!f.expanded) {
      f.succ = m.expand(f.pc, f.state, cfg.max_steps - std::min(steps, cfg.max_steps) + 1);
      f.expanded = true;
      // Every successor counts: one statement with several nd() can fan out
      // into thousands of them.
      steps += std::max<std::size_t>(1, f.succ.size());
      if (steps > cfg.max_steps)
        throw OracleError(OracleError::Kind::BudgetExceeded,
                          "enumeration budget of " + std::to_string(cfg.max_steps) + " steps exceeded");
    }
    if (f.next >= f.succ.size()) {
      stack.pop_back();
      continue;
    }
    Step st = std::move(f.succ[f.next++]);
    if (exhaustive) ex.observed.insert(st.choices.begin(), st.choices.end());
    switch (st.kind) {
      case Step::Kind::Halt:
        if (mode == Mode::FinalStates) ex.finals.insert(f.state);
        break;
      case Step::Kind::Blocked: ++ex.verdict.blocked; break;
      case Step::Kind::Fail: {
        if (!ex.verdict.witness) {
          Trace t;
          for (const auto& fr : stack) t.nd_choices.insert(t.nd_choices.end(), fr.arrived_by.begin(), fr.arrived_by.end());
          t.nd_choices.insert(t.nd_choices.end(), st.choices.begin(), st.choices.end());
          t.failing_assert = st.loc;
          t.kind = st.failure;
          t.final_state = m.describe(f.state);
          ex.verdict.outcome = Outcome::Unsafe;
          ex.verdict.witness = std::move(t);
        }
        if (!exhaustive) {
          ex.verdict.states = seen.size();
          return ex;
        }
        break;
      }
      case Step::Kind::Next: {
        if (!seen.insert({st.pc, st.state}).second) break;
        if (exhaustive) ex.observed.insert(st.state.begin(), st.state.end());
        Frame child{st.pc, std::move(st.state), std::move(st.choices), {}, 0, false};
        stack.push_back(std::move(child));
        break;
      }
    }
  }
  ex.verdict.states = seen.size();
  return ex;
}

}  // namespace detail

/// Exhaustively explores every nd()/input() choice of `p` within `cfg` and
/// reports the lexicographically first failing run, if any.
inline Verdict enumerate_runs(const Program& p, const OracleConfig& cfg = {}) {
  Program q = cfg.array_size_override ? make_scaling(p, *cfg.array_size_override).apply(p) : p;
  if (cfg.require_constant_bounds) detail::check_bounds(q);
  detail::Machine m(q, cfg);
  return detail::explore(cfg, detail::Mode::FirstFailure, m).verdict;
}

/// Like enumerate_runs, but visits the whole reachable state space and also
/// returns every value held by any variable or produced by a choice.
inline std::pair<Verdict, std::set<Value>> enumerate_all(const Program& p, const OracleConfig& cfg = {}) {
  Program q = cfg.array_size_override ? make_scaling(p, *cfg.array_size_override).apply(p) : p;
  if (cfg.require_constant_bounds) detail::check_bounds(q);
  detail::Machine m(q, cfg);
  auto ex = detail::explore(cfg, detail::Mode::Exhaustive, m);
  return {ex.verdict, std::move(ex.observed)};
}

/// Every state in which some run reaches the end of the program without
/// failing or blocking (arrays expanded per index).
inline std::vector<std::map<std::string, Value>> final_states(const Program& p, const OracleConfig& cfg = {}) {
  Program q = cfg.array_size_override ? make_scaling(p, *cfg.array_size_override).apply(p) : p;
  if (cfg.require_constant_bounds) detail::check_bounds(q);
  detail::Machine m(q, cfg);
  auto ex = detail::explore(cfg, detail::Mode::FinalStates, m);
  std::vector<std::map<std::string, Value>> out;
  for (const auto& s : ex.finals) out.push_back(m.describe(s));
  return out;
}

/// Re-executes a single run following `choices`. Returns the failing
/// location, or nullopt when the run completes, blocks, or the choices do not
/// fit the program.
inline std::optional<LocId> replay(const Program& p, const std::vector<Value>& choices, const OracleConfig& cfg = {}) {
  Program q = cfg.array_size_override ? make_scaling(p, *cfg.array_size_override).apply(p) : p;
  detail::Machine m(q, cfg);
  int pc = 0;
  detail::State s = m.initial();
  std::size_t used = 0;
  for (std::size_t steps = 0; steps < cfg.max_steps; ++steps) {
    bool ok = true;
    detail::Step st = m.exec_with(pc, s, choices, used, ok);
    if (!ok) return std::nullopt;
    switch (st.kind) {
      case detail::Step::Kind::Fail: return st.loc;
      case detail::Step::Kind::Halt:
      case detail::Step::Kind::Blocked: return std::nullopt;
      case detail::Step::Kind::Next:
        pc = st.pc;
        s = std::move(st.state);
        break;
    }
  }
  return std::nullopt;
}

}  // namespace arrwit
