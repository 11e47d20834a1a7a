#pragma once

#include <arrwit/ast.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace arrwit {

/// Definition sites per variable. Scalars are killed by assignment; arrays
/// accumulate (an element write never kills the other elements). A loop
/// header counts as a definition of its iterator, located at the loop.
using DefMap = std::map<std::string, std::set<LocId>>;

struct ReachingDefs {
  /// Definitions reaching the entry of each statement. For a loop this is
  /// the state at its test, so it covers uses in the header.
  std::map<LocId, DefMap> in;

  const std::set<LocId>& at(LocId loc, const std::string& var) const {
    static const std::set<LocId> none;
    auto s = in.find(loc);
    if (s == in.end()) return none;
    auto v = s->second.find(var);
    return v == s->second.end() ? none : v->second;
  }
};

namespace detail {

using Flow = std::optional<DefMap>;  // nullopt: unreachable

inline Flow join(const Flow& a, const Flow& b) {
  if (!a) return b;
  if (!b) return a;
  DefMap out = *a;
  for (const auto& [v, ds] : *b) out[v].insert(ds.begin(), ds.end());
  return out;
}

class ReachingDefsSolver {
 public:
  ReachingDefs result;

  Flow run(const std::vector<Stmt>& ss, Flow in) {
    for (const auto& s : ss) in = step(s, std::move(in));
    return in;
  }

 private:
  struct Jumps {
    Flow breaks;
    Flow continues;
  };
  std::vector<Jumps> loops_;

  void record(LocId loc, const Flow& f) {
    if (!f) return;
    auto& dst = result.in[loc];
    for (const auto& [v, ds] : *f) dst[v].insert(ds.begin(), ds.end());
  }

  Flow step(const Stmt& s, Flow in) {
    if (s.kind != StmtKind::For) record(s.loc, in);
    if (!in) return in;
    switch (s.kind) {
      case StmtKind::Assign:
        if (s.target.is_array())
          (*in)[s.target.name].insert(s.loc);
        else
          (*in)[s.target.name] = {s.loc};
        return in;
      case StmtKind::GuardedAssign:
        (*in)[s.target.name].insert(s.loc);
        return in;
      case StmtKind::WitnessInit:
        for (const auto& n : s.names) (*in)[n] = {s.loc};
        return in;
      case StmtKind::Seq: return run(s.body, std::move(in));
      case StmtKind::If: return join(run(s.body, in), in);
      case StmtKind::IfElse: return join(run(s.body, in), run(s.orelse, in));
      case StmtKind::Break:
        if (!loops_.empty()) loops_.back().breaks = join(loops_.back().breaks, in);
        return std::nullopt;
      case StmtKind::Continue:
        if (!loops_.empty()) loops_.back().continues = join(loops_.back().continues, in);
        return std::nullopt;
      case StmtKind::SingleTrip: {
        loops_.emplace_back();
        Flow out = run(s.body, in);
        Jumps j = std::move(loops_.back());
        loops_.pop_back();
        return join(join(out, j.breaks), j.continues);
      }
      case StmtKind::For: {
        Flow entry = in;
        (*entry)[s.iterator] = {s.loc};
        Flow head = entry;
        Flow breaks;
        for (;;) {
          record(s.loc, head);
          loops_.emplace_back();
          Flow out = run(s.body, head);
          Jumps j = std::move(loops_.back());
          loops_.pop_back();
          breaks = join(breaks, j.breaks);
          Flow back = join(out, j.continues);
          if (back) (*back)[s.iterator] = {s.loc};
          Flow next = join(entry, back);
          if (next == head) break;
          head = std::move(next);
        }
        return join(head, breaks);
      }
      case StmtKind::Assert: return in;
    }
    return in;
  }
};

}  // namespace detail

inline ReachingDefs reaching_definitions(const Program& p) {
  detail::ReachingDefsSolver solver;
  solver.run(p.body, DefMap{});
  return std::move(solver.result);
}

}  // namespace arrwit
