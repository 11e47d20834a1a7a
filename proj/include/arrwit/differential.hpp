#pragma once

#include <arrwit/ast.hpp>
#include <arrwit/oracle.hpp>
#include <arrwit/precision.hpp>

#include <set>
#include <vector>

namespace arrwit {

struct DifferentialResult {
  Verdict orig_verdict;
  Verdict trans_verdict;
  /// Original unsafe implies transformed unsafe.
  bool sound = true;
  /// Every assertion is inside a loop and classifies precise.
  bool precise_claim = false;
  /// No run of the original was cut short by an out-of-bounds access.
  bool original_in_bounds = true;
  /// When precise_claim holds and the original stays in bounds, original
  /// safe iff transformed safe. Out-of-bounds runs have no defined outcome,
  /// so there is nothing to be precise about.
  bool precise_consistent = true;
  /// Candidate values used for unranged nd() in the transformed program.
  std::vector<Value> nd_values;

  bool ok() const { return sound && precise_consistent; }
};

/// True when the program has at least one assertion and every assertion is
/// classified precise.
inline bool all_assertions_precise(const Program& p) {
  auto as = assertions(p);
  if (as.empty()) return false;
  for (LocId a : as) {
    try {
      if (!classify(p, a).precise) return false;
    } catch (const AssertionNotInLoop&) {
      return false;
    }
  }
  return true;
}

/// Runs the oracle on both programs. The original is explored completely;
/// every value it ever holds joins value_domain as a candidate for the
/// transformed program's unranged nd(), so a havocked variable can take
/// any value the original could have produced.
inline DifferentialResult differential_check(const Program& original, const Program& transformed,
                                             const OracleConfig& cfg = {}) {
  Program orig = original;
  Program trans = transformed;
  if (cfg.array_size_override) {
    SizeScaling sc = make_scaling(original, *cfg.array_size_override);
    orig = sc.apply(std::move(orig));
    trans = sc.apply(std::move(trans));
  }
  OracleConfig base = cfg;
  base.array_size_override.reset();

  DifferentialResult r;
  auto [ov, observed] = enumerate_all(orig, base);
  r.orig_verdict = std::move(ov);
  for (Value v = cfg.value_domain.lo; v <= cfg.value_domain.hi; ++v) observed.insert(v);
  if (cfg.nd_values) observed.insert(cfg.nd_values->begin(), cfg.nd_values->end());
  r.nd_values.assign(observed.begin(), observed.end());

  OracleConfig tcfg = base;
  tcfg.nd_values = r.nd_values;
  r.trans_verdict = enumerate_runs(trans, tcfg);

  r.sound = !(!r.orig_verdict.safe() && r.trans_verdict.safe());
  r.precise_claim = all_assertions_precise(orig);
  r.original_in_bounds = r.orig_verdict.blocked == 0;
  r.precise_consistent =
      !r.precise_claim || !r.original_in_bounds || r.orig_verdict.safe() == r.trans_verdict.safe();
  return r;
}

}  // namespace arrwit
