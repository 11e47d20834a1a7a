#pragma once

#include <arrwit/analysis.hpp>
#include <arrwit/oracle.hpp>
#include <arrwit/precision.hpp>

#include <nlohmann/json.hpp>

#include <map>
#include <string>
#include <vector>

namespace arrwit {

using Json = nlohmann::ordered_json;

/// Classification of one assertion as it appears in the report.
struct AssertionVerdict {
  LocId location = 0;
  PrecisionVerdict verdict;
  /// Set when the assertion lies outside every loop; no precision claim.
  bool outside_loops = false;
};

inline Json to_json(const IndexRange& r) {
  switch (r.kind) {
    case IndexRange::Kind::Known: return Json{{"lo", r.lo}, {"hi", r.hi}};
    case IndexRange::Kind::Empty: return "empty";
    case IndexRange::Kind::Unknown: return "unknown";
  }
  return "unknown";
}

inline Json report_json(const std::vector<ArrayInfo>& arrays, const std::map<LocId, LoopSummary>& summaries,
                        const std::vector<AssertionVerdict>& verdicts) {
  Json doc;
  doc["arrays"] = Json::array();
  for (const auto& a : arrays)
    doc["arrays"].push_back(
        {{"name", a.name}, {"size", a.size}, {"witness_var", a.witness_var}, {"witness_idx", a.witness_idx}});
  doc["loops"] = Json::array();
  for (const auto& [loc, s] : summaries) {
    Json defs = Json::array();
    for (const auto& d : s.defs) defs.push_back(d);
    doc["loops"].push_back({{"location", loc},
                            {"iterator", s.iterator},
                            {"full_access", s.full_access},
                            {"defs", defs},
                            {"bound", to_json(s.bound)}});
  }
  doc["assertions"] = Json::array();
  for (const auto& v : verdicts) {
    Json rules = Json::array();
    for (const auto& r : v.verdict.violated_rules)
      rules.push_back({{"rule", r.rule}, {"location", r.location}, {"note", r.note}});
    Json entry{{"location", v.location}, {"precise", v.verdict.precise && !v.outside_loops}};
    if (v.outside_loops) entry["note"] = "assertion outside loops: no precision claim";
    entry["violated_rules"] = rules;
    doc["assertions"].push_back(std::move(entry));
  }
  return doc;
}

/// JSON analysis report: arrays with their witness names, loop summaries and
/// per-assertion precision verdicts. Key order is fixed.
inline std::string emit_report(const std::vector<ArrayInfo>& arrays, const std::map<LocId, LoopSummary>& summaries,
                               const std::vector<AssertionVerdict>& verdicts) {
  return report_json(arrays, summaries, verdicts).dump(2) + "\n";
}

/// Classifies every assertion of `p`.
inline std::vector<AssertionVerdict> classify_all(const Program& p) {
  std::vector<AssertionVerdict> out;
  for (LocId a : assertions(p)) {
    AssertionVerdict v;
    v.location = a;
    try {
      v.verdict = classify(p, a);
    } catch (const AssertionNotInLoop&) {
      v.outside_loops = true;
      v.verdict.precise = false;
    }
    out.push_back(std::move(v));
  }
  return out;
}

inline std::string emit_report(const Program& p) {
  auto arrays = collect_arrays(p);
  return emit_report(arrays, summarize_loops(p, arrays), classify_all(p));
}

inline Json trace_json(const Trace& t) {
  Json state = Json::object();
  for (const auto& [k, v] : t.final_state) state[k] = v;
  return Json{{"nd_choices", t.nd_choices},
              {"failing_location", t.failing_assert},
              {"failure", t.kind == FailureKind::Assertion ? "assertion" : "division_by_zero"},
              {"final_state", state}};
}

inline Json verdict_json(const Verdict& v) {
  Json out{{"outcome", v.safe() ? "safe" : "unsafe"}, {"states", v.states}, {"blocked_runs", v.blocked}};
  out["witness"] = v.witness ? trace_json(*v.witness) : Json();
  return out;
}

}  // namespace arrwit
