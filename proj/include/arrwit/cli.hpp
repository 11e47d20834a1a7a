#pragma once

#include <arrwit/differential.hpp>
#include <arrwit/emit.hpp>
#include <arrwit/errors.hpp>
#include <arrwit/parser.hpp>
#include <arrwit/report.hpp>
#include <arrwit/transform.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace arrwit {

struct CliInvocation {
  std::string input_path;
  std::optional<std::string> output_path;
  NdStyle nd_style = NdStyle::Cbmc;
  std::optional<std::string> report_path;
  bool check_precision = false;
  bool oracle = false;
  bool bmc = false;
  std::optional<Value> array_size;
  std::optional<IndexRange> value_domain;
  std::size_t max_steps = OracleConfig{}.max_steps;
};

enum ExitCode { kExitOk = 0, kExitViolation = 1, kExitError = 2 };

inline constexpr Value kMaxOracleArraySize = 8;

/// Writes `text` to `path` through a sibling temporary and a rename, so a
/// reader never sees a partial file.
inline void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

/// Parses `lo:hi`.
inline std::optional<IndexRange> parse_value_domain(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  try {
    std::size_t used = 0;
    Value lo = std::stoll(text.substr(0, colon), &used);
    if (used != colon) return std::nullopt;
    std::string rest = text.substr(colon + 1);
    Value hi = std::stoll(rest, &used);
    if (used != rest.size() || hi < lo) return std::nullopt;
    return IndexRange::known(lo, hi);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace detail {

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string describe(const Verdict& v) {
  std::ostringstream os;
  os << (v.safe() ? "safe" : "unsafe") << " (" << v.states << " states";
  if (v.witness) {
    os << "; fails at location " << v.witness->failing_assert;
    if (v.witness->kind == FailureKind::DivisionByZero) os << " by division by zero";
    os << " with choices [";
    for (std::size_t k = 0; k < v.witness->nd_choices.size(); ++k)
      os << (k ? ", " : "") << v.witness->nd_choices[k];
    os << ']';
  }
  os << ')';
  return os.str();
}

inline int run_bmc(const std::string& emitted, const std::optional<std::string>& output_path, std::ostream& out,
                   std::ostream& err) {
  const char* bin = std::getenv("BMC_BIN");
  if (!bin || !*bin) {
    err << "arrwit: warning: --bmc given but BMC_BIN is not set; skipping the model checker\n";
    return kExitOk;
  }
  std::string file;
  if (output_path) {
    file = *output_path;
  } else {
    file = (std::filesystem::temp_directory_path() / "arrwit_bmc_input.c").string();
    write_atomically(file, emitted);
  }
  std::string cmd = std::string("'") + bin + "' '" + file + "'";
  out.flush();
  int status = std::system(cmd.c_str());
  if (status == -1) {
    err << "arrwit: warning: could not start '" << bin << "'\n";
    return kExitOk;
  }
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitError;
  out << "bmc: " << bin << " exited with status " << code << '\n';
  return code;
}

}  // namespace detail

/// parse, transform, emit, then the optional report, precision check,
/// oracle and model-checker pass-through. Returns the process exit code.
inline int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.input_path.empty()) {
    err << "arrwit: missing input file\n";
    return kExitError;
  }
  if (inv.oracle) {
    if (!inv.array_size) {
      err << "arrwit: --oracle requires --array-size N (at most " << kMaxOracleArraySize << ")\n";
      return kExitError;
    }
    if (*inv.array_size < 1 || *inv.array_size > kMaxOracleArraySize) {
      err << "arrwit: --array-size must be between 1 and " << kMaxOracleArraySize << '\n';
      return kExitError;
    }
  }

  std::ifstream in(inv.input_path, std::ios::binary);
  if (!std::filesystem::is_regular_file(inv.input_path) || !in) {
    err << "arrwit: " << inv.input_path << ": file not found\n";
    return kExitError;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  try {
    Program original = parse(buf.str());
    Program transformed = transform_program(original);
    std::string emitted = emit_verifiable(transformed, {inv.nd_style, true});

    if (inv.output_path)
      write_atomically(*inv.output_path, emitted);
    else if (!inv.oracle && !inv.check_precision && !inv.bmc)
      out << emitted;

    if (inv.report_path) write_atomically(*inv.report_path, emit_report(original));

    if (inv.check_precision) {
      for (const auto& v : classify_all(original)) {
        out << "assertion at location " << v.location << ": ";
        if (v.outside_loops) {
          out << "outside loops, no precision claim\n";
          continue;
        }
        out << (v.verdict.precise ? "precise" : "imprecise") << '\n';
        for (const auto& r : v.verdict.violated_rules)
          out << "  " << r.rule << " at location " << r.location << ": " << r.note << '\n';
      }
    }

    int code = kExitOk;
    if (inv.oracle) {
      OracleConfig cfg;
      cfg.array_size_override = inv.array_size;
      if (inv.value_domain) cfg.value_domain = *inv.value_domain;
      cfg.max_steps = inv.max_steps;
      DifferentialResult r = differential_check(original, transformed, cfg);
      out << "oracle: array size " << *inv.array_size << ", value domain " << cfg.value_domain.lo << ':'
          << cfg.value_domain.hi << '\n';
      out << "  original:    " << detail::describe(r.orig_verdict) << '\n';
      out << "  transformed: " << detail::describe(r.trans_verdict) << '\n';
      out << "  sound: " << detail::yes_no(r.sound) << '\n';
      out << "  precision claimed: " << detail::yes_no(r.precise_claim) << '\n';
      if (!r.original_in_bounds)
        out << "  original has runs with out-of-bounds accesses (" << r.orig_verdict.blocked
            << "); precision not checked\n";
      out << "  precision consistent: " << detail::yes_no(r.precise_consistent) << '\n';
      if (!r.ok()) code = kExitViolation;
    }

    if (inv.bmc) {
      int bmc = detail::run_bmc(emitted, inv.output_path, out, err);
      if (code == kExitOk) code = bmc;
    }
    return code;
  } catch (const ParseError& e) {
    err << e.format(inv.input_path) << '\n';
  } catch (const TransformError& e) {
    err << "arrwit: " << inv.input_path << ": cannot transform: " << e.what() << '\n';
  } catch (const OracleError& e) {
    err << "arrwit: oracle: " << e.what() << '\n';
  } catch (const EmitError& e) {
    err << "arrwit: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "arrwit: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace arrwit
