#pragma once

#include <arrwit/parser.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace arrwit::testing {

inline std::string fixture_path(const std::string& name) { return std::string(ARRWIT_FIXTURES) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Program load_fixture(const std::string& name) { return parse(read_text(fixture_path(name))); }

/// Counts statements of `kind` anywhere in `ss`.
inline int count_stmts(const std::vector<Stmt>& ss, StmtKind kind) {
  int n = 0;
  walk_stmts(ss, [&](const Stmt& s) { n += s.kind == kind; });
  return n;
}

}  // namespace arrwit::testing
