#pragma once

#include <stdexcept>
#include <string>

namespace arrwit {

/// Syntax or well-formedness error in a source program.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error(msg), line_(line), col_(col) {}

  int line() const { return line_; }
  int column() const { return col_; }

  /// `file:line:col: message`
  std::string format(const std::string& file) const {
    return file + ":" + std::to_string(line_) + ":" + std::to_string(col_) + ": " + what();
  }

 private:
  int line_;
  int col_;
};

/// The transformer met a construct it cannot rewrite.
class TransformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The precision classifier was asked about an assertion it makes no claim on.
class AssertionNotInLoop : public std::runtime_error {
 public:
  explicit AssertionNotInLoop(int loc)
      : std::runtime_error("assertion at location " + std::to_string(loc) + " is not inside a loop"), loc_(loc) {}
  int location() const { return loc_; }

 private:
  int loc_;
};

class EmitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OracleError : public std::runtime_error {
 public:
  enum class Kind { BudgetExceeded, NonConstantBound };
  OracleError(Kind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace arrwit
