#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicweb/term.hpp"

namespace logicweb {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

// A term read from text together with its named variables, in order of
// first appearance. Anonymous `_` variables are not listed.
struct ReadTerm {
  Term term;
  std::vector<std::pair<std::string, Term>> variables;
  int line = 1;
};

// Reads a sequence of `.`-terminated terms (Edinburgh syntax, `%` and
// `/* */` comments, LogicWeb operators `#>`, `@`, `<>`).
std::vector<ReadTerm> read_terms(std::string_view text);

// Reads exactly one term; the terminating `.` is optional.
ReadTerm read_term(std::string_view text);

enum class OpType { xfx, xfy, yfx, fy, fx };

struct OpDef {
  int priority;
  OpType type;
};

// Operator lookup for the fixed operator table.
const OpDef* infix_op(std::string_view name);
const OpDef* prefix_op(std::string_view name);

// Canonical, re-readable rendering: atoms quoted when needed, strings in
// double quotes, operators written infix with minimal parentheses.
std::string to_string(const Term& t);

// Quoted rendering of a string literal, e.g. "a\"b".
std::string quote_string(std::string_view s);

}  // namespace logicweb
