#include "logicweb/syntax.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <sstream>
#include <unordered_map>

namespace logicweb {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      detail_(message),
      line_(line),
      column_(column) {}

namespace {

struct NamedOp {
  std::string_view name;
  OpDef def;
};

constexpr std::array kInfixOps{
    NamedOp{":-", {1200, OpType::xfx}}, NamedOp{";", {1100, OpType::xfy}},
    NamedOp{"->", {1050, OpType::xfy}}, NamedOp{",", {1000, OpType::xfy}},
    NamedOp{"#>", {950, OpType::xfy}},  NamedOp{"=", {700, OpType::xfx}},
    NamedOp{"\\=", {700, OpType::xfx}}, NamedOp{"==", {700, OpType::xfx}},
    NamedOp{"\\==", {700, OpType::xfx}}, NamedOp{"is", {700, OpType::xfx}},
    NamedOp{"=:=", {700, OpType::xfx}}, NamedOp{"=\\=", {700, OpType::xfx}},
    NamedOp{"<", {700, OpType::xfx}},   NamedOp{">", {700, OpType::xfx}},
    NamedOp{"=<", {700, OpType::xfx}},  NamedOp{">=", {700, OpType::xfx}},
    NamedOp{"=..", {700, OpType::xfx}}, NamedOp{"+", {500, OpType::yfx}},
    NamedOp{"-", {500, OpType::yfx}},   NamedOp{"*", {400, OpType::yfx}},
    NamedOp{"/", {400, OpType::yfx}},   NamedOp{"//", {400, OpType::yfx}},
    NamedOp{"mod", {400, OpType::yfx}}, NamedOp{":", {200, OpType::xfy}},
    NamedOp{"^", {200, OpType::xfy}},   NamedOp{"<>", {100, OpType::xfx}},
};

constexpr std::array kPrefixOps{
    NamedOp{":-", {1200, OpType::fx}},
    NamedOp{"?-", {1200, OpType::fx}},
    NamedOp{"-", {200, OpType::fy}},
    NamedOp{"+", {200, OpType::fy}},
    NamedOp{"@", {200, OpType::fy}},
};

bool is_symbol_char(char c) { return std::strchr("+-*/\\^<>=~:.?@#&$", c) != nullptr && c != '\0'; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

const OpDef* infix_op(std::string_view name) {
  for (const auto& op : kInfixOps) {
    if (op.name == name) return &op.def;
  }
  return nullptr;
}

const OpDef* prefix_op(std::string_view name) {
  for (const auto& op : kPrefixOps) {
    if (op.name == name) return &op.def;
  }
  return nullptr;
}

// ---------------------------------------------------------------------- lexer

namespace {

enum class Tok { Name, Var, Int, Float, Str, Punct, End, Eof };

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  std::int64_t ival = 0;
  double fval = 0;
  int line = 1;
  int col = 1;
  bool layout_before = false;
  bool functional = false;  // name immediately followed by '('
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    Token t;
    t.layout_before = skip_layout();
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::Eof;
      return t;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      lex_number(t);
    } else if (std::islower(static_cast<unsigned char>(c))) {
      t.kind = Tok::Name;
      t.text = take_while(is_alnum);
    } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::Var;
      t.text = take_while(is_alnum);
    } else if (c == '\'') {
      t.kind = Tok::Name;
      t.text = lex_quoted('\'');
    } else if (c == '"') {
      t.kind = Tok::Str;
      t.text = lex_quoted('"');
    } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',' ||
               c == '|') {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance();
    } else if (c == '!' || c == ';') {
      t.kind = Tok::Name;
      t.text = std::string(1, c);
      advance();
    } else if (c == '.' && end_follows(pos_ + 1)) {
      t.kind = Tok::End;
      advance();
    } else if (is_symbol_char(c)) {
      t.kind = Tok::Name;
      std::size_t start = pos_;
      while (pos_ < src_.size() && is_symbol_char(src_[pos_])) {
        // A trailing '.' followed by layout terminates the clause.
        if (src_[pos_] == '.' && pos_ > start && end_follows(pos_ + 1)) break;
        advance();
      }
      t.text = std::string(src_.substr(start, pos_ - start));
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
    if (t.kind == Tok::Name && pos_ < src_.size() && src_[pos_] == '(') t.functional = true;
    return t;
  }

 private:
  bool end_follows(std::size_t p) const {
    return p >= src_.size() || std::isspace(static_cast<unsigned char>(src_[p])) || src_[p] == '%';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool skip_layout() {
    bool any = false;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        any = true;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        any = true;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int l = line_, co = col_;
        advance();
        advance();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) advance();
        if (pos_ + 1 >= src_.size()) throw ParseError("unterminated block comment", l, co);
        advance();
        advance();
        any = true;
      } else {
        break;
      }
    }
    return any;
  }

  template <typename Pred>
  std::string take_while(Pred p) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && p(src_[pos_])) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  void lex_number(Token& t) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    bool is_float = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t save = pos_;
        int sl = line_, sc = col_;
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        } else {
          pos_ = save;
          line_ = sl;
          col_ = sc;
        }
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Tok::Float;
      t.fval = std::strtod(text.c_str(), nullptr);
    } else {
      t.kind = Tok::Int;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), t.ival);
      if (ec != std::errc()) throw ParseError("integer out of range", t.line, t.col);
    }
    t.text = std::move(text);
  }

  std::string lex_quoted(char q) {
    int l = line_, co = col_;
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError("unterminated quoted text", l, co);
      char c = src_[pos_];
      if (c == q) {
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == q) {
          out.push_back(q);
          advance();
          advance();
          continue;
        }
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw ParseError("unterminated escape", line_, col_);
        char e = src_[pos_];
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '0': out.push_back('\0'); break;
          case '\\': out.push_back('\\'); break;
          case '\'': out.push_back('\''); break;
          case '"': out.push_back('"'); break;
          case '`': out.push_back('`'); break;
          case '\n': break;  // line continuation
          default: throw ParseError(std::string("unknown escape \\") + e, line_, col_);
        }
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// --------------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  bool at_eof() const { return tok_.kind == Tok::Eof; }

  ReadTerm read_clause(bool require_end) {
    vars_.clear();
    order_.clear();
    ReadTerm out;
    out.line = tok_.line;
    out.term = parse(1200).first;
    if (tok_.kind == Tok::End) {
      advance();
    } else if (require_end || tok_.kind != Tok::Eof) {
      fail("operator expected");
    }
    for (const auto& name : order_) out.variables.emplace_back(name, vars_.at(name));
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.line, tok_.col); }

  void advance() { tok_ = lex_.next(); }

  bool is_punct(std::string_view p) const { return tok_.kind == Tok::Punct && tok_.text == p; }

  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    advance();
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::variable("_");
    auto it = vars_.find(name);
    if (it != vars_.end()) return it->second;
    Term v = Term::variable(name);
    vars_.emplace(name, v);
    order_.push_back(name);
    return v;
  }

  // True when the current token could begin an operand.
  bool starts_term() const {
    switch (tok_.kind) {
      case Tok::Eof:
      case Tok::End:
        return false;
      case Tok::Punct:
        return tok_.text == "(" || tok_.text == "[" || tok_.text == "{";
      case Tok::Name:
        if (tok_.functional) return true;
        if (infix_op(tok_.text) && !prefix_op(tok_.text)) return false;
        return true;
      default:
        return true;
    }
  }

  std::vector<Term> parse_args() {
    std::vector<Term> args;
    expect_punct("(");
    args.push_back(parse(999).first);
    while (is_punct(",")) {
      advance();
      args.push_back(parse(999).first);
    }
    expect_punct(")");
    return args;
  }

  std::pair<Term, int> parse_primary(int max) {
    Token t = tok_;
    switch (t.kind) {
      case Tok::Int:
        advance();
        return {Term::integer(t.ival), 0};
      case Tok::Float:
        advance();
        return {Term::decimal(t.fval), 0};
      case Tok::Str:
        advance();
        return {Term::string(t.text), 0};
      case Tok::Var:
        advance();
        return {variable(t.text), 0};
      case Tok::Punct:
        if (t.text == "(") {
          advance();
          Term inner = parse(1200).first;
          expect_punct(")");
          return {inner, 0};
        }
        if (t.text == "[") {
          advance();
          if (is_punct("]")) {
            advance();
            return {Term::nil(), 0};
          }
          std::vector<Term> items{parse(999).first};
          while (is_punct(",")) {
            advance();
            items.push_back(parse(999).first);
          }
          Term tail;
          if (is_punct("|")) {
            advance();
            tail = parse(999).first;
          }
          expect_punct("]");
          return {Term::list(items, tail), 0};
        }
        if (t.text == "{") {
          advance();
          if (is_punct("}")) {
            advance();
            return {Term::atom("{}"), 0};
          }
          Term inner = parse(1200).first;
          expect_punct("}");
          return {Term::compound("{}", {inner}), 0};
        }
        fail("unexpected '" + t.text + "'");
      case Tok::Name: {
        advance();
        if (t.functional) return {Term::compound(t.text, parse_args()), 0};
        if ((t.text == "-" || t.text == "+") && !tok_.layout_before &&
            (tok_.kind == Tok::Int || tok_.kind == Tok::Float)) {
          Token num = tok_;
          advance();
          bool neg = t.text == "-";
          if (num.kind == Tok::Int) return {Term::integer(neg ? -num.ival : num.ival), 0};
          return {Term::decimal(neg ? -num.fval : num.fval), 0};
        }
        if (const OpDef* op = prefix_op(t.text); op && starts_term()) {
          int p = op->priority;
          if (p > max) p = 999;
          int arg_max = op->type == OpType::fy ? p : p - 1;
          Term operand = parse(arg_max).first;
          return {Term::compound(t.text, {operand}), p};
        }
        return {Term::atom(t.text), 0};
      }
      case Tok::End:
        fail("unexpected end of clause");
      case Tok::Eof:
        fail("unexpected end of input");
    }
    fail("unexpected token");
  }

  std::pair<Term, int> parse(int max) {
    auto [left, left_prec] = parse_primary(max);
    while (true) {
      std::string name;
      if (tok_.kind == Tok::Name) {
        name = tok_.text;
      } else if (is_punct(",")) {
        name = ",";
      } else {
        break;
      }
      const OpDef* op = infix_op(name);
      if (!op) break;
      int p = op->priority;
      int left_max = op->type == OpType::yfx ? p : p - 1;
      int right_max = op->type == OpType::xfy ? p : p - 1;
      if (p > max || left_prec > left_max) break;
      advance();
      Term right = parse(right_max).first;
      left = Term::compound(name, {left, right});
      left_prec = p;
    }
    return {left, left_prec};
  }

  Lexer lex_;
  Token tok_;
  std::unordered_map<std::string, Term> vars_;
  std::vector<std::string> order_;
};

}  // namespace

std::vector<ReadTerm> read_terms(std::string_view text) {
  Parser p(text);
  std::vector<ReadTerm> out;
  while (!p.at_eof()) out.push_back(p.read_clause(true));
  return out;
}

ReadTerm read_term(std::string_view text) {
  Parser p(text);
  if (p.at_eof()) throw ParseError("empty input", 1, 1);
  ReadTerm t = p.read_clause(false);
  if (!p.at_eof()) throw ParseError("trailing input after term", 1, 1);
  return t;
}

// -------------------------------------------------------------------- printer

namespace {

bool atom_needs_quotes(const std::string& a) {
  if (a.empty()) return true;
  if (a == "[]" || a == "!" || a == ";" || a == "{}") return false;
  if (std::islower(static_cast<unsigned char>(a[0]))) {
    for (char c : a) {
      if (!is_alnum(c)) return true;
    }
    return false;
  }
  for (char c : a) {
    if (!is_symbol_char(c)) return true;
  }
  // A bare '.' would end the clause.
  return a == "." || a.find("/*") != std::string::npos || a.find('%') != std::string::npos;
}

std::string quote_with(std::string_view s, char q) {
  std::string out(1, q);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\0': out += "\\0"; break;
      default:
        if (c == q) {
          out.push_back('\\');
          out.push_back(c);
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back(q);
  return out;
}

std::string atom_text(const std::string& a) { return atom_needs_quotes(a) ? quote_with(a, '\'') : a; }

bool is_operator_atom(const Term& t) {
  return t.is_atom() && (infix_op(t.name()) || prefix_op(t.name()));
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  if (s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  } else if (s.find('.') == std::string::npos) {
    s.insert(s.find('e'), ".0");
  }
  return s;
}

int term_priority(const Term& t) {
  if (!t.is_compound()) return 0;
  if (t.arity() == 2 && t.name() != ".") {
    if (const OpDef* op = infix_op(t.name())) return op->priority;
  }
  if (t.arity() == 1) {
    if (const OpDef* op = prefix_op(t.name())) return op->priority;
  }
  return 0;
}

void write(std::ostringstream& out, const Term& t, int max, bool operand);

void write_list(std::ostringstream& out, const Term& t) {
  out << '[';
  Term cur = t;
  bool first = true;
  while (cur.is_functor(".", 2)) {
    if (!first) out << ", ";
    write(out, cur.arg(0), 999, false);
    first = false;
    cur = cur.arg(1);
  }
  if (!cur.is_atom("[]")) {
    out << '|';
    write(out, cur, 999, false);
  }
  out << ']';
}

void write(std::ostringstream& out, const Term& t, int max, bool operand) {
  switch (t.kind()) {
    case Term::Kind::Variable:
      out << '_' << t.var_id();
      return;
    case Term::Kind::Integer:
      out << t.int_value();
      return;
    case Term::Kind::Float:
      out << format_float(t.float_value());
      return;
    case Term::Kind::String:
      out << quote_with(t.name(), '"');
      return;
    case Term::Kind::Atom:
      if (operand && is_operator_atom(t)) {
        out << '(' << atom_text(t.name()) << ')';
      } else {
        out << atom_text(t.name());
      }
      return;
    case Term::Kind::Compound:
      break;
  }
  if (t.is_functor(".", 2)) {
    write_list(out, t);
    return;
  }
  if (t.is_functor("{}", 1)) {
    out << '{';
    write(out, t.arg(0), 1200, false);
    out << '}';
    return;
  }
  int prio = term_priority(t);
  if (t.arity() == 2 && prio > 0) {
    const OpDef* op = infix_op(t.name());
    int left_max = op->type == OpType::yfx ? prio : prio - 1;
    int right_max = op->type == OpType::xfy ? prio : prio - 1;
    bool parens = prio > max;
    if (parens) out << '(';
    write(out, t.arg(0), left_max, true);
    if (t.name() == ",") {
      out << ", ";
    } else {
      out << ' ' << atom_text(t.name()) << ' ';
    }
    write(out, t.arg(1), right_max, true);
    if (parens) out << ')';
    return;
  }
  if (t.arity() == 1 && prio > 0) {
    const OpDef* op = prefix_op(t.name());
    int arg_max = op->type == OpType::fy ? prio : prio - 1;
    const Term& a = t.arg(0);
    bool functional = a.is_number() || is_operator_atom(a) || term_priority(a) > arg_max;
    if (!functional) {
      std::ostringstream inner;
      write(inner, a, arg_max, true);
      std::string s = inner.str();
      bool parens = prio > max;
      if (parens) out << '(';
      out << atom_text(t.name());
      if (!s.empty() && (is_symbol_char(s[0]) || s[0] == '(' || std::isdigit(static_cast<unsigned char>(s[0])) ||
                         std::isalnum(static_cast<unsigned char>(t.name()[0])))) {
        out << ' ';
      }
      out << s;
      if (parens) out << ')';
      return;
    }
  }
  out << atom_text(t.name()) << '(';
  for (std::size_t i = 0; i < t.arity(); ++i) {
    if (i) out << ", ";
    write(out, t.arg(i), 999, false);
  }
  out << ')';
}

}  // namespace

std::string quote_string(std::string_view s) { return quote_with(s, '"'); }

std::string to_string(const Term& t) {
  std::ostringstream out;
  write(out, t, 1200, false);
  return out.str();
}

}  // namespace logicweb
