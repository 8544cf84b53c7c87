#include "support.hpp"

#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <unistd.h>

namespace lwtest {

using namespace logicweb;

std::filesystem::path fixture_root() { return LW_FIXTURES; }
std::filesystem::path web_root() { return fixture_root() / "web"; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProgramId get(std::string url) { return ProgramId::get(std::move(url)); }

ProgramId policy(std::string_view name) { return ProgramId::get("file:///policies/" + std::string(name) + ".html"); }

Term term(std::string_view text) { return read_term(text).term; }

std::string lw_page(std::string_view clauses, std::string_view text) {
  return "<html><body>" + std::string(text) + "\n<!-- <LW_CODE>\n" + std::string(clauses) +
         "\n</LW_CODE> -->\n</body></html>\n";
}

std::unique_ptr<Session> fixture_session(std::string_view default_policy, SessionOptions options) {
  auto transport = std::make_shared<FixtureTransport>(web_root());
  return std::make_unique<Session>(transport, PolicyRegistry(policy(default_policy)), std::move(options));
}

QueryResult run_goal(Session& s, std::string_view goal) {
  ReadTerm rt = read_term(goal);
  return s.run({}, Expr::empty(), rt.term, rt.variables);
}

std::vector<std::string> rendered(const QueryResult& r) {
  std::vector<std::string> out;
  for (const auto& a : r.answers) out.push_back(format_answer(a));
  return out;
}

ScratchDir::ScratchDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("lwtest-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}


Term random_term(std::mt19937& rng, const std::vector<Term>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 4);
  switch (pick(rng)) {
    case 0:
      return Term::atom(std::string(1, static_cast<char>('a' + rng() % 3)));
    case 1:
      return Term::integer(static_cast<std::int64_t>(rng() % 5));
    case 2:
      return Term::string(rng() % 2 ? "s" : "t");
    case 3:
    case 4:
      if (!vars.empty()) return vars[rng() % vars.size()];
      return Term::atom("a");
    case 5:
      return Term::compound("f", {random_term(rng, vars, depth - 1)});
    default:
      return Term::compound("g", {random_term(rng, vars, depth - 1), random_term(rng, vars, depth - 1)});
  }
}

namespace {

std::string random_arg(std::mt19937& rng, const std::vector<std::string>& vars) {
  static const char* constants[] = {"a", "b", "c", "1", "2", "\"s\""};
  unsigned r = rng() % 10;
  if (r < 5 && !vars.empty()) return vars[rng() % vars.size()];
  if (r < 9) return constants[rng() % 6];
  std::string v = vars.empty() ? "a" : vars[rng() % vars.size()];
  return "f(" + v + ")";
}

}  // namespace

RandomProgram random_stratified_program(std::mt19937& rng) {
  struct Pred {
    std::string name;
    int arity;
  };
  std::vector<std::vector<Pred>> levels(3);
  RandomProgram out;
  const std::vector<std::string> all_vars = {"X", "Y", "Z", "W"};
  for (int lvl = 0; lvl < 3; ++lvl) {
    int n = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) levels[lvl].push_back({"p" + std::to_string(lvl) + "_" + std::to_string(i), 1 + static_cast<int>(rng() % 2)});
  }
  for (int lvl = 0; lvl < 3; ++lvl) {
    for (const auto& pred : levels[lvl]) {
      int clauses = 1 + static_cast<int>(rng() % 4);
      for (int c = 0; c < clauses; ++c) {
        std::vector<std::string> vars(all_vars.begin(), all_vars.begin() + 1 + rng() % 3);
        std::string head = pred.name + "(";
        for (int a = 0; a < pred.arity; ++a) head += (a ? ", " : "") + random_arg(rng, lvl == 0 && rng() % 3 ? std::vector<std::string>{} : vars);
        head += ")";
        if (lvl == 0) {
          out.text += head + ".\n";
          continue;
        }
        std::string body;
        int goals = 1 + static_cast<int>(rng() % 3);
        for (int g = 0; g < goals; ++g) {
          if (!body.empty()) body += ", ";
          if (rng() % 5 == 0) {
            body += vars[rng() % vars.size()] + " = " + random_arg(rng, vars);
            continue;
          }
          int below = static_cast<int>(rng() % lvl);
          const Pred& callee = levels[below][rng() % levels[below].size()];
          body += callee.name + "(";
          for (int a = 0; a < callee.arity; ++a) body += (a ? ", " : "") + random_arg(rng, vars);
          body += ")";
        }
        out.text += head + " :- " + body + ".\n";
      }
    }
  }
  for (int q = 0; q < 3; ++q) {
    int lvl = static_cast<int>(rng() % 3);
    const Pred& p = levels[lvl][rng() % levels[lvl].size()];
    std::string goal = p.name + "(";
    for (int a = 0; a < p.arity; ++a) goal += (a ? ", " : "") + random_arg(rng, {"A", "B"});
    out.goals.push_back(goal + ")");
  }
  return out;
}

namespace {

// Plain map-based resolver, deliberately unlike the engine's trail.
class Naive {
 public:
  explicit Naive(const std::vector<Clause>& program) : program_(program) {}

  using Subst = std::map<VarId, Term>;

  Term walk(const Term& t, const Subst& s) const {
    Term cur = t;
    while (cur.is_var()) {
      auto it = s.find(cur.var_id());
      if (it == s.end()) break;
      cur = it->second;
    }
    return cur;
  }

  Term full(const Term& t, const Subst& s) const {
    Term w = walk(t, s);
    if (!w.is_compound()) return w;
    std::vector<Term> args;
    for (const auto& a : w.args()) args.push_back(full(a, s));
    return Term::compound(w.name(), std::move(args));
  }

  bool occurs(VarId v, const Term& t, const Subst& s) const {
    Term w = walk(t, s);
    if (w.is_var()) return w.var_id() == v;
    if (!w.is_compound()) return false;
    for (const auto& a : w.args()) {
      if (occurs(v, a, s)) return true;
    }
    return false;
  }

  bool unify(const Term& a, const Term& b, Subst& s) const {
    Term x = walk(a, s), y = walk(b, s);
    if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
    if (x.is_var()) {
      if (occurs(x.var_id(), y, s)) return false;
      s[x.var_id()] = y;
      return true;
    }
    if (y.is_var()) return unify(y, x, s);
    if (x.kind() != y.kind()) return false;
    if (!x.is_compound()) return x == y;
    if (x.name() != y.name() || x.arity() != y.arity()) return false;
    for (std::size_t i = 0; i < x.arity(); ++i) {
      if (!unify(x.arg(i), y.arg(i), s)) return false;
    }
    return true;
  }

  Term rename(const Term& t, std::map<VarId, Term>& m) const {
    if (t.is_var()) {
      auto it = m.find(t.var_id());
      if (it != m.end()) return it->second;
      return m[t.var_id()] = Term::variable();
    }
    if (!t.is_compound()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(rename(a, m));
    return Term::compound(t.name(), std::move(args));
  }

  void solve(std::vector<Term> goals, Subst s, const std::function<void(const Subst&)>& emit) const {
    if (goals.empty()) {
      emit(s);
      return;
    }
    Term g = walk(goals.back(), s);
    goals.pop_back();
    if (g.is_atom("true")) return solve(std::move(goals), std::move(s), emit);
    if (g.is_functor(",", 2)) {
      goals.push_back(g.arg(1));
      goals.push_back(g.arg(0));
      return solve(std::move(goals), std::move(s), emit);
    }
    if (g.is_functor("=", 2)) {
      if (unify(g.arg(0), g.arg(1), s)) solve(std::move(goals), std::move(s), emit);
      return;
    }
    for (const auto& c : program_) {
      std::map<VarId, Term> m;
      Term head = rename(c.head, m);
      Subst s2 = s;
      if (!unify(head, g, s2)) continue;
      auto next = goals;
      next.push_back(rename(c.body, m));
      solve(std::move(next), std::move(s2), emit);
    }
  }

 private:
  const std::vector<Clause>& program_;
};

}  // namespace

std::vector<std::vector<Term>> naive_solve(const std::vector<Clause>& program, const Term& goal,
                                           const std::vector<Term>& vars) {
  Naive n(program);
  std::vector<std::vector<Term>> out;
  n.solve({goal}, {}, [&](const Naive::Subst& s) {
    std::vector<Term> row;
    for (const auto& v : vars) row.push_back(n.full(v, s));
    out.push_back(std::move(row));
  });
  return out;
}

bool same_answers(const std::vector<std::vector<Term>>& a, const std::vector<std::vector<Term>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!variant(Term::compound("ans", a[i]), Term::compound("ans", b[i]))) return false;
  }
  return true;
}

namespace {
bool text_has(const Term& t, std::string_view needle) { return t.is_text() && t.text().find(needle) != std::string::npos; }
}  // namespace

const std::vector<CallPattern>& call_patterns() {
  static const std::vector<CallPattern> patterns = {
      {"valid_systemCall(display(_)).", [](const Term& c) { return c.is_functor("display", 1); }},
      {"valid_systemCall(nl).", [](const Term& c) { return c.is_atom("nl"); }},
      {"valid_systemCall(open(_, read, _)).",
       [](const Term& c) { return c.is_functor("open", 3) && c.arg(1).is_atom("read"); }},
      {"valid_systemCall(open(F, write, _)) :- contains(F, \"/tmp/\").",
       [](const Term& c) {
         return c.is_functor("open", 3) && c.arg(1).is_atom("write") && text_has(c.arg(0), "/tmp/");
       }},
      {"valid_systemCall(system(C)) :- (append(\"rm \", _, C) -> fail ; true).",
       [](const Term& c) {
         return c.is_functor("system", 1) && c.arg(0).is_text() && c.arg(0).text().rfind("rm ", 0) != 0;
       }},
      {"valid_systemCall(contains(_, _)).", [](const Term& c) { return c.is_functor("contains", 2); }},
  };
  return patterns;
}

const std::vector<std::string>& sample_calls() {
  static const std::vector<std::string> calls = {
      "display(\"x\")",
      "nl",
      "open('/tmp/a', write, S)",
      "open('/etc/a', write, S)",
      "open('/tmp/a', read, S)",
      "system(\"rm -rf x\")",
      "system(\"ls\")",
      "contains(\"a\", \"b\")",
      "sleep(1)",
  };
  return calls;
}

}  // namespace lwtest
