#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "logicweb/audit.hpp"
#include "logicweb/fetcher.hpp"
#include "logicweb/program.hpp"
#include "logicweb/session.hpp"
#include "logicweb/syntax.hpp"

namespace lwtest {

std::filesystem::path fixture_root();
std::filesystem::path web_root();
std::string read_file(const std::filesystem::path& p);

logicweb::ProgramId get(std::string url);
logicweb::ProgramId policy(std::string_view name);  // file:///policies/<name>.html
logicweb::Term term(std::string_view text);

// A page whose only clauses are `clauses`.
std::string lw_page(std::string_view clauses, std::string_view text = "page");

// Session over the offline fixture web with `default_policy` for everything.
std::unique_ptr<logicweb::Session> fixture_session(std::string_view default_policy,
                                                   logicweb::SessionOptions options = {});

// Runs a goal written in clause syntax from the empty context with no policies.
logicweb::QueryResult run_goal(logicweb::Session& s, std::string_view goal);

// Answers rendered as `X = v, ...` strings.
std::vector<std::string> rendered(const logicweb::QueryResult& r);

// Random term over a few atoms, numbers, strings, f/1, g/2 and the given variables.
logicweb::Term random_term(std::mt19937& rng, const std::vector<logicweb::Term>& vars, int depth);

// A terminating program: level-0 facts, higher levels call only lower levels.
struct RandomProgram {
  std::string text;
  std::vector<std::string> goals;
};
RandomProgram random_stratified_program(std::mt19937& rng);

// Reference SLD resolver on its own substitution maps. Returns, in
// depth-first order, each answer as the resolved `vars` tuple.
std::vector<std::vector<logicweb::Term>> naive_solve(const std::vector<logicweb::Clause>& program,
                                                     const logicweb::Term& goal,
                                                     const std::vector<logicweb::Term>& vars);

// Same length and pairwise variant tuples.
bool same_answers(const std::vector<std::vector<logicweb::Term>>& a,
                  const std::vector<std::vector<logicweb::Term>>& b);

// One valid_systemCall clause and a direct C++ decision for the calls it accepts.
struct CallPattern {
  std::string clause;
  bool (*accepts)(const logicweb::Term& call);
};
const std::vector<CallPattern>& call_patterns();
// Calls that each pattern either accepts or rejects.
const std::vector<std::string>& sample_calls();

// Removed on destruction.
class ScratchDir {
 public:
  ScratchDir();
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace lwtest
