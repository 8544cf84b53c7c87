#include "logicweb/session.hpp"

#include <fstream>
#include <sstream>

#include "logicweb/syntax.hpp"

namespace logicweb {

std::string format_answer(const NamedBindings& answer) {
  std::string out;
  for (const auto& [name, value] : answer) {
    if (!out.empty()) out += ", ";
    out += name + " = " + to_string(value);
  }
  return out;
}

Session::Session(std::shared_ptr<Transport> transport, PolicyRegistry registry, SessionOptions options)
    : registry_(std::move(registry)),
      fetcher_(std::move(transport), registry_),
      guard_(options.guard),
      engine_(store_, registry_, &fetcher_, host_, options.engine),
      cache_dir_(std::move(options.cache_dir)) {
  engine_.add_observer(&guard_);
  engine_.set_cancellation(&cancel_);
  host_.cancel = &cancel_;
}

QueryResult Session::query(const ProgramId& main, std::string_view goal_text) {
  ReadTerm rt;
  try {
    rt = read_term(goal_text);
  } catch (const ParseError& e) {
    QueryResult r;
    r.error = std::string("syntax error: ") + e.what();
    return r;
  }
  return query(main, rt.term, rt.variables);
}

QueryResult Session::query(const ProgramId& main, const Term& goal, const NamedBindings& names) {
  Term top = Term::compound("#>", {main.to_term(), goal});
  return run({}, Expr::empty(), top, names);
}

QueryResult Session::run(const PolicySet& sigma, ExprPtr context, const Term& goal, const NamedBindings& names) {
  QueryResult result;
  guard_.on_query_start();
  cancel_.reset();
  host_.warnings.clear();
  std::optional<Watchdog> watchdog;
  if (guard_.config().timeout) watchdog.emplace(cancel_, *guard_.config().timeout);
  auto collect = [&](const Bindings& b) {
    NamedBindings answer;
    for (const auto& [name, var] : names) {
      Term value = b.resolve(var);
      if (value.is_var() && value.var_id() == var.var_id()) continue;
      answer.emplace_back(name, value);
    }
    result.answers.push_back(std::move(answer));
    return true;
  };
  try {
    result.terminated = engine_.solve(sigma, std::move(context), goal, collect).terminated;
  } catch (const EvaluationError& e) {
    result.error = e.what();
  } catch (const PolicyError& e) {
    result.error = e.what();
  }
  watchdog.reset();
  cancel_.reset();
  apply_pending_deletes();
  result.warnings = host_.warnings;
  if (cache_dir_) persist_cache();
  return result;
}

void Session::apply_pending_deletes() {
  for (const auto& id : host_.pending_deletes) {
    store_.erase(id);
    if (cache_dir_) {
      std::error_code ec;
      std::filesystem::remove(cache_file_for(*cache_dir_, id), ec);
    }
  }
  host_.pending_deletes.clear();
}

bool Session::policies_allow(const std::vector<ProgramId>& policies, const Term& goal) {
  if (policies.empty()) return true;
  auto added = fetcher_.add_programs(store_, policies);
  for (const auto& [id, out] : added.failures) {
    throw PolicyError("cannot fetch policy " + id.to_string() + ": " + out.diagnostic);
  }
  Term query = Term::compound("#>", {expr_to_term(*policy_intersection(policies)), goal});
  return engine_.succeeds({}, Expr::empty(), query);
}

bool Session::allows_call(const std::vector<ProgramId>& policies, const Term& call) {
  return policies_allow(policies, Term::compound("valid_systemCall", {call}));
}

bool Session::allows_program(const std::vector<ProgramId>& policies, const ProgramId& id) {
  return policies_allow(policies, Term::compound("valid_program", {id.method_term(), Term::string(id.url())}));
}

std::size_t Session::load_cache() {
  if (!cache_dir_ || !std::filesystem::is_directory(*cache_dir_)) return 0;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(*cache_dir_)) {
    if (entry.path().extension() != ".lw") continue;
    std::ifstream in(entry.path());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      CachedProgram cp = deserialize_program(ss.str());
      store_.install(cp.program);
      if (cp.policy && !registry_.is_policy(cp.program->id())) registry_.record(cp.program->id(), *cp.policy);
      ++n;
    } catch (const std::exception& e) {
      host_.warn(entry.path().string() + ": " + e.what());
    }
  }
  return n;
}

std::size_t Session::persist_cache() {
  if (!cache_dir_) return 0;
  std::filesystem::create_directories(*cache_dir_);
  std::size_t n = 0;
  for (const auto& [id, program] : store_) {
    // Policy programs hold session state and are reloaded from their source.
    if (registry_.is_policy(id)) continue;
    auto file = cache_file_for(*cache_dir_, id);
    std::optional<ProgramId> policy = registry_.assigned(id);
    std::ofstream out(file, std::ios::trunc);
    out << serialize_program(*program, policy);
    ++n;
  }
  return n;
}

}  // namespace logicweb
