#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicweb/builtins.hpp"
#include "logicweb/engine.hpp"
#include "logicweb/fetcher.hpp"
#include "logicweb/guard.hpp"
#include "logicweb/security.hpp"

namespace logicweb {

using NamedBindings = std::vector<std::pair<std::string, Term>>;

struct QueryResult {
  std::vector<NamedBindings> answers;
  std::optional<TerminationReason> terminated;
  std::optional<std::string> error;
  std::vector<std::string> warnings;
};

// `X = a, Y = "b"`; variables left unbound are omitted.
std::string format_answer(const NamedBindings& answer);

struct SessionOptions {
  EngineConfig engine;
  GuardConfig guard;
  std::optional<std::filesystem::path> cache_dir;
};

// A program store, registry and fetcher shared by successive queries.
class Session {
 public:
  Session(std::shared_ptr<Transport> transport, PolicyRegistry registry, SessionOptions options = {});

  // Runs `lw(get, main) #> goal` from the empty context with no policies.
  QueryResult query(const ProgramId& main, std::string_view goal_text);
  QueryResult query(const ProgramId& main, const Term& goal, const NamedBindings& names);
  // Runs an arbitrary goal under the given policy set and context.
  QueryResult run(const PolicySet& sigma, ExprPtr context, const Term& goal, const NamedBindings& names);

  // Whether every listed policy accepts the call (or program id).
  // Throws PolicyError if a policy cannot be fetched.
  bool allows_call(const std::vector<ProgramId>& policies, const Term& call);
  bool allows_program(const std::vector<ProgramId>& policies, const ProgramId& id);

  void add_observer(Observer* o) { engine_.add_observer(o); }
  void remove_observer(Observer* o) { engine_.remove_observer(o); }

  ProgramStore& store() { return store_; }
  PolicyRegistry& registry() { return registry_; }
  Fetcher& fetcher() { return fetcher_; }
  Engine& engine() { return engine_; }
  Guard& guard() { return guard_; }
  Host& host() { return host_; }

  // Installs cached programs and their recorded policy assignments.
  std::size_t load_cache();
  // Writes every non-policy program to the cache directory.
  std::size_t persist_cache();

 private:
  bool policies_allow(const std::vector<ProgramId>& policies, const Term& goal);
  void apply_pending_deletes();

  ProgramStore store_;
  PolicyRegistry registry_;
  Fetcher fetcher_;
  Host host_;
  Guard guard_;
  Engine engine_;
  CancellationToken cancel_;
  std::optional<std::filesystem::path> cache_dir_;
};

}  // namespace logicweb
