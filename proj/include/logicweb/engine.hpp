#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "logicweb/builtins.hpp"
#include "logicweb/control.hpp"
#include "logicweb/events.hpp"
#include "logicweb/fetcher.hpp"
#include "logicweb/program.hpp"
#include "logicweb/security.hpp"
#include "logicweb/term.hpp"

namespace logicweb {

// Ordered policy programs; the rightmost is the main program's policy.
using PolicySet = std::vector<ProgramId>;

struct EngineConfig {
  bool security_enabled = true;
  bool occurs_check = true;
  std::optional<std::size_t> max_solutions;
  // Nested proof steps allowed before the derivation is abandoned.
  std::size_t max_native_depth = 300000;
};

// Aborts the derivation: unbound goal, malformed expression, arithmetic error.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The intersection of the encapsulated policies, as an expression.
ExprPtr policy_intersection(const PolicySet& sigma);

class Engine {
 public:
  Engine(ProgramStore& store, PolicyRegistry& registry, Fetcher* fetcher, Host& host, EngineConfig config = {});

  void add_observer(Observer* o) { observers_.push_back(o); }
  void remove_observer(Observer* o);
  void set_cancellation(CancellationToken* token) { cancel_ = token; }

  EngineConfig& config() { return config_; }
  const EngineConfig& config() const { return config_; }
  ProgramStore& store() { return store_; }
  PolicyRegistry& registry() { return registry_; }
  Host& host() { return host_; }
  Fetcher* fetcher() { return fetcher_; }

  struct Outcome {
    std::size_t solutions = 0;
    std::optional<TerminationReason> terminated;
  };
  using SolutionFn = std::function<bool(const Bindings&)>;

  // Enumerates solutions depth-first. `on_solution` sees the live bindings
  // and returns false to stop. Throws EvaluationError.
  Outcome solve(const PolicySet& sigma, ExprPtr context, const Term& goal, const SolutionFn& on_solution);

  struct Answers {
    std::vector<Substitution> answers;  // restricted to the goal's variables
    std::optional<TerminationReason> terminated;
  };
  Answers solve_all(const PolicySet& sigma, ExprPtr context, const Term& goal,
                    std::optional<std::size_t> limit = std::nullopt);

  // At least one solution.
  bool succeeds(const PolicySet& sigma, ExprPtr context, const Term& goal);

 private:
  friend class Prover;
  ProgramStore& store_;
  PolicyRegistry& registry_;
  Fetcher* fetcher_;
  Host& host_;
  EngineConfig config_;
  std::vector<Observer*> observers_;
  CancellationToken* cancel_ = nullptr;
};

// Runs `fn` on a thread with a large stack and rethrows its exceptions.
void run_with_large_stack(const std::function<void()>& fn, std::size_t stack_bytes = std::size_t{1} << 30);

}  // namespace logicweb
