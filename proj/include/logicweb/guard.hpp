#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "logicweb/control.hpp"
#include "logicweb/events.hpp"

namespace logicweb {

struct GuardConfig {
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> max_programs;
  std::optional<std::size_t> max_clauses;
  bool loop_check = false;
  std::optional<std::chrono::milliseconds> timeout;
  std::optional<std::size_t> max_context_size;  // expression node count, off by default

  // Loop check on, limits 40 / 100 / 500.
  static GuardConfig defaults();
  bool any() const { return max_depth || max_programs || max_clauses || loop_check || timeout || max_context_size; }
};

struct AncestorEntry {
  ExprPtr context;
  Term goal;
};

// True iff some ancestor has a structurally equal context and a variant goal.
bool check_loop(const std::vector<AncestorEntry>& ancestors, const Expr& context, const Term& goal);
bool check_loop(const AncestorNode* ancestors, const Expr& context, const Term& goal);

std::size_t expr_size(const Expr& e);

// Termination conditions evaluated at engine events.
class Guard : public Observer {
 public:
  explicit Guard(GuardConfig config = {}) : config_(std::move(config)) {}

  const GuardConfig& config() const { return config_; }
  void set_config(GuardConfig config) { config_ = std::move(config); }

  std::size_t clause_count() const { return clause_count_; }
  std::size_t program_count() const { return program_count_; }
  void reset_programs() { program_count_ = 0; }

  std::optional<TerminationReason> on_clause(const ClauseEvent& e) override;
  std::optional<TerminationReason> on_program_created(const ProgramId& id) override;
  void on_query_start() override { clause_count_ = 0; }

 private:
  GuardConfig config_;
  std::size_t clause_count_ = 0;
  std::size_t program_count_ = 0;
};

// Cancels a token once the deadline passes unless disarmed first.
class Watchdog {
 public:
  Watchdog(CancellationToken& token, std::chrono::milliseconds timeout);
  ~Watchdog();
  Watchdog(const Watchdog&) = delete;
  Watchdog& operator=(const Watchdog&) = delete;

  bool fired() const { return fired_; }

 private:
  CancellationToken& token_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool done_ = false;
  std::atomic<bool> fired_{false};
  std::thread thread_;
};

}  // namespace logicweb
