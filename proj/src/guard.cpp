#include "logicweb/guard.hpp"

namespace logicweb {

std::string_view message(TerminationReason r) {
  switch (r) {
    case TerminationReason::LoopFound: return "loop found";
    case TerminationReason::DepthExceeded: return "maximum recursion depth exceeded";
    case TerminationReason::ProgramCountExceeded: return "maximum LogicWeb program count exceeded";
    case TerminationReason::ClauseCountExceeded: return "maximum clause count exceeded";
    case TerminationReason::TimedOut: return "time limit exceeded";
  }
  return "terminated";
}

std::string_view name(TerminationReason r) {
  switch (r) {
    case TerminationReason::LoopFound: return "loop_found";
    case TerminationReason::DepthExceeded: return "depth_exceeded";
    case TerminationReason::ProgramCountExceeded: return "program_count_exceeded";
    case TerminationReason::ClauseCountExceeded: return "clause_count_exceeded";
    case TerminationReason::TimedOut: return "timed_out";
  }
  return "terminated";
}

std::vector<ExprPtr> context_sequence(const ContextNode* node) {
  std::vector<ExprPtr> out;
  for (; node; node = node->parent) out.push_back(node->context);
  return {out.rbegin(), out.rend()};
}

GuardConfig GuardConfig::defaults() {
  GuardConfig c;
  c.max_depth = 40;
  c.max_programs = 100;
  c.max_clauses = 500;
  c.loop_check = true;
  return c;
}

bool check_loop(const std::vector<AncestorEntry>& ancestors, const Expr& context, const Term& goal) {
  for (const auto& a : ancestors) {
    if (*a.context == context && variant(a.goal, goal)) return true;
  }
  return false;
}

bool check_loop(const AncestorNode* ancestors, const Expr& context, const Term& goal) {
  for (const AncestorNode* a = ancestors; a; a = a->parent) {
    if (*a->context == context && variant(a->goal, goal)) return true;
  }
  return false;
}

std::size_t expr_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& c : e.children) n += expr_size(*c);
  return n;
}

std::optional<TerminationReason> Guard::on_clause(const ClauseEvent& e) {
  if (config_.loop_check && check_loop(e.ancestors, *e.context, e.goal)) return TerminationReason::LoopFound;
  if (config_.max_depth && e.depth > *config_.max_depth) return TerminationReason::DepthExceeded;
  if (config_.max_context_size && expr_size(*e.context) > *config_.max_context_size) {
    return TerminationReason::LoopFound;
  }
  ++clause_count_;
  if (config_.max_clauses && clause_count_ > *config_.max_clauses) return TerminationReason::ClauseCountExceeded;
  return std::nullopt;
}

std::optional<TerminationReason> Guard::on_program_created(const ProgramId&) {
  ++program_count_;
  if (config_.max_programs && program_count_ > *config_.max_programs) return TerminationReason::ProgramCountExceeded;
  return std::nullopt;
}

Watchdog::Watchdog(CancellationToken& token, std::chrono::milliseconds timeout) : token_(token) {
  thread_ = std::thread([this, timeout] {
    std::unique_lock<std::mutex> lock(mu_);
    if (!cv_.wait_for(lock, timeout, [this] { return done_; })) {
      fired_ = true;
      token_.cancel();
    }
  });
}

Watchdog::~Watchdog() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    done_ = true;
  }
  cv_.notify_all();
  thread_.join();
}

}  // namespace logicweb
