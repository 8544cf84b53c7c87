#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "logicweb/program.hpp"
#include "logicweb/term.hpp"

namespace logicweb {

enum class TerminationReason { LoopFound, DepthExceeded, ProgramCountExceeded, ClauseCountExceeded, TimedOut };

// Operator-facing message, e.g. "loop found".
std::string_view message(TerminationReason r);
// Stable identifier, e.g. "loop_found".
std::string_view name(TerminationReason r);

// The chain of clause applications leading to the current goal, newest first.
struct AncestorNode {
  ExprPtr context;
  Term goal;  // resolved and taken before head unification
  const AncestorNode* parent = nullptr;
};

// The context sequence of the current branch, newest first.
struct ContextNode {
  ExprPtr context;
  const ContextNode* parent = nullptr;
};

// Oldest first.
std::vector<ExprPtr> context_sequence(const ContextNode* node);

struct ClauseEvent {
  const ExprPtr& context;
  Term goal;  // resolved after head unification
  std::size_t depth;  // clause applications above this one on the branch
  const AncestorNode* ancestors;
};

struct BuiltinEvent {
  const ExprPtr& context;
  Term goal;
};

// A system call about to be carried out on behalf of a non-policy context.
struct SyscallEvent {
  Term goal;
  ExprPtr context;
  std::vector<ProgramId> sigma;
  std::vector<ExprPtr> contexts;  // oldest first, ending with `context`
  bool direct = false;  // executed without consulting policies
};

// A real (cache-miss) call to the oracle.
struct FetchEvent {
  ProgramId id;
  ExprPtr context;
  std::vector<ProgramId> sigma;
  std::vector<ExprPtr> contexts;
  bool policy = false;  // the id belongs to a policy program
};

struct ContextSwitchEvent {
  ExprPtr from;
  ExprPtr to;
  std::vector<ProgramId> sigma_before;
  std::vector<ProgramId> sigma_after;
  std::vector<ExprPtr> contexts;  // oldest first, ending with `to`
};

// Ids that passed the valid_program check in one switch.
struct ProgramAllowedEvent {
  std::vector<ProgramId> ids;
  std::vector<ProgramId> sigma;
};

// Engine spy points. Hooks that return a reason stop the derivation.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual std::optional<TerminationReason> on_clause(const ClauseEvent&) { return std::nullopt; }
  virtual std::optional<TerminationReason> on_builtin(const BuiltinEvent&) { return std::nullopt; }
  virtual std::optional<TerminationReason> on_program_created(const ProgramId&) { return std::nullopt; }
  virtual void on_fetch(const FetchEvent&) {}
  virtual void on_syscall(const SyscallEvent&) {}
  virtual void on_context_switch(const ContextSwitchEvent&) {}
  virtual void on_program_allowed(const ProgramAllowedEvent&) {}
  virtual void on_query_start() {}
};

}  // namespace logicweb
