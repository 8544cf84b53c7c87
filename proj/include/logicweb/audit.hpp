#pragma once

#include <iosfwd>
#include <sstream>
#include <string>
#include <vector>

#include "logicweb/builtins.hpp"
#include "logicweb/engine.hpp"
#include "logicweb/events.hpp"

namespace logicweb {

struct AuditEntry {
  std::string timestamp;  // UTC, ISO 8601 with milliseconds
  std::string kind;       // syscall | fetch
  std::string subject;    // goal or program id
  std::string context;
  std::string sigma;

  // timestamp \t kind \t subject \t context \t sigma
  std::string line() const;
};

std::string sigma_to_string(const std::vector<ProgramId>& sigma);

// Records system-call and oracle-call events, optionally streaming them.
class AuditLog : public Observer {
 public:
  explicit AuditLog(std::ostream* sink = nullptr) : sink_(sink) {}

  void on_syscall(const SyscallEvent& e) override;
  void on_fetch(const FetchEvent& e) override;

  const std::vector<AuditEntry>& entries() const { return entries_; }
  void clear() { entries_.clear(); }

 private:
  void add(AuditEntry entry);
  std::ostream* sink_;
  std::vector<AuditEntry> entries_;
};

// Re-checks every audited operation against the policies of each context
// in its context sequence, and the policy set at each context switch.
class SafetyMonitor : public Observer {
 public:
  SafetyMonitor(ProgramStore& store, PolicyRegistry& registry);

  struct Violation {
    std::string kind;  // syscall | fetch | coverage | unchecked-fetch
    std::string detail;
  };

  void on_syscall(const SyscallEvent& e) override;
  void on_fetch(const FetchEvent& e) override;
  void on_context_switch(const ContextSwitchEvent& e) override;
  void on_program_allowed(const ProgramAllowedEvent& e) override;

  const std::vector<Violation>& violations() const { return violations_; }
  std::size_t syscalls_checked() const { return syscalls_; }
  std::size_t fetches_checked() const { return fetches_; }
  std::size_t switches_checked() const { return switches_; }

 private:
  // Whether `goal` is provable in the policy program alone.
  bool permitted(const ProgramId& policy, const Term& goal);
  std::vector<ProgramId> context_policies(const std::vector<ExprPtr>& contexts, std::string& problem);

  PolicyRegistry& registry_;
  std::ostringstream sink_;
  Host host_;
  Engine engine_;
  std::vector<ProgramId> allowed_;
  std::vector<Violation> violations_;
  std::size_t syscalls_ = 0;
  std::size_t fetches_ = 0;
  std::size_t switches_ = 0;
};

}  // namespace logicweb
