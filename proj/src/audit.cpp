#include "logicweb/audit.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <ostream>

#include "logicweb/syntax.hpp"

namespace logicweb {

namespace {

std::string now_utc() {
  auto now = std::chrono::system_clock::now();
  std::time_t secs = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

}  // namespace

std::string AuditEntry::line() const { return timestamp + '\t' + kind + '\t' + subject + '\t' + context + '\t' + sigma; }

std::string sigma_to_string(const std::vector<ProgramId>& sigma) {
  std::string out = "[";
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i) out += ", ";
    out += sigma[i].to_string();
  }
  return out + "]";
}

void AuditLog::add(AuditEntry entry) {
  if (sink_) *sink_ << entry.line() << '\n' << std::flush;
  entries_.push_back(std::move(entry));
}

void AuditLog::on_syscall(const SyscallEvent& e) {
  add({now_utc(), "syscall", to_string(e.goal), to_string(*e.context), sigma_to_string(e.sigma)});
}

void AuditLog::on_fetch(const FetchEvent& e) {
  add({now_utc(), "fetch", e.id.to_string(), to_string(*e.context), sigma_to_string(e.sigma)});
}

// ------------------------------------------------------------ SafetyMonitor

SafetyMonitor::SafetyMonitor(ProgramStore& store, PolicyRegistry& registry)
    : registry_(registry), engine_(store, registry, nullptr, host_) {
  host_.out = &sink_;
  host_.commands = std::make_shared<RecordingRunner>();
}

bool SafetyMonitor::permitted(const ProgramId& policy, const Term& goal) {
  try {
    return engine_.succeeds({}, Expr::program(policy), goal);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<ProgramId> SafetyMonitor::context_policies(const std::vector<ExprPtr>& contexts, std::string& problem) {
  std::vector<ProgramId> out;
  for (const auto& c : contexts) {
    for (const auto& id : expids(*c)) {
      if (registry_.is_policy(id)) continue;
      auto p = registry_.assigned(id);
      if (!p) {
        problem = "no policy assigned to " + id.to_string();
        continue;
      }
      if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
    }
  }
  return out;
}

void SafetyMonitor::on_syscall(const SyscallEvent& e) {
  ++syscalls_;
  std::string problem;
  auto policies = context_policies(e.contexts, problem);
  if (!problem.empty()) violations_.push_back({"syscall", problem});
  Term check = Term::compound("valid_systemCall", {e.goal});
  for (const auto& p : policies) {
    if (!permitted(p, check)) {
      violations_.push_back({"syscall", to_string(e.goal) + " forbidden by " + p.to_string()});
    }
  }
}

void SafetyMonitor::on_program_allowed(const ProgramAllowedEvent& e) {
  for (const auto& id : e.ids) allowed_.push_back(id);
}

void SafetyMonitor::on_fetch(const FetchEvent& e) {
  if (e.policy) return;
  ++fetches_;
  if (!e.sigma.empty()) {
    auto it = std::find(allowed_.begin(), allowed_.end(), e.id);
    if (it == allowed_.end()) {
      violations_.push_back({"unchecked-fetch", e.id.to_string()});
    } else {
      allowed_.erase(it);
    }
  }
  std::string problem;
  auto policies = context_policies(e.contexts, problem);
  if (!problem.empty()) violations_.push_back({"fetch", problem});
  Term check = Term::compound("valid_program", {e.id.method_term(), Term::string(e.id.url())});
  for (const auto& p : policies) {
    if (!permitted(p, check)) violations_.push_back({"fetch", e.id.to_string() + " forbidden by " + p.to_string()});
  }
}

void SafetyMonitor::on_context_switch(const ContextSwitchEvent& e) {
  ++switches_;
  std::string problem;
  auto needed = context_policies(e.contexts, problem);
  if (!problem.empty()) violations_.push_back({"coverage", problem});
  for (const auto& p : needed) {
    if (std::find(e.sigma_after.begin(), e.sigma_after.end(), p) == e.sigma_after.end()) {
      violations_.push_back({"coverage", p.to_string() + " missing from " + sigma_to_string(e.sigma_after)});
    }
  }
}

}  // namespace logicweb
