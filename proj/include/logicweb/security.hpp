#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicweb/program.hpp"
#include "logicweb/signatures.hpp"

namespace logicweb {

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The policy set plus the signer->policy and program->policy maps. The assignment
// records live here, outside every LogicWeb program.
class PolicyRegistry {
 public:
  explicit PolicyRegistry(ProgramId default_policy);

  // Config lines: `signer <id-string> <policy-url>`, `default <policy-url>`,
  // `trusted <url-prefix> <policy-url>`; `#` starts a comment line.
  static PolicyRegistry parse_config(std::string_view text);
  static PolicyRegistry load_config(const std::filesystem::path& file);

  void set_default(ProgramId policy) { default_policy_ = std::move(policy); }
  const ProgramId& default_policy() const { return default_policy_; }
  void map_signer(std::string signer, ProgramId policy);
  void add_trusted(std::string url_prefix, ProgramId policy);
  void set_trusted_enabled(bool on) { trusted_enabled_ = on; }
  bool trusted_enabled() const { return trusted_enabled_; }
  void set_keys(KeyStore keys) { keys_ = std::move(keys); }
  const KeyStore& keys() const { return keys_; }

  // Membership in the policy set: any value of any map, or the default.
  bool is_policy(const ProgramId& id) const;
  std::vector<ProgramId> policies() const;

  // Throws PolicyError on a policy id or an id with no assignment.
  ProgramId pol(const ProgramId& id) const;
  // Throws PolicyError unless e is a single program identifier.
  ProgramId pol(const Expr& e) const;
  // Image under pol, first-occurrence order, no duplicates.
  std::vector<ProgramId> pols(const std::vector<ProgramId>& ids) const;

  std::optional<ProgramId> assigned(const ProgramId& id) const;
  const std::map<ProgramId, ProgramId>& assignments() const { return program_to_policy_; }

  // Runs once per program: skipped for policies and already assigned ids.
  void assign_policy(const ProgramId& id, std::string_view contents);
  ProgramId determine_policy_id(std::string_view url, std::string_view contents) const;
  // Records an assignment directly (used when reloading a store cache).
  void record(const ProgramId& id, const ProgramId& policy);

  std::optional<ProgramId> signer_policy(const std::string& signer) const;

 private:
  ProgramId default_policy_;
  std::map<std::string, ProgramId> signer_to_policy_;
  std::vector<std::pair<std::string, ProgramId>> trusted_;
  bool trusted_enabled_ = false;
  std::map<ProgramId, ProgramId> program_to_policy_;
  KeyStore keys_;
};

}  // namespace logicweb
