#include "logicweb/security.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace logicweb {

PolicyRegistry::PolicyRegistry(ProgramId default_policy) : default_policy_(std::move(default_policy)) {}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

ProgramId policy_id(std::string_view url, int line) {
  if (!valid_url(url)) throw PolicyError("registry line " + std::to_string(line) + ": not a URL: " + std::string(url));
  return ProgramId::get(std::string(url));
}

}  // namespace

PolicyRegistry PolicyRegistry::parse_config(std::string_view text) {
  std::optional<ProgramId> def;
  std::vector<std::pair<std::string, ProgramId>> signers;
  std::vector<std::pair<std::string, ProgramId>> trusted;
  std::istringstream in{std::string(text)};
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    auto sp = line.find_first_of(" \t");
    std::string_view keyword = line.substr(0, sp);
    std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    if (keyword == "default") {
      if (rest.empty() || rest.find_first_of(" \t") != std::string_view::npos) {
        throw PolicyError("registry line " + std::to_string(n) + ": expected `default <policy-url>`");
      }
      def = policy_id(rest, n);
    } else if (keyword == "signer" || keyword == "trusted") {
      auto last = rest.find_last_of(" \t");
      if (last == std::string_view::npos) {
        throw PolicyError("registry line " + std::to_string(n) + ": expected `" + std::string(keyword) +
                          " <key> <policy-url>`");
      }
      std::string key(trim(rest.substr(0, last)));
      ProgramId pid = policy_id(rest.substr(last + 1), n);
      (keyword == "signer" ? signers : trusted).emplace_back(std::move(key), std::move(pid));
    } else {
      throw PolicyError("registry line " + std::to_string(n) + ": unknown keyword `" + std::string(keyword) + "`");
    }
  }
  if (!def) throw PolicyError("registry: no `default` policy configured");
  PolicyRegistry reg(*def);
  for (auto& [s, p] : signers) reg.map_signer(s, p);
  for (auto& [prefix, p] : trusted) reg.add_trusted(prefix, p);
  return reg;
}

PolicyRegistry PolicyRegistry::load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw PolicyError("cannot read registry config " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void PolicyRegistry::map_signer(std::string signer, ProgramId policy) {
  if (signer == kUnknownSigner) {
    default_policy_ = std::move(policy);
    return;
  }
  signer_to_policy_.insert_or_assign(std::move(signer), std::move(policy));
}

void PolicyRegistry::add_trusted(std::string url_prefix, ProgramId policy) {
  trusted_.emplace_back(std::move(url_prefix), std::move(policy));
}

bool PolicyRegistry::is_policy(const ProgramId& id) const {
  if (id == default_policy_) return true;
  for (const auto& [s, p] : signer_to_policy_) {
    if (p == id) return true;
  }
  for (const auto& [prefix, p] : trusted_) {
    if (p == id) return true;
  }
  for (const auto& [prog, p] : program_to_policy_) {
    if (p == id) return true;
  }
  return false;
}

std::vector<ProgramId> PolicyRegistry::policies() const {
  std::vector<ProgramId> out{default_policy_};
  auto add = [&](const ProgramId& p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  for (const auto& [s, p] : signer_to_policy_) add(p);
  for (const auto& [prefix, p] : trusted_) add(p);
  for (const auto& [prog, p] : program_to_policy_) add(p);
  std::sort(out.begin(), out.end());
  return out;
}

ProgramId PolicyRegistry::pol(const ProgramId& id) const {
  if (is_policy(id)) throw PolicyError("pol is undefined on policy program " + id.to_string());
  auto it = program_to_policy_.find(id);
  if (it == program_to_policy_.end()) throw PolicyError("no policy assigned to " + id.to_string());
  return it->second;
}

ProgramId PolicyRegistry::pol(const Expr& e) const {
  if (e.kind != Expr::Kind::Id) throw PolicyError("pol is only defined on program identifiers, not " + to_string(e));
  return pol(*e.id);
}

std::vector<ProgramId> PolicyRegistry::pols(const std::vector<ProgramId>& ids) const {
  std::vector<ProgramId> out;
  for (const auto& id : ids) {
    ProgramId p = pol(id);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

std::optional<ProgramId> PolicyRegistry::assigned(const ProgramId& id) const {
  auto it = program_to_policy_.find(id);
  if (it == program_to_policy_.end()) return std::nullopt;
  return it->second;
}

std::optional<ProgramId> PolicyRegistry::signer_policy(const std::string& signer) const {
  if (signer == kUnknownSigner) return default_policy_;
  auto it = signer_to_policy_.find(signer);
  if (it == signer_to_policy_.end()) return std::nullopt;
  return it->second;
}

ProgramId PolicyRegistry::determine_policy_id(std::string_view url, std::string_view contents) const {
  if (trusted_enabled_) {
    for (const auto& [prefix, p] : trusted_) {
      if (url.substr(0, prefix.size()) == prefix) return p;
    }
  }
  if (is_signed(url)) {
    std::string signer = authenticate(contents, keys_);
    if (auto p = signer_policy(signer)) return *p;
  }
  return default_policy_;
}

void PolicyRegistry::assign_policy(const ProgramId& id, std::string_view contents) {
  if (is_policy(id) || program_to_policy_.count(id)) return;
  program_to_policy_.emplace(id, determine_policy_id(id.url(), contents));
}

void PolicyRegistry::record(const ProgramId& id, const ProgramId& policy) {
  if (is_policy(id)) throw PolicyError("cannot assign a policy to policy program " + id.to_string());
  program_to_policy_.insert_or_assign(id, policy);
}

}  // namespace logicweb
