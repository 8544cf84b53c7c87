// logicweb: run LogicWeb queries and manage the program store, keys and policies.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "logicweb/audit.hpp"
#include "logicweb/session.hpp"
#include "logicweb/signatures.hpp"
#include "logicweb/syntax.hpp"

using namespace logicweb;

namespace {

constexpr int kAnswers = 0;
constexpr int kNoAnswers = 1;
constexpr int kTerminated = 2;
constexpr int kError = 3;

struct Globals {
  std::string fixture_root;
  std::string registry;
  std::string keys;
  std::string store;
  int http_timeout_ms = 10000;
  int redirects = 5;
  std::string user_agent = "logicweb/1.0";
};

struct QueryFlags {
  std::string main_url;
  std::string goal;
  std::optional<std::size_t> max_depth;
  std::optional<std::size_t> max_clauses;
  std::optional<std::size_t> max_programs;
  std::optional<long> timeout_ms;
  bool loop_check = false;
  bool guard_defaults = false;
  bool no_security = false;
  bool trusted_urls = false;
  std::string audit_file;
};

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path store_dir(const Globals& g) {
  if (!g.store.empty()) return g.store;
  const char* xdg = std::getenv("XDG_CACHE_HOME");
  const char* home = std::getenv("HOME");
  if (xdg && *xdg) return std::filesystem::path(xdg) / "logicweb";
  return std::filesystem::path(home ? home : ".") / ".cache" / "logicweb";
}

std::shared_ptr<Transport> make_transport(const Globals& g) {
  if (!g.fixture_root.empty()) return std::make_shared<FixtureTransport>(g.fixture_root, g.redirects);
  auto http = std::make_shared<HttpTransport>(std::chrono::milliseconds(g.http_timeout_ms), g.redirects, g.user_agent);
  return std::make_shared<SchemeRouter>(std::make_shared<FixtureTransport>("/", g.redirects), http);
}

PolicyRegistry make_registry(const Globals& g, bool trusted) {
  if (g.registry.empty()) throw PolicyError("no registry configured (use --registry or LW_REGISTRY)");
  PolicyRegistry reg = PolicyRegistry::load_config(g.registry);
  if (!g.keys.empty()) reg.set_keys(KeyStore::load(g.keys));
  reg.set_trusted_enabled(trusted);
  return reg;
}

ProgramId parse_id(const std::string& text) {
  if (text.rfind("lw(", 0) != 0) return ProgramId::get(text);
  auto id = ProgramId::from_term(read_term(text).term);
  if (!id) throw std::runtime_error("not a program identifier: " + text);
  return *id;
}

void add_query_options(CLI::App* cmd, QueryFlags& f) {
  cmd->add_option("main", f.main_url, "main program URL or lw(Method, URL) term")->required();
  cmd->add_option("goal", f.goal, "goal to evaluate in the main program")->required();
  cmd->add_option("--max-depth", f.max_depth, "clause-application depth limit")->envname("LW_MAX_DEPTH");
  cmd->add_option("--max-clauses", f.max_clauses, "clause applications per query")->envname("LW_MAX_CLAUSES");
  cmd->add_option("--max-programs", f.max_programs, "programs created per session")->envname("LW_MAX_PROGRAMS");
  cmd->add_option("--timeout-ms", f.timeout_ms, "wall-clock limit per query")->envname("LW_TIMEOUT_MS");
  cmd->add_flag("--loop-check", f.loop_check, "stop on a variant goal in the same context")->envname("LW_LOOP_CHECK");
  cmd->add_flag("--guard-defaults", f.guard_defaults, "loop check with limits 40/100/500");
  cmd->add_flag("--no-security", f.no_security, "evaluate without policy programs")->envname("LW_NO_SECURITY");
  cmd->add_flag("--trusted-urls", f.trusted_urls, "enable trusted URL prefixes")->envname("LW_TRUSTED_URLS");
  cmd->add_option("--audit", f.audit_file, "append audit lines to this file")->envname("LW_AUDIT_LOG");
}

SessionOptions session_options(const Globals& g, const QueryFlags& f) {
  SessionOptions o;
  if (f.guard_defaults) o.guard = GuardConfig::defaults();
  if (f.max_depth) o.guard.max_depth = f.max_depth;
  if (f.max_clauses) o.guard.max_clauses = f.max_clauses;
  if (f.max_programs) o.guard.max_programs = f.max_programs;
  if (f.timeout_ms) o.guard.timeout = std::chrono::milliseconds(*f.timeout_ms);
  if (f.loop_check) o.guard.loop_check = true;
  o.engine.security_enabled = !f.no_security;
  o.cache_dir = store_dir(g);
  return o;
}

int run_query(const Globals& g, const QueryFlags& f, bool trace) {
  Session session(make_transport(g), make_registry(g, f.trusted_urls), session_options(g, f));
  session.load_cache();
  std::ofstream audit_file;
  if (!f.audit_file.empty()) audit_file.open(f.audit_file, std::ios::app);
  AuditLog audit(trace ? &std::cout : (audit_file.is_open() ? &audit_file : nullptr));
  session.add_observer(&audit);
  if (trace) session.host().out = &std::cerr;

  QueryResult r = session.query(parse_id(f.main_url), f.goal);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  if (r.error) {
    std::cerr << "error: " << *r.error << '\n';
    return kError;
  }
  std::ostream& answers = trace ? std::cerr : std::cout;
  for (const auto& a : r.answers) answers << (a.empty() ? std::string("true") : format_answer(a)) << '\n';
  if (r.terminated) {
    answers << "terminated: " << message(*r.terminated) << '\n';
    return kTerminated;
  }
  return r.answers.empty() ? kNoAnswers : kAnswers;
}

int run_fetch(const Globals& g, const std::string& url, const std::string& method, bool trusted) {
  Session session(make_transport(g), make_registry(g, trusted), SessionOptions{{}, {}, store_dir(g)});
  session.load_cache();
  ProgramId id = method == "head" ? ProgramId::head(url) : method == "get" ? ProgramId::get(url) : parse_id(url);
  FetchOutcome out = session.fetcher().download(session.store(), id);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (!out.ok()) {
    std::cerr << "error: " << to_string(*out.failure) << ": " << out.diagnostic << '\n';
    return kError;
  }
  session.persist_cache();
  auto policy = session.registry().is_policy(id) ? std::nullopt : session.registry().assigned(id);
  std::cout << serialize_program(*out.program, policy);
  return 0;
}

int run_store_list(const Globals& g) {
  auto dir = store_dir(g);
  std::vector<std::pair<std::string, std::string>> rows;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() != ".lw") continue;
      try {
        CachedProgram cp = deserialize_program(read_all(e.path().string()));
        rows.emplace_back(cp.program->id().to_string(), cp.policy ? cp.policy->to_string() : "none");
      } catch (const std::exception& ex) {
        std::cerr << "warning: " << e.path().string() << ": " << ex.what() << '\n';
      }
    }
  }
  std::sort(rows.begin(), rows.end());
  for (const auto& [id, pol] : rows) std::cout << id << '\t' << pol << '\n';
  return 0;
}

int run_store_clear(const Globals& g) {
  auto dir = store_dir(g);
  std::size_t n = 0;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() == ".lw" && std::filesystem::remove(e.path())) ++n;
    }
  }
  std::cout << "removed " << n << " program(s)\n";
  return 0;
}

int run_keygen(const Globals& g, const std::string& signer, const std::string& secret_out) {
  KeyPair kp = default_scheme().generate();
  {
    std::ofstream out(secret_out, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + secret_out);
    out << base64_encode(kp.secret_key) << '\n';
  }
  std::filesystem::permissions(secret_out, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
  std::string line = signer + " " + base64_encode(kp.public_key);
  if (!g.keys.empty()) {
    KeyStore ks = std::filesystem::exists(g.keys) ? KeyStore::load(g.keys) : KeyStore{};
    ks.add(signer, kp.public_key);
    std::ofstream out(g.keys, std::ios::trunc);
    out << ks.serialize();
  }
  std::cout << line << '\n';
  return 0;
}

int run_sign(const std::string& input, const std::string& secret_file, const std::string& signer,
             const std::string& output) {
  std::string secret = read_all(secret_file);
  while (!secret.empty() && std::isspace(static_cast<unsigned char>(secret.back()))) secret.pop_back();
  std::string signed_page = sign_page(read_all(input), base64_decode(secret), signer);
  if (output.empty() || output == "-") {
    std::cout << signed_page;
  } else {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    out << signed_page;
  }
  return 0;
}

int run_policy_check(const Globals& g, const std::vector<std::string>& policy_urls, const std::string& call,
                     const std::string& program) {
  std::vector<ProgramId> policies;
  for (const auto& u : policy_urls) policies.push_back(parse_id(u));
  Session session(make_transport(g), PolicyRegistry(policies.front()));
  bool allowed = false;
  try {
    if (!call.empty()) {
      allowed = session.allows_call(policies, read_term(call).term);
    } else {
      allowed = session.allows_program(policies, parse_id(program));
    }
  } catch (const PolicyError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  std::cout << (allowed ? "allow" : "deny") << '\n';
  return allowed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LogicWeb sandboxed interpreter"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--fixture-root", g.fixture_root, "serve every URL from this directory")->envname("LW_FIXTURE_ROOT");
  app.add_option("--registry", g.registry, "policy registry configuration")->envname("LW_REGISTRY");
  app.add_option("--keys", g.keys, "public key store")->envname("LW_KEYS");
  app.add_option("--store", g.store, "program store cache directory")->envname("LW_STORE");
  app.add_option("--http-timeout-ms", g.http_timeout_ms, "per-request timeout")->envname("LW_HTTP_TIMEOUT_MS");
  app.add_option("--max-redirects", g.redirects, "redirect limit")->envname("LW_MAX_REDIRECTS");
  app.add_option("--user-agent", g.user_agent, "HTTP user agent")->envname("LW_USER_AGENT");

  QueryFlags qf;
  auto* query = app.add_subcommand("query", "evaluate a goal against a main program");
  add_query_options(query, qf);
  QueryFlags tf;
  auto* trace = app.add_subcommand("trace", "print the audit events of a query");
  add_query_options(trace, tf);

  std::string fetch_url, fetch_method = "get";
  bool fetch_trusted = false;
  auto* fetch = app.add_subcommand("fetch", "download a program into the store");
  fetch->add_option("url", fetch_url, "URL or lw(Method, URL) term")->required();
  fetch->add_option("--method", fetch_method, "get, head or term")->check(CLI::IsMember({"get", "head", "term"}));
  fetch->add_flag("--trusted-urls", fetch_trusted, "enable trusted URL prefixes")->envname("LW_TRUSTED_URLS");

  auto* store_list = app.add_subcommand("store-list", "list cached programs and their policies");
  auto* store_clear = app.add_subcommand("store-clear", "remove all cached programs");

  std::string signer, secret_file;
  auto* keygen = app.add_subcommand("keygen", "generate a signing key pair");
  keygen->add_option("--signer", signer, "signer identity")->required();
  keygen->add_option("--secret", secret_file, "where to write the secret key")->required();

  std::string sign_input, sign_secret, sign_signer, sign_output;
  auto* sign = app.add_subcommand("sign", "append a signature trailer to a page");
  sign->add_option("input", sign_input, "page to sign")->required()->check(CLI::ExistingFile);
  sign->add_option("--secret", sign_secret, "secret key file")->required()->check(CLI::ExistingFile);
  sign->add_option("--signer", sign_signer, "signer identity")->required();
  sign->add_option("-o,--output", sign_output, "output file (default stdout)");

  std::vector<std::string> check_policies;
  std::string check_call, check_program;
  auto* policy_check = app.add_subcommand("policy-check", "test a call or program under composed policies");
  policy_check->add_option("--policy", check_policies, "policy program URL (repeatable)")->required();
  auto* call_opt = policy_check->add_option("--call", check_call, "system call term");
  auto* prog_opt = policy_check->add_option("--program", check_program, "program URL or lw(Method, URL) term");
  call_opt->excludes(prog_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    if (*query) return run_query(g, qf, false);
    if (*trace) return run_query(g, tf, true);
    if (*fetch) return run_fetch(g, fetch_url, fetch_method, fetch_trusted);
    if (*store_list) return run_store_list(g);
    if (*store_clear) return run_store_clear(g);
    if (*keygen) return run_keygen(g, signer, secret_file);
    if (*sign) return run_sign(sign_input, sign_secret, sign_signer, sign_output);
    if (*policy_check) {
      if (check_call.empty() == check_program.empty()) {
        std::cerr << "error: policy-check needs exactly one of --call or --program\n";
        return kError;
      }
      return run_policy_check(g, check_policies, check_call, check_program);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: syntax error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kError;
}
