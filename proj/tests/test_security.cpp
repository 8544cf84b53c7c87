#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "logicweb/builtins.hpp"
#include "logicweb/security.hpp"
#include "logicweb/signatures.hpp"
#include "support.hpp"

using namespace logicweb;
using lwtest::get;
using lwtest::policy;
using lwtest::term;

namespace {

struct Web {
  std::shared_ptr<MemoryTransport> transport = std::make_shared<MemoryTransport>();

  Web() {
    transport->put(policy("allow").url(), lwtest::read_file(lwtest::web_root() / "policies/allow.html"));
  }
};

}  // namespace

TEST(Registry, PolAndPols) {
  PolicyRegistry reg(policy("allow"));
  reg.map_signer("alice", policy("ok"));
  auto a = get("http://a.example/"), b = get("http://b.example/");
  reg.assign_policy(a, "plain page");
  EXPECT_EQ(reg.pol(a), policy("allow"));
  EXPECT_THROW(reg.pol(policy("allow")), PolicyError);
  EXPECT_THROW(reg.pol(policy("ok")), PolicyError);
  EXPECT_THROW(reg.pol(b), PolicyError);
  EXPECT_THROW(reg.pol(*Expr::empty()), PolicyError);
  reg.assign_policy(b, "another page");
  EXPECT_TRUE(reg.pols({}).empty());
  EXPECT_EQ(reg.pols({a, b}), std::vector<ProgramId>{policy("allow")});
  reg.record(get("http://c.example/"), policy("ok"));
  EXPECT_EQ(reg.pols({a, get("http://c.example/")}), (std::vector<ProgramId>{policy("allow"), policy("ok")}));
}

TEST(Registry, AssignmentRunsOnce) {
  PolicyRegistry reg(policy("allow"));
  KeyPair k = default_scheme().generate();
  KeyStore ks;
  ks.add("alice", k.public_key);
  reg.set_keys(ks);
  reg.map_signer("alice", policy("ok"));
  auto signed_id = get("http://s.example/p.lwpgp.html");
  std::string page = sign_page("<p>x</p>", k.secret_key, "alice");
  reg.assign_policy(signed_id, page);
  EXPECT_EQ(reg.assigned(signed_id), policy("ok"));
  reg.assign_policy(signed_id, "tampered");
  EXPECT_EQ(reg.assigned(signed_id), policy("ok"));
  reg.assign_policy(policy("ok"), "policy page");
  EXPECT_FALSE(reg.assigned(policy("ok")));
}

TEST(Registry, DeterminePolicyId) {
  PolicyRegistry reg(policy("allow"));
  KeyPair k = default_scheme().generate();
  KeyStore ks;
  ks.add("alice", k.public_key);
  reg.set_keys(ks);
  reg.map_signer("alice", policy("ok"));
  reg.add_trusted("http://trusted.example/", policy("safe"));
  std::string page = sign_page("<p>x</p>", k.secret_key, "alice");
  EXPECT_EQ(reg.determine_policy_id("http://s.example/p.lwpgp.html", page), policy("ok"));
  std::string tampered = page;
  tampered[1] = 'X';
  EXPECT_EQ(reg.determine_policy_id("http://s.example/p.lwpgp.html", tampered), policy("allow"));
  EXPECT_EQ(reg.determine_policy_id("http://s.example/p.html", page), policy("allow"));
  EXPECT_EQ(reg.determine_policy_id("http://trusted.example/x.html", "x"), policy("allow"));
  reg.set_trusted_enabled(true);
  EXPECT_EQ(reg.determine_policy_id("http://trusted.example/x.html", "x"), policy("safe"));
}

TEST(Registry, Config) {
  auto reg = PolicyRegistry::parse_config(
      "# registry\n"
      "default file:///policies/allow.html\n"
      "signer Ann Example <ann@example.org> file:///policies/ok.html\n"
      "trusted http://www.cs.mu.oz.au/ file:///policies/safe.html\n");
  EXPECT_EQ(reg.default_policy(), policy("allow"));
  EXPECT_EQ(reg.signer_policy("Ann Example <ann@example.org>"), policy("ok"));
  EXPECT_EQ(reg.signer_policy("unknown"), policy("allow"));
  EXPECT_FALSE(reg.signer_policy("nobody"));
  EXPECT_TRUE(reg.is_policy(policy("safe")));
  EXPECT_FALSE(reg.trusted_enabled());
  EXPECT_THROW(PolicyRegistry::parse_config("signer a file:///p.html\n"), PolicyError);
  EXPECT_THROW(PolicyRegistry::parse_config("default not a url\n"), PolicyError);
  EXPECT_THROW(PolicyRegistry::parse_config("default file:///p.html\nbogus x\n"), PolicyError);
  auto loaded = PolicyRegistry::load_config(lwtest::fixture_root() / "registry/domain.conf");
  EXPECT_EQ(loaded.default_policy(), policy("domain"));
}

TEST(BuiltinTable, Lookup) {
  EXPECT_NE(builtin_lookup(term("open(F, M, S)")), nullptr);
  EXPECT_NE(builtin_lookup(term("system(C)")), nullptr);
  EXPECT_EQ(builtin_lookup(term("interested_in(X)")), nullptr);
  EXPECT_EQ(builtin_lookup(term("open(F, M)")), nullptr);
  EXPECT_TRUE(builtin_lookup("assert", 1)->mutates_program);
  EXPECT_FALSE(builtin_lookup("open", 3)->mutates_program);
}

TEST(CallBuiltin, TypeChecks) {
  Web web;
  lwtest::ScratchDir dir;
  std::string file = (dir.path() / "f.txt").string();
  {
    std::ofstream(file) << "line one\n";
  }
  web.transport->put("http://m.example/", lwtest::lw_page(
      "try_open(F, S) :- open(F, read, S).\n"
      "bad_name(S) :- open(123, read, S).\n"
      "bad_mode(F, S) :- open(F, append, S).\n"
      "bound_stream(F) :- open(F, read, already).\n"
      "has(A, B) :- contains(A, B).\n"));
  Session s(web.transport, PolicyRegistry(policy("allow")));
  auto m = get("http://m.example/");
  QueryResult ok = s.query(m, "try_open('" + file + "', S)");
  ASSERT_EQ(ok.answers.size(), 1u);
  EXPECT_TRUE(ok.answers[0][0].second.is_functor("$stream", 1));
  EXPECT_TRUE(s.query(m, "bad_name(S)").answers.empty());
  EXPECT_TRUE(s.query(m, "bad_mode('" + file + "', S)").answers.empty());
  EXPECT_TRUE(s.query(m, "bound_stream('" + file + "')").answers.empty());
  EXPECT_TRUE(s.query(m, "try_open('" + (dir.path() / "missing").string() + "', S)").answers.empty());
  EXPECT_EQ(s.query(m, "has(\"http://www.cs.mu.oz.au/x\", \"http://www.cs.mu.oz.au/\")").answers.size(), 1u);
  EXPECT_TRUE(s.query(m, "has(\"http://www.cs.rmit.edu.au/\", \"http://www.cs.mu.oz.au/\")").answers.empty());
  s.host().streams.close_all();
}

TEST(CallBuiltin, ContainsMatchesSubstringOracle) {
  Web web;
  web.transport->put("http://m.example/", lwtest::lw_page("has(A, B) :- contains(A, B)."));
  Session s(web.transport, PolicyRegistry(policy("allow")));
  std::mt19937 rng(71);
  for (int i = 0; i < 200; ++i) {
    std::string a, b;
    for (unsigned k = rng() % 8; k > 0; --k) a += static_cast<char>('a' + rng() % 3);
    for (unsigned k = rng() % 3; k > 0; --k) b += static_cast<char>('a' + rng() % 3);
    bool expected = a.find(b) != std::string::npos;
    auto r = s.query(get("http://m.example/"), "has(\"" + a + "\", \"" + b + "\")");
    EXPECT_EQ(!r.answers.empty(), expected) << a << " / " << b;
  }
}

TEST(SecurityProperties, EveryInstalledProgramHasOnePolicy) {
  std::mt19937 rng(72);
  for (int round = 0; round < 30; ++round) {
    Web web;
    PolicyRegistry reg(policy("allow"));
    reg.map_signer("s", policy("ok"));
    ProgramStore store;
    Fetcher f(web.transport, reg);
    for (int i = 0; i < 5; ++i) web.transport->put("http://p" + std::to_string(i) + ".example/", "x");
    for (int step = 0; step < 8; ++step) {
      f.download(store, get("http://p" + std::to_string(rng() % 5) + ".example/"));
      if (rng() % 4 == 0) f.download(store, policy("allow"));
    }
    for (const auto& [id, prog] : store) {
      if (reg.is_policy(id)) {
        EXPECT_FALSE(reg.assigned(id));
      } else {
        EXPECT_TRUE(reg.assigned(id));
      }
    }
  }
}

TEST(SecurityProperties, CompositionIsConjunction) {
  std::mt19937 rng(73);
  Web web;
  PolicyRegistry reg(policy("allow"));
  std::vector<std::vector<std::size_t>> chosen;
  const std::size_t npolicies = 12;
  for (std::size_t i = 0; i < npolicies; ++i) {
    std::vector<std::size_t> picks;
    std::string clauses = "call_system(G) :- built_ins:call_builtin(G).\nvalid_program(_, _).\n";
    for (std::size_t p = 0; p < lwtest::call_patterns().size(); ++p) {
      if (rng() % 2) {
        picks.push_back(p);
        clauses += lwtest::call_patterns()[p].clause + "\n";
      }
    }
    chosen.push_back(picks);
    auto id = get("file:///random/p" + std::to_string(i) + ".html");
    web.transport->put(id.url(), lwtest::lw_page(clauses));
    reg.map_signer("signer" + std::to_string(i), id);
  }
  Session s(web.transport, reg);
  auto valid = [&](std::size_t p, const Term& call) {
    for (auto k : chosen[p]) {
      if (lwtest::call_patterns()[k].accepts(call)) return true;
    }
    return false;
  };
  int agreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t p = rng() % npolicies, q = rng() % npolicies;
    Term call = term(lwtest::sample_calls()[rng() % lwtest::sample_calls().size()]);
    auto pid = get("file:///random/p" + std::to_string(p) + ".html");
    auto qid = get("file:///random/p" + std::to_string(q) + ".html");
    bool under_p = s.allows_call({pid}, call);
    bool under_q = s.allows_call({qid}, call);
    bool both = s.allows_call({pid, qid}, call);
    EXPECT_EQ(under_p, valid(p, call)) << to_string(call);
    EXPECT_EQ(under_q, valid(q, call)) << to_string(call);
    EXPECT_EQ(both, under_p && under_q) << to_string(call);
    agreements += both;
  }
  EXPECT_GT(agreements, 0);
}
