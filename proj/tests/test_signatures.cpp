#include <gtest/gtest.h>

#include <random>

#include "logicweb/signatures.hpp"
#include "support.hpp"

using namespace logicweb;

namespace {

std::string random_html(std::mt19937& rng, std::size_t max_len) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz <>/=\"'\n-!ABC0123456789";
  std::string s(rng() % (max_len + 1), ' ');
  for (auto& c : s) c = alphabet[rng() % (sizeof alphabet - 1)];
  return s;
}

KeyStore store_with(const std::string& signer, const KeyPair& kp) {
  KeyStore ks;
  ks.add(signer, kp.public_key);
  return ks;
}

}  // namespace

TEST(IsSigned, Examples) {
  EXPECT_TRUE(is_signed("http://x.example/a.lwpgp.html"));
  EXPECT_FALSE(is_signed("http://x.example/a.html"));
  EXPECT_TRUE(is_signed("http://x.example/a.lwpgp.html?x=1"));
  EXPECT_TRUE(is_signed("http://x.example/a.lwpgp.html#frag"));
  EXPECT_FALSE(is_signed("http://x.example/?q=a.lwpgp.html"));
  EXPECT_FALSE(is_signed("http://x.example/a.lwpgp.html/"));
}

TEST(Base64, RoundTripAndErrors) {
  std::mt19937 rng(61);
  for (int i = 0; i < 100; ++i) {
    Bytes b(rng() % 40);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    EXPECT_EQ(base64_decode(base64_encode(b)), b);
  }
  EXPECT_EQ(base64_encode({'f', 'o', 'o'}), "Zm9v");
  EXPECT_THROW(base64_decode("Zm9"), SignatureError);
  EXPECT_THROW(base64_decode("Zm9*"), SignatureError);
}

TEST(SplitSigned, InverseOfAttach) {
  Bytes sig = {1, 2, 3, 4};
  std::string html = "<html>page</html>\n";
  SignedPage p = split_signed(attach_signature(html, "Ann Example <ann@example.org>", sig));
  EXPECT_EQ(p.html, html);
  EXPECT_EQ(p.signer, "Ann Example <ann@example.org>");
  EXPECT_EQ(p.signature, sig);
  EXPECT_THROW(split_signed(html), SignatureError);
  EXPECT_THROW(split_signed(html + "<!-- LW-SIG v1 alice %%%% -->"), SignatureError);
  EXPECT_THROW(split_signed(html + "<!-- LW-SIG v2 alice AAAA -->"), SignatureError);
}

TEST(Authenticate, Examples) {
  KeyPair k1 = default_scheme().generate();
  KeyPair k2 = default_scheme().generate();
  std::string page = sign_page("<p>hello</p>", k1.secret_key, "alice");
  EXPECT_EQ(authenticate(page, store_with("alice", k1)), "alice");
  EXPECT_EQ(authenticate(page, store_with("alice", k2)), kUnknownSigner);
  EXPECT_EQ(authenticate(page, KeyStore{}), kUnknownSigner);
  EXPECT_EQ(authenticate("<p>no trailer</p>", store_with("alice", k1)), kUnknownSigner);
  std::string empty = sign_page("", k1.secret_key, "alice");
  EXPECT_EQ(authenticate(empty, store_with("alice", k1)), "alice");
}

TEST(Authenticate, FlippedByte) {
  KeyPair k = default_scheme().generate();
  std::string page = sign_page("<p>hello world</p>", k.secret_key, "alice");
  page[3] ^= 0x01;
  EXPECT_EQ(authenticate(page, store_with("alice", k)), kUnknownSigner);
}

TEST(Authenticate, IdentityComesFromTheVerifyingKey) {
  KeyPair a = default_scheme().generate();
  KeyPair m = default_scheme().generate();
  KeyStore ks;
  ks.add("alice", a.public_key);
  ks.add("mallory", m.public_key);
  std::string forged = sign_page("<p>x</p>", m.secret_key, "alice");
  EXPECT_EQ(authenticate(forged, ks), "mallory");
  KeyStore only_alice = store_with("alice", a);
  EXPECT_EQ(authenticate(forged, only_alice), kUnknownSigner);
}

TEST(Authenticate, EveryByteIsCovered) {
  KeyPair k = default_scheme().generate();
  KeyStore ks = store_with("Alice A. <a@example.org>", k);
  std::string page = sign_page("<p>short page</p>\n", k.secret_key, "Alice A. <a@example.org>");
  ASSERT_EQ(authenticate(page, ks), "Alice A. <a@example.org>");
  for (std::size_t i = 0; i < page.size(); ++i) {
    for (int mask : {0x01, 0x20, 0x2a, 0x80}) {
      std::string t = page;
      t[i] = static_cast<char>(t[i] ^ mask);
      EXPECT_EQ(authenticate(t, ks), kUnknownSigner) << "offset " << i << " mask " << mask;
    }
  }
  EXPECT_EQ(authenticate(page + "x", ks), kUnknownSigner);
  EXPECT_EQ(authenticate(page + "\n", ks), kUnknownSigner);
  EXPECT_EQ(authenticate(page.substr(0, page.size() - 1), ks), "Alice A. <a@example.org>");
}

TEST(KeyStore, ParseSerialize) {
  KeyPair k = default_scheme().generate();
  KeyStore ks;
  ks.add("Ann Example <ann@example.org>", k.public_key);
  KeyStore back = KeyStore::parse("# comment\n" + ks.serialize());
  ASSERT_NE(back.find("Ann Example <ann@example.org>"), nullptr);
  EXPECT_EQ(*back.find("Ann Example <ann@example.org>"), k.public_key);
  EXPECT_THROW(ks.add("unknown", k.public_key), SignatureError);
  EXPECT_THROW(KeyStore::parse("unknown " + base64_encode(k.public_key)), SignatureError);
  EXPECT_THROW(KeyStore::parse("alice not-base64!"), SignatureError);
}

TEST(SignatureProperties, RoundTripAndTamper) {
  std::mt19937 rng(62);
  KeyPair k = default_scheme().generate();
  KeyStore ks = store_with("signer-1", k);
  for (int i = 0; i < 100; ++i) {
    std::string html = random_html(rng, 300);
    std::string page = sign_page(html, k.secret_key, "signer-1");
    EXPECT_EQ(authenticate(page, ks), "signer-1");
    if (html.empty()) continue;
    std::string tampered = page;
    std::size_t pos = rng() % html.size();
    tampered[pos] = static_cast<char>(tampered[pos] ^ (1 + rng() % 255));
    EXPECT_EQ(authenticate(tampered, ks), kUnknownSigner);
  }
}

TEST(SignatureProperties, NeverThrows) {
  std::mt19937 rng(63);
  KeyPair k = default_scheme().generate();
  KeyStore ks = store_with("s", k);
  std::string page = sign_page("<p>x</p>", k.secret_key, "s");
  for (int i = 0; i < 300; ++i) {
    std::string junk = page;
    std::size_t n = 1 + rng() % 5;
    for (std::size_t j = 0; j < n; ++j) junk[rng() % junk.size()] = static_cast<char>(rng());
    EXPECT_NO_THROW(authenticate(junk, ks));
    EXPECT_NO_THROW(authenticate(random_html(rng, 100), ks));
  }
}
