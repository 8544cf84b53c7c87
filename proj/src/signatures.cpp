#include "logicweb/signatures.hpp"

#include <sodium.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "logicweb/url.hpp"

namespace logicweb {

namespace {

constexpr std::string_view kTrailerOpen = "<!-- LW-SIG v1 ";

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw SignatureError("libsodium initialisation failed");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string base64_encode(const Bytes& data) {
  ensure_sodium();
  std::string out(sodium_base64_ENCODED_LEN(data.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), sodium_base64_VARIANT_ORIGINAL);
  out.resize(std::strlen(out.c_str()));
  return out;
}

Bytes base64_decode(std::string_view text) {
  ensure_sodium();
  // The decoder folds some bytes outside the alphabet onto valid digits.
  for (char ch : text) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '+' && ch != '/' && ch != '=') {
      throw SignatureError("malformed base64");
    }
  }
  Bytes out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw SignatureError("malformed base64");
  }
  out.resize(len);
  return out;
}

bool is_signed(std::string_view url) {
  std::string path = split_url(url).path;
  return path.size() >= kSignedExtension.size() &&
         std::string_view(path).substr(path.size() - kSignedExtension.size()) == kSignedExtension;
}

namespace {

std::string signed_text(std::string_view html, std::string_view signer) {
  std::string out(html);
  out += kTrailerOpen;
  out += signer;
  out += ' ';
  return out;
}

}  // namespace

SignedPage split_signed(std::string_view contents) {
  std::string_view body = contents;
  if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
  constexpr std::string_view kEnd = " -->";
  if (body.size() < kEnd.size() || body.substr(body.size() - kEnd.size()) != kEnd) {
    throw SignatureError("no signature trailer");
  }
  auto start = body.rfind(kTrailerOpen);
  if (start == std::string_view::npos) throw SignatureError("no signature trailer");
  std::string_view inner = body.substr(start + kTrailerOpen.size());
  inner.remove_suffix(kEnd.size());
  auto sp = inner.rfind(' ');
  if (sp == std::string_view::npos || sp == 0) throw SignatureError("malformed signature trailer");
  std::string_view signer = inner.substr(0, sp);
  std::string_view sig = inner.substr(sp + 1);
  if (std::isspace(static_cast<unsigned char>(signer.front())) || std::isspace(static_cast<unsigned char>(signer.back())) ||
      sig.empty()) {
    throw SignatureError("malformed signature trailer");
  }
  SignedPage page;
  page.html = std::string(contents.substr(0, start));
  page.signer = std::string(signer);
  page.signature = base64_decode(sig);
  page.signed_text = signed_text(page.html, page.signer);
  return page;
}

std::string attach_signature(std::string_view html, std::string_view signer, const Bytes& signature) {
  std::string out = signed_text(html, signer);
  out += base64_encode(signature);
  out += " -->\n";
  return out;
}

// -------------------------------------------------------------- Ed25519Scheme

Ed25519Scheme::Ed25519Scheme() { ensure_sodium(); }

Bytes Ed25519Scheme::digest(std::string_view data) const {
  Bytes out(crypto_hash_sha256_BYTES);
  crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(data.data()), data.size());
  return out;
}

Bytes Ed25519Scheme::sign(const Bytes& digest, const Bytes& secret_key) const {
  if (secret_key.size() != crypto_sign_SECRETKEYBYTES) throw SignatureError("bad secret key length");
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, digest.data(), digest.size(), secret_key.data());
  return sig;
}

bool Ed25519Scheme::verify(const Bytes& digest, const Bytes& signature, const Bytes& public_key) const {
  if (signature.size() != crypto_sign_BYTES || public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
  return crypto_sign_verify_detached(signature.data(), digest.data(), digest.size(), public_key.data()) == 0;
}

KeyPair Ed25519Scheme::generate() const {
  KeyPair kp{Bytes(crypto_sign_PUBLICKEYBYTES), Bytes(crypto_sign_SECRETKEYBYTES)};
  crypto_sign_keypair(kp.public_key.data(), kp.secret_key.data());
  return kp;
}

const SignatureScheme& default_scheme() {
  static const Ed25519Scheme scheme;
  return scheme;
}

// ------------------------------------------------------------------- KeyStore

std::optional<std::pair<std::string, std::string>> split_identity_line(std::string_view line) {
  line = trim(line);
  auto sp = line.find_last_of(" \t");
  if (sp == std::string_view::npos) return std::nullopt;
  std::string_view id = trim(line.substr(0, sp));
  std::string_view last = line.substr(sp + 1);
  if (id.empty() || last.empty()) return std::nullopt;
  return std::make_pair(std::string(id), std::string(last));
}

void KeyStore::add(std::string signer, Bytes public_key) {
  if (signer == kUnknownSigner) throw SignatureError("`unknown` cannot own a key");
  keys_[std::move(signer)] = std::move(public_key);
}

const Bytes* KeyStore::find(const std::string& signer) const {
  auto it = keys_.find(signer);
  return it == keys_.end() ? nullptr : &it->second;
}

KeyStore KeyStore::parse(std::string_view text) {
  KeyStore ks;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view l = trim(line);
    if (l.empty() || l[0] == '#') continue;
    auto split = split_identity_line(l);
    if (!split) throw SignatureError("key store line " + std::to_string(n) + ": expected `<signer> <key>`");
    ks.add(split->first, base64_decode(split->second));
  }
  return ks;
}

KeyStore KeyStore::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw SignatureError("cannot read key store " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string KeyStore::serialize() const {
  std::string out;
  for (const auto& [signer, key] : keys_) out += signer + " " + base64_encode(key) + "\n";
  return out;
}

// ------------------------------------------------------------- authenticate

std::string authenticate(std::string_view contents, const KeyStore& keys, const SignatureScheme& scheme) {
  try {
    SignedPage page = split_signed(contents);
    Bytes digest = scheme.digest(page.signed_text);
    if (const Bytes* claimed = keys.find(page.signer)) {
      if (scheme.verify(digest, page.signature, *claimed)) return page.signer;
    }
    for (const auto& [signer, key] : keys.entries()) {
      if (signer != page.signer && scheme.verify(digest, page.signature, key)) return signer;
    }
  } catch (...) {
  }
  return std::string(kUnknownSigner);
}

std::string sign_page(std::string_view html, const Bytes& secret_key, std::string_view signer,
                      const SignatureScheme& scheme) {
  return attach_signature(html, signer, scheme.sign(scheme.digest(signed_text(html, signer)), secret_key));
}

}  // namespace logicweb
