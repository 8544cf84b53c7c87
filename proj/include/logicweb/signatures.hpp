#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace logicweb {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::string_view kUnknownSigner = "unknown";
inline constexpr std::string_view kSignedExtension = ".lwpgp.html";

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string base64_encode(const Bytes& data);
// Throws SignatureError on malformed input.
Bytes base64_decode(std::string_view text);

// True iff the URL path (query and fragment ignored) ends with ".lwpgp.html".
bool is_signed(std::string_view url);

struct SignedPage {
  std::string html;  // everything before the trailer, byte-exact
  std::string signer;
  Bytes signature;
  std::string signed_text;  // html and trailer up to the signature: what was signed
};

// Trailer: `<!-- LW-SIG v1 <signer-id> <base64-signature> -->` and an optional
// final newline, nothing else. Single spaces only, so every byte is checked.
// Throws SignatureError when the trailer is missing or malformed.
SignedPage split_signed(std::string_view contents);
std::string attach_signature(std::string_view html, std::string_view signer, const Bytes& signature);

struct KeyPair {
  Bytes public_key;
  Bytes secret_key;
};

// Digest-then-sign. Replaceable so another scheme can be plugged in.
class SignatureScheme {
 public:
  virtual ~SignatureScheme() = default;
  virtual Bytes digest(std::string_view data) const = 0;
  virtual Bytes sign(const Bytes& digest, const Bytes& secret_key) const = 0;
  virtual bool verify(const Bytes& digest, const Bytes& signature, const Bytes& public_key) const = 0;
  virtual KeyPair generate() const = 0;
};

// SHA-256 digest, Ed25519 detached signature (libsodium).
class Ed25519Scheme : public SignatureScheme {
 public:
  Ed25519Scheme();
  Bytes digest(std::string_view data) const override;
  Bytes sign(const Bytes& digest, const Bytes& secret_key) const override;
  bool verify(const Bytes& digest, const Bytes& signature, const Bytes& public_key) const override;
  KeyPair generate() const override;
};

const SignatureScheme& default_scheme();

// Public keys by signer identity.
class KeyStore {
 public:
  // Throws SignatureError for the reserved `unknown` identity.
  void add(std::string signer, Bytes public_key);
  const Bytes* find(const std::string& signer) const;
  bool empty() const { return keys_.empty(); }
  std::size_t size() const { return keys_.size(); }
  const std::map<std::string, Bytes>& entries() const { return keys_; }

  // One line per key: `<signer-id> <base64-public-key>`; `#` comments allowed.
  static KeyStore parse(std::string_view text);
  static KeyStore load(const std::filesystem::path& file);
  std::string serialize() const;

 private:
  std::map<std::string, Bytes> keys_;
};

// Signer identity, or `unknown` on any failure. Never throws.
std::string authenticate(std::string_view contents, const KeyStore& keys,
                         const SignatureScheme& scheme = default_scheme());

std::string sign_page(std::string_view html, const Bytes& secret_key, std::string_view signer,
                      const SignatureScheme& scheme = default_scheme());

// Splits a key-file line into (identity, last token).
std::optional<std::pair<std::string, std::string>> split_identity_line(std::string_view line);

}  // namespace logicweb
