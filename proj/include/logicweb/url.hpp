#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace logicweb {

// Generic URI components (scheme ":" ["//" authority] path ["?" query] ["#" fragment]).
struct UrlParts {
  std::string scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
  std::optional<std::string> fragment;

  std::string str() const;
};

UrlParts split_url(std::string_view url);

// Reference resolution against an absolute base (RFC 3986 section 5.2).
// A base without a scheme leaves the reference unchanged.
std::string resolve_url(std::string_view base, std::string_view ref);

// Host part of the authority, lower-cased, without userinfo or port.
std::string url_host(std::string_view url);

}  // namespace logicweb
