#include "logicweb/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace logicweb {

std::string UrlParts::str() const {
  std::string out;
  if (!scheme.empty()) out += scheme + ":";
  if (authority) out += "//" + *authority;
  out += path;
  if (query) out += "?" + *query;
  if (fragment) out += "#" + *fragment;
  return out;
}

UrlParts split_url(std::string_view url) {
  UrlParts p;
  std::string_view rest = url;
  auto hash = rest.find('#');
  if (hash != std::string_view::npos) {
    p.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  auto qm = rest.find('?');
  if (qm != std::string_view::npos) {
    p.query = std::string(rest.substr(qm + 1));
    rest = rest.substr(0, qm);
  }
  auto colon = rest.find(':');
  auto slash = rest.find('/');
  if (colon != std::string_view::npos && colon > 0 && (slash == std::string_view::npos || colon < slash) &&
      std::isalpha(static_cast<unsigned char>(rest[0]))) {
    bool ok = std::all_of(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(colon), [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    });
    if (ok) {
      p.scheme = std::string(rest.substr(0, colon));
      std::transform(p.scheme.begin(), p.scheme.end(), p.scheme.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      rest = rest.substr(colon + 1);
    }
  }
  if (rest.substr(0, 2) == "//") {
    rest = rest.substr(2);
    auto end = rest.find('/');
    if (end == std::string_view::npos) end = rest.size();
    p.authority = std::string(rest.substr(0, end));
    rest = rest.substr(end);
  }
  p.path = std::string(rest);
  return p;
}

namespace {

std::string remove_dot_segments(std::string_view in) {
  std::vector<std::string> out;
  bool absolute = !in.empty() && in[0] == '/';
  std::size_t pos = absolute ? 1 : 0;
  bool trailing = false;
  while (pos <= in.size()) {
    auto next = in.find('/', pos);
    if (next == std::string_view::npos) next = in.size();
    std::string seg(in.substr(pos, next - pos));
    bool last = next == in.size();
    if (seg == ".") {
      trailing = last;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = last;
    } else {
      out.push_back(seg);
      trailing = false;
    }
    pos = next + 1;
  }
  std::string s = absolute ? "/" : "";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) s += '/';
    s += out[i];
  }
  if (trailing && (s.empty() || s.back() != '/')) s += '/';
  return s;
}

std::string merge_paths(const UrlParts& base, const std::string& ref_path) {
  if (base.authority && base.path.empty()) return "/" + ref_path;
  auto slash = base.path.rfind('/');
  if (slash == std::string::npos) return ref_path;
  return base.path.substr(0, slash + 1) + ref_path;
}

}  // namespace

std::string resolve_url(std::string_view base_text, std::string_view ref_text) {
  UrlParts ref = split_url(ref_text);
  UrlParts base = split_url(base_text);
  if (base.scheme.empty()) return std::string(ref_text);
  UrlParts t;
  if (!ref.scheme.empty()) {
    t = ref;
    t.path = remove_dot_segments(ref.path);
  } else {
    if (ref.authority) {
      t.authority = ref.authority;
      t.path = remove_dot_segments(ref.path);
      t.query = ref.query;
    } else {
      if (ref.path.empty()) {
        t.path = base.path;
        t.query = ref.query ? ref.query : base.query;
      } else {
        t.path = ref.path[0] == '/' ? remove_dot_segments(ref.path) : remove_dot_segments(merge_paths(base, ref.path));
        t.query = ref.query;
      }
      t.authority = base.authority;
    }
    t.scheme = base.scheme;
  }
  t.fragment = ref.fragment;
  return t.str();
}

std::string url_host(std::string_view url) {
  UrlParts p = split_url(url);
  if (!p.authority) return {};
  std::string host = *p.authority;
  auto at = host.rfind('@');
  if (at != std::string::npos) host = host.substr(at + 1);
  if (!host.empty() && host[0] == '[') {
    auto close = host.find(']');
    host = host.substr(0, close == std::string::npos ? host.size() : close + 1);
  } else {
    auto colon = host.find(':');
    if (colon != std::string::npos) host = host.substr(0, colon);
  }
  std::transform(host.begin(), host.end(), host.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return host;
}

}  // namespace logicweb
