#include "logicweb/fetcher.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "logicweb/signatures.hpp"
#include "logicweb/url.hpp"

namespace logicweb {

std::string_view to_string(FetchFailure f) {
  switch (f) {
    case FetchFailure::Network: return "network";
    case FetchFailure::Status: return "status";
    case FetchFailure::Translate: return "translate";
  }
  return "network";
}

namespace {

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::optional<std::string> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_redirect(int status) { return status == 301 || status == 302 || status == 303 || status == 307 || status == 308; }

}  // namespace

// ----------------------------------------------------------- FixtureTransport

FixtureTransport::FixtureTransport(std::filesystem::path root, int max_redirects)
    : root_(std::move(root)), max_redirects_(max_redirects) {}

std::filesystem::path FixtureTransport::path_for(const std::string& url) const {
  UrlParts p = split_url(url);
  std::string path = percent_decode(p.path);
  // Reject escapes from the fixture root.
  for (std::size_t pos = 0; (pos = path.find("..", pos)) != std::string::npos; pos += 2) {
    bool seg_start = pos == 0 || path[pos - 1] == '/';
    bool seg_end = pos + 2 == path.size() || path[pos + 2] == '/';
    if (seg_start && seg_end) throw TransportError(FetchFailure::Network, "path escapes fixture root: " + url);
  }
  std::string rel;
  if (p.scheme == "file") {
    rel = path;
  } else if (p.scheme == "http" || p.scheme == "https") {
    std::string host = url_host(url);
    if (host.empty()) throw TransportError(FetchFailure::Network, "no host in " + url);
    if (path.empty() || path.back() == '/') path += "index.html";
    rel = host + (path[0] == '/' ? "" : "/") + path;
  } else {
    throw TransportError(FetchFailure::Network, "unsupported scheme in " + url);
  }
  while (!rel.empty() && rel[0] == '/') rel.erase(0, 1);
  return root_ / rel;
}

HttpResponse FixtureTransport::fetch(const FetchRequest& request) {
  HttpResponse r;
  r.requested_url = request.url;
  std::string url = request.url;
  for (int hop = 0;; ++hop) {
    ++requests_;
    std::filesystem::path file = path_for(url);
    UrlParts parts = split_url(url);
    if (parts.scheme != "file") {
      std::filesystem::path host_dir = root_ / url_host(url);
      if (!std::filesystem::is_directory(host_dir)) throw TransportError(FetchFailure::Network, "unreachable host: " + url);
    }
    int status = 200;
    std::optional<std::string> location;
    std::vector<std::pair<std::string, std::string>> headers;
    if (auto meta = read_file(file.string() + ".meta")) {
      std::istringstream in(*meta);
      std::string line;
      while (std::getline(in, line)) {
        if (line.rfind("status ", 0) == 0) {
          status = std::stoi(line.substr(7));
        } else if (line.rfind("location ", 0) == 0) {
          location = line.substr(9);
        } else if (line.rfind("header ", 0) == 0) {
          auto colon = line.find(':', 7);
          if (colon == std::string::npos) continue;
          std::string value = line.substr(colon + 1);
          value.erase(0, value.find_first_not_of(' '));
          headers.emplace_back(line.substr(7, colon - 7), value);
        }
      }
    }
    if (is_redirect(status) && location) {
      if (hop >= max_redirects_) throw TransportError(FetchFailure::Network, "too many redirects: " + request.url);
      url = resolve_url(url, *location);
      continue;
    }
    if (status >= 400) throw TransportError(FetchFailure::Status, "status " + std::to_string(status) + ": " + url);
    auto body = read_file(file);
    if (!body || std::filesystem::is_directory(file)) {
      throw TransportError(FetchFailure::Status, "status 404: " + url);
    }
    if (headers.empty()) {
      headers.emplace_back("Content-Type", "text/html");
      headers.emplace_back("Content-Length", std::to_string(body->size()));
    }
    r.final_url = url;
    r.status = status;
    r.headers = std::move(headers);
    if (request.method != ProgramId::Method::Head) r.body = std::move(*body);
    return r;
  }
}

// ------------------------------------------------------------ MemoryTransport

HttpResponse MemoryTransport::fetch(const FetchRequest& request) {
  HttpResponse r;
  r.requested_url = request.url;
  std::string url = request.url;
  for (int hop = 0; hop <= 5; ++hop) {
    ++requests_;
    log_.push_back(url);
    auto it = pages_.find(url);
    if (it == pages_.end()) throw TransportError(FetchFailure::Network, "unreachable: " + url);
    const Page& page = it->second;
    if (page.redirect) {
      url = resolve_url(url, *page.redirect);
      continue;
    }
    if (page.status >= 400) throw TransportError(FetchFailure::Status, "status " + std::to_string(page.status));
    r.final_url = url;
    r.status = page.status;
    r.headers = page.headers;
    if (request.method != ProgramId::Method::Head) r.body = page.body;
    return r;
  }
  throw TransportError(FetchFailure::Network, "too many redirects: " + request.url);
}

// --------------------------------------------------------------- SchemeRouter

HttpResponse SchemeRouter::fetch(const FetchRequest& request) {
  bool file = split_url(request.url).scheme == "file";
  Transport* t = file ? file_.get() : network_.get();
  if (!t) throw TransportError(FetchFailure::Network, "no transport for " + request.url);
  return t->fetch(request);
}

// -------------------------------------------------------------------- Fetcher

Fetcher::Fetcher(std::shared_ptr<Transport> transport, PolicyRegistry& registry)
    : transport_(std::move(transport)), registry_(registry) {}

FetchOutcome Fetcher::download(ProgramStore& store, const ProgramId& id) {
  FetchOutcome out;
  if (auto p = store.find(id)) {
    out.program = p;
    out.cache_hit = true;
    return out;
  }
  HttpResponse response;
  try {
    response = transport_->fetch({id.method(), id.url(), id.fields()});
  } catch (const TransportError& e) {
    out.failure = e.kind();
    out.diagnostic = e.what();
    return out;
  } catch (const std::exception& e) {
    out.failure = FetchFailure::Network;
    out.diagnostic = e.what();
    return out;
  }
  const std::string contents = response.body.value_or("");
  Translation t;
  try {
    if (id.method() == ProgramId::Method::Head) {
      t = translate_head(response);
    } else {
      HttpResponse page = response;
      if (is_signed(id.url())) {
        // The trailer is not page text; an unsigned .lwpgp.html page is kept as is.
        try {
          page.body = split_signed(contents).html;
        } catch (const SignatureError&) {
        }
      }
      t = translate_page(page, id);
    }
  } catch (const std::exception& e) {
    out.failure = FetchFailure::Translate;
    out.diagnostic = e.what();
    return out;
  }
  store.install(t.program);
  registry_.assign_policy(id, contents);
  out.program = t.program;
  out.warnings = std::move(t.warnings);
  return out;
}

Fetcher::AddResult Fetcher::add_programs(ProgramStore& store, std::vector<ProgramId> ids, const Hook& before,
                                         const DoneHook& after) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  AddResult result;
  for (const auto& id : ids) {
    if (store.contains(id)) continue;
    if (before && !before(id)) return result;
    FetchOutcome o = download(store, id);
    if (o.ok()) {
      result.created.push_back(id);
    } else {
      result.failures.emplace_back(id, o);
    }
    if (after && !after(id, o)) return result;
  }
  result.all_present = std::all_of(ids.begin(), ids.end(), [&](const ProgramId& id) { return store.contains(id); });
  return result;
}

}  // namespace logicweb
