#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "logicweb/fetcher.hpp"
#include "logicweb/url.hpp"

namespace logicweb {

HttpTransport::HttpTransport(std::chrono::milliseconds timeout, int max_redirects, std::string user_agent)
    : timeout_(timeout), max_redirects_(max_redirects), user_agent_(std::move(user_agent)) {}

HttpResponse HttpTransport::fetch(const FetchRequest& request) {
  HttpResponse r;
  r.requested_url = request.url;
  std::string url = request.url;
  for (int hop = 0;; ++hop) {
    UrlParts p = split_url(url);
    if ((p.scheme != "http" && p.scheme != "https") || !p.authority) {
      throw TransportError(FetchFailure::Network, "unsupported URL " + url);
    }
    httplib::Client client(p.scheme + "://" + *p.authority);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(false);
    httplib::Headers headers{{"User-Agent", user_agent_}};
    std::string target = p.path.empty() ? "/" : p.path;
    if (p.query) target += "?" + *p.query;

    httplib::Result res;
    switch (request.method) {
      case ProgramId::Method::Head:
        res = client.Head(target, headers);
        break;
      case ProgramId::Method::Get:
        res = client.Get(target, headers);
        break;
      case ProgramId::Method::Post: {
        httplib::Params params;
        for (const auto& f : request.fields) params.emplace(f.name, f.value);
        res = client.Post(target, headers, params);
        break;
      }
    }
    if (!res) throw TransportError(FetchFailure::Network, "request failed: " + httplib::to_string(res.error()));
    int status = res->status;
    if (status >= 300 && status < 400 && res->has_header("Location")) {
      if (hop >= max_redirects_) throw TransportError(FetchFailure::Network, "too many redirects: " + request.url);
      url = resolve_url(url, res->get_header_value("Location"));
      continue;
    }
    if (status >= 400) throw TransportError(FetchFailure::Status, "status " + std::to_string(status) + ": " + url);
    r.final_url = url;
    r.status = status;
    for (const auto& [k, v] : res->headers) r.headers.emplace_back(k, v);
    if (request.method != ProgramId::Method::Head) r.body = res->body;
    return r;
  }
}

}  // namespace logicweb
