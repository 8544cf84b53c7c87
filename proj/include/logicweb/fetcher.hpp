#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "logicweb/program.hpp"
#include "logicweb/security.hpp"
#include "logicweb/translator.hpp"

namespace logicweb {

enum class FetchFailure { Network, Status, Translate };
std::string_view to_string(FetchFailure f);

class TransportError : public std::runtime_error {
 public:
  TransportError(FetchFailure kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  FetchFailure kind() const { return kind_; }

 private:
  FetchFailure kind_;
};

struct FetchRequest {
  ProgramId::Method method = ProgramId::Method::Get;
  std::string url;
  std::vector<PostField> fields;
};

// Retrieves one response, following redirects. Throws TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse fetch(const FetchRequest& request) = 0;
};

// Offline transport. `file:` URLs map into the root directory; http(s)
// URLs map to <root>/<host><path>, a trailing slash meaning index.html.
// An optional `<file>.meta` sidecar holds `status N`, `location URL` and
// `header Name: Value` lines.
class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path root, int max_redirects = 5);
  HttpResponse fetch(const FetchRequest& request) override;
  std::filesystem::path path_for(const std::string& url) const;
  std::size_t requests() const { return requests_; }

 private:
  std::filesystem::path root_;
  int max_redirects_;
  std::size_t requests_ = 0;
};

// In-memory pages keyed by URL, for tests.
class MemoryTransport : public Transport {
 public:
  struct Page {
    std::string body;
    int status = 200;
    std::vector<std::pair<std::string, std::string>> headers;
    std::optional<std::string> redirect;
  };

  void put(const std::string& url, std::string body) {
    Page page;
    page.body = std::move(body);
    pages_[url] = std::move(page);
  }
  void put(const std::string& url, Page page) { pages_[url] = std::move(page); }
  void remove(const std::string& url) { pages_.erase(url); }
  HttpResponse fetch(const FetchRequest& request) override;
  std::size_t requests() const { return requests_; }
  const std::vector<std::string>& log() const { return log_; }

 private:
  std::map<std::string, Page> pages_;
  std::size_t requests_ = 0;
  std::vector<std::string> log_;
};

// Live HTTP(S) via cpp-httplib.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(std::chrono::milliseconds timeout = std::chrono::seconds(10), int max_redirects = 5,
                         std::string user_agent = "logicweb/1.0");
  HttpResponse fetch(const FetchRequest& request) override;

 private:
  std::chrono::milliseconds timeout_;
  int max_redirects_;
  std::string user_agent_;
};

// Routes file: and fixture-mirrored URLs to one transport and the rest to another.
class SchemeRouter : public Transport {
 public:
  SchemeRouter(std::shared_ptr<Transport> file, std::shared_ptr<Transport> network)
      : file_(std::move(file)), network_(std::move(network)) {}
  HttpResponse fetch(const FetchRequest& request) override;

 private:
  std::shared_ptr<Transport> file_;
  std::shared_ptr<Transport> network_;
};

struct FetchOutcome {
  std::shared_ptr<LWProgram> program;  // null means ⊥
  std::optional<FetchFailure> failure;
  std::string diagnostic;
  bool cache_hit = false;
  std::vector<std::string> warnings;

  bool ok() const { return program != nullptr; }
};

// The oracle function and store extension.
class Fetcher {
 public:
  Fetcher(std::shared_ptr<Transport> transport, PolicyRegistry& registry);

  // Cache hit returns the stored program without any request. Otherwise
  // fetch, translate, install and assign a policy; failures leave the store unchanged.
  FetchOutcome download(ProgramStore& store, const ProgramId& id);

  struct AddResult {
    bool all_present = false;
    std::vector<ProgramId> created;
    std::vector<std::pair<ProgramId, FetchOutcome>> failures;
  };
  // Called before each real fetch; returning false abandons the remaining ids.
  using Hook = std::function<bool(const ProgramId&)>;
  using DoneHook = std::function<bool(const ProgramId&, const FetchOutcome&)>;
  // ids are processed in sorted order.
  AddResult add_programs(ProgramStore& store, std::vector<ProgramId> ids, const Hook& before = {},
                         const DoneHook& after = {});

  Transport& transport() { return *transport_; }

 private:
  std::shared_ptr<Transport> transport_;
  PolicyRegistry& registry_;
};

}  // namespace logicweb
