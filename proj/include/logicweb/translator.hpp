#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logicweb/program.hpp"

namespace logicweb {

struct HttpResponse {
  std::string requested_url;
  std::string final_url;  // after redirects
  int status = 200;
  std::vector<std::pair<std::string, std::string>> headers;
  std::optional<std::string> body;  // absent for HEAD
};

class TranslateError : public std::runtime_error {
 public:
  TranslateError(const std::string& message, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct LwCode {
  std::string clause_text;    // all blocks, document order
  std::string stripped_html;  // input minus the blocks
  std::vector<std::string> blocks;
};

// Throws TranslateError for unbalanced <LW_CODE> tags.
LwCode extract_lw_code(std::string_view html);

struct Link {
  std::string label;
  std::string url;
  friend bool operator==(const Link&, const Link&) = default;
};

// Anchors with an href, in document order. Labels have markup stripped and
// whitespace collapsed; hrefs are resolved against `base_url` when given.
std::vector<Link> extract_links(std::string_view html, std::string_view base_url = {});

struct Translation {
  std::shared_ptr<LWProgram> program;
  std::vector<std::string> warnings;  // dropped clause blocks
};

// about/2 per header plus actual_url/1, for lw(head, Url).
Translation translate_head(const HttpResponse& r);

// about/2, actual_url/1, my_id/2, h_text/1, link/2, then embedded clauses.
// `id` supplies the method and requested URL. Throws TranslateError.
Translation translate_page(const HttpResponse& r, const ProgramId& id);

}  // namespace logicweb
