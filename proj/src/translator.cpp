#include "logicweb/translator.hpp"

#include <algorithm>
#include <cctype>

#include "logicweb/syntax.hpp"
#include "logicweb/url.hpp"

namespace logicweb {

TranslateError::TranslateError(const std::string& message, std::size_t offset)
    : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

// Case-insensitive find of an ASCII needle.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from = 0) {
  if (needle.empty()) return from;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    std::size_t j = 0;
    while (j < needle.size() && lower(hay[i + j]) == lower(needle[j])) ++j;
    if (j == needle.size()) return i;
  }
  return std::string_view::npos;
}

// Finds a tag like <lw_code> or </lw_code>, allowing spaces before '>'.
// Returns (start, end-past-'>').
std::pair<std::size_t, std::size_t> find_tag(std::string_view html, std::string_view name, std::size_t from) {
  std::size_t pos = from;
  while ((pos = ifind(html, name, pos)) != std::string_view::npos) {
    std::size_t k = pos + name.size();
    while (k < html.size() && std::isspace(static_cast<unsigned char>(html[k]))) ++k;
    if (k < html.size() && html[k] == '>') return {pos, k + 1};
    pos += 1;
  }
  return {std::string_view::npos, std::string_view::npos};
}

std::string strip_wrappers(std::string_view block) {
  std::string out(block);
  for (std::string_view w : {"<pre>", "</pre>", "<!--", "-->"}) {
    std::size_t pos;
    while ((pos = ifind(out, w)) != std::string::npos) out.erase(pos, w.size());
  }
  return out;
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
    } else {
      if (space) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    std::string name = lowercase(s.substr(i + 1, semi - i - 1));
    std::string rep;
    if (name == "amp") rep = "&";
    else if (name == "lt") rep = "<";
    else if (name == "gt") rep = ">";
    else if (name == "quot") rep = "\"";
    else if (name == "apos") rep = "'";
    else if (name == "nbsp") rep = " ";
    else if (name.size() > 1 && name[0] == '#') {
      bool hex = name[1] == 'x';
      std::string digits = name.substr(hex ? 2 : 1);
      if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [&](char c) {
            return hex ? std::isxdigit(static_cast<unsigned char>(c)) : std::isdigit(static_cast<unsigned char>(c));
          })) {
        append_utf8(rep, std::stoul(digits, nullptr, hex ? 16 : 10));
      }
    }
    if (rep.empty()) {
      out.push_back('&');
      continue;
    }
    out += rep;
    i = semi;
  }
  return out;
}

std::string strip_tags(std::string_view s) {
  std::string out;
  bool in_tag = false;
  for (char c : s) {
    if (c == '<') {
      in_tag = true;
    } else if (c == '>' && in_tag) {
      in_tag = false;
      out.push_back(' ');
    } else if (!in_tag) {
      out.push_back(c);
    }
  }
  return out;
}

// Value of the href attribute inside an opening <a ...> tag body.
std::optional<std::string> href_of(std::string_view attrs) {
  std::size_t pos = 0;
  while ((pos = ifind(attrs, "href", pos)) != std::string_view::npos) {
    bool boundary = pos == 0 || std::isspace(static_cast<unsigned char>(attrs[pos - 1]));
    std::size_t k = pos + 4;
    while (k < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[k]))) ++k;
    if (!boundary || k >= attrs.size() || attrs[k] != '=') {
      pos += 4;
      continue;
    }
    ++k;
    while (k < attrs.size() && std::isspace(static_cast<unsigned char>(attrs[k]))) ++k;
    if (k >= attrs.size()) return std::nullopt;
    if (attrs[k] == '"' || attrs[k] == '\'') {
      auto close = attrs.find(attrs[k], k + 1);
      if (close == std::string_view::npos) return std::nullopt;
      return std::string(attrs.substr(k + 1, close - k - 1));
    }
    std::size_t end = k;
    while (end < attrs.size() && !std::isspace(static_cast<unsigned char>(attrs[end]))) ++end;
    return std::string(attrs.substr(k, end - k));
  }
  return std::nullopt;
}

Term fact(std::string_view name, std::vector<Term> args) { return Term::compound(name, std::move(args)); }

}  // namespace

LwCode extract_lw_code(std::string_view html) {
  LwCode out;
  std::size_t pos = 0;
  while (true) {
    auto [open, open_end] = find_tag(html, "<lw_code", pos);
    auto [close, close_end] = find_tag(html, "</lw_code", pos);
    if (open == std::string_view::npos) {
      if (close != std::string_view::npos) throw TranslateError("unmatched </LW_CODE>", close);
      out.stripped_html.append(html.substr(pos));
      break;
    }
    if (close != std::string_view::npos && close < open) throw TranslateError("unmatched </LW_CODE>", close);
    if (close == std::string_view::npos) throw TranslateError("unterminated <LW_CODE>", open);
    auto nested = find_tag(html, "<lw_code", open_end).first;
    if (nested != std::string_view::npos && nested < close) throw TranslateError("nested <LW_CODE>", nested);
    out.stripped_html.append(html.substr(pos, open - pos));
    std::string block = strip_wrappers(html.substr(open_end, close - open_end));
    if (!out.clause_text.empty() && out.clause_text.back() != '\n') out.clause_text.push_back('\n');
    out.clause_text += block;
    out.blocks.push_back(std::move(block));
    pos = close_end;
  }
  return out;
}

std::vector<Link> extract_links(std::string_view html, std::string_view base_url) {
  std::vector<Link> links;
  std::size_t pos = 0;
  while ((pos = ifind(html, "<a", pos)) != std::string_view::npos) {
    std::size_t after = pos + 2;
    if (after >= html.size() || !std::isspace(static_cast<unsigned char>(html[after]))) {
      pos = after;
      continue;
    }
    auto tag_end = html.find('>', after);
    if (tag_end == std::string_view::npos) break;
    auto href = href_of(html.substr(after, tag_end - after));
    auto close = ifind(html, "</a", tag_end + 1);
    if (!href || close == std::string_view::npos) {
      pos = tag_end + 1;
      continue;
    }
    std::string label = collapse_ws(decode_entities(strip_tags(html.substr(tag_end + 1, close - tag_end - 1))));
    std::string url = decode_entities(*href);
    if (!base_url.empty()) url = resolve_url(base_url, url);
    links.push_back({std::move(label), std::move(url)});
    pos = close + 3;
  }
  return links;
}

namespace {

void add_about(LWProgram::ClauseList& clauses, const HttpResponse& r) {
  for (const auto& [name, value] : r.headers) {
    clauses.push_back({fact("about", {Term::string(lowercase(name)), Term::string(value)}), Term::atom("true")});
  }
  const std::string& final_url = r.final_url.empty() ? r.requested_url : r.final_url;
  clauses.push_back({fact("actual_url", {Term::string(final_url)}), Term::atom("true")});
}

}  // namespace

Translation translate_head(const HttpResponse& r) {
  LWProgram::ClauseList clauses;
  add_about(clauses, r);
  Translation t;
  t.program = std::make_shared<LWProgram>(ProgramId::head(r.requested_url), std::move(clauses));
  return t;
}

Translation translate_page(const HttpResponse& r, const ProgramId& id) {
  Translation t;
  const std::string body = r.body.value_or("");
  LwCode code = extract_lw_code(body);
  const std::string& base = r.final_url.empty() ? r.requested_url : r.final_url;

  LWProgram::ClauseList clauses;
  add_about(clauses, r);
  clauses.push_back({fact("my_id", {id.method_term(), Term::string(id.url())}), Term::atom("true")});
  clauses.push_back({fact("h_text", {Term::string(code.stripped_html)}), Term::atom("true")});
  for (const auto& link : extract_links(code.stripped_html, base)) {
    clauses.push_back({fact("link", {Term::string(link.label), Term::string(link.url)}), Term::atom("true")});
  }
  for (std::size_t i = 0; i < code.blocks.size(); ++i) {
    try {
      auto parsed = parse_program(code.blocks[i]);
      clauses.insert(clauses.end(), parsed.begin(), parsed.end());
    } catch (const ParseError& e) {
      t.warnings.push_back("LW_CODE block " + std::to_string(i + 1) + " dropped: " + e.what());
    }
  }
  t.program = std::make_shared<LWProgram>(id, std::move(clauses));
  return t;
}

}  // namespace logicweb
