#pragma once

// Brute-force reference checkers for the 21 format constraint types. Written
// against the rule definitions only: regex scans, line splitting and a
// separate JSON parser. Nothing here calls into dvr::text or dvr::verify.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <rapidjson/document.h>

#include "dvr/constraint.hpp"

namespace oracle {

struct Result {
  bool satisfied = false;
  std::optional<std::int64_t> count;
};

inline bool ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && ws(s[a])) ++a;
  while (b > a && ws(s[b - 1])) --b;
  return s.substr(a, b - a);
}

inline std::string rstrip(const std::string& s) {
  std::size_t b = s.size();
  while (b > 0 && ws(s[b - 1])) --b;
  return s.substr(0, b);
}

inline std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream in(s);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  if (s.empty() || s.back() == '\n') out.emplace_back();
  return out;
}

inline std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (ws(c)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Non-ASCII sequences the fuzzer emits that are punctuation or spacing.
inline bool starts_with_punct_sequence(const std::string& s, std::size_t i) {
  static const char* const kPunct[] = {"\xE2\x80\x94", "\xE2\x80\x9C", "\xE2\x80\x9D", "\xC2\xA0",
                                       "\xE3\x80\x82", "\xC3\x97",     "\xE2\x80\xA6"};
  for (const char* p : kPunct) {
    if (s.compare(i, std::char_traits<char>::length(p), p) == 0) return true;
  }
  return false;
}

inline std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  return 4;
}

inline bool token_is_word(const std::string& t) {
  for (std::size_t i = 0; i < t.size();) {
    const auto c = static_cast<unsigned char>(t[i]);
    if (c < 0x80) {
      if (std::isalnum(c)) return true;
      ++i;
      continue;
    }
    if (!starts_with_punct_sequence(t, i)) return true;
    i += utf8_length(c);
  }
  return false;
}

inline std::int64_t words(const std::string& s) {
  const auto toks = whitespace_tokens(s);
  return std::count_if(toks.begin(), toks.end(), token_is_word);
}

inline std::int64_t sentences(const std::string& s) {
  static const std::regex terminator(R"([.!?]+(?=\s|$))");
  std::int64_t n = 0;
  std::size_t from = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), terminator); it != std::sregex_iterator(); ++it) {
    const std::size_t end = static_cast<std::size_t>(it->position() + it->length());
    if (!strip(s.substr(from, end - from)).empty()) ++n;
    from = end;
  }
  if (!strip(s.substr(from)).empty()) ++n;
  return n;
}

inline std::int64_t paragraphs(const std::string& s) {
  std::int64_t n = 0;
  std::string part;
  for (const auto& line : split_lines(s)) {
    if (strip(line) == "***") {
      if (!strip(part).empty()) ++n;
      part.clear();
    } else {
      part += line + "\n";
    }
  }
  if (!strip(part).empty()) ++n;
  return n;
}

inline std::int64_t bullets(const std::string& s) {
  static const std::regex bullet(R"(^[ \t]*\* )");
  std::int64_t n = 0;
  for (const auto& line : split_lines(s)) n += std::regex_search(line, bullet) ? 1 : 0;
  return n;
}

inline std::int64_t placeholders(const std::string& s) {
  static const std::regex bracket(R"(\[[^\[\]]+\])");
  return std::distance(std::sregex_iterator(s.begin(), s.end(), bracket), std::sregex_iterator());
}

inline std::int64_t highlights(const std::string& s) {
  static const std::regex run(R"(\*\*+)");
  static const std::regex marker(R"(^([ \t]*)\* )");
  static const std::regex pair(R"(\*([^*]*)\*)");
  std::int64_t n = 0;
  for (auto line : split_lines(s)) {
    line = std::regex_replace(line, run, "#");
    line = std::regex_replace(line, marker, "$1- ", std::regex_constants::format_first_only);
    for (auto it = std::sregex_iterator(line.begin(), line.end(), pair); it != std::sregex_iterator(); ++it) {
      if (!strip((*it)[1].str()).empty()) ++n;
    }
  }
  return n;
}

inline bool has_title(const std::string& s) {
  static const std::regex title(R"(<<[\s\S]+?>>)");
  return std::regex_search(s, title);
}

inline std::int64_t letters(const std::string& s, char letter) {
  const char want = static_cast<char>(std::tolower(static_cast<unsigned char>(letter)));
  return std::count_if(s.begin(), s.end(),
                       [want](char c) { return std::tolower(static_cast<unsigned char>(c)) == want; });
}

inline std::string escape_regex(const std::string& s) {
  static const std::regex special(R"([.^$|()\[\]{}*+?\\\-])");
  return std::regex_replace(s, special, R"(\$&)");
}

inline bool boundary(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !std::isalnum(u);
}

inline std::int64_t keyword(const std::string& s, const std::string& kw) {
  std::string pattern;
  for (const auto& tok : whitespace_tokens(kw)) pattern += (pattern.empty() ? "" : R"(\s+)") + escape_regex(tok);
  const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
  std::int64_t n = 0;
  std::size_t p = 0;
  while (p < s.size()) {
    std::smatch m;
    if ((p == 0 || boundary(s[p - 1])) &&
        std::regex_search(s.cbegin() + static_cast<std::ptrdiff_t>(p), s.cend(), m, re,
                          std::regex_constants::match_continuous)) {
      const std::size_t end = p + static_cast<std::size_t>(m.length(0));
      if (end == s.size() || boundary(s[end])) {
        ++n;
        p = end;
        continue;
      }
    }
    ++p;
  }
  return n;
}

inline std::int64_t capital_words(const std::string& s) {
  std::int64_t n = 0;
  for (auto tok : whitespace_tokens(s)) {
    while (!tok.empty() && boundary(tok.front())) tok.erase(tok.begin());
    while (!tok.empty() && boundary(tok.back())) tok.pop_back();
    const auto alpha = std::count_if(tok.begin(), tok.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; });
    const bool any_lower = std::any_of(tok.begin(), tok.end(), [](char c) { return c >= 'a' && c <= 'z'; });
    if (alpha >= 2 && !any_lower) ++n;
  }
  return n;
}

inline bool valid_json(const std::string& s) {
  rapidjson::Document doc;
  doc.Parse(strip(s).c_str());
  return !strip(s).empty() && !doc.HasParseError();
}

inline bool has_postscript(const std::string& s) {
  static const std::regex ps(R"((^|\s)P\.(P\.)?S\.)");
  for (const auto& line : split_lines(s)) {
    if (std::regex_search(line, ps)) return true;
  }
  return false;
}

inline std::vector<std::string> options(const std::string& joined) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(joined);
  while (std::getline(in, cur, '|')) out.push_back(strip(cur));
  return out;
}

inline bool cmp(dvr::ComparisonMode mode, std::int64_t observed, std::int64_t required) {
  if (mode == dvr::ComparisonMode::at_least) return observed >= required;
  if (mode == dvr::ComparisonMode::less_than) return observed < required;
  return observed == required;
}

inline Result counted(const dvr::ConstraintSpec& spec, std::int64_t n) {
  return {cmp(spec.comparison, n, *spec.int_param), n};
}

// Verdict for one well-formed format spec. language_restriction is judged
// by the fuzzer, which knows the language it wrote; it is not handled here.
inline Result check(const dvr::ConstraintSpec& spec, const std::string& r) {
  using T = dvr::ConstraintType;
  const std::string text = spec.text_param.value_or("");
  switch (spec.type) {
    case T::word_count: return counted(spec, words(r));
    case T::sentence_count: return counted(spec, sentences(r));
    case T::separator_paragraphs: return counted(spec, paragraphs(r));
    case T::bullet_points: return counted(spec, bullets(r));
    case T::placeholder: return counted(spec, placeholders(r));
    case T::highlighted: return counted(spec, highlights(r));
    case T::capital_word_frequency: return counted(spec, capital_words(r));
    case T::letter_frequency: return counted(spec, letters(r, text.at(0)));
    case T::keyword_frequency: return counted(spec, keyword(r, text));
    case T::include_keyword: {
      const auto n = keyword(r, text);
      return {n >= 1, n};
    }
    case T::exclude_keyword: {
      const auto n = keyword(r, text);
      return {n == 0, n};
    }
    case T::no_commas: {
      const auto n = static_cast<std::int64_t>(std::count(r.begin(), r.end(), ','));
      return {n == 0, n};
    }
    case T::all_capital: {
      const auto n = static_cast<std::int64_t>(std::count_if(r.begin(), r.end(), [](char c) { return c >= 'a' && c <= 'z'; }));
      return {n == 0, n};
    }
    case T::all_lowercase: {
      const auto n = static_cast<std::int64_t>(std::count_if(r.begin(), r.end(), [](char c) { return c >= 'A' && c <= 'Z'; }));
      return {n == 0, n};
    }
    case T::title_format: return {has_title(r), std::nullopt};
    case T::json_format: return {valid_json(r), std::nullopt};
    case T::quoted_response: {
      const auto t = strip(r);
      return {t.size() >= 2 && t.front() == '"' && t.back() == '"', std::nullopt};
    }
    case T::end_phrase: {
      const auto t = rstrip(r);
      const auto p = rstrip(text);
      return {t.size() >= p.size() && t.compare(t.size() - p.size(), p.size(), p) == 0, std::nullopt};
    }
    case T::postscript: return {has_postscript(r), std::nullopt};
    case T::fixed_responses: {
      const auto opts = options(text);
      return {std::find(opts.begin(), opts.end(), strip(r)) != opts.end(), std::nullopt};
    }
    default: break;
  }
  return {};
}

}  // namespace oracle
