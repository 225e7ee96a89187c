#pragma once

// Deterministic text primitives shared by the verifiers. Offsets are byte
// offsets into the UTF-8 input; case folding is ASCII-only.

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dvr::text {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string text;

  friend bool operator==(const Span&, const Span&) = default;
};

inline Span make_span(std::string_view source, std::size_t start, std::size_t end) {
  return Span{start, end, std::string(source.substr(start, end - start))};
}

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
inline bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

// Decodes one code point at i; malformed bytes decode as themselves.
inline char32_t decode(std::string_view s, std::size_t i, std::size_t* len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    const auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0) {
    const int c1 = cont(1);
    if (c1 >= 0) {
      *len = 2;
      return static_cast<char32_t>(((b0 & 0x1F) << 6) | c1);
    }
  } else if ((b0 & 0xF0) == 0xE0) {
    const int c1 = cont(1);
    const int c2 = c1 >= 0 ? cont(2) : -1;
    if (c2 >= 0) {
      *len = 3;
      return static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2);
    }
  } else if ((b0 & 0xF8) == 0xF0) {
    const int c1 = cont(1);
    const int c2 = c1 >= 0 ? cont(2) : -1;
    const int c3 = c2 >= 0 ? cont(3) : -1;
    if (c3 >= 0) {
      *len = 4;
      return static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3);
    }
  }
  *len = 1;
  return b0;
}

// Non-ASCII code points count as word characters unless they fall in the
// common punctuation/space blocks.
inline bool is_word_codepoint(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp >= 0x80 && cp <= 0xBF) return false;             // Latin-1 punctuation, NBSP
  if (cp == 0xD7 || cp == 0xF7) return false;             // × ÷
  if (cp >= 0x2000 && cp <= 0x206F) return false;         // general punctuation
  if (cp >= 0x3000 && cp <= 0x303F) return false;         // CJK punctuation
  if (cp >= 0xFF00 && cp <= 0xFF0F) return false;         // fullwidth punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
  return true;
}

inline bool has_word_char(std::string_view token) {
  std::size_t i = 0;
  while (i < token.size()) {
    std::size_t len = 1;
    const char32_t cp = decode(token, i, &len);
    if (is_word_codepoint(cp)) return true;
    i += len;
  }
  return false;
}

// Byte ranges [start, end) of whitespace-delimited tokens.
inline std::vector<std::pair<std::size_t, std::size_t>> tokens(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) break;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    out.emplace_back(start, i);
  }
  return out;
}

// Line ranges [start, end) excluding the '\n' (and a trailing '\r').
inline std::vector<std::pair<std::size_t, std::size_t>> lines(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = s.find('\n', start);
    std::size_t end = nl == std::string_view::npos ? s.size() : nl;
    if (end > start && s[end - 1] == '\r') --end;
    out.emplace_back(start, end);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

// Bytes >= 0x80 are treated as word characters for keyword boundaries.
inline bool is_boundary_char(char c) { return !is_ascii_alnum(c) && static_cast<unsigned char>(c) < 0x80; }

}  // namespace detail

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && detail::is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && detail::is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view rtrim(std::string_view s) {
  while (!s.empty() && detail::is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Number of whitespace-delimited tokens containing at least one alphanumeric.
inline std::size_t count_words(std::string_view text) {
  std::size_t n = 0;
  for (const auto& [a, b] : detail::tokens(text)) {
    if (detail::has_word_char(text.substr(a, b - a))) ++n;
  }
  return n;
}

// Sentences end at a run of '.', '!' or '?' followed by whitespace or the end
// of the text. A trailing fragment without a terminator is one sentence.
inline std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> out;
  const auto is_term = [](char c) { return c == '.' || c == '!' || c == '?'; };
  std::size_t start = 0;
  std::size_t i = 0;
  const auto emit = [&](std::size_t from, std::size_t to) {
    while (from < to && detail::is_space(text[from])) ++from;
    while (to > from && detail::is_space(text[to - 1])) --to;
    if (to > from) out.push_back(make_span(text, from, to));
  };
  while (i < text.size()) {
    if (is_term(text[i])) {
      std::size_t j = i;
      while (j < text.size() && is_term(text[j])) ++j;
      if (j == text.size() || detail::is_space(text[j])) {
        emit(start, j);
        start = j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  emit(start, text.size());
  return out;
}

// Parts separated by lines whose trimmed content is exactly "***".
inline std::vector<Span> split_paragraphs(std::string_view text) {
  std::vector<Span> out;
  std::size_t part_start = 0;
  const auto emit = [&](std::size_t from, std::size_t to) {
    while (from < to && detail::is_space(text[from])) ++from;
    while (to > from && detail::is_space(text[to - 1])) --to;
    if (to > from) out.push_back(make_span(text, from, to));
  };
  for (const auto& [a, b] : detail::lines(text)) {
    if (trim(text.substr(a, b - a)) == "***") {
      emit(part_start, a);
      part_start = b;
    }
  }
  emit(part_start, text.size());
  return out;
}

// One span per line that, after left-trimming, starts with "* ".
inline std::vector<Span> parse_bullets(std::string_view text) {
  std::vector<Span> out;
  for (const auto& [a, b] : detail::lines(text)) {
    std::size_t i = a;
    while (i < b && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i + 1 < b && text[i] == '*' && text[i + 1] == ' ') out.push_back(make_span(text, i, b));
  }
  return out;
}

// Non-overlapping [..] pairs with a nonempty, bracket-free interior.
inline std::vector<Span> find_placeholders(std::string_view text) {
  std::vector<Span> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '[') {
      ++i;
      continue;
    }
    const std::size_t j = text.find_first_of("[]", i + 1);
    if (j == std::string_view::npos) break;
    if (text[j] == '[') {
      i = j;
      continue;
    }
    if (j > i + 1) out.push_back(make_span(text, i, j + 1));
    i = j + 1;
  }
  return out;
}

namespace detail {

// A '*' that can open or close a highlight: not part of a "**" run and not
// the marker of a bullet line.
inline std::vector<std::size_t> highlight_stars(std::string_view text, std::size_t a, std::size_t b) {
  std::vector<std::size_t> stars;
  std::size_t first = a;
  while (first < b && (text[first] == ' ' || text[first] == '\t')) ++first;
  for (std::size_t i = a; i < b; ++i) {
    if (text[i] != '*') continue;
    const bool prev_star = i > a && text[i - 1] == '*';
    const bool next_star = i + 1 < b && text[i + 1] == '*';
    if (prev_star || next_star) continue;
    if (i == first && i + 1 < b && text[i + 1] == ' ') continue;
    stars.push_back(i);
  }
  return stars;
}

}  // namespace detail

// Single-line *...* pairs. Eligible stars pair up left to right; a pair
// counts when its interior has a non-whitespace character.
inline std::vector<Span> find_highlights(std::string_view text) {
  std::vector<Span> out;
  for (const auto& [a, b] : detail::lines(text)) {
    const auto stars = detail::highlight_stars(text, a, b);
    for (std::size_t k = 0; k + 1 < stars.size(); k += 2) {
      const std::size_t open = stars[k];
      const std::size_t close = stars[k + 1];
      if (!trim(text.substr(open + 1, close - open - 1)).empty()) {
        out.push_back(make_span(text, open, close + 1));
      }
    }
  }
  return out;
}

// First <<...>> with a nonempty interior.
inline std::optional<Span> find_title(std::string_view text) {
  const std::size_t open = text.find("<<");
  if (open == std::string_view::npos || open + 2 >= text.size()) return std::nullopt;
  const std::size_t close = text.find(">>", open + 3);
  if (close == std::string_view::npos) return std::nullopt;
  return make_span(text, open, close + 2);
}

inline std::size_t count_letter(std::string_view text, char letter, bool case_sensitive = false) {
  std::size_t n = 0;
  const char want = case_sensitive ? letter : detail::lower(letter);
  for (char c : text) {
    if ((case_sensitive ? c : detail::lower(c)) == want) ++n;
  }
  return n;
}

// Whole-word, case-insensitive occurrences. A multiword keyword matches its
// tokens separated by any whitespace run. Matches do not overlap.
inline std::vector<Span> find_keyword(std::string_view text, std::string_view keyword) {
  std::vector<Span> out;
  std::vector<std::string> parts;
  for (const auto& [a, b] : detail::tokens(keyword)) {
    std::string p(keyword.substr(a, b - a));
    for (auto& c : p) c = detail::lower(c);
    parts.push_back(std::move(p));
  }
  if (parts.empty()) return out;

  const auto match_at = [&](std::size_t pos) -> std::optional<std::size_t> {
    std::size_t i = pos;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0) {
        if (i >= text.size() || !detail::is_space(text[i])) return std::nullopt;
        while (i < text.size() && detail::is_space(text[i])) ++i;
      }
      const std::string& p = parts[k];
      if (i + p.size() > text.size()) return std::nullopt;
      for (std::size_t m = 0; m < p.size(); ++m) {
        if (detail::lower(text[i + m]) != p[m]) return std::nullopt;
      }
      i += p.size();
    }
    return i;
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const bool left_ok = pos == 0 || detail::is_boundary_char(text[pos - 1]);
    if (left_ok) {
      if (auto end = match_at(pos); end && (*end == text.size() || detail::is_boundary_char(text[*end]))) {
        out.push_back(make_span(text, pos, *end));
        pos = *end;
        continue;
      }
    }
    ++pos;
  }
  return out;
}

inline std::size_t count_keyword(std::string_view text, std::string_view keyword) {
  return find_keyword(text, keyword).size();
}

// Whitespace tokens that, with surrounding punctuation stripped, have at
// least two ASCII letters and no lowercase ones.
inline std::vector<Span> find_capital_words(std::string_view text) {
  std::vector<Span> out;
  for (auto [a, b] : detail::tokens(text)) {
    while (a < b && !detail::is_ascii_alnum(text[a]) && static_cast<unsigned char>(text[a]) < 0x80) ++a;
    while (b > a && !detail::is_ascii_alnum(text[b - 1]) && static_cast<unsigned char>(text[b - 1]) < 0x80) --b;
    std::size_t letters = 0;
    bool lower_seen = false;
    for (std::size_t i = a; i < b; ++i) {
      const auto c = static_cast<unsigned char>(text[i]);
      if (std::isalpha(c)) {
        ++letters;
        if (std::islower(c)) lower_seen = true;
      }
    }
    if (letters >= 2 && !lower_seen) out.push_back(make_span(text, a, b));
  }
  return out;
}

inline std::size_t count_capital_words(std::string_view text) { return find_capital_words(text).size(); }

// One single-byte span per ','.
inline std::vector<Span> find_commas(std::string_view text) {
  std::vector<Span> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ',') out.push_back(make_span(text, i, i + 1));
  }
  return out;
}

// The span widened by up to `radius` code points on each side.
inline Span context_window(std::string_view text, const Span& span, std::size_t radius = 15) {
  std::size_t start = span.start;
  for (std::size_t k = 0; k < radius && start > 0; ++k) {
    --start;
    while (start > 0 && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) --start;
  }
  std::size_t end = span.end;
  for (std::size_t k = 0; k < radius && end < text.size(); ++k) {
    std::size_t len = 1;
    detail::decode(text, end, &len);
    end += len;
  }
  return make_span(text, start, end);
}

// Positions of every ASCII letter of the given case.
inline std::vector<Span> find_case_letters(std::string_view text, bool upper) {
  std::vector<Span> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (upper ? std::isupper(c) : std::islower(c)) out.push_back(make_span(text, i, i + 1));
  }
  return out;
}

}  // namespace dvr::text
