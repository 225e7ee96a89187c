#pragma once

// Constraint vocabulary: the 21 verifiable constraint types, their
// categories, parameter shapes, conflict rules and JSON form.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dvr/error.hpp"

namespace dvr {

enum class ConstraintType : std::uint8_t {
  postscript,
  placeholder,
  include_keyword,
  exclude_keyword,
  letter_frequency,
  keyword_frequency,
  sentence_count,
  word_count,
  separator_paragraphs,
  bullet_points,
  fixed_responses,
  highlighted,
  json_format,
  title_format,
  quoted_response,
  end_phrase,
  no_commas,
  all_capital,
  all_lowercase,
  capital_word_frequency,
  language_restriction,
  // Content constraints checked through an external classifier. They sit
  // outside the 21-type format taxonomy and are only produced for
  // topic/sentiment datasets.
  topic,
  sentiment,
};

inline constexpr std::size_t kFormatTypeCount = 21;
inline constexpr std::size_t kTypeCount = 23;

enum class Category : std::uint8_t {
  keywords,
  length,
  detectable_content,
  detectable_format,
  change_cases,
  startend,
  punctuation,
  language,
  content,
};

inline constexpr std::size_t kFormatCategoryCount = 8;

enum class ComparisonMode : std::uint8_t { at_least, less_than, exactly, none };

// What parameters a type carries.
enum class ParamShape : std::uint8_t {
  none,        // no parameters
  text,        // text_param only
  count,       // int_param with at_least / less_than
  exact,       // int_param with exactly
  text_count,  // text_param + int_param with at_least / less_than
  options,     // text_param holding '|'-separated options
};

struct TypeTraits {
  ConstraintType type;
  std::string_view id;      // canonical id, used in JSON
  std::string_view phrase;  // category phrase from the tool-selection prompt
  std::string_view alias;   // surface tool name, e.g. Bullet_points
  Category category;
  ParamShape shape;
};

inline constexpr std::array<TypeTraits, kTypeCount> kTypeTraits{{
    {ConstraintType::postscript, "postscript", "postscript", "Postscript", Category::detectable_content, ParamShape::none},
    {ConstraintType::placeholder, "placeholder", "placeholder", "Placeholders", Category::detectable_content, ParamShape::count},
    {ConstraintType::include_keyword, "include_keyword", "include keyword", "Keywords", Category::keywords, ParamShape::text},
    {ConstraintType::exclude_keyword, "exclude_keyword", "exclude keyword", "Exclude_keyword", Category::keywords, ParamShape::text},
    {ConstraintType::letter_frequency, "letter_frequency", "letter frequency", "Letter_freq", Category::keywords, ParamShape::text_count},
    {ConstraintType::keyword_frequency, "keyword_frequency", "keyword frequency", "Keyword_freq", Category::keywords, ParamShape::text_count},
    {ConstraintType::sentence_count, "sentence_count", "sentence count constraint", "Sentence_count", Category::length, ParamShape::count},
    {ConstraintType::word_count, "word_count", "word count constraint", "Word_count", Category::length, ParamShape::count},
    {ConstraintType::separator_paragraphs, "separator_paragraphs", "*** separator", "Paragraphs", Category::length, ParamShape::exact},
    {ConstraintType::bullet_points, "bullet_points", "bullet points", "Bullet_points", Category::detectable_format, ParamShape::exact},
    {ConstraintType::fixed_responses, "fixed_responses", "fixed responses", "Options", Category::detectable_format, ParamShape::options},
    {ConstraintType::highlighted, "highlighted", "highlighted", "Highlights", Category::detectable_format, ParamShape::count},
    {ConstraintType::json_format, "json_format", "json format", "Json", Category::detectable_format, ParamShape::none},
    {ConstraintType::title_format, "title_format", "title format", "Title", Category::detectable_format, ParamShape::none},
    {ConstraintType::quoted_response, "quoted_response", "quoted response", "Quoted", Category::startend, ParamShape::none},
    {ConstraintType::end_phrase, "end_phrase", "end phrase", "End_phrase", Category::startend, ParamShape::text},
    {ConstraintType::no_commas, "no_commas", "no commas", "No_commas", Category::punctuation, ParamShape::none},
    {ConstraintType::all_capital, "all_capital", "all capital letters", "Uppercase", Category::change_cases, ParamShape::none},
    {ConstraintType::all_lowercase, "all_lowercase", "all lowercase", "Lowercase", Category::change_cases, ParamShape::none},
    {ConstraintType::capital_word_frequency, "capital_word_frequency", "capital word frequency", "Capitalwords", Category::change_cases, ParamShape::count},
    {ConstraintType::language_restriction, "language_restriction", "language restriction", "Language", Category::language, ParamShape::text},
    {ConstraintType::topic, "topic", "topic", "Topic", Category::content, ParamShape::text},
    {ConstraintType::sentiment, "sentiment", "sentiment", "Sentiment", Category::content, ParamShape::text},
}};

inline const TypeTraits& traits(ConstraintType t) { return kTypeTraits[static_cast<std::size_t>(t)]; }

inline std::string_view type_id(ConstraintType t) { return traits(t).id; }
inline std::string_view category_phrase(ConstraintType t) { return traits(t).phrase; }
inline Category category_of(ConstraintType t) { return traits(t).category; }
inline bool is_content_type(ConstraintType t) { return category_of(t) == Category::content; }

// The 21 format types in canonical order.
inline std::vector<ConstraintType> format_types() {
  std::vector<ConstraintType> out;
  for (std::size_t i = 0; i < kFormatTypeCount; ++i) out.push_back(kTypeTraits[i].type);
  return out;
}

inline std::vector<ConstraintType> all_types() {
  std::vector<ConstraintType> out;
  for (const auto& t : kTypeTraits) out.push_back(t.type);
  return out;
}

inline std::string_view category_name(Category c) {
  switch (c) {
    case Category::keywords: return "Keywords";
    case Category::length: return "Length";
    case Category::detectable_content: return "Detectable Content";
    case Category::detectable_format: return "Detectable Format";
    case Category::change_cases: return "Change Cases";
    case Category::startend: return "Startend";
    case Category::punctuation: return "Punctuation";
    case Category::language: return "Language";
    case Category::content: return "Content";
  }
  return "?";
}

inline std::string_view mode_id(ComparisonMode m) {
  switch (m) {
    case ComparisonMode::at_least: return "at_least";
    case ComparisonMode::less_than: return "less_than";
    case ComparisonMode::exactly: return "exactly";
    case ComparisonMode::none: return "none";
  }
  return "none";
}

// "at least", "less than", "exactly"
inline std::string mode_phrase(ComparisonMode m) {
  std::string s(mode_id(m));
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim_view(std::string_view s) {
  const auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_ws(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_ws(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Collapses separators so "less_than", "less-than" and "Less Than" compare equal.
inline std::string fold_words(std::string_view s) {
  std::string out;
  bool gap = false;
  for (unsigned char c : trim_view(s)) {
    if (c == '_' || c == '-' || std::isspace(c)) {
      gap = true;
      continue;
    }
    if (gap && !out.empty()) out.push_back(' ');
    gap = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace detail

inline std::optional<ConstraintType> type_from_id(std::string_view id) {
  for (const auto& t : kTypeTraits) {
    if (t.id == id) return t.type;
  }
  return std::nullopt;
}

inline std::optional<ComparisonMode> mode_from_string(std::string_view s) {
  const std::string folded = detail::fold_words(s);
  if (folded == "at least" || folded == ">=") return ComparisonMode::at_least;
  if (folded == "less than" || folded == "<") return ComparisonMode::less_than;
  if (folded == "exactly" || folded == "==") return ComparisonMode::exactly;
  if (folded == "none") return ComparisonMode::none;
  return std::nullopt;
}

// Maps a model-emitted category name onto a type. Surrounding whitespace,
// quotes and a trailing period are ignored and matching is case-insensitive,
// but the phrase itself must be one of the canonical ones (or a canonical id).
inline ConstraintType canonical_category(std::string_view name) {
  std::string_view s = detail::trim_view(name);
  const auto strip_edges = [&s] {
    bool changed = true;
    while (changed && !s.empty()) {
      changed = false;
      const char f = s.front();
      const char b = s.back();
      if (f == '"' || f == '\'' || f == '`') {
        s.remove_prefix(1);
        changed = true;
      } else if (b == '"' || b == '\'' || b == '`' || b == '.') {
        s.remove_suffix(1);
        changed = true;
      }
      s = detail::trim_view(s);
    }
  };
  strip_edges();
  const std::string folded = detail::ascii_lower(s);
  for (const auto& t : kTypeTraits) {
    if (folded == t.phrase || folded == t.id) return t.type;
  }
  throw UnknownCategory(std::string(name));
}

// Languages the built-in detector can tell apart.
inline constexpr std::array<std::string_view, 10> kSupportedLanguages{"en", "de", "it", "fr", "es", "pt", "ja", "zh", "ko", "ru"};

inline bool is_supported_language(std::string_view code) {
  return std::find(kSupportedLanguages.begin(), kSupportedLanguages.end(), code) != kSupportedLanguages.end();
}

inline std::string_view language_name(std::string_view code) {
  if (code == "en") return "English";
  if (code == "de") return "German";
  if (code == "it") return "Italian";
  if (code == "fr") return "French";
  if (code == "es") return "Spanish";
  if (code == "pt") return "Portuguese";
  if (code == "ja") return "Japanese";
  if (code == "zh") return "Chinese";
  if (code == "ko") return "Korean";
  if (code == "ru") return "Russian";
  return "an undetermined language";
}

inline std::vector<std::string> split_options(std::string_view joined) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= joined.size()) {
    const std::size_t bar = joined.find('|', start);
    const std::size_t end = bar == std::string_view::npos ? joined.size() : bar;
    out.emplace_back(detail::trim_view(joined.substr(start, end - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

inline std::string join_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += " | ";
    out += options[i];
  }
  return out;
}

// One atomic constraint.
struct ConstraintSpec {
  ConstraintType type = ConstraintType::no_commas;
  ComparisonMode comparison = ComparisonMode::none;
  std::optional<std::int64_t> int_param;
  std::optional<std::string> text_param;

  static ConstraintSpec flag(ConstraintType t) { return {t, ComparisonMode::none, std::nullopt, std::nullopt}; }
  static ConstraintSpec text(ConstraintType t, std::string s) { return {t, ComparisonMode::none, std::nullopt, std::move(s)}; }
  static ConstraintSpec count(ConstraintType t, ComparisonMode m, std::int64_t n) { return {t, m, n, std::nullopt}; }
  static ConstraintSpec exact(ConstraintType t, std::int64_t n) { return {t, ComparisonMode::exactly, n, std::nullopt}; }
  static ConstraintSpec text_count(ConstraintType t, std::string s, ComparisonMode m, std::int64_t n) {
    return {t, m, n, std::move(s)};
  }

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

// Returns an empty string when the spec is well-formed, otherwise the reason.
inline std::string spec_problem(const ConstraintSpec& s) {
  const TypeTraits& tr = traits(s.type);
  const std::string name(tr.id);
  const bool has_int = s.int_param.has_value();
  const bool has_text = s.text_param.has_value();
  if (has_int && *s.int_param < 0) return name + ": int_param must be non-negative";
  switch (tr.shape) {
    case ParamShape::none:
      if (has_int || has_text) return name + " takes no parameters";
      if (s.comparison != ComparisonMode::none) return name + " takes no comparison";
      return {};
    case ParamShape::text:
    case ParamShape::options:
      if (!has_text || detail::trim_view(*s.text_param).empty()) return name + " requires text_param";
      if (has_int) return name + " takes no int_param";
      if (s.comparison != ComparisonMode::none) return name + " takes no comparison";
      if (s.type == ConstraintType::language_restriction && !is_supported_language(*s.text_param)) {
        return name + ": unsupported language code '" + *s.text_param + "'";
      }
      if (tr.shape == ParamShape::options) {
        const auto opts = split_options(*s.text_param);
        if (opts.size() < 2) return name + " requires at least two options";
        for (const auto& o : opts) {
          if (o.empty()) return name + ": empty option";
        }
      }
      return {};
    case ParamShape::count:
      if (!has_int) return name + " requires int_param";
      if (has_text) return name + " takes no text_param";
      if (s.comparison != ComparisonMode::at_least && s.comparison != ComparisonMode::less_than) {
        return name + " requires at_least or less_than";
      }
      return {};
    case ParamShape::exact:
      if (!has_int) return name + " requires int_param";
      if (has_text) return name + " takes no text_param";
      if (s.comparison != ComparisonMode::exactly) return name + " requires exactly";
      return {};
    case ParamShape::text_count:
      if (!has_int) return name + " requires int_param";
      if (!has_text || detail::trim_view(*s.text_param).empty()) return name + " requires text_param";
      if (s.comparison != ComparisonMode::at_least && s.comparison != ComparisonMode::less_than) {
        return name + " requires at_least or less_than";
      }
      if (s.type == ConstraintType::letter_frequency) {
        const std::string& t = *s.text_param;
        if (t.size() != 1 || !std::isalpha(static_cast<unsigned char>(t[0]))) {
          return name + ": text_param must be a single letter";
        }
      }
      return {};
  }
  return {};
}

inline bool is_well_formed(const ConstraintSpec& s) { return spec_problem(s).empty(); }

inline void validate(const ConstraintSpec& s) {
  if (auto p = spec_problem(s); !p.empty()) throw InvalidSpec(p);
}

namespace detail {

inline bool has_upper(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isupper(c) != 0; });
}
inline bool has_lower(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::islower(c) != 0; });
}
inline bool is_keyword_type(ConstraintType t) {
  return t == ConstraintType::include_keyword || t == ConstraintType::exclude_keyword ||
         t == ConstraintType::keyword_frequency;
}
inline bool non_latin_language(std::string_view code) {
  return code == "ja" || code == "zh" || code == "ko" || code == "ru";
}

// Ordered check; conflicts() calls it both ways round.
inline bool conflicts_directed(const ConstraintSpec& a, const ConstraintSpec& b) {
  using T = ConstraintType;
  if (a.type == T::fixed_responses) return true;
  if (a.type == T::all_capital && b.type == T::all_lowercase) return true;
  if (a.type == T::json_format &&
      (b.type == T::bullet_points || b.type == T::title_format || b.type == T::highlighted ||
       b.type == T::separator_paragraphs || b.type == T::quoted_response || b.type == T::end_phrase)) {
    return true;
  }
  if (a.type == T::quoted_response && b.type == T::end_phrase) return true;
  // Case rules that would otherwise hide or contradict another constraint.
  if ((a.type == T::all_capital || a.type == T::all_lowercase) && b.type == T::capital_word_frequency) return true;
  if (a.type == T::all_lowercase && b.type == T::postscript) return true;
  if (a.type == T::all_lowercase && b.type == T::end_phrase && b.text_param && has_upper(*b.text_param)) return true;
  if (a.type == T::all_capital && b.type == T::end_phrase && b.text_param && has_lower(*b.text_param)) return true;
  // Same keyword under two keyword rules.
  if (is_keyword_type(a.type) && is_keyword_type(b.type) && a.text_param && b.text_param &&
      ascii_lower(*a.text_param) == ascii_lower(*b.text_param)) {
    return true;
  }
  if (a.type == T::exclude_keyword && b.type == T::end_phrase && a.text_param && b.text_param &&
      ascii_lower(*b.text_param).find(ascii_lower(*a.text_param)) != std::string::npos) {
    return true;
  }
  // Latin-letter rules cannot be met in a non-Latin-script answer; scripts
  // written without spaces make word counts meaningless.
  if (a.type == T::language_restriction && a.text_param && non_latin_language(*a.text_param) &&
      (b.type == T::letter_frequency || b.type == T::capital_word_frequency || b.type == T::all_capital)) {
    return true;
  }
  if (a.type == T::language_restriction && a.text_param && (*a.text_param == "ja" || *a.text_param == "zh") &&
      b.type == T::word_count) {
    return true;
  }
  return false;
}

}  // namespace detail

// True when two constraints must not appear in one instruction: same type,
// or jointly unsatisfiable / hiding one another.
inline bool conflicts(const ConstraintSpec& a, const ConstraintSpec& b) {
  if (a.type == b.type) return true;
  return detail::conflicts_directed(a, b) || detail::conflicts_directed(b, a);
}

template <typename Json>
void to_json(Json& j, const ConstraintSpec& s) {
  j = Json::object();
  j["type"] = std::string(type_id(s.type));
  j["comparison"] = std::string(mode_id(s.comparison));
  if (s.int_param) {
    j["int_param"] = *s.int_param;
  } else {
    j["int_param"] = nullptr;
  }
  if (s.text_param) {
    j["text_param"] = *s.text_param;
  } else {
    j["text_param"] = nullptr;
  }
}

template <typename Json>
void from_json(const Json& j, ConstraintSpec& s) {
  if (!j.is_object()) throw SchemaError("constraint spec must be a JSON object");
  const auto type_it = j.find("type");
  if (type_it == j.end() || !type_it->is_string()) throw SchemaError("constraint spec missing 'type'");
  const auto type = type_from_id(type_it->template get<std::string>());
  if (!type) throw SchemaError("unknown constraint type '" + type_it->template get<std::string>() + "'");
  s = ConstraintSpec{};
  s.type = *type;
  s.comparison = ComparisonMode::none;
  if (auto it = j.find("comparison"); it != j.end() && !it->is_null()) {
    const auto mode = mode_from_string(it->template get<std::string>());
    if (!mode) throw SchemaError("unknown comparison '" + it->template get<std::string>() + "'");
    s.comparison = *mode;
  }
  if (auto it = j.find("int_param"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw SchemaError("int_param must be an integer");
    s.int_param = it->template get<std::int64_t>();
  }
  if (auto it = j.find("text_param"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("text_param must be a string");
    s.text_param = it->template get<std::string>();
  }
  if (auto p = spec_problem(s); !p.empty()) throw SchemaError(p);
}

}  // namespace dvr
