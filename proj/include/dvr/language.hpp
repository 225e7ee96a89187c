#pragma once

// Language identification for the language_restriction verifier.
// The built-in detector uses script statistics for non-Latin scripts and
// stopword lexicons for Latin-script languages; "und" means undecidable.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>

#include "dvr/constraint.hpp"
#include "dvr/text.hpp"

namespace dvr {

class LanguageDetector {
 public:
  virtual ~LanguageDetector() = default;
  // Returns a code from kSupportedLanguages or "und".
  virtual std::string detect(std::string_view text) const = 0;
};

struct ScriptCounts {
  std::size_t latin = 0;
  std::size_t kana = 0;
  std::size_t hangul = 0;
  std::size_t han = 0;
  std::size_t cyrillic = 0;

  std::size_t total() const { return latin + kana + hangul + han + cyrillic; }
};

inline ScriptCounts count_scripts(std::string_view text) {
  ScriptCounts c;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    const char32_t cp = text::detail::decode(text, i, &len);
    i += len;
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= 0xC0 && cp <= 0x24F && cp != 0xD7 && cp != 0xF7)) {
      ++c.latin;
    } else if ((cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0x31F0 && cp <= 0x31FF)) {
      ++c.kana;
    } else if ((cp >= 0xAC00 && cp <= 0xD7AF) || (cp >= 0x1100 && cp <= 0x11FF) || (cp >= 0x3130 && cp <= 0x318F)) {
      ++c.hangul;
    } else if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF)) {
      ++c.han;
    } else if (cp >= 0x0400 && cp <= 0x04FF) {
      ++c.cyrillic;
    }
  }
  return c;
}

namespace detail {

struct Lexicon {
  std::string_view code;
  std::array<std::string_view, 30> words;
};

inline const std::array<Lexicon, 6>& stopword_lexicons() {
  static const std::array<Lexicon, 6> lexicons{{
      {"en", {"the", "and", "is", "are", "of", "to", "in", "that", "it", "with", "for", "this", "was", "on", "be",
              "as", "by", "not", "have", "from", "you", "they", "we", "an", "or", "at", "which", "has", "their", "can"}},
      {"de", {"der", "die", "das", "und", "ist", "nicht", "ein", "eine", "ich", "zu", "den", "mit", "sich", "des", "auf",
              "f\xC3\xBCr", "im", "dem", "auch", "sind", "von", "wir", "sie", "werden", "wie", "oder", "aber", "nach",
              "\xC3\xBC" "ber", "heute"}},
      {"it", {"il", "di", "che", "\xC3\xA8", "la", "e", "per", "un", "una", "non", "sono", "con", "del", "della", "gli",
              "le", "si", "anche", "come", "pi\xC3\xB9", "nel", "questo", "ma", "ci", "dei", "delle", "alla", "lo",
              "essere", "molto"}},
      {"fr", {"le", "la", "les", "et", "est", "un", "une", "des", "du", "que", "qui", "dans", "pour", "pas", "sur",
              "avec", "ce", "il", "elle", "sont", "au", "aux", "mais", "nous", "vous", "cette", "\xC3\xAAtre", "ou",
              "tr\xC3\xA8s", "plus"}},
      {"es", {"el", "la", "los", "las", "y", "es", "en", "de", "que", "un", "una", "por", "con", "para", "no", "se",
              "del", "al", "lo", "como", "m\xC3\xA1s", "pero", "sus", "su", "este", "esta", "son", "muy",
              "tambi\xC3\xA9n", "hay"}},
      {"pt", {"o", "a", "os", "as", "e", "\xC3\xA9", "em", "de", "que", "um", "uma", "para", "com", "n\xC3\xA3o", "do",
              "da", "dos", "das", "no", "na", "se", "por", "mais", "como", "mas", "s\xC3\xA3o", "muito",
              "tamb\xC3\xA9m", "isso", "ele"}},
  }};
  return lexicons;
}

// Lowercased token with ASCII punctuation stripped from both ends.
inline std::string normalize_token(std::string_view token) {
  std::size_t a = 0;
  std::size_t b = token.size();
  const auto punct = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && !std::isalnum(u);
  };
  while (a < b && punct(token[a])) ++a;
  while (b > a && punct(token[b - 1])) --b;
  std::string out(token.substr(a, b - a));
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

class HeuristicLanguageDetector final : public LanguageDetector {
 public:
  std::string detect(std::string_view text) const override {
    const ScriptCounts s = count_scripts(text);
    const std::size_t total = s.total();
    if (total == 0) return "und";
    const auto share = [total](std::size_t n) { return static_cast<double>(n) / static_cast<double>(total); };
    if (share(s.hangul) > 0.3) return "ko";
    if (s.kana > 0 && share(s.kana + s.han) > 0.3) return "ja";
    if (share(s.han) > 0.3) return "zh";
    if (share(s.cyrillic) > 0.3) return "ru";
    if (share(s.latin) < 0.5) return "und";

    const auto& lexicons = detail::stopword_lexicons();
    std::array<std::size_t, 6> hits{};
    for (const auto& [a, b] : text::detail::tokens(text)) {
      const std::string token = detail::normalize_token(text.substr(a, b - a));
      if (token.empty()) continue;
      for (std::size_t k = 0; k < lexicons.size(); ++k) {
        for (std::string_view w : lexicons[k].words) {
          if (w == token) {
            ++hits[k];
            break;
          }
        }
      }
    }
    std::size_t best = 0;
    bool tie = false;
    for (std::size_t k = 1; k < hits.size(); ++k) {
      if (hits[k] > hits[best]) {
        best = k;
        tie = false;
      } else if (hits[k] == hits[best]) {
        tie = true;
      }
    }
    if (hits[best] == 0 || tie) return "und";
    return std::string(lexicons[best].code);
  }
};

inline const LanguageDetector& default_language_detector() {
  static const HeuristicLanguageDetector detector;
  return detector;
}

inline std::string detect_language(std::string_view text) { return default_language_detector().detect(text); }

}  // namespace dvr
