#pragma once

// Seeded generators of small adversarial responses and well-formed specs
// for oracle comparison.

#include <array>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "dvr/constraint.hpp"

namespace fuzz {

using Engine = std::mt19937_64;

inline std::size_t below(Engine& e, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(e); }
inline int between(Engine& e, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(e); }
inline bool coin(Engine& e, double p = 0.5) { return std::bernoulli_distribution(p)(e); }

template <typename C>
const auto& pick(Engine& e, const C& items) {
  return items[below(e, items.size())];
}

inline constexpr std::array<std::string_view, 4> kKeywords{"games", "risk-taking", "the end", "NASA"};
inline constexpr std::array<std::string_view, 3> kPhrases{"Any other questions?", "That is all.", "Bye"};
inline constexpr std::array<std::string_view, 2> kOptionSets{"My answer is yes. | My answer is no. | Maybe",
                                                              "Yes, absolutely. | No, not really."};

inline constexpr std::array<std::string_view, 36> kWords{
    "apple", "Apple", "APPLE", "the", "The", "NASA", "a", "I", "ok", "x1", "42", "risk-taking", "risk", "taking",
    "games", "Games", "GAMES", "gamescon", "endgames", "end", "THE END", "the  end", "l", "L", "level",
    "caf\xC3\xA9", "\xC3\xBC" "ber", "\xE4\xB8\xAD\xE6\x96\x87", "\xD0\xB6", "A.B.", "US-A", "Do", "\"q\"",
    "x,y", "any", "Bye"};

inline constexpr std::array<std::string_view, 16> kGaps{" ", " ", " ", "  ", "\n", "\n\n", "\t", "\r\n", ", ",
                                                        ". ", "... ", "! ", "?! ", "?", ".", " - "};

inline constexpr std::array<std::string_view, 45> kMarkup{
    "*", "**", "* ", "\n* ", "\n  * item", "\n*item", "\n** x", "***", "\n***\n", "\n *** \n", "*** ",
    "*hi*", "* *", "*a* *b*", "**bold**", "[name]", "[", "]", "[]", "[a[b]", "[x y]", "<<", ">>", "<<T>>",
    "<<>>", "<<>>>", "P.S.", " P.P.S.", "p.s.", "xP.S.", "\"", "{", "}", "[1, 2]", ":", "\"k\"", "null",
    "\xE2\x80\x94", "\xE2\x80\x9C", "\xC2\xA0", "\xE3\x80\x82", "\xC3\x97", "\xE2\x80\xA6", "\n\n***\n\n", "\r"};

inline std::string soup(Engine& e, int max_parts) {
  std::string out;
  const int parts = between(e, 0, max_parts);
  for (int i = 0; i < parts; ++i) {
    const auto roll = below(e, 10);
    if (roll < 5) {
      out += pick(e, kWords);
    } else if (roll < 8) {
      out += pick(e, kGaps);
    } else {
      out += pick(e, kMarkup);
    }
  }
  return out;
}

inline std::string json_value(Engine& e, int depth) {
  switch (below(e, depth > 2 ? 4 : 6)) {
    case 0: return "null";
    case 1: return coin(e) ? "true" : "false";
    case 2: return std::to_string(between(e, -50, 50)) + (coin(e, 0.3) ? ".5e2" : "");
    case 3: return coin(e) ? "\"a b\"" : "\"caf\xC3\xA9 \\\"x\\\"\"";
    case 4: {
      std::string s = "[";
      const int n = between(e, 0, 3);
      for (int i = 0; i < n; ++i) s += (i ? ", " : "") + json_value(e, depth + 1);
      return s + "]";
    }
    default: {
      std::string s = "{";
      const int n = between(e, 0, 3);
      for (int i = 0; i < n; ++i) s += std::string(i ? ", " : "") + "\"k" + std::to_string(i) + "\": " + json_value(e, depth + 1);
      return s + "}";
    }
  }
}

// Small edits that often break JSON validity. Multibyte characters are left whole.
inline std::string mutate(Engine& e, std::string s) {
  static constexpr std::array<std::string_view, 9> kBits{",", "}", "{", "\"", "x", " ", "\n", "]", ":"};
  const int edits = between(e, 1, 2);
  for (int i = 0; i < edits && !s.empty(); ++i) {
    std::size_t at = below(e, s.size() + 1);
    while (at < s.size() && (static_cast<unsigned char>(s[at]) & 0xC0) == 0x80) ++at;
    if (coin(e)) {
      s.insert(at, pick(e, kBits));
    } else if (at < s.size() && static_cast<unsigned char>(s[at]) < 0x80) {
      s.erase(at, 1);
    }
  }
  return s;
}

inline std::string response_for(Engine& e, const dvr::ConstraintSpec& spec) {
  using T = dvr::ConstraintType;
  std::string r = soup(e, 30);
  const std::string text = spec.text_param.value_or("");
  switch (spec.type) {
    case T::json_format: {
      const auto roll = below(e, 4);
      if (roll == 0) return r;
      std::string doc = json_value(e, 0);
      if (coin(e, 0.3)) doc = " \n" + doc + "\n ";
      return roll == 1 ? mutate(e, doc) : doc;
    }
    case T::fixed_responses: {
      const auto opts = dvr::split_options(text);
      std::string pick_one = opts[below(e, opts.size())];
      switch (below(e, 5)) {
        case 0: return pick_one;
        case 1: return "  " + pick_one + "\n";
        case 2: return pick_one + ".";
        case 3: return pick_one.substr(0, pick_one.size() / 2);
        default: return r;
      }
    }
    case T::end_phrase:
      if (coin(e, 0.6)) r += coin(e) ? text : text.substr(1);
      if (coin(e, 0.3)) r += pick(e, kGaps);
      return r;
    case T::quoted_response:
      if (coin(e, 0.5)) r = "\"" + r + (coin(e, 0.8) ? "\"" : "");
      if (coin(e, 0.3)) r = " " + r + "\n";
      return r;
    case T::all_capital:
    case T::all_lowercase:
      if (coin(e, 0.5)) {
        for (auto& c : r) {
          if (c >= 'a' && c <= 'z' && spec.type == T::all_capital) c = static_cast<char>(c - 32);
          if (c >= 'A' && c <= 'Z' && spec.type == T::all_lowercase) c = static_cast<char>(c + 32);
        }
      }
      return r;
    case T::no_commas:
      if (coin(e, 0.4)) std::erase(r, ',');
      return r;
    default: return r;
  }
}

inline dvr::ComparisonMode count_mode(Engine& e) {
  return coin(e) ? dvr::ComparisonMode::at_least : dvr::ComparisonMode::less_than;
}

inline dvr::ConstraintSpec spec_for(Engine& e, dvr::ConstraintType t) {
  using T = dvr::ConstraintType;
  using S = dvr::ConstraintSpec;
  switch (t) {
    case T::word_count: return S::count(t, count_mode(e), between(e, 0, 20));
    case T::sentence_count: return S::count(t, count_mode(e), between(e, 0, 8));
    case T::separator_paragraphs:
    case T::bullet_points: return S::exact(t, between(e, 0, 4));
    case T::placeholder:
    case T::highlighted:
    case T::capital_word_frequency: return S::count(t, count_mode(e), between(e, 0, 4));
    case T::letter_frequency:
      return S::text_count(t, std::string(1, "aelLsEx"[below(e, 7)]), count_mode(e), between(e, 0, 8));
    case T::keyword_frequency: return S::text_count(t, std::string(pick(e, kKeywords)), count_mode(e), between(e, 0, 3));
    case T::include_keyword:
    case T::exclude_keyword: return S::text(t, std::string(pick(e, kKeywords)));
    case T::end_phrase: return S::text(t, std::string(pick(e, kPhrases)) + (coin(e, 0.2) ? " " : ""));
    case T::fixed_responses: return S::text(t, std::string(pick(e, kOptionSets)));
    case T::language_restriction: return S::text(t, std::string(pick(e, dvr::kSupportedLanguages)));
    default: return S::flag(t);
  }
}

// Sentences with a known language, used to judge language_restriction.
struct LanguageSample {
  std::string code;
  std::string text;
};

inline const std::vector<std::pair<std::string, std::vector<std::string>>>& language_pools() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> pools{
      {"en", {"The weather is nice today and we are going to the park.", "This book was written by a famous author.",
              "They have a lot of work to do in the morning.", "It is important to drink water every day."}},
      {"de", {"Das Wetter ist heute sch\xC3\xB6n und wir gehen in den Park.", "Ich habe keine Zeit f\xC3\xBCr das Spiel.",
              "Die Kinder spielen mit dem Hund im Garten.", "Wir werden morgen nach Berlin fahren, aber nicht lange."}},
      {"it", {"Il tempo \xC3\xA8 bello oggi e andiamo al parco.", "Questo libro \xC3\xA8 molto interessante per gli studenti.",
              "Non sono sicuro che la cena sia pronta.", "Anche noi vogliamo essere con gli amici della scuola."}},
      {"fr", {"Le temps est beau aujourd'hui et nous allons au parc.", "Cette maison est tr\xC3\xA8s grande pour une famille.",
              "Il ne veut pas sortir avec les autres.", "Nous sommes dans la cuisine avec des amis."}},
      {"es", {"El tiempo es bueno hoy y vamos al parque con los ni\xC3\xB1os.", "Esta casa es muy grande para una familia.",
              "No hay nada en la mesa de la cocina.", "Los estudiantes tambi\xC3\xA9n leen sus libros por la tarde."}},
      {"pt", {"O tempo est\xC3\xA1 bom hoje e vamos ao parque com os amigos.", "Ele n\xC3\xA3o tem muito tempo para isso.",
              "As crian\xC3\xA7" "as s\xC3\xA3o muito felizes em casa.", "Isso tamb\xC3\xA9m \xC3\xA9 importante para n\xC3\xB3s."}},
      {"ja", {"\xE4\xBB\x8A\xE6\x97\xA5\xE3\x81\xAF\xE5\xA4\xA9\xE6\xB0\x97\xE3\x81\x8C\xE3\x81\x84\xE3\x81\x84\xE3\x81\xA7\xE3\x81\x99\xE3\x80\x82",
              "\xE7\xA7\x81\xE3\x81\xAF\xE6\x9C\xAC\xE3\x82\x92\xE8\xAA\xAD\xE3\x81\xBF\xE3\x81\xBE\xE3\x81\x99\xE3\x80\x82"}},
      {"zh", {"\xE4\xBB\x8A\xE5\xA4\xA9\xE5\xA4\xA9\xE6\xB0\x94\xE5\xBE\x88\xE5\xA5\xBD\xE3\x80\x82",
              "\xE6\x88\x91\xE4\xBB\xAC\xE5\x8E\xBB\xE5\x85\xAC\xE5\x9B\xAD\xE6\x95\xA3\xE6\xAD\xA5\xE3\x80\x82"}},
      {"ko", {"\xEC\x98\xA4\xEB\x8A\x98\xEC\x9D\x80 \xEB\x82\xA0\xEC\x94\xA8\xEA\xB0\x80 \xEC\xA2\x8B\xEC\x8A\xB5\xEB\x8B\x88\xEB\x8B\xA4.",
              "\xEC\xB1\x85\xEC\x9D\x84 \xEC\x9D\xBD\xEC\x96\xB4\xEC\x9A\x94."}},
      {"ru", {"\xD0\xA1\xD0\xB5\xD0\xB3\xD0\xBE\xD0\xB4\xD0\xBD\xD1\x8F \xD1\x85\xD0\xBE\xD1\x80\xD0\xBE\xD1\x88\xD0\xB0\xD1\x8F \xD0\xBF\xD0\xBE\xD0\xB3\xD0\xBE\xD0\xB4\xD0\xB0.",
              "\xD0\xAF \xD1\x87\xD0\xB8\xD1\x82\xD0\xB0\xD1\x8E \xD0\xBA\xD0\xBD\xD0\xB8\xD0\xB3\xD1\x83."}},
  };
  return pools;
}

// Two to four sentences from one pool, or a language-free string ("und").
inline LanguageSample language_sample(Engine& e) {
  if (coin(e, 0.1)) return {"und", coin(e) ? "" : "12 34 !!! ***"};
  const auto& [code, pool] = pick(e, language_pools());
  std::string text;
  const int n = between(e, 2, 4);
  for (int i = 0; i < n; ++i) text += (i ? " " : "") + pick(e, pool);
  return {code, text};
}

}  // namespace fuzz
