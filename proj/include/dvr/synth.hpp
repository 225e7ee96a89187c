#pragma once

// Multi-constraint instruction synthesis: seed rewriting, conflict-free
// constraint sampling, phrasing, and JSONL dataset output.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dvr/constraint.hpp"
#include "dvr/error.hpp"
#include "dvr/phrasing.hpp"
#include "dvr/random.hpp"
#include "dvr/text.hpp"

namespace dvr {

inline constexpr int kMinLevel = 1;
inline constexpr int kMaxLevel = 6;

struct Instruction {
  std::string id;
  std::string text;
  int level = 0;
  std::string seed;
  std::vector<ConstraintSpec> ground_truth;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

template <typename Json>
void to_json(Json& j, const Instruction& in) {
  j = Json::object();
  j["id"] = in.id;
  j["level"] = in.level;
  j["seed"] = in.seed;
  j["instruction"] = in.text;
  Json specs = Json::array();
  for (const auto& s : in.ground_truth) specs.push_back(Json(s));
  j["ground_truth"] = std::move(specs);
}

template <typename Json>
void from_json(const Json& j, Instruction& in) {
  if (!j.is_object()) throw SchemaError("instruction must be a JSON object");
  try {
    in.id = j.at("id").template get<std::string>();
    in.level = j.at("level").template get<int>();
    in.seed = j.value("seed", std::string{});
    in.text = j.at("instruction").template get<std::string>();
    in.ground_truth.clear();
    for (const auto& s : j.at("ground_truth")) in.ground_truth.push_back(s.template get<ConstraintSpec>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed instruction: ") + e.what());
  }
}

// Replaces the whole words paragraph(s) / sentence(s), any case, with "text"
// so seeds carry no hidden length constraint.
inline std::string rewrite_seed(std::string_view seed) {
  static constexpr std::array<std::string_view, 4> kTargets{"paragraphs", "paragraph", "sentences", "sentence"};
  std::string out;
  std::size_t i = 0;
  const auto boundary = [&](std::size_t pos) {
    return pos >= seed.size() || !std::isalnum(static_cast<unsigned char>(seed[pos]));
  };
  while (i < seed.size()) {
    bool replaced = false;
    if (i == 0 || boundary(i - 1)) {
      for (std::string_view t : kTargets) {
        if (i + t.size() > seed.size() || !boundary(i + t.size())) continue;
        if (detail::ascii_lower(seed.substr(i, t.size())) != t) continue;
        out += std::isupper(static_cast<unsigned char>(seed[i])) ? "Text" : "text";
        i += t.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(seed[i++]);
  }
  return out;
}

// Per-topic keyword lexicon; the seed's topic selects the keyword pool.
struct TopicLexicon {
  std::string_view topic;
  std::array<std::string_view, 4> cues;
  std::array<std::string_view, 8> keywords;
};

inline const std::vector<TopicLexicon>& topic_lexicons() {
  static const std::vector<TopicLexicon> lexicons{
      {"food", {"food", "cook", "dining", "cuisine"}, {"ingredients", "recipe", "flavor", "kitchen", "spices", "dinner", "harvest", "taste"}},
      {"film", {"film", "tv", "movie", "video"}, {"director", "scene", "audience", "screen", "story", "actor", "camera", "series"}},
      {"technology", {"technology", "tech", "computer", "digital"}, {"artificial", "software", "network", "device", "innovation", "data", "future", "robot"}},
      {"science", {"science", "scientific", "research", "biology"}, {"research", "experiment", "theory", "evidence", "discovery", "mutations", "laboratory", "energy"}},
      {"sports", {"sport", "sports", "athlete", "game"}, {"games", "team", "coach", "victory", "training", "match", "stadium", "players"}},
      {"arts", {"art", "arts", "painting", "museum"}, {"canvas", "gallery", "color", "sculpture", "artist", "expression", "beauty", "museum"}},
      {"culture", {"culture", "tradition", "heritage", "society"}, {"tradition", "festival", "community", "language", "history", "customs", "identity", "heritage"}},
      {"music", {"music", "song", "band", "concert"}, {"melody", "rhythm", "concert", "guitar", "lyrics", "album", "singer", "harmony"}},
      {"celebrity", {"celebrity", "pop", "fame", "star"}, {"entertainment", "fans", "fame", "interview", "award", "spotlight", "gossip", "stage"}},
      {"travel", {"travel", "trip", "journey", "tourism"}, {"adventure", "passport", "journey", "destination", "luggage", "culture", "flight", "map"}},
      {"business", {"business", "entrepreneur", "entrepreneurs", "company"}, {"risk-taking", "startup", "market", "profit", "investors", "strategy", "growth", "leadership"}},
      {"health", {"health", "fitness", "medical", "wellness"}, {"exercise", "nutrition", "sleep", "doctor", "balance", "energy", "wellness", "habits"}},
      {"nature", {"nature", "environment", "climate", "outdoors"}, {"forest", "river", "climate", "wildlife", "ocean", "mountains", "seasons", "planet"}},
      {"education", {"education", "school", "learning", "student"}, {"students", "teacher", "curiosity", "lesson", "knowledge", "classroom", "books", "learning"}},
  };
  return lexicons;
}

inline const TopicLexicon& lexicon_for_seed(std::string_view seed) {
  const auto& all = topic_lexicons();
  const std::string lower = detail::ascii_lower(seed);
  for (const auto& lex : all) {
    for (std::string_view cue : lex.cues) {
      if (!text::find_keyword(lower, cue).empty()) return lex;
    }
  }
  // Unknown topics share a generic pool.
  static const TopicLexicon generic{"general", {"", "", "", ""}, {"idea", "people", "world", "moment", "example", "change", "value", "detail"}};
  return generic;
}

inline constexpr std::array<std::string_view, 5> kEndPhrases{
    "Is there anything else I can help with?", "Let me know if you have additional questions.",
    "Any other questions?", "That is all for today.", "Thank you for reading."};

inline constexpr std::array<std::string_view, 3> kOptionSets{
    "My answer is yes. | My answer is no. | My answer is maybe.",
    "I know or not. | I don't know. | I am not sure.",
    "Yes, absolutely. | No, not really. | It depends."};

inline constexpr std::string_view kFrequencyLetters = "abcdeghilmnoprstuwy";

struct SamplingOptions {
  // Types eligible for sampling; empty means all 21 format types.
  std::vector<ConstraintType> allowed_types;
  // Keyword pool used for keyword constraints.
  const TopicLexicon* lexicon = nullptr;
};

// Draws parameters for one constraint of the given type. Ranges follow the
// magnitudes seen in typical multi-constraint instructions.
inline ConstraintSpec sample_parameters(ConstraintType t, Rng& rng, const TopicLexicon& lexicon) {
  using T = ConstraintType;
  const auto count_mode = [&rng] { return rng.chance(0.5) ? ComparisonMode::at_least : ComparisonMode::less_than; };
  const auto keyword = [&] { return std::string(lexicon.keywords[rng.index(lexicon.keywords.size())]); };
  switch (t) {
    case T::word_count: return ConstraintSpec::count(t, count_mode(), rng.uniform(20, 120));
    case T::sentence_count: return ConstraintSpec::count(t, count_mode(), rng.uniform(2, 10));
    case T::separator_paragraphs: return ConstraintSpec::exact(t, rng.uniform(2, 5));
    case T::bullet_points: return ConstraintSpec::exact(t, rng.uniform(2, 6));
    case T::placeholder:
    case T::highlighted: return ConstraintSpec::count(t, ComparisonMode::at_least, rng.uniform(1, 4));
    case T::letter_frequency: {
      const char letter = kFrequencyLetters[rng.index(kFrequencyLetters.size())];
      const ComparisonMode mode = count_mode();
      return ConstraintSpec::text_count(t, std::string(1, letter), mode, rng.uniform(mode == ComparisonMode::less_than ? 2 : 1, 10));
    }
    case T::keyword_frequency: {
      std::string kw = keyword();
      const ComparisonMode mode = count_mode();
      return ConstraintSpec::text_count(t, std::move(kw), mode, rng.uniform(mode == ComparisonMode::less_than ? 2 : 1, 10));
    }
    case T::capital_word_frequency: {
      const ComparisonMode mode = count_mode();
      return ConstraintSpec::count(t, mode, rng.uniform(mode == ComparisonMode::less_than ? 2 : 1, 5));
    }
    case T::include_keyword:
    case T::exclude_keyword: return ConstraintSpec::text(t, keyword());
    case T::end_phrase: return ConstraintSpec::text(t, std::string(kEndPhrases[rng.index(kEndPhrases.size())]));
    case T::fixed_responses: return ConstraintSpec::text(t, std::string(kOptionSets[rng.index(kOptionSets.size())]));
    case T::language_restriction:
      return ConstraintSpec::text(t, std::string(kSupportedLanguages[rng.index(kSupportedLanguages.size())]));
    case T::postscript:
    case T::json_format:
    case T::title_format:
    case T::quoted_response:
    case T::no_commas:
    case T::all_capital:
    case T::all_lowercase: return ConstraintSpec::flag(t);
    case T::topic:
    case T::sentiment: break;
  }
  throw MissingTemplate("no parameter sampler for " + std::string(type_id(t)));
}

// Exactly `level` specs of distinct types, pairwise non-conflicting.
inline std::vector<ConstraintSpec> sample_constraints(int level, Rng& rng, const SamplingOptions& opts = {}) {
  if (level < kMinLevel || level > kMaxLevel) throw InvalidSpec("level must be in 1..6");
  static const TopicLexicon fallback = lexicon_for_seed("");
  const TopicLexicon& lexicon = opts.lexicon ? *opts.lexicon : fallback;
  std::vector<ConstraintType> pool = opts.allowed_types.empty() ? format_types() : opts.allowed_types;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    rng.shuffle(pool);
    std::vector<ConstraintSpec> chosen;
    for (ConstraintType t : pool) {
      if (static_cast<int>(chosen.size()) == level) break;
      ConstraintSpec candidate = sample_parameters(t, rng, lexicon);
      bool ok = true;
      for (const auto& c : chosen) {
        if (conflicts(c, candidate)) {
          ok = false;
          break;
        }
      }
      if (ok) chosen.push_back(std::move(candidate));
    }
    if (static_cast<int>(chosen.size()) == level) return chosen;
  }
  throw InvalidSpec("could not sample " + std::to_string(level) + " non-conflicting constraints from the allowed types");
}

namespace detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace detail

inline std::string fill_template(std::string_view tmpl, const ConstraintSpec& spec) {
  std::string out(tmpl);
  const std::string text = spec.text_param.value_or("");
  detail::replace_all(out, "{n}", std::to_string(spec.int_param.value_or(0)));
  detail::replace_all(out, "{relation}", mode_phrase(spec.comparison));
  detail::replace_all(out, "{keyword}", text);
  detail::replace_all(out, "{letter}", text);
  detail::replace_all(out, "{phrase}", text);
  detail::replace_all(out, "{language}", std::string(language_name(text)));
  if (out.find("{options}") != std::string::npos) {
    std::string opts;
    const auto list = split_options(text);
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) opts += ", ";
      opts += "\"" + list[i] + "\"";
    }
    detail::replace_all(out, "{options}", "(" + opts + ")");
  }
  return out;
}

// Seed rewritten, then one randomly chosen phrasing per constraint.
inline Instruction render_instruction(std::string_view seed, const std::vector<ConstraintSpec>& specs, Rng& rng,
                                      std::string id = {}) {
  Instruction out;
  out.id = std::move(id);
  out.seed = std::string(seed);
  out.level = static_cast<int>(specs.size());
  out.ground_truth = specs;
  out.text = rewrite_seed(text::trim(seed));
  if (specs.empty()) return out;
  if (!out.text.empty()) {
    const char last = out.text.back();
    if (last != '.' && last != '!' && last != '?' && last != ':') out.text.push_back('.');
  }
  for (const auto& spec : specs) {
    const auto templates = templates_for(spec.type);
    if (templates.empty()) throw MissingTemplate("no phrasing for " + std::string(type_id(spec.type)));
    const auto& chosen = templates[rng.index(templates.size())];
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += fill_template(chosen.text, spec);
  }
  return out;
}

// Problems with an instruction's ground truth; empty when valid.
inline std::vector<std::string> validate_instruction(const Instruction& in) {
  std::vector<std::string> problems;
  if (in.level < kMinLevel || in.level > kMaxLevel) problems.push_back("level out of range");
  if (static_cast<int>(in.ground_truth.size()) != in.level) {
    problems.push_back("ground_truth size " + std::to_string(in.ground_truth.size()) + " != level " +
                       std::to_string(in.level));
  }
  for (std::size_t i = 0; i < in.ground_truth.size(); ++i) {
    if (auto p = spec_problem(in.ground_truth[i]); !p.empty()) problems.push_back(p);
    for (std::size_t j = i + 1; j < in.ground_truth.size(); ++j) {
      if (conflicts(in.ground_truth[i], in.ground_truth[j])) {
        problems.push_back("conflict between " + std::string(type_id(in.ground_truth[i].type)) + " and " +
                           std::string(type_id(in.ground_truth[j].type)));
      }
    }
  }
  return problems;
}

struct SynthConfig {
  std::vector<std::string> seeds;
  int per_level = 1000;
  std::uint64_t rng_seed = 0;
  std::vector<int> levels{1, 2, 3, 4, 5, 6};
  std::vector<ConstraintType> allowed_types;
};

inline std::vector<std::string> read_seeds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot read seeds file " + path.string());
  std::vector<std::string> seeds;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = text::trim(line);
    if (!t.empty()) seeds.emplace_back(t);
  }
  return seeds;
}

inline std::vector<Instruction> build_dataset(const SynthConfig& cfg) {
  if (cfg.seeds.empty()) throw IOFailure("no seed instructions available");
  Rng rng(cfg.rng_seed);
  std::vector<Instruction> out;
  out.reserve(cfg.levels.size() * static_cast<std::size_t>(std::max(cfg.per_level, 0)));
  for (int level : cfg.levels) {
    for (int i = 0; i < cfg.per_level; ++i) {
      const std::string& seed = cfg.seeds[rng.index(cfg.seeds.size())];
      SamplingOptions opts;
      opts.allowed_types = cfg.allowed_types;
      opts.lexicon = &lexicon_for_seed(seed);
      const auto specs = sample_constraints(level, rng, opts);
      char id[32];
      std::snprintf(id, sizeof id, "L%d-%04d", level, i);
      out.push_back(render_instruction(seed, specs, rng, id));
    }
  }
  return out;
}

inline std::string to_jsonl(const std::vector<Instruction>& dataset) {
  std::string out;
  for (const auto& in : dataset) {
    out += nlohmann::ordered_json(in).dump();
    out += '\n';
  }
  return out;
}

inline void write_dataset(const std::vector<Instruction>& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write dataset " + path.string());
  out << to_jsonl(dataset);
  if (!out) throw IOFailure("write failed for " + path.string());
}

inline std::vector<Instruction> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot read dataset " + path.string());
  std::vector<Instruction> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<Instruction>());
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace dvr
