#pragma once

// Deterministic stand-in chat model for strategy comparisons. It answers the
// decomposition, selection and parameter prompts correctly, writes responses
// that deliberately break some constraints, and repairs them with a
// probability that grows with how informative the feedback is.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dvr/constraint.hpp"
#include "dvr/gateway.hpp"
#include "dvr/prompts.hpp"
#include "dvr/random.hpp"
#include "dvr/synth.hpp"
#include "dvr/verifiers.hpp"

namespace dvr {

// Constraint types the composer can satisfy or break on demand.
inline const std::vector<ConstraintType>& composable_types() {
  using T = ConstraintType;
  static const std::vector<ConstraintType> types{
      T::postscript,     T::placeholder,  T::include_keyword,   T::exclude_keyword,  T::keyword_frequency,
      T::sentence_count, T::word_count,   T::separator_paragraphs, T::bullet_points, T::highlighted,
      T::title_format,   T::quoted_response, T::end_phrase,     T::no_commas,        T::all_capital,
      T::all_lowercase,  T::capital_word_frequency};
  return types;
}

// Builds a response in which every constraint outside `broken` holds and,
// where the layout allows, every constraint in `broken` fails.
class ResponseComposer {
 public:
  std::string compose(const std::vector<ConstraintSpec>& specs, const std::vector<bool>& broken) const {
    std::string fallback;
    std::string partial;
    for (int pad = 0; pad <= kMaxPad; ++pad) {
      std::string candidate = build(specs, broken, pad);
      if (candidate.empty()) continue;
      if (fallback.empty()) fallback = candidate;
      bool kept = true;
      bool all_broken = true;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        const bool ok = verify(instantiate(specs[i]), candidate).satisfied;
        if (!broken[i] && !ok) kept = false;
        if (broken[i] && ok) all_broken = false;
      }
      if (!kept) continue;
      if (all_broken) return candidate;
      if (partial.empty()) partial = candidate;
    }
    return partial.empty() ? fallback : partial;
  }

 private:
  static constexpr int kMaxPad = 60;

  static const std::vector<std::string_view>& filler() {
    static const std::vector<std::string_view> lines{
        "Every morning brings a quiet chance to begin again.",
        "Small steps often lead to lasting progress.",
        "Friends remember the details that felt honest.",
        "A calm mind notices more than a busy one.",
        "Good plans leave room for surprise.",
        "Patience turns effort into results.",
        "The afternoon light makes the street feel warm.",
        "Clear goals help us spend our time well.",
    };
    return lines;
  }

  static std::string ordinal(int i) {
    static const std::array<std::string_view, 12> words{"one", "two",   "three", "four",   "five",   "six",
                                                        "seven", "eight", "nine", "ten", "eleven", "twelve"};
    return i < static_cast<int>(words.size()) ? std::string(words[static_cast<std::size_t>(i)]) : std::to_string(i + 1);
  }

  static std::string build(const std::vector<ConstraintSpec>& specs, const std::vector<bool>& broken, int pad) {
    using T = ConstraintType;
    const auto find = [&](T t) -> std::pair<const ConstraintSpec*, bool> {
      for (std::size_t i = 0; i < specs.size(); ++i) {
        if (specs[i].type == t) return {&specs[i], broken[i]};
      }
      return {nullptr, false};
    };
    const auto want = [&](T t) { auto [s, b] = find(t); return s != nullptr && !b; };
    const auto breaks = [&](T t) { auto [s, b] = find(t); return s != nullptr && b; };
    const auto param = [&](T t) { return find(t).first->int_param.value_or(0); };
    const auto word = [&](T t) { return find(t).first->text_param.value_or(""); };

    std::vector<std::string> sentences;
    for (int i = 0; i < pad; ++i) sentences.emplace_back(filler()[static_cast<std::size_t>(i) % filler().size()]);

    if (want(T::include_keyword)) sentences.push_back("I keep thinking about " + word(T::include_keyword) + ".");
    if (breaks(T::exclude_keyword)) sentences.push_back("Nobody can ignore " + word(T::exclude_keyword) + " here.");
    if (auto [s, b] = find(T::keyword_frequency); s != nullptr) {
      const bool at_least = s->comparison == ComparisonMode::at_least;
      const std::int64_t n = at_least != b ? param(T::keyword_frequency) : 0;
      for (std::int64_t i = 0; i < n; ++i) sentences.push_back("Think of " + word(T::keyword_frequency) + " again.");
    }
    if (auto [s, b] = find(T::capital_word_frequency); s != nullptr) {
      const bool at_least = s->comparison == ComparisonMode::at_least;
      const std::int64_t n = at_least != b ? param(T::capital_word_frequency) : 0;
      for (std::int64_t i = 0; i < n; ++i) sentences.push_back("This is VITAL.");
    }
    if (want(T::placeholder)) {
      std::string s = "Write to";
      for (std::int64_t i = 0; i < param(T::placeholder); ++i) s += (i ? " and [name" : " [name") + std::to_string(i + 1) + "]";
      sentences.push_back(s + ".");
    }
    if (want(T::highlighted)) {
      for (std::int64_t i = 0; i < param(T::highlighted); ++i) {
        sentences.push_back("Note the *key point " + ordinal(static_cast<int>(i)) + "* here.");
      }
    }
    if (breaks(T::no_commas)) sentences.push_back("Still, the day went well.");

    std::vector<std::string> bullets;
    if (find(T::bullet_points).first != nullptr) {
      const std::int64_t n = param(T::bullet_points) + (breaks(T::bullet_points) ? 1 : 0);
      for (std::int64_t i = 0; i < n; ++i) bullets.push_back("* Item " + ordinal(static_cast<int>(i)) + ".");
    }

    if (sentences.empty() && bullets.empty()) sentences.emplace_back(filler()[0]);

    std::size_t paragraphs = 1;
    if (want(T::separator_paragraphs)) paragraphs = static_cast<std::size_t>(param(T::separator_paragraphs));
    if (paragraphs > sentences.size() + (bullets.empty() ? 0 : 1)) return {};

    // Bullets form the first block; sentences fill the rest.
    std::vector<std::string> blocks;
    std::size_t sentence_blocks = paragraphs;
    if (!bullets.empty()) {
      std::string b;
      for (const auto& line : bullets) b += (b.empty() ? "" : "\n") + line;
      blocks.push_back(b);
      if (paragraphs > 1) --sentence_blocks;
      else sentence_blocks = 0;
    }
    if (sentence_blocks == 0 && !sentences.empty()) {
      // Single paragraph holding bullets and text.
      std::string tail;
      for (const auto& s : sentences) tail += (tail.empty() ? "" : " ") + s;
      blocks.back() += "\n" + tail;
    } else if (sentence_blocks > 0) {
      if (sentences.size() < sentence_blocks) return {};
      for (std::size_t k = 0; k < sentence_blocks; ++k) {
        const std::size_t from = k * sentences.size() / sentence_blocks;
        const std::size_t to = (k + 1) * sentences.size() / sentence_blocks;
        std::string block;
        for (std::size_t i = from; i < to; ++i) block += (block.empty() ? "" : " ") + sentences[i];
        blocks.push_back(block);
      }
    }

    std::string body;
    for (std::size_t i = 0; i < blocks.size(); ++i) body += (i ? "\n***\n" : "") + blocks[i];
    if (want(T::postscript)) body += "\n\nP.S. See you soon.";
    if (want(T::end_phrase)) body += "\n\n" + word(T::end_phrase);
    if (want(T::title_format)) body = "<<A Short Note>>\n\n" + body;

    if (want(T::all_lowercase)) {
      for (auto& c : body) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (want(T::all_capital)) {
      for (auto& c : body) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (want(T::quoted_response)) body = "\"" + body + "\"";
    return body;
  }
};

struct MockProfile {
  double break_rate = 0.4;       // chance each constraint starts out broken
  double repair_detailed = 0.95;  // feedback names the constraint and the fix
  double repair_named = 0.55;     // feedback names the constraint only
  double repair_boolean = 0.3;    // feedback says only that something is wrong
  double repair_reflect = 0.2;    // the model's own reflection
  double side_break = 0.1;        // a repair breaks another constraint
};

// Answers every prompt the orchestrator sends, for instructions of a known
// dataset. Thread-safe; outputs depend only on prompt text, the seed and the
// number of generation and refinement requests made so far for the same
// instruction.
class ImprovingMockModel final : public ChatModel {
 public:
  ImprovingMockModel(const std::vector<Instruction>& dataset, std::uint64_t seed, MockProfile profile = {})
      : seed_(seed), profile_(profile) {
    for (const auto& in : dataset) {
      by_text_[in.text] = in.ground_truth;
      for (const auto& spec : in.ground_truth) {
        if (!is_content_type(spec.type)) by_sentence_[constraint_sentence(spec)] = spec;
      }
    }
  }

  // The sentence this model uses for a constraint when decomposing.
  static std::string constraint_sentence(const ConstraintSpec& spec) {
    std::string s = fill_template(templates_for(spec.type).front().text, spec);
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  }

  std::string model_name() const override { return "improving-mock"; }

  ChatReply chat(const ChatRequest& request) override {
    check_request(request);
    const std::string& prompt = request.messages.back().content;
    return ChatReply{answer(prompt), "stop"};
  }

 private:
  static std::string between(std::string_view text, std::string_view open, std::string_view close) {
    const std::size_t a = text.rfind(open);
    if (a == std::string_view::npos) return {};
    const std::size_t start = a + open.size();
    const std::size_t b = text.find(close, start);
    return std::string(text.substr(start, (b == std::string_view::npos ? text.size() : b) - start));
  }

  std::string answer(const std::string& prompt) {
    if (prompt.starts_with(kGenerateHeader)) return generate(between(prompt, "#Prompt: ", "\n\nResponse:"));
    if (prompt.starts_with(kDecomposeHeader)) {
      const auto it = by_text_.find(between(prompt, "Instruction:\n\n", "\n\nFormat Constraints:"));
      if (it == by_text_.end()) return "There are no format constraints.";
      std::vector<std::string> items;
      for (const auto& spec : it->second) {
        if (!is_content_type(spec.type)) items.push_back(constraint_sentence(spec));
      }
      return format_decomposition(items);
    }
    if (prompt.starts_with(kSelectHeader)) {
      const auto it = by_sentence_.find(between(prompt, "Prompt: ", "\n\nCategory:"));
      if (it == by_sentence_.end()) return "unknown";
      return it->second.type == ConstraintType::json_format ? "JSON format" : std::string(category_phrase(it->second.type));
    }
    if (prompt.starts_with(kFillHeader)) {
      const auto it = by_sentence_.find(between(prompt, "Constraint: ", "\nCategory:"));
      return it == by_sentence_.end() ? "Unknown()" : display_name(it->second);
    }
    if (prompt.starts_with(kReflectHeader)) {
      return "I reviewed the response against the prompt. Some requirements may still be unmet, so the formatting "
             "should be revised.";
    }
    if (prompt.starts_with(kRefineHeader)) return refine(prompt);
    return "I am not sure how to help with that.";
  }

  std::string generate(const std::string& instruction) {
    const auto it = by_text_.find(instruction);
    if (it == by_text_.end()) return "I am not sure how to help with that.";
    std::uint64_t attempt;
    {
      std::lock_guard lock(mu_);
      attempt = generations_[instruction]++;
    }
    Rng rng(mix_seed(seed_, stable_hash(instruction) ^ (attempt * 0x9E3779B97F4A7C15ULL)));
    std::vector<bool> broken(it->second.size());
    for (std::size_t i = 0; i < broken.size(); ++i) broken[i] = rng.chance(profile_.break_rate);
    return composer_.compose(it->second, broken);
  }

  std::string refine(const std::string& prompt) {
    const std::size_t block = prompt.rfind("#Prompt: ");
    const std::string_view last = std::string_view(prompt).substr(block == std::string::npos ? 0 : block);
    const std::string instruction = between(last, "#Prompt: ", "\n\n#Original Response: ");
    const std::string response = between(last, "#Original Response: ", "\n\n#It does not satisfy the constraint: ");
    const std::string constraint = between(last, "#It does not satisfy the constraint: ", "\n\n#Analysis: ");
    const std::string feedback = between(last, "#Analysis: ", "\n\n#Modified Response:");
    const auto it = by_text_.find(instruction);
    if (it == by_text_.end()) return response;
    const auto& specs = it->second;

    std::vector<bool> broken(specs.size());
    std::vector<std::size_t> broken_idx;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      broken[i] = !verify(instantiate(specs[i]), response).satisfied;
      if (broken[i]) broken_idx.push_back(i);
    }
    std::uint64_t attempt;
    {
      std::lock_guard lock(mu_);
      attempt = refinements_[instruction]++;
    }
    Rng rng(mix_seed(seed_ ^ (attempt * 0xD1B54A32D192ED03ULL),
                     stable_hash(instruction + '\x1f' + response + '\x1f' + constraint + '\x1f' + feedback)));

    std::optional<std::size_t> target;
    double p = 0.0;
    if (feedback == kBooleanFeedback || constraint == kSelfReviewConstraint) {
      p = constraint == kSelfReviewConstraint ? profile_.repair_reflect : profile_.repair_boolean;
      if (!broken_idx.empty()) target = broken_idx[rng.index(broken_idx.size())];
    } else {
      p = feedback == kNamedOnlyFeedback ? profile_.repair_named : profile_.repair_detailed;
      if (const auto s = by_sentence_.find(constraint); s != by_sentence_.end()) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
          if (specs[i] == s->second) target = i;
        }
      }
    }
    if (target && rng.chance(p)) broken[*target] = false;
    if (rng.chance(profile_.side_break)) {
      std::vector<std::size_t> intact;
      for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!broken[i] && (!target || i != *target)) intact.push_back(i);
      }
      if (!intact.empty()) broken[intact[rng.index(intact.size())]] = true;
    }
    return composer_.compose(specs, broken);
  }

  std::uint64_t seed_;
  MockProfile profile_;
  ResponseComposer composer_;
  std::unordered_map<std::string, std::vector<ConstraintSpec>> by_text_;
  std::unordered_map<std::string, ConstraintSpec> by_sentence_;
  std::mutex mu_;
  std::unordered_map<std::string, std::uint64_t> generations_;
  std::unordered_map<std::string, std::uint64_t> refinements_;
};

// True when, for every subset of constraints marked broken, the composer
// still satisfies all the others.
inline bool composable(const std::vector<ConstraintSpec>& specs) {
  const ResponseComposer composer;
  const std::size_t n = specs.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<bool> broken(n);
    for (std::size_t i = 0; i < n; ++i) broken[i] = (mask >> i) & 1u;
    const std::string response = composer.compose(specs, broken);
    for (std::size_t i = 0; i < n; ++i) {
      if (!broken[i] && !verify(instantiate(specs[i]), response).satisfied) return false;
    }
  }
  return true;
}

// Instructions over the composable types, levels cycling 1..6, each checked
// with composable().
inline std::vector<Instruction> build_mock_fixture(std::size_t count, std::uint64_t seed,
                                                   const std::vector<std::string>& seeds) {
  if (seeds.empty()) throw IOFailure("no seed instructions available");
  Rng rng(seed);
  std::vector<Instruction> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > count * 200) throw InvalidSpec("could not assemble a composable fixture");
    const int level = static_cast<int>(out.size() % kMaxLevel) + 1;
    const std::string& s = seeds[rng.index(seeds.size())];
    SamplingOptions opts;
    opts.allowed_types = composable_types();
    opts.lexicon = &lexicon_for_seed(s);
    auto specs = sample_constraints(level, rng, opts);
    if (!composable(specs)) continue;
    char id[32];
    std::snprintf(id, sizeof id, "M%d-%04zu", level, out.size());
    Instruction in = render_instruction(s, specs, rng, id);
    bool duplicate = false;
    for (const auto& prev : out) duplicate = duplicate || prev.text == in.text;
    if (!duplicate) out.push_back(std::move(in));
  }
  return out;
}

}  // namespace dvr
