#pragma once

// The verifier tools: a ToolInstance binds a ConstraintSpec to its checker,
// verify() produces a Verdict, and unsatisfied verdicts carry directional
// feedback (what is wrong, by how much, and how to change it).

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dvr/constraint.hpp"
#include "dvr/content.hpp"
#include "dvr/error.hpp"
#include "dvr/language.hpp"
#include "dvr/text.hpp"

namespace dvr {

struct ToolInstance {
  ConstraintSpec spec;
  std::string display_name;

  friend bool operator==(const ToolInstance&, const ToolInstance&) = default;
};

struct Feedback {
  ConstraintSpec constraint;
  std::string error_description;
  std::string direction;
  std::vector<text::Span> evidence;
  // When set, evidence is listed after the error, e.g. "Here are the detected commas:".
  std::string evidence_label;
};

using Observed = std::variant<std::monostate, std::int64_t, std::string>;

struct Verdict {
  bool satisfied = true;
  Observed observed;
  std::optional<Feedback> feedback;
};

// Checker configuration. Null pointers fall back to the built-in detector;
// content tools need a classifier.
struct VerifyContext {
  const LanguageDetector* language = nullptr;
  ContentClassifier* classifier = nullptr;
  bool letter_case_sensitive = false;
  bool accept_pps = true;
};

namespace detail {

inline std::string quote_arg(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

// Surface form of a tool, e.g. Bullet_points(4) or Word_count("less than", 40).
inline std::string display_name(const ConstraintSpec& spec) {
  const TypeTraits& tr = traits(spec.type);
  std::string out(tr.alias);
  out += '(';
  switch (tr.shape) {
    case ParamShape::none:
      break;
    case ParamShape::text:
      out += detail::quote_arg(spec.text_param.value_or(""));
      break;
    case ParamShape::count:
      out += detail::quote_arg(mode_phrase(spec.comparison)) + ", " + std::to_string(spec.int_param.value_or(0));
      break;
    case ParamShape::exact:
      out += std::to_string(spec.int_param.value_or(0));
      break;
    case ParamShape::text_count:
      out += detail::quote_arg(spec.text_param.value_or("")) + ", " + detail::quote_arg(mode_phrase(spec.comparison)) +
             ", " + std::to_string(spec.int_param.value_or(0));
      break;
    case ParamShape::options: {
      const auto opts = split_options(spec.text_param.value_or(""));
      for (std::size_t i = 0; i < opts.size(); ++i) {
        if (i) out += ", ";
        out += detail::quote_arg(opts[i]);
      }
      break;
    }
  }
  out += ')';
  return out;
}

inline ToolInstance instantiate(const ConstraintSpec& spec) {
  validate(spec);
  return ToolInstance{spec, display_name(spec)};
}

namespace detail {

struct Arg {
  bool quoted = false;
  std::string text;

  std::optional<std::int64_t> as_int() const {
    const std::string_view t = trim_view(text);
    if (t.empty()) return std::nullopt;
    std::size_t i = (t[0] == '+') ? 1 : 0;
    if (i >= t.size()) return std::nullopt;
    std::int64_t v = 0;
    for (; i < t.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return std::nullopt;
      v = v * 10 + (t[i] - '0');
      if (v > 1'000'000'000) return std::nullopt;
    }
    return v;
  }
};

struct CallExpr {
  std::string name;
  std::vector<Arg> args;
};

inline CallExpr lex_call(std::string_view input) {
  const std::string_view s = trim_view(input);
  std::size_t i = 0;
  const auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < s.size() && ident_char(s[i])) ++i;
  if (i == 0 || std::isdigit(static_cast<unsigned char>(s[0]))) {
    throw ParseError("expected a tool name in '" + std::string(input) + "'");
  }
  CallExpr call;
  call.name = std::string(s.substr(0, i));
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i >= s.size() || s[i] != '(') throw ParseError("expected '(' after tool name in '" + std::string(input) + "'");
  ++i;
  const auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_ws();
  if (i < s.size() && s[i] == ')') {
    ++i;
  } else {
    while (true) {
      skip_ws();
      if (i >= s.size()) throw ParseError("unterminated argument list in '" + std::string(input) + "'");
      Arg arg;
      if (s[i] == '"' || s[i] == '\'') {
        const char q = s[i++];
        arg.quoted = true;
        bool closed = false;
        while (i < s.size()) {
          const char c = s[i++];
          if (c == '\\' && i < s.size()) {
            arg.text.push_back(s[i++]);
          } else if (c == q) {
            closed = true;
            break;
          } else {
            arg.text.push_back(c);
          }
        }
        if (!closed) throw ParseError("unterminated string in '" + std::string(input) + "'");
        skip_ws();
      } else {
        const std::size_t start = i;
        while (i < s.size() && s[i] != ',' && s[i] != ')' && s[i] != '"' && s[i] != '\'' && s[i] != '(') ++i;
        arg.text = std::string(trim_view(s.substr(start, i - start)));
        if (arg.text.empty()) throw ParseError("empty argument in '" + std::string(input) + "'");
      }
      call.args.push_back(std::move(arg));
      if (i >= s.size()) throw ParseError("unterminated argument list in '" + std::string(input) + "'");
      if (s[i] == ',') {
        ++i;
        continue;
      }
      if (s[i] == ')') {
        ++i;
        break;
      }
      throw ParseError("unexpected character '" + std::string(1, s[i]) + "' in '" + std::string(input) + "'");
    }
  }
  if (!trim_view(s.substr(i)).empty()) throw ParseError("trailing text after tool expression '" + std::string(input) + "'");
  return call;
}

inline void expect_arity(const CallExpr& call, std::size_t n) {
  if (call.args.size() != n) {
    throw ArityError(call.name + " expects " + std::to_string(n) + " argument(s), got " +
                     std::to_string(call.args.size()));
  }
}

// (mode, n) in either order.
inline std::pair<ComparisonMode, std::int64_t> mode_and_count(const CallExpr& call, const Arg& a, const Arg& b) {
  for (const auto& [m, n] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
    const auto mode = mode_from_string(m->text);
    const auto count = n->as_int();
    if (mode && count && !m->as_int()) {
      if (*mode != ComparisonMode::at_least && *mode != ComparisonMode::less_than) {
        throw ParseError(call.name + ": comparison must be 'at least' or 'less than'");
      }
      return {*mode, *count};
    }
  }
  throw ParseError(call.name + ": expected a comparison and a count");
}

}  // namespace detail

// Parses call-style tool expressions such as Bullet_points(4),
// Keywords("risk-taking") or Capitalwords("less than", 4). Tool names are
// matched case-insensitively against the surface aliases.
inline ToolInstance parse_tool_expression(std::string_view expression) {
  const detail::CallExpr call = detail::lex_call(expression);
  const std::string name = detail::ascii_lower(call.name);

  std::optional<ConstraintType> type;
  for (const auto& t : kTypeTraits) {
    if (detail::ascii_lower(t.alias) == name || t.id == name) {
      type = t.type;
      break;
    }
  }
  if (!type) throw ParseError("unknown tool '" + call.name + "'");
  // Keywords(word, mode, n) is the frequency form.
  if (*type == ConstraintType::include_keyword && call.args.size() == 3) type = ConstraintType::keyword_frequency;

  ConstraintSpec spec;
  spec.type = *type;
  switch (traits(*type).shape) {
    case ParamShape::none:
      detail::expect_arity(call, 0);
      spec = ConstraintSpec::flag(*type);
      break;
    case ParamShape::text:
      detail::expect_arity(call, 1);
      spec = ConstraintSpec::text(*type, call.args[0].text);
      break;
    case ParamShape::count: {
      detail::expect_arity(call, 2);
      const auto [mode, n] = detail::mode_and_count(call, call.args[0], call.args[1]);
      spec = ConstraintSpec::count(*type, mode, n);
      break;
    }
    case ParamShape::exact: {
      if (call.args.empty() || call.args.size() > 2) detail::expect_arity(call, 1);
      std::optional<std::int64_t> n;
      if (call.args.size() == 1) {
        n = call.args[0].as_int();
      } else {
        const auto m0 = mode_from_string(call.args[0].text);
        const auto m1 = mode_from_string(call.args[1].text);
        if (m0 == ComparisonMode::exactly) n = call.args[1].as_int();
        if (m1 == ComparisonMode::exactly) n = call.args[0].as_int();
      }
      if (!n) throw ParseError(call.name + ": expected an integer count");
      spec = ConstraintSpec::exact(*type, *n);
      break;
    }
    case ParamShape::text_count: {
      detail::expect_arity(call, 3);
      const auto [mode, n] = detail::mode_and_count(call, call.args[1], call.args[2]);
      spec = ConstraintSpec::text_count(*type, call.args[0].text, mode, n);
      break;
    }
    case ParamShape::options: {
      if (call.args.size() < 2) {
        throw ArityError(call.name + " expects at least 2 arguments, got " + std::to_string(call.args.size()));
      }
      std::vector<std::string> opts;
      for (const auto& a : call.args) opts.push_back(a.text);
      spec = ConstraintSpec::text(*type, join_options(opts));
      break;
    }
  }
  if (auto problem = spec_problem(spec); !problem.empty()) throw ParseError(problem);
  return ToolInstance{spec, display_name(spec)};
}

namespace detail {

inline bool compare(ComparisonMode mode, std::int64_t observed, std::int64_t required) {
  switch (mode) {
    case ComparisonMode::at_least: return observed >= required;
    case ComparisonMode::less_than: return observed < required;
    case ComparisonMode::exactly: return observed == required;
    case ComparisonMode::none: return true;
  }
  return false;
}

inline Verdict pass(Observed observed = {}) { return Verdict{true, std::move(observed), std::nullopt}; }

inline Verdict fail(const ConstraintSpec& spec, Observed observed, std::string error, std::string direction,
                    std::vector<text::Span> evidence = {}, std::string label = {}) {
  return Verdict{false, std::move(observed),
                 Feedback{spec, std::move(error), std::move(direction), std::move(evidence), std::move(label)}};
}

// Shared wording for count constraints; noun is plural ("bullet points").
// `add` and `remove` finish the direction sentence.
inline Verdict count_verdict(const ConstraintSpec& spec, std::int64_t observed, std::string_view noun,
                             std::string_view add, std::string_view remove, std::vector<text::Span> evidence = {},
                             std::string label = {}) {
  const std::int64_t required = spec.int_param.value_or(0);
  if (compare(spec.comparison, observed, required)) return pass(observed);
  const std::string obs = std::to_string(observed);
  const std::string n(noun);
  if (observed < required) {
    const std::int64_t delta = required - observed;
    return fail(spec, observed, "The response only contains " + obs + " " + n + ".",
                std::to_string(delta) + " more " + n + " " + std::string(add), std::move(evidence), std::move(label));
  }
  const std::int64_t delta = spec.comparison == ComparisonMode::less_than ? observed - required + 1 : observed - required;
  const std::string qualifier = spec.comparison == ComparisonMode::less_than ? "At least " : "";
  std::string error = "The response contains " + obs + " " + n;
  error += spec.comparison == ComparisonMode::less_than ? ", but it should contain less than " + std::to_string(required) + "."
                                                        : ", but it should contain exactly " + std::to_string(required) + ".";
  return fail(spec, observed, std::move(error), qualifier + std::to_string(delta) + " " + n + " " + std::string(remove),
              std::move(evidence), std::move(label));
}

inline bool has_postscript(std::string_view text, bool accept_pps) {
  for (std::size_t p = 0; p < text.size(); ++p) {
    if (p > 0 && !text::detail::is_space(text[p - 1])) continue;
    const std::string_view rest = text.substr(p);
    if (rest.starts_with("P.S.")) return true;
    if (accept_pps && rest.starts_with("P.P.S.")) return true;
  }
  return false;
}

inline std::string quoted_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + items[i] + "\"";
  }
  return out;
}

inline Verdict verify_content(const ConstraintSpec& spec, std::string_view response, const VerifyContext& ctx) {
  if (ctx.classifier == nullptr) {
    throw UnsupportedType("no classifier configured for the " + std::string(type_id(spec.type)) + " tool");
  }
  const bool is_topic = spec.type == ConstraintType::topic;
  const std::string required = spec.text_param.value_or("");
  const std::string label = ctx.classifier->classify(is_topic ? ContentKind::topic : ContentKind::sentiment, response);
  if (ascii_lower(label) == ascii_lower(required)) return pass(label);
  if (is_topic) {
    return fail(spec, label,
                "The detected topic of the response is " + label + ", which does not match the expected topic " +
                    required + ".",
                "Please adjust the content to align more closely with the topic " + required + ".");
  }
  return fail(spec, label,
              "The sentiment of the text is '" + label + "', which does not match the required sentiment '" +
                  required + "'.",
              "Please adjust the sentiment of the text to be more '" + required + "'.");
}

}  // namespace detail

inline Verdict verify(const ToolInstance& tool, std::string_view response, const VerifyContext& ctx = {}) {
  using T = ConstraintType;
  using detail::count_verdict;
  using detail::fail;
  using detail::pass;
  const ConstraintSpec& spec = tool.spec;
  const std::string text_param = spec.text_param.value_or("");
  const std::int64_t required = spec.int_param.value_or(0);

  switch (spec.type) {
    case T::word_count:
      return count_verdict(spec, static_cast<std::int64_t>(text::count_words(response)), "words", "should be added.",
                           "should be removed.");
    case T::sentence_count:
      return count_verdict(spec, static_cast<std::int64_t>(text::split_sentences(response).size()), "sentences",
                           "should be added.", "should be removed.");
    case T::separator_paragraphs:
      return count_verdict(spec, static_cast<std::int64_t>(text::split_paragraphs(response).size()),
                           "paragraphs separated by ***",
                           "should be added, each separated from the previous one by a line containing only ***.",
                           "should be removed or merged.");
    case T::bullet_points:
      return count_verdict(spec, static_cast<std::int64_t>(text::parse_bullets(response).size()), "bullet points",
                           "should be added.", "should be removed.");
    case T::placeholder:
      return count_verdict(spec, static_cast<std::int64_t>(text::find_placeholders(response).size()),
                           "placeholders", "represented by square brackets, such as [name], should be added.",
                           "should be removed.");
    case T::highlighted:
      return count_verdict(spec, static_cast<std::int64_t>(text::find_highlights(response).size()),
                           "highlighted sections", "should be highlighted with markdown, i.e. *highlighted section*.",
                           "should be unhighlighted.");
    case T::capital_word_frequency: {
      auto words = text::find_capital_words(response);
      const auto n = static_cast<std::int64_t>(words.size());
      return count_verdict(spec, n, "words in all capital letters", "should be added.",
                           "should be rewritten in lowercase.", std::move(words), "Here are the capitalized words:");
    }
    case T::letter_frequency: {
      const char letter = text_param.empty() ? 'a' : text_param[0];
      const auto n = static_cast<std::int64_t>(text::count_letter(response, letter, ctx.letter_case_sensitive));
      return count_verdict(spec, n, "occurrences of the letter '" + text_param + "'", "should be added.",
                           "should be removed.");
    }
    case T::keyword_frequency: {
      auto hits = text::find_keyword(response, text_param);
      const auto n = static_cast<std::int64_t>(hits.size());
      return count_verdict(spec, n, "occurrences of the word \"" + text_param + "\"", "should be added.",
                           "should be removed.");
    }
    case T::include_keyword: {
      const auto n = static_cast<std::int64_t>(text::count_keyword(response, text_param));
      if (n >= 1) return pass(n);
      return fail(spec, n, "The response does not include the keyword \"" + text_param + "\".",
                  "The word \"" + text_param + "\" should be added to the response.");
    }
    case T::exclude_keyword: {
      std::vector<text::Span> evidence;
      for (const auto& hit : text::find_keyword(response, text_param)) {
        evidence.push_back(text::context_window(response, hit));
      }
      const auto n = static_cast<std::int64_t>(evidence.size());
      if (n == 0) return pass(n);
      return fail(spec, n,
                  "The response contains the forbidden word \"" + text_param + "\" " + std::to_string(n) + " time(s).",
                  "Please remove every occurrence of \"" + text_param + "\".", std::move(evidence),
                  "Here are the occurrences:");
    }
    case T::no_commas: {
      std::vector<text::Span> evidence;
      for (const auto& comma : text::find_commas(response)) {
        evidence.push_back(text::context_window(response, comma));
      }
      const auto n = static_cast<std::int64_t>(evidence.size());
      if (n == 0) return pass(n);
      return fail(spec, n, "The response contains " + std::to_string(n) + " comma(s).", "Please remove all commas.",
                  std::move(evidence), "Here are the detected commas:");
    }
    case T::title_format: {
      if (auto title = text::find_title(response)) return pass(title->text);
      return fail(spec, {}, "The response does not have a title wrapped in double angular brackets.",
                  "A title such as <<title>> should be added at the beginning of the response.");
    }
    case T::json_format: {
      if (nlohmann::json::accept(text::trim(response))) return pass();
      return fail(spec, {}, "The response is not valid JSON.",
                  "The entire response should be wrapped in a single JSON object with no text outside it.");
    }
    case T::quoted_response: {
      const std::string_view t = text::trim(response);
      if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return pass();
      return fail(spec, {}, "The response is not wrapped in double quotation marks.",
                  "A double quotation mark should be added at the very beginning and at the very end of the response.");
    }
    case T::end_phrase: {
      const std::string_view phrase = text::rtrim(text_param);
      if (text::rtrim(response).ends_with(phrase)) return pass();
      return fail(spec, {}, "The response does not end with the phrase \"" + std::string(phrase) + "\".",
                  "The response should end with exactly this phrase, with nothing after it: " + std::string(phrase));
    }
    case T::postscript: {
      if (detail::has_postscript(response, ctx.accept_pps)) return pass();
      return fail(spec, {}, "The response does not contain a postscript starting with P.S.",
                  "A postscript starting with P.S. should be added at the end of the response.");
    }
    case T::all_capital: {
      auto letters = text::find_case_letters(response, false);
      const auto n = static_cast<std::int64_t>(letters.size());
      if (n == 0) return pass(n);
      return fail(spec, n, "The response contains " + std::to_string(n) + " lowercase letter(s).",
                  "The entire response should be converted to capital letters.");
    }
    case T::all_lowercase: {
      auto letters = text::find_case_letters(response, true);
      const auto n = static_cast<std::int64_t>(letters.size());
      if (n == 0) return pass(n);
      return fail(spec, n, "The response contains " + std::to_string(n) + " capital letter(s).",
                  "The entire response should be converted to lowercase letters.");
    }
    case T::fixed_responses: {
      const auto options = split_options(text_param);
      const std::string_view t = text::trim(response);
      for (const auto& o : options) {
        if (t == o) return pass(o);
      }
      return fail(spec, {}, "The response is not one of the allowed options.",
                  "The response should be exactly one of the following: " + detail::quoted_list(options) + ".");
    }
    case T::language_restriction: {
      const LanguageDetector& detector = ctx.language ? *ctx.language : default_language_detector();
      const std::string code = detector.detect(response);
      if (code == text_param) return pass(code);
      const std::string want(language_name(text_param));
      std::string error = code == "und"
                              ? "The language of the response could not be identified as " + want + "."
                              : "The response is written in " + std::string(language_name(code)) +
                                    ", but it should be written in " + want + ".";
      return fail(spec, code, std::move(error), "The entire response should be rewritten in " + want + ".");
    }
    case T::topic:
    case T::sentiment:
      return detail::verify_content(spec, response, ctx);
  }
  (void)required;
  throw UnsupportedType("no checker registered for type id " + std::to_string(static_cast<int>(spec.type)));
}

// Runs every tool (no short-circuit); verdicts follow toolset order.
inline std::vector<Verdict> verify_all(const std::vector<ToolInstance>& toolset, std::string_view response,
                                       const VerifyContext& ctx = {}) {
  std::vector<Verdict> out;
  out.reserve(toolset.size());
  for (std::size_t i = 0; i < toolset.size(); ++i) {
    try {
      out.push_back(verify(toolset[i], response, ctx));
    } catch (const UnsupportedType& e) {
      throw UnsupportedType("tool " + std::to_string(i) + " (" + toolset[i].display_name + "): " + e.what(), i);
    }
  }
  return out;
}

inline std::string render_feedback(const Feedback& fb) {
  std::string out = fb.error_description;
  if (!fb.evidence_label.empty() && !fb.evidence.empty()) {
    out += " " + fb.evidence_label;
    for (const auto& span : fb.evidence) out += " (" + span.text + ")";
    out += ".";
  }
  out += " " + fb.direction;
  return out;
}

inline std::string render_feedback(const Verdict& verdict) {
  if (verdict.satisfied || !verdict.feedback) throw NotApplicable("render_feedback called on a satisfied verdict");
  return render_feedback(*verdict.feedback);
}

inline bool all_satisfied(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts) {
    if (!v.satisfied) return false;
  }
  return true;
}

inline std::size_t satisfied_count(const std::vector<Verdict>& verdicts) {
  std::size_t n = 0;
  for (const auto& v : verdicts) n += v.satisfied ? 1 : 0;
  return n;
}

}  // namespace dvr
