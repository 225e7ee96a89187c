#pragma once

// Prompt templates for generation, decomposition, tool selection, parameter
// filling, refinement and self-reflection, with their built-in demonstrations.

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dvr/constraint.hpp"
#include "dvr/error.hpp"

namespace dvr {

enum class PromptId { generate, decompose, select, fill, refine, reflect };

inline std::string_view prompt_name(PromptId id) {
  switch (id) {
    case PromptId::generate: return "generate";
    case PromptId::decompose: return "decompose";
    case PromptId::select: return "select";
    case PromptId::fill: return "fill";
    case PromptId::refine: return "refine";
    case PromptId::reflect: return "reflect";
  }
  return "?";
}

// One worked refinement: prompt, original response, the violated constraint,
// the analysis, and the fixed response.
struct RefineExample {
  std::string instruction;
  std::string response_before;
  std::string constraint;
  std::string feedback;
  std::string response_after;
};

using Slots = std::map<std::string, std::string, std::less<>>;

inline constexpr std::size_t kGenerateDemoCount = 5;
inline constexpr std::size_t kRefineExampleLimit = 8;

// First lines of each prompt; the mock model keys on these.
inline constexpr std::string_view kGenerateHeader =
    "You are an AI assistant that generates responses based on given prompts.";
inline constexpr std::string_view kDecomposeHeader =
    "You are an advanced assistant specializing in identifying and listing output constraints from provided "
    "instructions.";
inline constexpr std::string_view kSelectHeader =
    "You will be given a list of constraints. Each constraint belongs to a specific category.";
inline constexpr std::string_view kFillHeader =
    "You will be given a constraint and its category. Write the verification tool call for it.";
inline constexpr std::string_view kRefineHeader =
    "You are an AI assistant responsible for refining a given response.";
inline constexpr std::string_view kReflectHeader =
    "You are an AI assistant that reviews its own responses.";

// Fixed refine-slot texts for strategies that do not pass detailed feedback.
inline constexpr std::string_view kUnnamedConstraint = "One or more constraints in the prompt.";
inline constexpr std::string_view kBooleanFeedback =
    "The response does not satisfy all constraints in the prompt. Please revise it.";
inline constexpr std::string_view kNamedOnlyFeedback = "The response does not satisfy this constraint. Please revise it.";
inline constexpr std::string_view kSelfReviewConstraint = "Requirements identified in the reflection.";

struct GenerateDemo {
  std::string_view prompt;
  std::string_view response;
};

inline const std::array<GenerateDemo, kGenerateDemoCount>& generate_demos() {
  static const std::array<GenerateDemo, kGenerateDemoCount> demos{{
      {"Generate a text that touch on arts. make sure the response has less than 40 words. make sure it contains at "
       "least 2 placeholders represented by square brackets, such as [name]. Include a title wrapped in double "
       "angular brackets, i.e. <<title>>.",
       "<<The Beauty of Expression>>\n\nArt, from [name]'s perspective, transforms emotions into visual narratives. "
       "[another name]'s masterpieces illustrate this beautifully."},
      {"Generate sth. about celebrity or pop culture. the response must contain a title wrapped in double angular "
       "brackets, i.e. <<title>>. The answer should be in all lowercase letters, with no capitalizations. The word "
       "\"entertainment\" should not appear in your response. In your entire response, the letter m should appear at "
       "least 3 times. Your answer must have at least 2 placeholders, wrapped in square brackets, such as [author].",
       "<<moments of fame>>\n\nfame can arrive in a single moment for someone like [artist]. many fans remember the "
       "summer when [author] became a household name and the magazines followed every move."},
      {"Write a text about food. Your response should contain exactly 3 bullet points in markdown format. Use * to "
       "indicate bullets. There should be no commas in your reply.",
       "* Fresh bread tastes best on the day it is baked.\n* Spices bring warmth to simple dishes.\n* Shared meals "
       "turn strangers into friends."},
      {"Describe a trip to the mountains. Wrap your entire response with double quotation marks. Make sure to include "
       "the word 'journey'.",
       "\"The journey began before sunrise. Cold air filled our lungs as the trail climbed above the clouds and the "
       "valley slowly disappeared behind us.\""},
      {"Share a thought about technology. Your entire response should be in all capital letters. The very end of "
       "your entire response should read exactly like: Any other questions?",
       "TECHNOLOGY SHAPES HOW WE WORK AND LEARN. SMALL TOOLS CAN CHANGE DAILY HABITS IN A FEW MONTHS. ANY OTHER "
       "QUESTIONS?"},
  }};
  return demos;
}

struct DecomposeDemo {
  std::string_view instruction;
  std::array<std::string_view, 4> constraints;
};

inline const std::array<DecomposeDemo, 2>& decompose_demos() {
  static const std::array<DecomposeDemo, 2> demos{{
      {"Please generate a few lines of text that touch on the topic of tv. Put your entire answer in JSON format. The "
       "word 'show' should not appear in your response. Use square brackets for placeholders, like [username1], "
       "[username2]. Please include at least 2 placeholders in the thread.You are not allowed to use any commas in "
       "your response.",
       {"Put your entire answer in JSON format.", "The word 'show' should not appear in your response.",
        "Use square brackets for placeholders, like [username1], [username2]. Please include at least 2 placeholders "
        "in the thread.",
        "You are not allowed to use any commas in your response."}},
      {"Write a text about sports. Answer with less than 82 words. Highlight at least 3 text sections, i.e. "
       "*highlighted section*. Finish your response with this exact phrase: Any other questions? Your entire "
       "response should be in English, no other language is allowed.",
       {"Answer with less than 82 words.", "Highlight at least 3 text sections, i.e. *highlighted section*.",
        "Finish your response with this exact phrase: Any other questions?",
        "Your entire response should be in English, no other language is allowed."}},
  }};
  return demos;
}

struct SelectDemo {
  std::string_view constraint;
  std::string_view category;
};

inline const std::array<SelectDemo, 6>& select_demos() {
  static const std::array<SelectDemo, 6> demos{{
      {"Make sure to include the word 'mutations'.", "include keyword"},
      {"Limit the number of words you use to fewer than 65 words.", "word count constraint"},
      {"There should be exactly 2 paragraphs in your response, separated by the markdown divider: ***.",
       "*** separator"},
      {"Add stress words which are capitalized. Ensure those stress words appear less than 4 times.",
       "capital word frequency"},
      {"In your entire response, the letter m should appear at least 3 times.", "letter frequency"},
      {"At the end of your response, please explicitly add a postscript starting with P.S.", "postscript"},
  }};
  return demos;
}

// Fallback demonstrations used when the repository has nothing for a type.
inline const std::array<RefineExample, 5>& fallback_refine_examples() {
  static const std::array<RefineExample, 5> examples{{
      {"I'm looking for text that explores arts or culture, can you assist? please explicitly add a note starting "
       "with P.S. There should be exactly 2 paragraphs in your response, separated by the markdown divider: ***. "
       "Make sure to include at least 2 placeholder represented by square brackets, such as [address], [name]. "
       "Highlight at least 2 text sections, i.e. *highlighted section*. There should be no commas in your reply.",
       "Art has the power to bring people together and transcend cultural boundaries. It can evoke emotions and "
       "spark conversations that might not be possible through other means. *At the [address] museum, visitors can "
       "experience this firsthand by exploring the diverse collection of art from around the world.*\n\n*** From "
       "paintings to sculptures to installations, each piece tells a unique story that can be interpreted in many "
       "ways. *The work of [name] is a great example of this, as it challenges viewers to think critically about the "
       "world around them.* Whether you're an art enthusiast or just looking for a new perspective, the [address] "
       "museum is a must-visit destination. P.S. Don't forget to check out the museum's events calendar for upcoming "
       "exhibitions and performances!",
       "There should be no commas in your reply.",
       "The response contains 4 comma(s). Here are the detected commas: ( museum, visitors) (tallations, each ) ( of "
       "this, as it ) (perspective, the [address).\n\nPlease remove all commas.",
       "Art has the power to bring people together and transcend cultural boundaries. It can evoke emotions and "
       "spark conversations that might not be possible through other means. *At the [address] museum visitors can "
       "experience this firsthand by exploring the diverse collection of art from around the world.*\n\n*** From "
       "paintings to sculptures to installations each piece tells a unique story that can be interpreted in many "
       "ways. *The work of [name] is a great example of this as it challenges viewers to think critically about the "
       "world around them.* Whether you're an art enthusiast or just looking for a new perspective the [address] "
       "museum is a must-visit destination. P.S. Don't forget to check out the museum's events calendar for upcoming "
       "exhibitions and performances!"},
      {"Write a text about healthy habits. Your answer must contain exactly 4 bullet points in Markdown.",
       "* Sleep at least seven hours.\n* Drink water through the day.",
       "Your answer must contain exactly 4 bullet points in Markdown.",
       "The response only contains 2 bullet points. 2 more bullet points should be added.",
       "* Sleep at least seven hours.\n* Drink water through the day.\n* Walk for twenty minutes after lunch.\n* "
       "Keep a regular time for meals."},
      {"Describe a river at dawn. Answer with less than 30 words.",
       "The river wakes slowly at dawn. Mist rises from the water while herons stand still in the shallows and the "
       "first boats drift past the sleeping houses along the quiet bank toward the bridge.",
       "Answer with less than 30 words.",
       "The response contains 34 words, but it should contain less than 30. At least 5 words should be removed.",
       "The river wakes slowly at dawn. Mist rises from the water while herons stand still in the shallows and the "
       "first boats drift past sleeping houses."},
      {"Write about a favourite book. Your answer must have a title contained in double angular brackets, such as "
       "<<title>>.",
       "My favourite book follows a family across three generations and shows how small choices echo for decades.",
       "Your answer must have a title contained in double angular brackets, such as <<title>>.",
       "The response does not contain a title. Please add a title wrapped in double angular brackets, such as "
       "<<title>>.",
       "<<Echoes Across Generations>>\n\nMy favourite book follows a family across three generations and shows how "
       "small choices echo for decades."},
      {"Write a text about the ocean. Make sure to include the word 'tides'.",
       "The ocean covers most of the planet and holds countless forms of life.",
       "Make sure to include the word 'tides'.",
       "The response does not contain the keyword \"tides\". Please include the keyword \"tides\" in the response.",
       "The ocean covers most of the planet and holds countless forms of life. Its tides follow the pull of the "
       "moon."},
  }};
  return examples;
}

// Tool call signatures listed in the parameter-filling prompt.
inline std::string_view tool_signature(ConstraintType t) {
  switch (traits(t).shape) {
    case ParamShape::none: return "()";
    case ParamShape::text: return "(\"text\")";
    case ParamShape::count: return "(\"at least\" | \"less than\", number)";
    case ParamShape::exact: return "(number)";
    case ParamShape::text_count: return "(\"text\", \"at least\" | \"less than\", number)";
    case ParamShape::options: return "(\"option 1\", \"option 2\", ...)";
  }
  return "()";
}

namespace detail {

inline const std::string& slot(const Slots& slots, std::string_view name) {
  const auto it = slots.find(name);
  if (it == slots.end()) throw MissingSlot("missing prompt slot {" + std::string(name) + "}");
  return it->second;
}

inline std::string category_list() {
  std::string out;
  for (ConstraintType t : format_types()) {
    if (!out.empty()) out += ", ";
    out += t == ConstraintType::json_format ? std::string("JSON format") : std::string(category_phrase(t));
  }
  return out;
}

inline void append_refine_block(std::string& out, const RefineExample& ex, bool complete) {
  out += "#Prompt: " + ex.instruction + "\n\n";
  out += "#Original Response: " + ex.response_before + "\n\n";
  out += "#It does not satisfy the constraint: " + ex.constraint + "\n\n";
  out += "#Analysis: " + ex.feedback + "\n\n";
  out += "#Modified Response: ";
  if (complete) out += ex.response_after + "\n\n";
}

}  // namespace detail

// Slots per prompt:
//   generate  {instruction}
//   decompose {instruction}
//   select    {constraint}
//   fill      {constraint} {category}
//   refine    {instruction} {response} {constraint} {feedback}
//   reflect   {instruction} {response}
// `examples` feeds the refine prompt; empty selects the fallback set.
inline std::string render_prompt(PromptId id, const Slots& slots, const std::vector<RefineExample>& examples = {}) {
  std::string out;
  switch (id) {
    case PromptId::generate: {
      const std::string& instruction = detail::slot(slots, "instruction");
      out += std::string(kGenerateHeader) +
             "\nFor each prompt, provide a response that adheres to the specified constraints.\n\n";
      for (const auto& demo : generate_demos()) {
        out += "#Prompt: " + std::string(demo.prompt) + "\n\nResponse: " + std::string(demo.response) + "\n\n";
      }
      out += "#Prompt: " + instruction + "\n\nResponse:";
      break;
    }
    case PromptId::decompose: {
      const std::string& instruction = detail::slot(slots, "instruction");
      out += std::string(kDecomposeHeader) +
             " The instructions typically include a task related to generating content on a specific topic and one "
             "(or multiple) format constraint(s). Your goal is to focus only on extracting and listing all the format "
             "constraints required for the output, ignoring the content-related task.\n\n";
      for (const auto& demo : decompose_demos()) {
        out += "Instruction:\n\n" + std::string(demo.instruction) + "\n\nFormat Constraints:\n\n";
        for (std::size_t i = 0; i < demo.constraints.size(); ++i) {
          out += "#" + std::to_string(i + 1) + ". " + std::string(demo.constraints[i]) + "\n\n";
        }
      }
      out += "Instruction:\n\n" + instruction + "\n\nFormat Constraints:";
      break;
    }
    case PromptId::select: {
      const std::string& constraint = detail::slot(slots, "constraint");
      out += std::string(kSelectHeader) +
             " Your task is to recognize and categorize each constraint. Only output the category from the "
             "following options:\n\n" +
             detail::category_list() +
             "\n\nPlease ensure to categorize each constraint accurately according to its description. There is "
             "definitely a valid category option for each constraint. Here are examples for each type of "
             "constraint:\n\n";
      for (const auto& demo : select_demos()) {
        out += "Prompt: " + std::string(demo.constraint) + "\n\nCategory: " + std::string(demo.category) + "\n\n";
      }
      out += "Prompt: " + constraint + "\n\nCategory:";
      break;
    }
    case PromptId::fill: {
      const std::string& constraint = detail::slot(slots, "constraint");
      const std::string& category = detail::slot(slots, "category");
      const ConstraintType t = canonical_category(category);
      out += std::string(kFillHeader) + " Output only the call, with no explanation.\n\n";
      out += "Example:\nConstraint: Your answer must contain exactly 4 bullet points in Markdown.\nCategory: bullet "
             "points\nTool: Bullet_points(4)\n\n";
      out += "Example:\nConstraint: Answer with less than 82 words.\nCategory: word count constraint\nTool: "
             "Word_count(\"less than\", 82)\n\n";
      out += "Tool signature: " + std::string(traits(t).alias) + std::string(tool_signature(t)) + "\n\n";
      out += "Constraint: " + constraint + "\nCategory: " + category + "\nTool:";
      break;
    }
    case PromptId::refine: {
      const RefineExample current{detail::slot(slots, "instruction"), detail::slot(slots, "response"),
                                  detail::slot(slots, "constraint"), detail::slot(slots, "feedback"), ""};
      out += std::string(kRefineHeader) +
             " Given a prompt, its original response, and the analysis of the response, your task is to modify the "
             "response according to the analysis.\n\n";
      if (examples.empty()) {
        for (const auto& ex : fallback_refine_examples()) detail::append_refine_block(out, ex, true);
      } else {
        const std::size_t n = std::min(examples.size(), kRefineExampleLimit);
        for (std::size_t i = 0; i < n; ++i) detail::append_refine_block(out, examples[i], true);
      }
      detail::append_refine_block(out, current, false);
      while (!out.empty() && out.back() == ' ') out.pop_back();
      break;
    }
    case PromptId::reflect: {
      const std::string& instruction = detail::slot(slots, "instruction");
      const std::string& response = detail::slot(slots, "response");
      out += std::string(kReflectHeader) +
             " Read the prompt and your response, decide whether every requirement of the prompt is met, and "
             "describe what should be changed.\n\n";
      out += "#Prompt: " + instruction + "\n\n#Response: " + response + "\n\n#Reflection:";
      break;
    }
  }
  return out;
}

// Extracts "#<n>." lines in order, markers stripped. Empty when none found.
inline std::vector<std::string> parse_decomposition(std::string_view reply) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= reply.size()) {
    std::size_t end = reply.find('\n', pos);
    if (end == std::string_view::npos) end = reply.size();
    std::string_view line = detail::trim_view(reply.substr(pos, end - pos));
    if (line.size() >= 3 && line[0] == '#') {
      std::size_t i = 1;
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (i > 1 && i < line.size() && line[i] == '.') {
        const std::string_view body = detail::trim_view(line.substr(i + 1));
        if (!body.empty()) out.emplace_back(body);
      }
    }
    pos = end + 1;
  }
  return out;
}

inline std::string format_decomposition(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += "\n";
    out += "#" + std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

// Strips markdown code fences and surrounding whitespace from model output.
inline std::string strip_fences(std::string_view reply) {
  std::string_view s = detail::trim_view(reply);
  if (s.substr(0, 3) == "```") {
    const std::size_t nl = s.find('\n');
    s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
    const std::size_t close = s.rfind("```");
    if (close != std::string_view::npos) s = s.substr(0, close);
  }
  return std::string(detail::trim_view(s));
}

// First line of a category reply, with fences and a "Category:" prefix removed.
inline ConstraintType parse_category_reply(std::string_view reply) {
  std::string s = strip_fences(reply);
  const std::size_t nl = s.find('\n');
  if (nl != std::string::npos) s.resize(nl);
  std::string_view v = detail::trim_view(s);
  if (detail::ascii_lower(v.substr(0, 9)) == "category:") v = detail::trim_view(v.substr(9));
  return canonical_category(v);
}

// The tool call in a fill reply: first line that contains '(' after fences are removed.
inline std::string extract_tool_call(std::string_view reply) {
  const std::string s = strip_fences(reply);
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find('\n', pos);
    if (end == std::string::npos) end = s.size();
    std::string_view line = detail::trim_view(std::string_view(s).substr(pos, end - pos));
    if (detail::ascii_lower(line.substr(0, 5)) == "tool:") line = detail::trim_view(line.substr(5));
    if (line.find('(') != std::string_view::npos) return std::string(line);
    pos = end + 1;
  }
  return s;
}

}  // namespace dvr
