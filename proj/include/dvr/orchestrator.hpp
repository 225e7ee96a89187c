#pragma once

// The divide-verify-refine loop, the baseline strategies, and batch runs.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "dvr/constraint.hpp"
#include "dvr/error.hpp"
#include "dvr/gateway.hpp"
#include "dvr/prompts.hpp"
#include "dvr/random.hpp"
#include "dvr/repository.hpp"
#include "dvr/synth.hpp"
#include "dvr/verifiers.hpp"

namespace dvr {

enum class Strategy { vanilla, reflexion, rejection_sampling, boolean_feedback, which_constraint, dvr };

inline std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::vanilla: return "vanilla";
    case Strategy::reflexion: return "reflexion";
    case Strategy::rejection_sampling: return "rejection_sampling";
    case Strategy::boolean_feedback: return "boolean_feedback";
    case Strategy::which_constraint: return "which_constraint";
    case Strategy::dvr: return "dvr";
  }
  return "?";
}

struct RunConfig {
  Strategy strategy = Strategy::dvr;
  int trials = 5;
  bool detailed_feedback = true;
  bool use_repository = true;
  int few_shot_refine = static_cast<int>(kRefineExampleLimit);
  // Optional cap on refinement rounds per instruction, across resets.
  std::optional<int> max_rounds;
  std::string model;
  double temperature = kDefaultTemperature;
  int max_tokens = 1024;
  // Label used in results; defaults to the strategy name.
  std::string label;

  std::string display_label() const { return label.empty() ? std::string(strategy_name(strategy)) : label; }
};

// Accepts the six strategies plus the two loop ablations
// dvr_no_feedback and dvr_no_repository.
inline RunConfig config_for(std::string_view name, int trials = 5) {
  RunConfig c;
  c.trials = trials;
  std::string n = detail::fold_words(name);
  std::replace(n.begin(), n.end(), ' ', '_');
  c.label = n;
  if (n == "vanilla") {
    c.strategy = Strategy::vanilla;
  } else if (n == "reflexion") {
    c.strategy = Strategy::reflexion;
  } else if (n == "rejection_sampling") {
    c.strategy = Strategy::rejection_sampling;
  } else if (n == "boolean_feedback" || n == "react") {
    c.strategy = Strategy::boolean_feedback;
  } else if (n == "which_constraint" || n == "critic") {
    c.strategy = Strategy::which_constraint;
    c.detailed_feedback = false;
    c.use_repository = false;
  } else if (n == "dvr") {
    c.strategy = Strategy::dvr;
  } else if (n == "dvr_no_feedback") {
    c.strategy = Strategy::dvr;
    c.detailed_feedback = false;
  } else if (n == "dvr_no_repository") {
    c.strategy = Strategy::dvr;
    c.use_repository = false;
  } else {
    throw InvalidSpec("unknown strategy \"" + std::string(name) + "\"");
  }
  if (c.strategy != Strategy::dvr && c.strategy != Strategy::which_constraint) {
    c.detailed_feedback = false;
    c.use_repository = false;
  }
  return c;
}

struct TraceEvent {
  std::string event;  // generate | verify | refine | reflect | store | return
  int round = 0;
  int trials_left = 0;
  std::uint64_t text_hash = 0;
  std::optional<std::size_t> satisfied;  // for verify events
  std::string detail;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// One decomposed constraint and what tool selection made of it.
struct SelectionEntry {
  std::string constraint;
  std::string category_reply;
  std::optional<ToolInstance> tool;
  std::string error;  // non-empty when the constraint stays unverified

  friend bool operator==(const SelectionEntry&, const SelectionEntry&) = default;
};

struct RunResult {
  std::string id;
  int level = 0;
  std::string strategy;
  std::string final_response;
  std::vector<ConstraintSpec> ground_truth;
  std::vector<bool> verdicts;  // ground-truth tools on final_response
  bool satisfied_all = false;
  int llm_calls = 0;
  int refine_attempts = 0;
  int stored = 0;
  std::vector<TraceEvent> trace;
  std::vector<SelectionEntry> selection;
  std::optional<std::string> error;

  std::vector<ConstraintType> predicted_types() const {
    std::vector<ConstraintType> out;
    for (const auto& s : selection) {
      if (s.tool) out.push_back(s.tool->spec.type);
    }
    return out;
  }

  std::vector<std::string> trace_events() const {
    std::vector<std::string> out;
    for (const auto& e : trace) out.push_back(e.event);
    return out;
  }
};

// Everything a run needs besides the instruction and config.
struct RunContext {
  ChatModel* model = nullptr;
  RefinementRepository* repository = nullptr;
  VerifyContext verify;
  std::uint64_t seed = 0;
};

namespace detail {

class Session {
 public:
  Session(const RunContext& ctx, const RunConfig& cfg, RunResult& result) : ctx_(ctx), cfg_(cfg), result_(result) {}

  std::string ask(PromptId id, const Slots& slots, const std::vector<RefineExample>& examples = {}) {
    ChatRequest req = user_request(render_prompt(id, slots, examples), cfg_.model.empty() ? ctx_.model->model_name() : cfg_.model);
    req.temperature = cfg_.temperature;
    req.max_tokens = cfg_.max_tokens;
    ++result_.llm_calls;
    return ctx_.model->chat(req).content;
  }

  void event(std::string name, int round, int trials_left, std::string_view text,
             std::optional<std::size_t> satisfied = std::nullopt, std::string detail = {}) {
    result_.trace.push_back(
        TraceEvent{std::move(name), round, trials_left, stable_hash(text), satisfied, std::move(detail)});
  }

 private:
  const RunContext& ctx_;
  const RunConfig& cfg_;
  RunResult& result_;
};

inline std::vector<ToolInstance> tools_of(const std::vector<SelectionEntry>& selection) {
  std::vector<ToolInstance> out;
  for (const auto& s : selection) {
    if (s.tool) out.push_back(*s.tool);
  }
  return out;
}

inline const std::string& constraint_text_for(const std::vector<SelectionEntry>& selection, std::size_t tool_index) {
  std::size_t seen = 0;
  for (const auto& s : selection) {
    if (!s.tool) continue;
    if (seen++ == tool_index) return s.constraint;
  }
  throw std::out_of_range("tool index out of range");
}

inline std::size_t first_failure(const std::vector<Verdict>& verdicts) {
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (!verdicts[i].satisfied) return i;
  }
  return verdicts.size();
}

}  // namespace detail

// Decompose, select a category per constraint, then fill parameters.
// Constraints that cannot be mapped stay in the selection with an error.
inline std::vector<SelectionEntry> prepare_selection(const std::string& instruction, detail::Session& session) {
  std::vector<SelectionEntry> out;
  const auto constraints = parse_decomposition(session.ask(PromptId::decompose, {{"instruction", instruction}}));
  for (const auto& c : constraints) {
    SelectionEntry entry;
    entry.constraint = c;
    entry.category_reply = session.ask(PromptId::select, {{"constraint", c}});
    ConstraintType type;
    try {
      type = parse_category_reply(entry.category_reply);
    } catch (const UnknownCategory& e) {
      entry.error = e.what();
      out.push_back(std::move(entry));
      continue;
    }
    const std::string call = extract_tool_call(
        session.ask(PromptId::fill, {{"constraint", c}, {"category", std::string(category_phrase(type))}}));
    try {
      ToolInstance tool = parse_tool_expression(call);
      if (tool.spec.type != type) {
        entry.error = "tool " + tool.display_name + " does not match category " + std::string(category_phrase(type));
      } else {
        entry.tool = std::move(tool);
      }
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

inline std::vector<SelectionEntry> prepare_toolset(const std::string& instruction, const RunContext& ctx,
                                                   const RunConfig& cfg = {}) {
  RunResult scratch;
  detail::Session session(ctx, cfg, scratch);
  return prepare_selection(instruction, session);
}

namespace detail {

inline std::vector<bool> score(const std::vector<ConstraintSpec>& truth, const std::string& response,
                               const VerifyContext& ctx) {
  std::vector<ToolInstance> tools;
  for (const auto& s : truth) tools.push_back(instantiate(s));
  std::vector<bool> out;
  if (tools.empty()) return out;
  for (const auto& v : verify_all(tools, response, ctx)) out.push_back(v.satisfied);
  return out;
}

inline void run_dvr_loop(const Instruction& in, const RunContext& ctx, const RunConfig& cfg, RunResult& result,
                         Session& session, Rng& rng) {
  std::string response = session.ask(PromptId::generate, {{"instruction", in.text}});
  session.event("generate", 0, cfg.trials, response);
  result.selection = prepare_selection(in.text, session);
  const auto toolset = tools_of(result.selection);
  if (toolset.empty()) {
    result.final_response = response;
    session.event("return", 0, cfg.trials, response, std::nullopt, "toolset empty");
    return;
  }

  std::vector<Verdict> verdicts = verify_all(toolset, response, ctx.verify);
  session.event("verify", 0, cfg.trials, response, satisfied_count(verdicts));

  struct Adopted {
    std::string text;
    std::size_t satisfied;
  };
  std::vector<Adopted> adopted{{response, satisfied_count(verdicts)}};

  int trials_left = cfg.trials;
  int round = 0;
  while (true) {
    if (all_satisfied(verdicts)) {
      result.final_response = response;
      session.event("return", round, trials_left, response);
      return;
    }
    if (trials_left == 0 || (cfg.max_rounds && round >= *cfg.max_rounds)) break;
    --trials_left;
    ++round;

    const std::size_t target = first_failure(verdicts);
    const ToolInstance& tool = toolset[target];
    const std::string& constraint = constraint_text_for(result.selection, target);
    const std::string feedback =
        cfg.detailed_feedback ? render_feedback(verdicts[target]) : std::string(kNamedOnlyFeedback);
    std::vector<RefineExample> examples;
    if (cfg.use_repository && ctx.repository != nullptr) {
      for (const auto& r : ctx.repository->retrieve(tool.spec.type, static_cast<std::size_t>(cfg.few_shot_refine), rng)) {
        examples.push_back(to_example(r));
      }
    }
    const std::string refined = session.ask(
        PromptId::refine,
        {{"instruction", in.text}, {"response", response}, {"constraint", constraint}, {"feedback", feedback}},
        examples);
    ++result.refine_attempts;
    session.event("refine", round, trials_left, refined, std::nullopt, tool.display_name);

    std::vector<Verdict> next = verify_all(toolset, refined, ctx.verify);
    session.event("verify", round, trials_left, refined, satisfied_count(next));
    if (!next[target].satisfied) continue;

    if (cfg.use_repository && ctx.repository != nullptr) {
      ctx.repository->store(RefinementRecord{tool.spec.type, tool.spec, in.text, response, constraint, feedback,
                                             refined, now_epoch_seconds()});
      ++result.stored;
      session.event("store", round, trials_left, refined, std::nullopt, tool.display_name);
    }
    response = refined;
    verdicts = std::move(next);
    adopted.push_back({response, satisfied_count(verdicts)});
    trials_left = cfg.trials;
  }

  // Exhausted: most constraints satisfied under the selected toolset, ties to the latest.
  std::size_t best = 0;
  for (std::size_t i = 1; i < adopted.size(); ++i) {
    if (adopted[i].satisfied >= adopted[best].satisfied) best = i;
  }
  result.final_response = adopted[best].text;
  session.event("return", round, trials_left, result.final_response, std::nullopt, "trials exhausted");
}

inline void run_boolean_loop(const Instruction& in, const RunContext& ctx, const RunConfig& cfg, RunResult& result,
                             Session& session) {
  std::string response = session.ask(PromptId::generate, {{"instruction", in.text}});
  session.event("generate", 0, cfg.trials, response);
  result.selection = prepare_selection(in.text, session);
  const auto toolset = tools_of(result.selection);
  if (toolset.empty()) {
    result.final_response = response;
    session.event("return", 0, cfg.trials, response, std::nullopt, "toolset empty");
    return;
  }
  int round = 0;
  for (int trials_left = cfg.trials;; --trials_left) {
    const auto verdicts = verify_all(toolset, response, ctx.verify);
    session.event("verify", round, trials_left, response, satisfied_count(verdicts));
    if (all_satisfied(verdicts) || trials_left == 0 || (cfg.max_rounds && round >= *cfg.max_rounds)) break;
    ++round;
    response = session.ask(PromptId::refine, {{"instruction", in.text},
                                              {"response", response},
                                              {"constraint", std::string(kUnnamedConstraint)},
                                              {"feedback", std::string(kBooleanFeedback)}});
    ++result.refine_attempts;
    session.event("refine", round, trials_left - 1, response);
  }
  result.final_response = response;
  session.event("return", round, 0, response);
}

inline void run_reflexion(const Instruction& in, const RunConfig& cfg, RunResult& result, Session& session) {
  std::string response = session.ask(PromptId::generate, {{"instruction", in.text}});
  session.event("generate", 0, cfg.trials, response);
  const int rounds = cfg.max_rounds ? std::min(cfg.trials, *cfg.max_rounds) : cfg.trials;
  for (int round = 1; round <= rounds; ++round) {
    const std::string reflection = session.ask(PromptId::reflect, {{"instruction", in.text}, {"response", response}});
    session.event("reflect", round, cfg.trials - round, reflection);
    response = session.ask(PromptId::refine, {{"instruction", in.text},
                                              {"response", response},
                                              {"constraint", std::string(kSelfReviewConstraint)},
                                              {"feedback", reflection}});
    ++result.refine_attempts;
    session.event("refine", round, cfg.trials - round, response);
  }
  result.final_response = response;
  session.event("return", rounds, 0, response);
}

inline void run_rejection_sampling(const Instruction& in, const RunContext& ctx, const RunConfig& cfg,
                                   RunResult& result, Session& session) {
  std::vector<ToolInstance> toolset;
  std::string response;
  for (int attempt = 1; attempt <= cfg.trials; ++attempt) {
    response = session.ask(PromptId::generate, {{"instruction", in.text}});
    session.event("generate", attempt, cfg.trials - attempt, response);
    if (attempt == 1) {
      result.selection = prepare_selection(in.text, session);
      toolset = tools_of(result.selection);
      if (toolset.empty()) break;
    }
    const auto verdicts = verify_all(toolset, response, ctx.verify);
    session.event("verify", attempt, cfg.trials - attempt, response, satisfied_count(verdicts));
    if (all_satisfied(verdicts)) break;
  }
  result.final_response = response;
  session.event("return", 0, 0, response);
}

}  // namespace detail

inline RunResult run_instruction(const Instruction& in, const RunConfig& cfg, const RunContext& ctx) {
  if (ctx.model == nullptr) throw GatewayError("no chat model configured");
  RunResult result;
  result.id = in.id;
  result.level = in.level;
  result.strategy = cfg.display_label();
  result.ground_truth = in.ground_truth;
  Rng rng(mix_seed(ctx.seed, stable_hash(in.id)));
  detail::Session session(ctx, cfg, result);

  switch (cfg.strategy) {
    case Strategy::vanilla: {
      result.final_response = session.ask(PromptId::generate, {{"instruction", in.text}});
      session.event("generate", 0, cfg.trials, result.final_response);
      session.event("return", 0, cfg.trials, result.final_response);
      break;
    }
    case Strategy::reflexion: detail::run_reflexion(in, cfg, result, session); break;
    case Strategy::rejection_sampling: detail::run_rejection_sampling(in, ctx, cfg, result, session); break;
    case Strategy::boolean_feedback: detail::run_boolean_loop(in, ctx, cfg, result, session); break;
    case Strategy::which_constraint:
    case Strategy::dvr: detail::run_dvr_loop(in, ctx, cfg, result, session, rng); break;
  }

  result.verdicts = detail::score(in.ground_truth, result.final_response, ctx.verify);
  result.satisfied_all = std::all_of(result.verdicts.begin(), result.verdicts.end(), [](bool b) { return b; });
  return result;
}

// Runs every instruction; results keep dataset order. A failing run yields
// an entry with `error` set and the batch continues.
inline std::vector<RunResult> run_batch(const std::vector<Instruction>& dataset, const RunConfig& cfg,
                                        const RunContext& ctx, int parallelism = 1) {
  std::vector<RunResult> results(dataset.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < dataset.size(); i = next++) {
      try {
        results[i] = run_instruction(dataset[i], cfg, ctx);
      } catch (const std::exception& e) {
        RunResult failed;
        failed.id = dataset[i].id;
        failed.level = dataset[i].level;
        failed.strategy = cfg.display_label();
        failed.ground_truth = dataset[i].ground_truth;
        failed.verdicts.assign(dataset[i].ground_truth.size(), false);
        failed.error = e.what();
        results[i] = std::move(failed);
      }
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(dataset.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

// JSON forms for results files and trace streams.

inline nlohmann::ordered_json trace_event_json(const std::string& id, const TraceEvent& e) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(e.text_hash));
  nlohmann::ordered_json j;
  j["id"] = id;
  j["event"] = e.event;
  j["round"] = e.round;
  j["trials_left"] = e.trials_left;
  j["text_hash"] = hash;
  j["satisfied"] = e.satisfied ? nlohmann::ordered_json(*e.satisfied) : nlohmann::ordered_json(nullptr);
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

inline nlohmann::ordered_json to_json(const RunResult& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["level"] = r.level;
  j["strategy"] = r.strategy;
  j["final_response"] = r.final_response;
  j["ground_truth"] = nlohmann::ordered_json::array();
  for (const auto& s : r.ground_truth) j["ground_truth"].push_back(nlohmann::ordered_json(s));
  j["verdicts"] = r.verdicts;
  j["satisfied_all"] = r.satisfied_all;
  j["llm_calls"] = r.llm_calls;
  j["refine_attempts"] = r.refine_attempts;
  j["stored"] = r.stored;
  j["selection"] = nlohmann::ordered_json::array();
  for (const auto& s : r.selection) {
    nlohmann::ordered_json e;
    e["constraint"] = s.constraint;
    e["category_reply"] = s.category_reply;
    e["tool"] = s.tool ? nlohmann::ordered_json(s.tool->display_name) : nlohmann::ordered_json(nullptr);
    e["type"] = s.tool ? nlohmann::ordered_json(std::string(type_id(s.tool->spec.type))) : nlohmann::ordered_json(nullptr);
    if (!s.error.empty()) e["error"] = s.error;
    j["selection"].push_back(std::move(e));
  }
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& e : r.trace) {
    auto ej = trace_event_json(r.id, e);
    ej.erase("id");
    j["trace"].push_back(std::move(ej));
  }
  j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
  return j;
}

inline RunResult result_from_json(const nlohmann::json& j) {
  RunResult r;
  try {
    r.id = j.at("id").get<std::string>();
    r.level = j.value("level", 0);
    r.strategy = j.value("strategy", std::string{});
    r.final_response = j.value("final_response", std::string{});
    for (const auto& s : j.at("ground_truth")) r.ground_truth.push_back(s.get<ConstraintSpec>());
    r.verdicts = j.at("verdicts").get<std::vector<bool>>();
    if (r.verdicts.size() != r.ground_truth.size()) throw SchemaError("verdicts and ground_truth differ in length");
    r.satisfied_all = j.at("satisfied_all").get<bool>();
    r.llm_calls = j.value("llm_calls", 0);
    r.refine_attempts = j.value("refine_attempts", 0);
    r.stored = j.value("stored", 0);
    if (j.contains("selection")) {
      for (const auto& e : j["selection"]) {
        SelectionEntry s;
        s.constraint = e.value("constraint", std::string{});
        s.category_reply = e.value("category_reply", std::string{});
        s.error = e.value("error", std::string{});
        if (e.contains("tool") && e["tool"].is_string()) s.tool = parse_tool_expression(e["tool"].get<std::string>());
        r.selection.push_back(std::move(s));
      }
    }
    if (j.contains("trace")) {
      for (const auto& e : j["trace"]) {
        TraceEvent t;
        t.event = e.value("event", std::string{});
        t.round = e.value("round", 0);
        t.trials_left = e.value("trials_left", 0);
        t.text_hash = std::stoull(e.value("text_hash", std::string("0")), nullptr, 16);
        if (e.contains("satisfied") && !e["satisfied"].is_null()) t.satisfied = e["satisfied"].get<std::size_t>();
        t.detail = e.value("detail", std::string{});
        r.trace.push_back(std::move(t));
      }
    }
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed result: ") + e.what());
  }
  return r;
}

inline void write_results(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write results " + path.string());
  for (const auto& r : results) out << to_json(r).dump() << '\n';
  if (!out) throw IOFailure("write failed for " + path.string());
}

inline void write_trace(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOFailure("cannot write trace " + path.string());
  for (const auto& r : results) {
    for (const auto& e : r.trace) out << trace_event_json(r.id, e).dump() << '\n';
  }
}

inline std::vector<RunResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot read results " + path.string());
  std::vector<RunResult> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace dvr
