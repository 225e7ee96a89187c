// dvr: synthesize datasets, verify responses, run strategies, evaluate
// results and manage refinement repositories.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dvr/dvr.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dvr::IOFailure("cannot read " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// SPEC is a JSON file (array of spec objects or tool expressions) or an
// inline list of tool expressions separated by ';'.
std::vector<dvr::ToolInstance> parse_constraints(const std::string& spec) {
  std::vector<dvr::ToolInstance> tools;
  if (fs::is_regular_file(spec)) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(spec));
    } catch (const nlohmann::json::exception& e) {
      throw dvr::SchemaError(spec + ": " + e.what());
    }
    if (j.is_object() && j.contains("ground_truth")) j = j["ground_truth"];
    if (!j.is_array()) throw dvr::SchemaError(spec + ": expected a JSON array of constraints");
    for (const auto& item : j) {
      if (item.is_string()) {
        tools.push_back(dvr::parse_tool_expression(item.get<std::string>()));
      } else {
        tools.push_back(dvr::instantiate(item.get<dvr::ConstraintSpec>()));
      }
    }
    return tools;
  }
  std::string current;
  bool quoted = false;
  bool escaped = false;
  const auto flush = [&] {
    const auto t = dvr::text::trim(current);
    if (!t.empty()) tools.push_back(dvr::parse_tool_expression(t));
    current.clear();
  };
  for (char c : spec) {
    if (escaped) {
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == ';' && !quoted) {
      flush();
      continue;
    }
    current.push_back(c);
  }
  flush();
  if (tools.empty()) throw dvr::ParseError("no constraints given");
  return tools;
}

struct Environment {
  dvr::GatewayConfig config;
  std::unique_ptr<dvr::HttpClassifierClient> classifier;

  explicit Environment(const std::string& config_path) {
    if (!config_path.empty()) config = dvr::load_gateway_config(config_path);
    dvr::apply_environment(config);
    if (!config.classifier_url.empty()) classifier = std::make_unique<dvr::HttpClassifierClient>(config);
  }

  dvr::VerifyContext verify_context() const {
    dvr::VerifyContext ctx;
    ctx.classifier = classifier.get();
    return ctx;
  }
};

int cmd_synth(const std::string& seeds_path, int per_level, std::uint64_t seed, const std::string& out,
              const std::vector<int>& levels) {
  dvr::SynthConfig cfg;
  cfg.seeds = dvr::read_seeds(seeds_path);
  cfg.per_level = per_level;
  cfg.rng_seed = seed;
  if (!levels.empty()) cfg.levels = levels;
  const auto dataset = dvr::build_dataset(cfg);
  for (const auto& in : dataset) {
    if (const auto problems = dvr::validate_instruction(in); !problems.empty()) {
      throw dvr::InvalidSpec(in.id + ": " + problems.front());
    }
  }
  dvr::write_dataset(dataset, out);
  std::cout << "wrote " << dataset.size() << " instructions to " << out << "\n";
  return 0;
}

int cmd_verify(const std::string& constraints, const std::string& response_path, bool as_json) {
  const Environment env("");
  const auto tools = parse_constraints(constraints);
  const std::string response = read_file(response_path);
  const auto verdicts = dvr::verify_all(tools, response, env.verify_context());
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < tools.size(); ++i) {
    const auto& v = verdicts[i];
    if (as_json) {
      nlohmann::ordered_json j;
      j["tool"] = tools[i].display_name;
      j["satisfied"] = v.satisfied;
      if (const auto* n = std::get_if<std::int64_t>(&v.observed)) j["observed"] = *n;
      if (const auto* s = std::get_if<std::string>(&v.observed)) j["observed"] = *s;
      j["feedback"] = v.satisfied ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(dvr::render_feedback(v));
      out.push_back(std::move(j));
    } else {
      std::cout << (v.satisfied ? "PASS " : "FAIL ") << tools[i].display_name << "\n";
      if (!v.satisfied) std::cout << "  " << dvr::render_feedback(v) << "\n";
    }
  }
  if (as_json) std::cout << out.dump(2) << "\n";
  return dvr::all_satisfied(verdicts) ? 0 : 1;
}

struct RunArgs {
  std::string dataset;
  std::string strategy = "dvr";
  std::string config;
  std::string out;
  int parallel = 1;
  std::uint64_t seed = 0;
  std::string repository;
  std::string mock;
  std::string trace;
};

int cmd_run(const RunArgs& a) {
  const auto dataset = dvr::read_dataset(a.dataset);
  Environment env(a.config);
  dvr::RunConfig cfg = dvr::config_for(a.strategy, env.config.max_trials);
  cfg.temperature = env.config.temperature;
  cfg.max_tokens = env.config.max_tokens;
  cfg.few_shot_refine = env.config.few_shot_refine;
  cfg.max_rounds = env.config.max_rounds;

  std::unique_ptr<dvr::ChatModel> model;
  if (a.mock == "improving") {
    model = std::make_unique<dvr::ImprovingMockModel>(dataset, a.seed);
  } else if (a.mock.rfind("script:", 0) == 0) {
    const auto j = nlohmann::json::parse(read_file(a.mock.substr(7)));
    model = std::make_unique<dvr::ScriptedChatModel>(j.get<std::vector<std::string>>());
  } else if (!a.mock.empty()) {
    throw CLI::ValidationError("--mock", "expected improving or script:FILE");
  } else {
    model = std::make_unique<dvr::HttpChatModel>(env.config);
    cfg.model = env.config.model;
  }

  dvr::RefinementRepository repo;
  fs::path repo_path;
  if (!a.repository.empty()) {
    repo_path = a.repository;
    if (fs::is_directory(repo_path) || a.repository.back() == '/') repo_path = dvr::RefinementRepository::path_for_model(repo_path, model->model_name());
    const auto report = repo.load(repo_path, env.verify_context());
    for (const auto& p : report.problems) std::cerr << "repository: skipped " << p << "\n";
    std::cerr << "repository: loaded " << report.loaded << " record(s) from " << repo_path.string() << "\n";
  }

  dvr::RunContext ctx{model.get(), &repo, env.verify_context(), a.seed};
  const auto results = dvr::run_batch(dataset, cfg, ctx, a.parallel);
  dvr::write_results(results, a.out);
  if (!a.trace.empty()) dvr::write_trace(results, a.trace);
  if (!repo_path.empty() && cfg.use_repository) repo.save(repo_path);

  std::size_t errors = 0;
  for (const auto& r : results) errors += r.error ? 1 : 0;
  std::cout << "ran " << results.size() << " instruction(s) with " << cfg.display_label() << ": ISR "
            << dvr::isr(results) << ", " << errors << " error(s)\n";
  return errors == results.size() && !results.empty() ? 1 : 0;
}

// Truth sets keyed by id, from a dataset JSONL or lines of {"id","types":[...]}.
std::map<std::string, dvr::TypeSet> read_truth(const std::string& path) {
  std::map<std::string, dvr::TypeSet> out;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (dvr::text::trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    dvr::TypeSet set;
    if (j.contains("types")) {
      for (const auto& t : j["types"]) {
        const auto type = dvr::type_from_id(t.get<std::string>());
        if (!type) throw dvr::SchemaError("unknown type " + t.get<std::string>());
        set.insert(*type);
      }
    } else {
      for (const auto& s : j.at("ground_truth")) set.insert(s.get<dvr::ConstraintSpec>().type);
    }
    out[j.at("id").get<std::string>()] = std::move(set);
  }
  return out;
}

int cmd_eval(const std::vector<std::string>& files, const std::string& truth_path, const std::string& format,
             bool macro, const std::string& out_path) {
  std::map<std::string, dvr::TypeSet> truth;
  if (!truth_path.empty()) truth = read_truth(truth_path);
  std::vector<dvr::EvalReport> reports;
  for (const auto& f : files) {
    const auto results = dvr::read_results(f);
    std::vector<dvr::TypeSet> expected;
    if (!truth_path.empty()) {
      for (const auto& r : results) {
        const auto it = truth.find(r.id);
        if (it == truth.end()) throw dvr::SchemaError("no truth selection for " + r.id);
        expected.push_back(it->second);
      }
    }
    reports.push_back(dvr::evaluate(results, {}, truth_path.empty() ? nullptr : &expected,
                                    macro ? dvr::Averaging::macro : dvr::Averaging::micro));
  }
  const std::string text =
      dvr::render_report(reports, format == "json" ? dvr::ReportFormat::json : dvr::ReportFormat::table);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out_path, std::ios::binary) << text;
  }
  return 0;
}

int cmd_repo_stats(const std::string& path) {
  dvr::RefinementRepository repo;
  const auto report = repo.load(path);
  std::cout << "records: " << repo.size() << "\n";
  for (auto t : dvr::all_types()) {
    if (const auto n = repo.size(t); n > 0) std::cout << "  " << dvr::type_id(t) << ": " << n << "\n";
  }
  if (!report.problems.empty()) std::cout << "skipped: " << report.problems.size() << "\n";
  return 0;
}

int cmd_repo_validate(const std::string& path) {
  if (!fs::exists(path)) throw dvr::IOFailure("no repository at " + path);
  dvr::RefinementRepository repo;
  const auto report = repo.load(path);
  for (const auto& p : report.problems) std::cout << p << "\n";
  std::cout << report.loaded << " valid, " << report.problems.size() << " invalid\n";
  return report.problems.empty() ? 0 : 1;
}

int cmd_repo_merge(const std::vector<std::string>& inputs, const std::string& out) {
  dvr::RefinementRepository repo;
  for (const auto& in : inputs) {
    const auto report = repo.load(in);
    for (const auto& p : report.problems) std::cerr << "skipped " << p << "\n";
  }
  repo.save(out);
  std::cout << "merged " << repo.size() << " record(s) into " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divide-verify-refine toolkit for multi-constraint instructions"};
  app.require_subcommand(1);

  std::string seeds_path, synth_out;
  int per_level = 1000;
  std::uint64_t synth_seed = 0;
  std::vector<int> levels;
  auto* synth = app.add_subcommand("synth", "Build a multi-constraint instruction dataset");
  synth->add_option("--seeds", seeds_path, "Seed instructions, one per line")->required()->check(CLI::ExistingFile);
  synth->add_option("--per-level", per_level, "Instructions per level")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--levels", levels, "Levels to build (default 1..6)")->check(CLI::Range(1, 6));
  synth->add_option("--out", synth_out, "Output JSONL file")->required();

  std::string constraints, response_path;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "Check a response against constraints");
  verify->add_option("--constraints", constraints, "Tool expressions separated by ';', or a JSON file")->required();
  verify->add_option("--response", response_path, "Response file ('-' for stdin)")->required();
  verify->add_flag("--json", verify_json, "Print verdicts as JSON");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a strategy over a dataset");
  run->add_option("--dataset", run_args.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy", run_args.strategy,
                  "vanilla, reflexion, rejection_sampling, boolean_feedback, which_constraint, dvr, "
                  "dvr_no_feedback or dvr_no_repository");
  run->add_option("--config", run_args.config, "JSON config file")->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Results JSONL")->required();
  run->add_option("--parallel", run_args.parallel, "Concurrent instructions")->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "Root random seed");
  run->add_option("--repository", run_args.repository, "Repository JSONL file or directory (keyed by model)");
  run->add_option("--mock", run_args.mock, "improving or script:FILE instead of a live endpoint");
  run->add_option("--trace", run_args.trace, "Trace JSONL output");

  std::vector<std::string> result_files;
  std::string truth_path, eval_format = "table", eval_out;
  bool macro = false;
  auto* eval = app.add_subcommand("eval", "Summarize results");
  eval->add_option("--results", result_files, "Results JSONL file(s)")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth-selection", truth_path, "Dataset or {id,types} JSONL for selection truth")
      ->check(CLI::ExistingFile);
  eval->add_option("--format", eval_format, "table or json")->check(CLI::IsMember({"table", "json"}));
  eval->add_flag("--macro", macro, "Macro-average selection precision/recall/F1");
  eval->add_option("--out", eval_out, "Write the report to a file");

  auto* repo = app.add_subcommand("repo", "Inspect or combine refinement repositories");
  repo->require_subcommand(1);
  std::string repo_path, merge_out;
  std::vector<std::string> merge_inputs;
  auto* stats = repo->add_subcommand("stats", "Record counts per type");
  stats->add_option("path", repo_path, "Repository JSONL")->required();
  auto* validate = repo->add_subcommand("validate", "Re-verify every record");
  validate->add_option("path", repo_path, "Repository JSONL")->required();
  auto* merge = repo->add_subcommand("merge", "Merge repositories");
  merge->add_option("inputs", merge_inputs, "Input JSONL files")->required();
  merge->add_option("--out", merge_out, "Output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return cmd_synth(seeds_path, per_level, synth_seed, synth_out, levels);
    if (*verify) return cmd_verify(constraints, response_path, verify_json);
    if (*run) return cmd_run(run_args);
    if (*eval) return cmd_eval(result_files, truth_path, eval_format, macro, eval_out);
    if (*stats) return cmd_repo_stats(repo_path);
    if (*validate) return cmd_repo_validate(repo_path);
    if (*merge) return cmd_repo_merge(merge_inputs, merge_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
