#pragma once

// Store of successful refinements keyed by constraint type. Retrieval is
// uniform random without replacement; persistence is JSONL.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvr/constraint.hpp"
#include "dvr/error.hpp"
#include "dvr/prompts.hpp"
#include "dvr/random.hpp"
#include "dvr/verifiers.hpp"

namespace dvr {

struct RefinementRecord {
  ConstraintType constraint_type = ConstraintType::postscript;
  ConstraintSpec spec;
  std::string instruction;
  std::string response_before;
  std::string constraint_text;
  std::string feedback_text;
  std::string response_after;
  std::int64_t created_at = 0;  // epoch seconds

  friend bool operator==(const RefinementRecord&, const RefinementRecord&) = default;
};

inline std::int64_t now_epoch_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

inline RefineExample to_example(const RefinementRecord& r) {
  return RefineExample{r.instruction, r.response_before, r.constraint_text, r.feedback_text, r.response_after};
}

template <typename Json>
void to_json(Json& j, const RefinementRecord& r) {
  j = Json::object();
  j["constraint_type"] = std::string(type_id(r.constraint_type));
  j["spec"] = Json(r.spec);
  j["instruction"] = r.instruction;
  j["response_before"] = r.response_before;
  j["constraint_text"] = r.constraint_text;
  j["feedback_text"] = r.feedback_text;
  j["response_after"] = r.response_after;
  j["created_at"] = r.created_at;
}

template <typename Json>
void from_json(const Json& j, RefinementRecord& r) {
  if (!j.is_object()) throw SchemaError("record must be a JSON object");
  try {
    const auto id = j.at("constraint_type").template get<std::string>();
    const auto type = type_from_id(id);
    if (!type) throw SchemaError("unknown constraint_type \"" + id + "\"");
    r.constraint_type = *type;
    r.spec = j.at("spec").template get<ConstraintSpec>();
    if (r.spec.type != r.constraint_type) throw SchemaError("spec type does not match constraint_type");
    r.instruction = j.at("instruction").template get<std::string>();
    r.response_before = j.at("response_before").template get<std::string>();
    r.constraint_text = j.value("constraint_text", std::string{});
    r.feedback_text = j.at("feedback_text").template get<std::string>();
    r.response_after = j.at("response_after").template get<std::string>();
    r.created_at = j.value("created_at", std::int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed record: ") + e.what());
  }
}

struct LoadReport {
  std::size_t loaded = 0;
  // One entry per skipped line: "<line>: <reason>".
  std::vector<std::string> problems;
};

// Thread-safe: concurrent retrieve calls, stores serialized.
class RefinementRepository {
 public:
  static constexpr std::size_t kDefaultCapacity = 10000;

  explicit RefinementRepository(std::size_t per_type_capacity = kDefaultCapacity) : capacity_(per_type_capacity) {}

  RefinementRepository(const RefinementRepository& other) : capacity_(other.capacity_) {
    std::shared_lock lock(other.mu_);
    buckets_ = other.buckets_;
  }

  void store(RefinementRecord record) {
    std::unique_lock lock(mu_);
    auto& bucket = buckets_[index(record.constraint_type)];
    bucket.push_back(std::move(record));
    while (bucket.size() > capacity_) bucket.pop_front();
  }

  // min(k, size) records of exactly `type`, sampled without replacement.
  std::vector<RefinementRecord> retrieve(ConstraintType type, std::size_t k, Rng& rng) const {
    std::shared_lock lock(mu_);
    const auto& bucket = buckets_[index(type)];
    std::vector<std::size_t> order(bucket.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t n = std::min(k, order.size());
    // Partial Fisher-Yates over the first n slots.
    for (std::size_t i = 0; i < n; ++i) std::swap(order[i], order[i + rng.index(order.size() - i)]);
    std::vector<RefinementRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(bucket[order[i]]);
    return out;
  }

  std::size_t size(ConstraintType type) const {
    std::shared_lock lock(mu_);
    return buckets_[index(type)].size();
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    std::size_t n = 0;
    for (const auto& b : buckets_) n += b.size();
    return n;
  }

  bool empty() const { return size() == 0; }

  // All records, grouped by type in enum order, oldest first.
  std::vector<RefinementRecord> records() const {
    std::shared_lock lock(mu_);
    std::vector<RefinementRecord> out;
    for (const auto& b : buckets_) out.insert(out.end(), b.begin(), b.end());
    return out;
  }

  void save(const std::filesystem::path& path) const {
    const auto all = records();
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IOFailure("cannot write repository " + path.string());
    for (const auto& r : all) out << nlohmann::ordered_json(r).dump() << '\n';
    if (!out) throw IOFailure("write failed for " + path.string());
  }

  // Appends the valid records of a JSONL file. An absent file is a cold
  // start and loads nothing. Records whose response_after no longer passes
  // its tool are dropped and reported.
  LoadReport load(const std::filesystem::path& path, const VerifyContext& ctx = {}) {
    LoadReport report;
    if (!std::filesystem::exists(path)) return report;
    std::ifstream in(path);
    if (!in) throw IOFailure("cannot read repository " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
      RefinementRecord record;
      try {
        record = nlohmann::json::parse(line).get<RefinementRecord>();
        validate(record.spec);
      } catch (const nlohmann::json::exception& e) {
        report.problems.push_back(where + e.what());
        continue;
      } catch (const Error& e) {
        report.problems.push_back(where + e.what());
        continue;
      }
      if (!is_content_type(record.spec.type) &&
          !verify(instantiate(record.spec), record.response_after, ctx).satisfied) {
        report.problems.push_back(where + "response_after fails " + display_name(record.spec));
        continue;
      }
      store(std::move(record));
      ++report.loaded;
    }
    return report;
  }

  // Repository file for a model: <dir>/<model>.jsonl with unsafe characters replaced.
  static std::filesystem::path path_for_model(const std::filesystem::path& dir, std::string_view model) {
    std::string name;
    for (char c : model) name.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_');
    if (name.empty()) name = "default";
    return dir / (name + ".jsonl");
  }

 private:
  static std::size_t index(ConstraintType t) { return static_cast<std::size_t>(t); }

  std::size_t capacity_;
  mutable std::shared_mutex mu_;
  std::array<std::deque<RefinementRecord>, kTypeCount> buckets_;
};

}  // namespace dvr
