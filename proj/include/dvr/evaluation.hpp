#pragma once

// Aggregate metrics over run results: instruction satisfaction rate, per-type
// and per-category rates, satisfied-count histograms and tool-selection scores.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "dvr/constraint.hpp"
#include "dvr/error.hpp"
#include "dvr/orchestrator.hpp"

namespace dvr {

inline double isr(const std::vector<RunResult>& results) {
  if (results.empty()) throw EmptyInput("isr needs at least one result");
  std::size_t ok = 0;
  for (const auto& r : results) ok += r.satisfied_all ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

inline std::map<int, double> isr_by_level(const std::vector<RunResult>& results) {
  std::map<int, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : results) {
    auto& [ok, total] = counts[r.level];
    ok += r.satisfied_all ? 1 : 0;
    ++total;
  }
  std::map<int, double> out;
  for (const auto& [level, c] : counts) out[level] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return out;
}

struct Rate {
  std::size_t satisfied = 0;
  std::size_t total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(satisfied) / static_cast<double>(total); }
  friend bool operator==(const Rate&, const Rate&) = default;
};

inline std::map<ConstraintType, Rate> per_type_rates(const std::vector<RunResult>& results) {
  std::map<ConstraintType, Rate> out;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.ground_truth.size() && i < r.verdicts.size(); ++i) {
      auto& rate = out[r.ground_truth[i].type];
      rate.satisfied += r.verdicts[i] ? 1 : 0;
      ++rate.total;
    }
  }
  return out;
}

inline std::map<Category, Rate> per_category_rates(const std::vector<RunResult>& results) {
  std::map<Category, Rate> out;
  for (const auto& [type, rate] : per_type_rates(results)) {
    auto& c = out[category_of(type)];
    c.satisfied += rate.satisfied;
    c.total += rate.total;
  }
  return out;
}

// Keys 0..max constraint count; counts sum to the number of results.
inline std::map<int, std::size_t> satisfied_histogram(const std::vector<RunResult>& results) {
  std::map<int, std::size_t> out;
  if (results.empty()) return out;
  std::size_t max_m = 0;
  for (const auto& r : results) max_m = std::max(max_m, r.verdicts.size());
  for (std::size_t k = 0; k <= max_m; ++k) out[static_cast<int>(k)] = 0;
  for (const auto& r : results) {
    ++out[static_cast<int>(std::count(r.verdicts.begin(), r.verdicts.end(), true))];
  }
  return out;
}

enum class Averaging { micro, macro };

struct SelectionScores {
  double hamming_loss = 0.0;
  double subset_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t labels = 0;
};

using TypeSet = std::set<ConstraintType>;

namespace detail {

// Zero denominators: a ratio with nothing predicted (or nothing expected)
// scores 1 when the other side is also empty, else 0.
inline double safe_ratio(std::size_t tp, std::size_t denom, std::size_t other_side) {
  if (denom == 0) return tp + other_side == 0 ? 1.0 : 0.0;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

inline double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace detail

// Multi-label scores over an N x L matrix, L = the 21 format types plus any
// content type that occurs in either side.
inline SelectionScores tool_selection_metrics(const std::vector<TypeSet>& predicted, const std::vector<TypeSet>& truth,
                                              Averaging averaging = Averaging::micro) {
  if (predicted.size() != truth.size()) throw LengthMismatch("predicted and truth differ in length");
  if (truth.empty()) throw EmptyInput("selection metrics need at least one instruction");
  std::vector<ConstraintType> labels = format_types();
  for (ConstraintType t : {ConstraintType::topic, ConstraintType::sentiment}) {
    bool seen = false;
    for (std::size_t i = 0; i < truth.size(); ++i) seen = seen || truth[i].count(t) || predicted[i].count(t);
    if (seen) labels.push_back(t);
  }

  const std::size_t n = truth.size();
  std::size_t mismatched = 0;
  std::size_t exact = 0;
  std::map<ConstraintType, std::array<std::size_t, 3>> per_label;  // tp, fp, fn
  for (std::size_t i = 0; i < n; ++i) {
    bool same = true;
    for (ConstraintType t : labels) {
      const bool p = predicted[i].count(t) > 0;
      const bool g = truth[i].count(t) > 0;
      auto& c = per_label[t];
      if (p && g) ++c[0];
      if (p && !g) ++c[1];
      if (!p && g) ++c[2];
      if (p != g) {
        ++mismatched;
        same = false;
      }
    }
    exact += same ? 1 : 0;
  }

  SelectionScores s;
  s.labels = labels.size();
  s.hamming_loss = static_cast<double>(mismatched) / static_cast<double>(n * labels.size());
  s.subset_accuracy = static_cast<double>(exact) / static_cast<double>(n);
  if (averaging == Averaging::micro) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [t, c] : per_label) {
      tp += c[0];
      fp += c[1];
      fn += c[2];
    }
    s.precision = detail::safe_ratio(tp, tp + fp, fn);
    s.recall = detail::safe_ratio(tp, tp + fn, fp);
    s.f1 = detail::harmonic(s.precision, s.recall);
  } else {
    double p = 0.0, r = 0.0, f = 0.0;
    for (ConstraintType t : labels) {
      const auto& c = per_label[t];
      const double pl = detail::safe_ratio(c[0], c[0] + c[1], c[2]);
      const double rl = detail::safe_ratio(c[0], c[0] + c[2], c[1]);
      p += pl;
      r += rl;
      f += detail::harmonic(pl, rl);
    }
    const double l = static_cast<double>(labels.size());
    s.precision = p / l;
    s.recall = r / l;
    s.f1 = f / l;
  }
  return s;
}

struct EvalReport {
  std::string method;
  std::size_t n_instructions = 0;
  std::size_t n_errors = 0;
  double isr = 0.0;
  std::map<int, double> isr_by_level;
  std::map<ConstraintType, Rate> per_type;
  std::map<Category, Rate> per_category;
  std::map<int, std::size_t> histogram;
  std::optional<SelectionScores> selection;
  Averaging averaging = Averaging::micro;
};

// Truth for selection scoring defaults to each result's ground-truth types;
// pass `truth` to override (same order as results).
inline EvalReport evaluate(const std::vector<RunResult>& results, std::string method = {},
                           const std::vector<TypeSet>* truth = nullptr, Averaging averaging = Averaging::micro) {
  EvalReport rep;
  rep.method = method.empty() && !results.empty() ? results.front().strategy : std::move(method);
  rep.n_instructions = results.size();
  rep.isr = isr(results);
  rep.isr_by_level = isr_by_level(results);
  rep.per_type = per_type_rates(results);
  rep.per_category = per_category_rates(results);
  rep.histogram = satisfied_histogram(results);
  rep.averaging = averaging;
  for (const auto& r : results) rep.n_errors += r.error ? 1 : 0;

  bool any_selection = false;
  std::vector<TypeSet> predicted, expected;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    any_selection = any_selection || !r.selection.empty();
    const auto p = r.predicted_types();
    predicted.emplace_back(p.begin(), p.end());
    if (truth == nullptr) {
      TypeSet g;
      for (const auto& s : r.ground_truth) g.insert(s.type);
      expected.push_back(std::move(g));
    }
  }
  if (any_selection) rep.selection = tool_selection_metrics(predicted, truth ? *truth : expected, averaging);
  return rep;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["version"] = "v1";
  j["method"] = r.method;
  j["n_instructions"] = r.n_instructions;
  j["n_errors"] = r.n_errors;
  j["isr"] = r.isr;
  j["isr_by_level"] = nlohmann::ordered_json::object();
  for (const auto& [level, v] : r.isr_by_level) j["isr_by_level"][std::to_string(level)] = v;
  const auto rate_json = [](const Rate& rate) {
    return nlohmann::ordered_json{{"satisfied", rate.satisfied}, {"total", rate.total}, {"rate", rate.value()}};
  };
  j["per_type_rate"] = nlohmann::ordered_json::object();
  for (const auto& [t, rate] : r.per_type) j["per_type_rate"][std::string(type_id(t))] = rate_json(rate);
  j["per_category_rate"] = nlohmann::ordered_json::object();
  for (const auto& [c, rate] : r.per_category) j["per_category_rate"][std::string(category_name(c))] = rate_json(rate);
  j["histogram"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.histogram) j["histogram"][std::to_string(k)] = v;
  if (r.selection) {
    j["selection"] = {{"averaging", r.averaging == Averaging::micro ? "micro" : "macro"},
                      {"labels", r.selection->labels},
                      {"hamming_loss", r.selection->hamming_loss},
                      {"subset_accuracy", r.selection->subset_accuracy},
                      {"precision", r.selection->precision},
                      {"recall", r.selection->recall},
                      {"f1", r.selection->f1}};
  } else {
    j["selection"] = nullptr;
  }
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  try {
    if (j.at("version").get<std::string>() != "v1") throw SchemaError("unsupported report version");
    r.method = j.at("method").get<std::string>();
    r.n_instructions = j.at("n_instructions").get<std::size_t>();
    r.n_errors = j.value("n_errors", std::size_t{0});
    r.isr = j.at("isr").get<double>();
    for (const auto& [k, v] : j.at("isr_by_level").items()) r.isr_by_level[std::stoi(k)] = v.get<double>();
    for (const auto& [k, v] : j.at("per_type_rate").items()) {
      const auto t = type_from_id(k);
      if (!t) throw SchemaError("unknown type " + k);
      r.per_type[*t] = Rate{v.at("satisfied").get<std::size_t>(), v.at("total").get<std::size_t>()};
    }
    for (const auto& [k, v] : j.at("per_category_rate").items()) {
      bool found = false;
      for (std::size_t c = 0; c <= kFormatCategoryCount; ++c) {
        if (category_name(static_cast<Category>(c)) == k) {
          r.per_category[static_cast<Category>(c)] = Rate{v.at("satisfied").get<std::size_t>(), v.at("total").get<std::size_t>()};
          found = true;
        }
      }
      if (!found) throw SchemaError("unknown category " + k);
    }
    for (const auto& [k, v] : j.at("histogram").items()) r.histogram[std::stoi(k)] = v.get<std::size_t>();
    if (j.contains("selection") && !j["selection"].is_null()) {
      const auto& s = j["selection"];
      r.averaging = s.value("averaging", std::string("micro")) == "macro" ? Averaging::macro : Averaging::micro;
      r.selection = SelectionScores{s.at("hamming_loss").get<double>(), s.at("subset_accuracy").get<double>(),
                                    s.at("precision").get<double>(),    s.at("recall").get<double>(),
                                    s.at("f1").get<double>(),           s.value("labels", std::size_t{0})};
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed report: ") + e.what());
  }
  return r;
}

enum class ReportFormat { table, json };

namespace detail {

inline std::string pct(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", v * 100.0);
  return buf;
}

inline std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

inline std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace detail

// Table: one row per method, ISR (%) per level 1..6 and the average over levels present.
inline std::string render_report(const std::vector<EvalReport>& reports, ReportFormat format) {
  if (format == ReportFormat::json) {
    if (reports.size() == 1) return report_to_json(reports.front()).dump(2) + "\n";
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr.dump(2) + "\n";
  }
  std::size_t name_w = 6;
  for (const auto& r : reports) name_w = std::max(name_w, r.method.size());
  std::string out = detail::pad_right("Method", name_w);
  for (int level = kMinLevel; level <= kMaxLevel; ++level) out += " | " + detail::pad_left("L" + std::to_string(level), 5);
  out += " | " + detail::pad_left("Avg", 5) + "\n";
  out += std::string(name_w, '-');
  for (int level = kMinLevel; level <= kMaxLevel + 1; ++level) out += "-|------";
  out += "\n";
  for (const auto& r : reports) {
    out += detail::pad_right(r.method, name_w);
    double sum = 0.0;
    int present = 0;
    for (int level = kMinLevel; level <= kMaxLevel; ++level) {
      const auto it = r.isr_by_level.find(level);
      if (it == r.isr_by_level.end()) {
        out += " | " + detail::pad_left("-", 5);
      } else {
        out += " | " + detail::pad_left(detail::pct(it->second), 5);
        sum += it->second;
        ++present;
      }
    }
    out += " | " + detail::pad_left(present ? detail::pct(sum / present) : "-", 5) + "\n";
  }
  return out;
}

inline std::string render_report(const EvalReport& report, ReportFormat format) {
  return render_report(std::vector<EvalReport>{report}, format);
}

}  // namespace dvr
