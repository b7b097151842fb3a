#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aces/error.hpp"
#include "aces/labels.hpp"

namespace aces {

// A run of adjacent caption words sharing one label. Word indices are
// half-open [word_start, word_end).
struct TaggedSpan {
  std::string text;
  DescriptorLabel label = DescriptorLabel::O;
  std::size_t word_start = 0;
  std::size_t word_end = 0;
  double confidence = 0.0;

  bool operator==(const TaggedSpan&) const = default;
};

struct TaggedCaption {
  std::string text;
  std::vector<TaggedSpan> spans;

  bool operator==(const TaggedCaption&) const = default;
};

// Label -> member token texts in caption order. Never stores an empty list.
class DescriptorGroups {
 public:
  using Map = std::map<DescriptorLabel, std::vector<std::string>>;

  DescriptorGroups() = default;

  void add(DescriptorLabel label, std::string token) {
    groups_[label].push_back(std::move(token));
  }

  void append(DescriptorLabel label, const std::vector<std::string>& tokens) {
    if (tokens.empty()) return;
    auto& dst = groups_[label];
    dst.insert(dst.end(), tokens.begin(), tokens.end());
  }

  bool contains(DescriptorLabel label) const { return groups_.count(label) != 0; }

  // Empty list when the label is absent.
  const std::vector<std::string>& tokens(DescriptorLabel label) const {
    static const std::vector<std::string> kNone;
    auto it = groups_.find(label);
    return it == groups_.end() ? kNone : it->second;
  }

  std::vector<DescriptorLabel> labels() const {
    std::vector<DescriptorLabel> out;
    out.reserve(groups_.size());
    for (const auto& [label, _] : groups_) out.push_back(label);
    return out;
  }

  bool empty() const { return groups_.empty(); }
  std::size_t size() const { return groups_.size(); }
  Map::const_iterator begin() const { return groups_.begin(); }
  Map::const_iterator end() const { return groups_.end(); }

  bool operator==(const DescriptorGroups&) const = default;

 private:
  Map groups_;
};

// Unit-norm embedding vector.
class Embedding {
 public:
  Embedding() = default;

  // Normalizes `raw` to unit L2 norm. Zero or non-finite vectors cannot be
  // normalized and are reported as backend failures.
  static Embedding normalized(std::vector<double> raw) {
    double sq = 0.0;
    for (double v : raw) sq += v * v;
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InferenceError("embedding backend returned a zero or non-finite vector");
    }
    for (double& v : raw) v /= norm;
    Embedding e;
    e.values_ = std::move(raw);
    return e;
  }

  std::span<const double> values() const { return values_; }
  std::size_t dimension() const { return values_.size(); }

  double norm() const {
    double sq = 0.0;
    for (double v : values_) sq += v * v;
    return std::sqrt(sq);
  }

  bool operator==(const Embedding&) const = default;

 private:
  std::vector<double> values_;
};

struct CategoryScore {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;

  bool operator==(const CategoryScore&) const = default;
};

// Per-pair breakdown of the metric.
struct ScoreReport {
  std::map<DescriptorLabel, CategoryScore> per_category;
  std::size_t overlap_count = 0;
  double f_single = 0.0;  // 0 when the label sets do not overlap
  double penalty = 0.0;
  double aces_1 = 0.0;
  double fluency_probability = 0.0;
  bool fluency_flagged = false;
  bool fallback_used = false;
  double final = 0.0;

  bool operator==(const ScoreReport&) const = default;
};

inline nlohmann::ordered_json to_json(const ScoreReport& report) {
  nlohmann::ordered_json categories = nlohmann::ordered_json::object();
  for (const auto& [label, score] : report.per_category) {
    categories[std::string(render(label))] = {
        {"precision", score.precision},
        {"recall", score.recall},
        {"f_score", score.f_score},
    };
  }
  nlohmann::ordered_json j;
  j["per_category"] = std::move(categories);
  j["overlap_count"] = report.overlap_count;
  j["f_single"] = report.f_single;
  j["penalty"] = report.penalty;
  j["aces_1"] = report.aces_1;
  j["fluency_probability"] = report.fluency_probability;
  j["fluency_flagged"] = report.fluency_flagged;
  j["fallback_used"] = report.fallback_used;
  j["final"] = report.final;
  return j;
}

inline ScoreReport score_report_from_json(const nlohmann::json& j) {
  ScoreReport r;
  for (const auto& [name, score] : j.at("per_category").items()) {
    r.per_category[parse_label(name)] = {score.at("precision").get<double>(),
                                         score.at("recall").get<double>(),
                                         score.at("f_score").get<double>()};
  }
  r.overlap_count = j.at("overlap_count").get<std::size_t>();
  r.f_single = j.at("f_single").get<double>();
  r.penalty = j.at("penalty").get<double>();
  r.aces_1 = j.at("aces_1").get<double>();
  r.fluency_probability = j.at("fluency_probability").get<double>();
  r.fluency_flagged = j.at("fluency_flagged").get<bool>();
  r.fallback_used = j.at("fallback_used").get<bool>();
  r.final = j.at("final").get<double>();
  return r;
}

}  // namespace aces
