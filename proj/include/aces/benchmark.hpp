#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aces/error.hpp"
#include "aces/parallel.hpp"

// Pairwise human-agreement benchmark: for every item humans picked the
// better of two candidate captions; a metric agrees when it scores that
// caption strictly higher.

namespace aces {

// human-correct, human-incorrect, human-machine, machine-machine
enum class PairCategory { HC, HI, HM, MM };
enum class Choice { A, B, Tie };

constexpr std::string_view to_string(PairCategory c) {
  switch (c) {
    case PairCategory::HC: return "HC";
    case PairCategory::HI: return "HI";
    case PairCategory::HM: return "HM";
    case PairCategory::MM: return "MM";
  }
  return "HC";
}

constexpr std::string_view to_string(Choice c) {
  switch (c) {
    case Choice::A: return "A";
    case Choice::B: return "B";
    case Choice::Tie: return "Tie";
  }
  return "Tie";
}

struct EvalItem {
  std::string id;
  std::string caption_a;
  std::string caption_b;
  std::vector<std::string> references;
  PairCategory category = PairCategory::HC;
  Choice human_choice = Choice::A;  // never Tie

  bool operator==(const EvalItem&) const = default;
};

class BenchmarkError : public Error {
 public:
  BenchmarkError(std::string id, const std::string& detail)
      : Error("item " + id + ": " + detail), id_(std::move(id)) {}

  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

namespace detail {

inline PairCategory parse_category(const std::string& s, std::size_t line) {
  for (auto c : {PairCategory::HC, PairCategory::HI, PairCategory::HM, PairCategory::MM}) {
    if (s == to_string(c)) return c;
  }
  throw ValidationError(line, "category must be one of HC, HI, HM, MM (got '" + s + "')");
}

inline Choice parse_human_choice(const std::string& s, std::size_t line) {
  if (s == "A" || s == "a") return Choice::A;
  if (s == "B" || s == "b") return Choice::B;
  throw ValidationError(line, "human_choice must be A or B (got '" + s + "')");
}

template <typename T>
T required(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw ValidationError(line, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(line, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

// JSON Lines, one item per line. Blank lines are skipped.
inline std::vector<EvalItem> parse_eval_set(std::istream& in) {
  std::vector<EvalItem> items;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, e.what());
    }
    if (!j.is_object()) throw ParseError(line, "expected a JSON object");
    EvalItem item;
    item.id = detail::required<std::string>(j, "id", line);
    item.caption_a = detail::required<std::string>(j, "caption_a", line);
    item.caption_b = detail::required<std::string>(j, "caption_b", line);
    item.references = detail::required<std::vector<std::string>>(j, "references", line);
    if (item.references.empty()) throw ValidationError(line, "references must be non-empty");
    item.category =
        detail::parse_category(detail::required<std::string>(j, "category", line), line);
    item.human_choice =
        detail::parse_human_choice(detail::required<std::string>(j, "human_choice", line), line);
    items.push_back(std::move(item));
  }
  return items;
}

inline std::vector<EvalItem> load_eval_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path.string());
  return parse_eval_set(in);
}

inline void write_eval_set(std::ostream& out, std::span<const EvalItem> items) {
  for (const auto& item : items) {
    nlohmann::ordered_json j;
    j["id"] = item.id;
    j["caption_a"] = item.caption_a;
    j["caption_b"] = item.caption_b;
    j["references"] = item.references;
    j["category"] = std::string(to_string(item.category));
    j["human_choice"] = std::string(to_string(item.human_choice));
    out << j.dump() << '\n';
  }
}

// Strict comparison; equal scores are a tie.
inline Choice judge_pair(double score_a, double score_b) {
  if (!std::isfinite(score_a) || !std::isfinite(score_b)) throw NonFiniteScore();
  if (score_a > score_b) return Choice::A;
  if (score_b > score_a) return Choice::B;
  return Choice::Tie;
}

struct CategoryTally {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t ties = 0;

  double accuracy() const {
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  }

  bool operator==(const CategoryTally&) const = default;
};

struct BenchmarkReport {
  std::map<PairCategory, CategoryTally> per_category;  // only categories present
  double total = 0.0;                                  // pooled accuracy, percent
  std::size_t n_items = 0;
  std::size_t n_correct = 0;
  std::size_t n_ties = 0;

  bool operator==(const BenchmarkReport&) const = default;
};

// Returns (score of caption_a, score of caption_b).
using PairMetric = std::function<std::pair<double, double>(const EvalItem&)>;

// A metric tie counts as disagreement. Items may be scored concurrently;
// the report does not depend on item order or thread count.
inline BenchmarkReport benchmark_accuracy(std::span<const EvalItem> items, const PairMetric& metric,
                                          std::size_t threads = 1) {
  if (items.empty()) throw Error("benchmark needs at least one item");
  std::vector<Choice> verdicts(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    try {
      const auto [a, b] = metric(items[i]);
      verdicts[i] = judge_pair(a, b);
    } catch (const BenchmarkError&) {
      throw;
    } catch (const std::exception& e) {
      throw BenchmarkError(items[i].id, e.what());
    }
  });

  BenchmarkReport report;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& tally = report.per_category[items[i].category];
    ++tally.total;
    if (verdicts[i] == Choice::Tie) {
      ++tally.ties;
      ++report.n_ties;
    } else if (verdicts[i] == items[i].human_choice) {
      ++tally.correct;
      ++report.n_correct;
    }
  }
  report.n_items = items.size();
  report.total = 100.0 * static_cast<double>(report.n_correct) / static_cast<double>(items.size());
  return report;
}

inline nlohmann::ordered_json to_json(const BenchmarkReport& report) {
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [cat, t] : report.per_category) {
    per[std::string(to_string(cat))] = {
        {"accuracy", t.accuracy()}, {"correct", t.correct}, {"total", t.total}, {"ties", t.ties}};
  }
  nlohmann::ordered_json j;
  j["per_category"] = std::move(per);
  j["total"] = report.total;
  j["n_items"] = report.n_items;
  j["n_correct"] = report.n_correct;
  j["n_ties"] = report.n_ties;
  return j;
}

// Aligned plain-text table, one row per category plus the pooled total.
inline std::string format_table(const BenchmarkReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(8) << "category" << std::right << std::setw(10) << "accuracy"
     << std::setw(9) << "correct" << std::setw(8) << "total" << std::setw(7) << "ties" << '\n';
  os << std::fixed << std::setprecision(1);
  for (const auto& [cat, t] : report.per_category) {
    os << std::left << std::setw(8) << to_string(cat) << std::right << std::setw(10)
       << t.accuracy() << std::setw(9) << t.correct << std::setw(8) << t.total << std::setw(7)
       << t.ties << '\n';
  }
  os << std::left << std::setw(8) << "Total" << std::right << std::setw(10) << report.total
     << std::setw(9) << report.n_correct << std::setw(8) << report.n_items << std::setw(7)
     << report.n_ties << '\n';
  return os.str();
}

}  // namespace aces
