#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "aces/aces.hpp"

namespace aces {
namespace {

EvalItem item(std::string id, PairCategory cat, Choice human) {
  return {std::move(id), "caption a", "caption b", {"ref"}, cat, human};
}

// Planted metric: the score pair is keyed by item id.
PairMetric table_metric(std::map<std::string, std::pair<double, double>> scores) {
  return [scores = std::move(scores)](const EvalItem& it) { return scores.at(it.id); };
}

TEST(JudgeTest, StrictComparison) {
  EXPECT_EQ(judge_pair(0.6, 0.5), Choice::A);
  EXPECT_EQ(judge_pair(0.5, 0.6), Choice::B);
  EXPECT_EQ(judge_pair(0.5, 0.5), Choice::Tie);
  EXPECT_THROW(judge_pair(std::nan(""), 0.5), NonFiniteScore);
  EXPECT_THROW(judge_pair(0.5, INFINITY), NonFiniteScore);
}

TEST(BenchmarkTest, PlantedAccuracies) {
  std::vector<EvalItem> items;
  std::map<std::string, std::pair<double, double>> scores;
  // HC: 3 of 4 correct. HI: 1 of 2 plus a tie. MM: 2 of 2.
  auto add = [&](const std::string& id, PairCategory c, Choice h, double a, double b) {
    items.push_back(item(id, c, h));
    scores[id] = {a, b};
  };
  add("hc1", PairCategory::HC, Choice::A, 0.9, 0.1);
  add("hc2", PairCategory::HC, Choice::B, 0.1, 0.9);
  add("hc3", PairCategory::HC, Choice::A, 0.8, 0.2);
  add("hc4", PairCategory::HC, Choice::A, 0.2, 0.8);
  add("hi1", PairCategory::HI, Choice::B, 0.4, 0.5);
  add("hi2", PairCategory::HI, Choice::A, 0.3, 0.3);
  add("hi3", PairCategory::HI, Choice::A, 0.1, 0.3);
  add("mm1", PairCategory::MM, Choice::A, 0.7, 0.6);
  add("mm2", PairCategory::MM, Choice::B, 0.6, 0.7);

  const auto r = benchmark_accuracy(items, table_metric(scores));
  EXPECT_NEAR(r.per_category.at(PairCategory::HC).accuracy(), 75.0, 1e-12);
  EXPECT_NEAR(r.per_category.at(PairCategory::HI).accuracy(), 100.0 / 3.0, 1e-12);
  EXPECT_EQ(r.per_category.at(PairCategory::HI).ties, 1u);
  EXPECT_NEAR(r.per_category.at(PairCategory::MM).accuracy(), 100.0, 1e-12);
  EXPECT_FALSE(r.per_category.count(PairCategory::HM));
  EXPECT_NEAR(r.total, 100.0 * 6.0 / 9.0, 1e-12);
  EXPECT_EQ(r.n_items, 9u);
  EXPECT_EQ(r.n_correct, 6u);
  EXPECT_EQ(r.n_ties, 1u);

  const auto j = to_json(r);
  EXPECT_EQ(j["per_category"]["HC"]["correct"], 3);
  EXPECT_NE(format_table(r).find("Total"), std::string::npos);
}

TEST(BenchmarkTest, OrderAndThreadIndependent) {
  std::mt19937_64 rng(3);
  std::vector<EvalItem> items;
  std::map<std::string, std::pair<double, double>> scores;
  for (int i = 0; i < 400; ++i) {
    const auto id = "x" + std::to_string(i);
    items.push_back(item(id, static_cast<PairCategory>(rng() % 4), rng() % 2 ? Choice::A : Choice::B));
    scores[id] = {static_cast<double>(rng() % 5), static_cast<double>(rng() % 5)};
  }
  const auto metric = table_metric(scores);
  const auto base = benchmark_accuracy(items, metric, 1);
  for (std::size_t threads : {2u, 4u, 8u}) {
    std::shuffle(items.begin(), items.end(), rng);
    EXPECT_EQ(benchmark_accuracy(items, metric, threads), base);
  }
}

TEST(BenchmarkTest, MetricErrorNamesItem) {
  const std::vector<EvalItem> items = {item("ok", PairCategory::HC, Choice::A),
                                       item("bad", PairCategory::HC, Choice::A)};
  const PairMetric m = [](const EvalItem& it) -> std::pair<double, double> {
    if (it.id == "bad") throw EmptyText();
    return {1.0, 0.0};
  };
  try {
    benchmark_accuracy(items, m, 2);
    FAIL();
  } catch (const BenchmarkError& e) {
    EXPECT_EQ(e.id(), "bad");
  }
  EXPECT_THROW(benchmark_accuracy({}, m), Error);
}

TEST(EvalSetTest, RoundTrip) {
  std::vector<EvalItem> items = {item("1", PairCategory::HM, Choice::B),
                                 item("2", PairCategory::MM, Choice::A)};
  items[1].references = {"a \"quoted\" ref", "second"};
  std::stringstream ss;
  write_eval_set(ss, items);
  EXPECT_EQ(parse_eval_set(ss), items);
}

TEST(EvalSetTest, ValidationErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_eval_set(in);
    } catch (const ValidationError& e) {
      return e.line();
    } catch (const ParseError& e) {
      return 1000 + e.line();
    }
    return 0;
  };
  const std::string good =
      R"({"id":"1","caption_a":"a","caption_b":"b","references":["r"],"category":"HC","human_choice":"A"})";
  EXPECT_EQ(line_of(good + "\n\n" + R"({"id":"2"})"), 3u);
  EXPECT_EQ(line_of(good + "\n" + R"({"id":"2","caption_a":"a","caption_b":"b","references":[],"category":"HC","human_choice":"A"})"), 2u);
  EXPECT_EQ(line_of(R"({"id":"2","caption_a":"a","caption_b":"b","references":["r"],"category":"XX","human_choice":"A"})"), 1u);
  EXPECT_EQ(line_of(R"({"id":"2","caption_a":"a","caption_b":"b","references":["r"],"category":"HC","human_choice":"tie"})"), 1u);
  EXPECT_EQ(line_of(R"({"id":2,"caption_a":"a","caption_b":"b","references":["r"],"category":"HC","human_choice":"A"})"), 1u);
  EXPECT_EQ(line_of(good + "\n{not json"), 1002u);
  EXPECT_EQ(line_of(good), 0u);
}

TEST(EvalSetTest, MissingFile) {
  EXPECT_THROW(load_eval_set("/nonexistent/eval.jsonl"), ParseError);
}

TEST(ParallelTest, LowestIndexErrorWins) {
  for (std::size_t threads : {1u, 3u}) {
    try {
      parallel_for(50, threads, [](std::size_t i) {
        if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "7");
    }
  }
}

TEST(BenchmarkTest, PerfectMetricScoresHundred) {
  std::vector<EvalItem> items;
  for (int i = 0; i < 12; ++i) items.push_back(item(std::to_string(i), static_cast<PairCategory>(i % 4), Choice::A));
  const auto r = benchmark_accuracy(items, [](const EvalItem&) { return std::pair{1.0, 0.0}; });
  for (const auto& [cat, t] : r.per_category) EXPECT_EQ(t.accuracy(), 100.0);
  EXPECT_EQ(r.total, 100.0);
}

TEST(EvalSetTest, ThreeRowsAndMissingChoice) {
  std::istringstream in(
      R"({"id":"1","caption_a":"a","caption_b":"b","references":["r"],"category":"HC","human_choice":"A"})" "\n"
      R"({"id":"2","caption_a":"a","caption_b":"b","references":["r"],"category":"HI","human_choice":"B"})" "\n"
      R"({"id":"3","caption_a":"a","caption_b":"b","references":["r"],"category":"MM","human_choice":"A"})" "\n");
  EXPECT_EQ(parse_eval_set(in).size(), 3u);
  std::istringstream bad(R"({"id":"1","caption_a":"a","caption_b":"b","references":["r"],"category":"HC"})");
  try {
    parse_eval_set(bad);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("human_choice"), std::string::npos);
  }
}

TEST(EvalSetTest, RandomRoundTrip) {
  std::mt19937_64 rng(17);
  std::vector<EvalItem> items;
  for (int i = 0; i < 100; ++i) {
    EvalItem it = item("id" + std::to_string(rng()), static_cast<PairCategory>(rng() % 4),
                       rng() % 2 ? Choice::A : Choice::B);
    it.caption_a = "caption \"" + std::to_string(rng() % 100) + "\"\twith tab";
    it.references.assign(1 + rng() % 4, "ref \u00e9 " + std::to_string(i));
    items.push_back(it);
  }
  std::stringstream ss;
  write_eval_set(ss, items);
  EXPECT_EQ(parse_eval_set(ss), items);
}

}  // namespace
}  // namespace aces
