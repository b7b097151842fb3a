#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aces/aces.hpp"
#include "oracle.hpp"
#include "scenario.hpp"

namespace aces {
namespace {

using L = DescriptorLabel;

StubEmbedder matrix_embedder() {
  return StubEmbedder(3, 0, false,
                      {{"c1", {1, 0, 0}},
                       {"c2", {0, 1, 0}},
                       {"r1", {0.6, 0.8, 0}},
                       {"r2", {0, 0.6, 0.8}},
                       {"r3", {0.8, 0, 0.6}}});
}

TEST(CategoryTest, MaxMeanOverTwoByThreeMatrix) {
  // sim rows c1: .6 0 .8   c2: .8 .6 0
  const auto e = matrix_embedder();
  const auto pr = category_pr_re({"c1", "c2"}, {"r1", "r2", "r3"}, e, DistanceTechnique::kCosine);
  EXPECT_NEAR(pr.precision, 2.2 / 3.0, 1e-12);
  EXPECT_NEAR(pr.recall, 0.8, 1e-12);
}

TEST(CategoryTest, EmptySideThrows) {
  const auto e = matrix_embedder();
  EXPECT_THROW(category_pr_re({}, {"r1"}, e, DistanceTechnique::kCosine), EmptyGroup);
  EXPECT_THROW(category_pr_re({"c1"}, {}, e, DistanceTechnique::kCosine), EmptyGroup);
}

TEST(CategoryTest, IdenticalGroupsScoreOne) {
  const StubEmbedder e(8, 3);
  for (auto tech : {DistanceTechnique::kCosine, DistanceTechnique::kEuclidean}) {
    const auto pr = category_pr_re({"a", "b c"}, {"a", "b c"}, e, tech);
    EXPECT_NEAR(pr.precision, 1.0, 1e-12);
    EXPECT_NEAR(pr.recall, 1.0, 1e-12);
  }
}

TEST(FBetaTest, KnownValues) {
  EXPECT_NEAR(f_beta(1.0, 0.5, 9.0), 10.0 * 0.5 / 9.5, 1e-12);
  EXPECT_NEAR(f_beta(0.5, 1.0, 9.0), 10.0 * 0.5 / 5.5, 1e-12);
  EXPECT_EQ(f_beta(0.0, 0.0, 9.0), 0.0);
  EXPECT_NEAR(f_beta(0.7, 0.7, 9.0), 0.7, 1e-12);
  EXPECT_NEAR(f_beta(0.3, 0.6, 1.0), 2 * 0.3 * 0.6 / 0.9, 1e-12);
}

TEST(FBetaTest, RecallDominatesAtBetaNine) {
  for (double x : {0.2, 0.5, 0.8}) {
    const double h = 1e-6;
    const double dre = (f_beta(x, x + h, 9) - f_beta(x, x - h, 9)) / (2 * h);
    const double dpr = (f_beta(x + h, x, 9) - f_beta(x - h, x, 9)) / (2 * h);
    EXPECT_NEAR(dre / dpr, 9.0, 1e-3);
  }
}

TEST(PenaltyTest, Values) {
  const AcesConfig c;
  EXPECT_NEAR(overlap_penalty(0, c), 1.0 / 1850.0, 1e-15);
  EXPECT_EQ(overlap_penalty(13, c), 0.0);
  EXPECT_NEAR(overlap_penalty(6, c), 7.0 / 13.0 / 1850.0, 1e-15);
  AcesConfig off;
  off.apply_penalty = false;
  EXPECT_EQ(overlap_penalty(4, off), 0.0);
  EXPECT_THROW(overlap_penalty(14, c), OverlapOutOfRange);
  EXPECT_THROW(overlap_penalty(-1, c), OverlapOutOfRange);
}

TEST(PenaltyTest, DoublingPenaltyScoreHalvesPenalty) {
  AcesConfig a, b;
  b.penalty_score = 2 * a.penalty_score;
  for (long k = 0; k <= 13; ++k) {
    EXPECT_NEAR(overlap_penalty(k, b), overlap_penalty(k, a) / 2.0, 1e-15);
  }
}

TEST(MergeTest, KeepsDuplicatesInReferenceOrder) {
  DescriptorGroups a, b;
  a.add(L::WHO, "bird");
  a.add(L::HOW, "caws");
  b.add(L::WHO, "bird");
  b.add(L::HOW, "croaks");
  const std::vector<DescriptorGroups> refs{a, b};
  const auto m = merge_reference_groups(refs);
  EXPECT_EQ(m.tokens(L::WHO), (std::vector<std::string>{"bird", "bird"}));
  EXPECT_EQ(m.tokens(L::HOW), (std::vector<std::string>{"caws", "croaks"}));
}

TEST(FSingleTest, DisjointLabelsGiveNullopt) {
  DescriptorGroups c, r;
  c.add(L::WHO, "bird");
  r.add(L::HOW, "caws");
  EXPECT_FALSE(f_single(c, r, StubEmbedder(), AcesConfig{}).has_value());
}

TEST(FSingleTest, OnlySharedLabelsCount) {
  DescriptorGroups c, r;
  c.add(L::WHO, "bird");
  c.add(L::WHEN, "then");
  r.add(L::WHO, "bird");
  r.add(L::HOW, "caws");
  const auto fs = f_single(c, r, StubEmbedder(), AcesConfig{});
  ASSERT_TRUE(fs.has_value());
  EXPECT_EQ(fs->per_category.size(), 1u);
  EXPECT_NEAR(fs->value, 1.0, 1e-12);
}

struct PairFixture : ::testing::Test {
  StubTagger tagger = default_stub_tagger();
  StubEmbedder embedder{16, 7};
  StubFluency fluency = default_stub_fluency();
  Backends backends() const { return {&tagger, &embedder, &fluency}; }
};

TEST_F(PairFixture, IdenticalCaptionScoresNearOne) {
  const auto r = aces_pair("a bird caws loudly", {"a bird caws loudly"}, backends(), AcesConfig{});
  EXPECT_EQ(r.overlap_count, 3u);
  EXPECT_NEAR(r.f_single, 1.0, 1e-12);
  EXPECT_NEAR(r.aces_1, 1.0 - 10.0 / 13.0 / 1850.0, 1e-12);
  EXPECT_FALSE(r.fluency_flagged);
  EXPECT_EQ(r.final, r.aces_1);
}

TEST_F(PairFixture, FluencyFlagHalvesScore) {
  const auto r = aces_pair("A door is followed by a", {"a door closes then a car passes"},
                           backends(), AcesConfig{});
  EXPECT_TRUE(r.fluency_flagged);
  EXPECT_NEAR(r.fluency_probability, 0.99, 1e-12);
  EXPECT_NEAR(r.final, 0.5 * r.aces_1, 1e-12);
}

TEST_F(PairFixture, FlagIsStrictlyAboveThreshold) {
  const StubFluency at({{"rain falls", 0.9}}, 0.0);
  const auto r = aces_pair("rain falls", {"rain falls"}, {&tagger, &embedder, &at}, AcesConfig{});
  EXPECT_FALSE(r.fluency_flagged);
  EXPECT_EQ(r.final, r.aces_1);
}

TEST_F(PairFixture, NoOverlapFallbackOff) {
  AcesConfig c;
  c.sbert_fallback = false;
  const auto r = aces_pair("loudly", {"a dog"}, backends(), c);
  EXPECT_EQ(r.overlap_count, 0u);
  EXPECT_FALSE(r.fallback_used);
  EXPECT_EQ(r.aces_1, 0.0);
  EXPECT_EQ(r.penalty, 0.0);
  EXPECT_EQ(r.final, 0.0);
}

TEST_F(PairFixture, NoOverlapFallbackUsesWholeCaptions) {
  const auto r = aces_pair("loudly", {"a dog", "the cold"}, backends(), AcesConfig{});
  EXPECT_TRUE(r.fallback_used);
  const auto c = embed_text("loudly", embedder);
  const double expected = (similarity(c, embed_text("a dog", embedder), DistanceTechnique::kCosine) +
                           similarity(c, embed_text("the cold", embedder), DistanceTechnique::kCosine)) /
                              2.0 -
                          1.0 / 1850.0;
  EXPECT_NEAR(r.aces_1, expected, 1e-12);
}

TEST_F(PairFixture, CaptionWithNoDescriptorsFallsBack) {
  const auto r = aces_pair("um uh", {"a bird caws"}, backends(), AcesConfig{});
  EXPECT_TRUE(r.fallback_used);
  EXPECT_TRUE(r.per_category.empty());
}

TEST_F(PairFixture, OtherLabelExcludedByDefault) {
  StubTagger t({{"zz", L::OTHER}});
  Backends b{&t, &embedder, &fluency};
  AcesConfig off;
  off.sbert_fallback = false;
  EXPECT_EQ(aces_pair("zz", {"zz"}, b, off).overlap_count, 0u);
  off.include_other_label = true;
  EXPECT_EQ(aces_pair("zz", {"zz"}, b, off).overlap_count, 1u);
}

TEST_F(PairFixture, ErrorsAreTyped) {
  const AcesConfig c;
  EXPECT_THROW(aces_pair("  ", {"a bird"}, backends(), c), EmptyText);
  EXPECT_THROW(aces_pair("a bird", {}, backends(), c), EmptyReferences);
  EXPECT_THROW(aces_pair("a bird", {"a bird"}, {&tagger, nullptr, &fluency}, c), MissingBackend);
  EXPECT_THROW(aces_pair("a bird", {"a bird"}, {nullptr, &embedder, &fluency}, c), MissingBackend);
  EXPECT_THROW(aces_pair("a bird", {"a bird"}, {&tagger, &embedder, nullptr}, c), MissingBackend);
}

TEST(CorpusTest, MeanOfFinals) {
  std::vector<ScoreReport> rs(3);
  rs[0].final = 0.2;
  rs[1].final = 0.4;
  rs[2].final = 0.9;
  EXPECT_NEAR(corpus_score(rs), 0.5, 1e-12);
  EXPECT_THROW(corpus_score(std::span<const ScoreReport>{}), EmptyCorpus);
}

// Library and independent oracle agree on random stub scenarios.
TEST(OracleTest, RandomScenariosMatch) {
  std::mt19937_64 rng(2024);
  for (int n = 0; n < 300; ++n) {
    const auto s = scenario::random_scenario(rng);
    const auto stubs = scenario::make_stubs(s.tables);
    const auto got = aces_pair(s.candidate, s.references, stubs.view(), scenario::make_config(s.params));
    const auto want = oracle::score(s.tables, s.params, s.candidate, s.references);
    SCOPED_TRACE(s.candidate);
    EXPECT_EQ(static_cast<int>(got.overlap_count), want.overlap);
    EXPECT_EQ(got.fallback_used, want.fallback_used);
    EXPECT_EQ(got.fluency_flagged, want.flagged);
    EXPECT_NEAR(got.f_single, want.f_single, 1e-9);
    EXPECT_NEAR(got.penalty, want.penalty, 1e-12);
    EXPECT_NEAR(got.aces_1, want.aces_1, 1e-9);
    EXPECT_NEAR(got.final, want.final_score, 1e-9);
    for (const auto& [label, cs] : got.per_category) {
      const auto& w = want.per_label.at(static_cast<int>(label_index(label)));
      EXPECT_NEAR(cs.precision, w[0], 1e-9);
      EXPECT_NEAR(cs.recall, w[1], 1e-9);
      EXPECT_NEAR(cs.f_score, w[2], 1e-9);
    }
  }
}

TEST(InvarianceTest, ReferencePermutation) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 200; ++n) {
    auto s = scenario::random_scenario(rng);
    const auto stubs = scenario::make_stubs(s.tables);
    const auto cfg = scenario::make_config(s.params);
    const auto a = aces_pair(s.candidate, s.references, stubs.view(), cfg);
    std::shuffle(s.references.begin(), s.references.end(), rng);
    const auto b = aces_pair(s.candidate, s.references, stubs.view(), cfg);
    EXPECT_EQ(a.final, b.final);
  }
}

TEST(InvarianceTest, FinalBoundedByAces1WhenNonNegative) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 200; ++n) {
    const auto s = scenario::random_scenario(rng);
    const auto stubs = scenario::make_stubs(s.tables);
    const auto r = aces_pair(s.candidate, s.references, stubs.view(), scenario::make_config(s.params));
    if (r.aces_1 >= 0) {
      EXPECT_LE(r.final, r.aces_1 + 1e-15);
    }
    if (!r.fluency_flagged) {
      EXPECT_EQ(r.final, r.aces_1);
    }
  }
}

TEST(CategoryTest, SingletonGroupsGiveTheSimilarity) {
  const auto e = matrix_embedder();
  const auto pr = category_pr_re({"c1"}, {"r3"}, e, DistanceTechnique::kCosine);
  EXPECT_NEAR(pr.precision, 0.8, 1e-12);
  EXPECT_NEAR(pr.recall, 0.8, 1e-12);
}

TEST(FSingleTest, MeanOfTwoCategoryScores) {
  // Unit vectors with cosine 0.4 (WHO) and 0.8 (HOW), so F equals the cosine.
  const StubEmbedder e(2, 0, false,
                       {{"a", {1, 0}},
                        {"b", {0.4, std::sqrt(1 - 0.16)}},
                        {"c", {1, 0}},
                        {"d", {0.8, 0.6}}});
  DescriptorGroups cand, refs;
  cand.add(L::WHO, "a");
  refs.add(L::WHO, "b");
  cand.add(L::HOW, "c");
  refs.add(L::HOW, "d");
  const auto fs = f_single(cand, refs, e, AcesConfig{});
  ASSERT_TRUE(fs);
  EXPECT_NEAR(fs->per_category.at(L::WHO).f_score, 0.4, 1e-12);
  EXPECT_NEAR(fs->per_category.at(L::HOW).f_score, 0.8, 1e-12);
  EXPECT_NEAR(fs->value, 0.6, 1e-12);
}

TEST(FBetaTest, ZeroPrecision) { EXPECT_EQ(f_beta(0.0, 0.7, 9.0), 0.0); }

TEST(PenaltyTest, TwelveOfThirteen) {
  EXPECT_NEAR(overlap_penalty(12, AcesConfig{}), 1.0 / 13.0 / 1850.0, 1e-15);
  EXPECT_NEAR(overlap_penalty(12, AcesConfig{}), 4.1580e-5, 1e-9);
}

TEST(MergeTest, EmptyAndDisjoint) {
  EXPECT_TRUE(merge_reference_groups({}).empty());
  DescriptorGroups a, b;
  a.add(L::WHO, "x");
  a.add(L::WHO, "y");
  b.add(L::WHERE, "z");
  const std::vector<DescriptorGroups> refs{a, b};
  const auto m = merge_reference_groups(refs);
  EXPECT_EQ(m.tokens(L::WHO), a.tokens(L::WHO));
  EXPECT_EQ(m.tokens(L::WHERE), b.tokens(L::WHERE));
  EXPECT_EQ(m.size(), 2u);
}

TEST(CorpusTest, MatchesBruteForceMean) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<ScoreReport> rs(100);
  double sum = 0;
  for (auto& r : rs) sum += (r.final = u(rng));
  EXPECT_NEAR(corpus_score(rs), sum / 100.0, 1e-12);
  EXPECT_EQ(corpus_score(std::span<const ScoreReport>(rs.data(), 1)), rs[0].final);
}

}  // namespace
}  // namespace aces
