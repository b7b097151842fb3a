#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aces/config.hpp"
#include "aces/embedder.hpp"
#include "aces/error.hpp"
#include "aces/fluency.hpp"
#include "aces/tagger.hpp"
#include "aces/types.hpp"

namespace aces {

// Non-owning view of the three models a pair score needs.
struct Backends {
  const TaggerBackend* tagger = nullptr;
  const EmbedderBackend* embedder = nullptr;
  const FluencyBackend* fluency = nullptr;
};

// Per-label concatenation in reference order. Duplicates are kept, so WHO
// from "bird caws" and "bird croaks" becomes ["bird", "bird"].
inline DescriptorGroups merge_reference_groups(std::span<const DescriptorGroups> refs) {
  DescriptorGroups merged;
  for (const auto& ref : refs) {
    for (const auto& [label, tokens] : ref) merged.append(label, tokens);
  }
  return merged;
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

namespace detail {

// Summation in ascending value order: the result does not depend on the
// order of the inputs.
inline double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace detail

// Max-mean matching between one candidate group and one reference group.
//   precision = mean over reference tokens of the best candidate match
//   recall    = mean over candidate tokens of the best reference match
inline PrecisionRecall category_pr_re(const std::vector<std::string>& cand_tokens,
                                      const std::vector<std::string>& ref_tokens,
                                      EmbeddingCache& cache, DistanceTechnique technique) {
  if (cand_tokens.empty() || ref_tokens.empty()) throw EmptyGroup();
  std::vector<std::vector<double>> sim(cand_tokens.size(),
                                       std::vector<double>(ref_tokens.size()));
  for (std::size_t i = 0; i < cand_tokens.size(); ++i) {
    const Embedding& c = cache.get(cand_tokens[i]);
    for (std::size_t j = 0; j < ref_tokens.size(); ++j) {
      sim[i][j] = similarity(c, cache.get(ref_tokens[j]), technique);
    }
  }
  std::vector<double> best_for_ref(ref_tokens.size());
  for (std::size_t j = 0; j < ref_tokens.size(); ++j) {
    double best = sim[0][j];
    for (std::size_t i = 1; i < cand_tokens.size(); ++i) best = std::max(best, sim[i][j]);
    best_for_ref[j] = best;
  }
  std::vector<double> best_for_cand(cand_tokens.size());
  for (std::size_t i = 0; i < cand_tokens.size(); ++i) {
    best_for_cand[i] = *std::max_element(sim[i].begin(), sim[i].end());
  }
  return {detail::order_free_mean(std::move(best_for_ref)),
          detail::order_free_mean(std::move(best_for_cand))};
}

inline PrecisionRecall category_pr_re(const std::vector<std::string>& cand_tokens,
                                      const std::vector<std::string>& ref_tokens,
                                      const EmbedderBackend& backend,
                                      DistanceTechnique technique) {
  EmbeddingCache cache(backend);
  return category_pr_re(cand_tokens, ref_tokens, cache, technique);
}

// Recall-weighted F: (1 + beta) * P * R / (R + beta * P). With beta = 9 this
// weights recall nine times more than precision. A zero denominator yields 0.
constexpr double f_beta(double precision, double recall, double beta) {
  const double denominator = recall + beta * precision;
  if (denominator == 0.0) return 0.0;
  return (1.0 + beta) * precision * recall / denominator;
}

struct FSingle {
  double value = 0.0;
  std::map<DescriptorLabel, CategoryScore> per_category;
};

// Mean F over the labels present in both candidate and merged references;
// nullopt when the label sets are disjoint.
inline std::optional<FSingle> f_single(const DescriptorGroups& cand,
                                       const DescriptorGroups& refs_merged, EmbeddingCache& cache,
                                       const AcesConfig& config) {
  FSingle out;
  double sum = 0.0;
  for (const auto& [label, cand_tokens] : cand) {
    if (!refs_merged.contains(label)) continue;
    const auto pr =
        category_pr_re(cand_tokens, refs_merged.tokens(label), cache, config.distance_technique);
    const double f = f_beta(pr.precision, pr.recall, config.f_beta);
    out.per_category[label] = {pr.precision, pr.recall, f};
    sum += f;
  }
  if (out.per_category.empty()) return std::nullopt;
  out.value = sum / static_cast<double>(out.per_category.size());
  return out;
}

inline std::optional<FSingle> f_single(const DescriptorGroups& cand,
                                       const DescriptorGroups& refs_merged,
                                       const EmbedderBackend& backend, const AcesConfig& config) {
  EmbeddingCache cache(backend);
  return f_single(cand, refs_merged, cache, config);
}

// (L - overlap) / L / penalty_score, L = total_labels. Shorter captions with
// fewer shared descriptors lose slightly more.
inline double overlap_penalty(long overlap_count, const AcesConfig& config) {
  if (overlap_count < 0 || overlap_count > config.total_labels) {
    throw OverlapOutOfRange(overlap_count, config.total_labels);
  }
  if (!config.apply_penalty) return 0.0;
  return static_cast<double>(config.total_labels - overlap_count) /
         (static_cast<double>(config.total_labels) * static_cast<double>(config.penalty_score));
}

namespace detail {

inline bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string::npos;
}

}  // namespace detail

// Scores one candidate against its references:
//   tag -> group -> merge references -> F_single -> minus penalty = ACES_1
//   final = ACES_1 - w * flag * ACES_1
// When no descriptor label overlaps, ACES_1 is either 0 or (with
// sbert_fallback) the mean whole-caption similarity minus the penalty.
inline ScoreReport aces_pair(const std::string& candidate,
                             const std::vector<std::string>& references,
                             const Backends& backends, const AcesConfig& config) {
  if (!backends.tagger) throw MissingBackend("tagger");
  if (!backends.embedder) throw MissingBackend("embedder");
  if (!backends.fluency) throw MissingBackend("fluency");
  if (detail::blank(candidate)) throw EmptyText();
  if (references.empty()) throw EmptyReferences();

  const DescriptorGroups cand_groups =
      group_by_label(tag_caption(candidate, *backends.tagger, config.average_strategy), config);
  std::vector<DescriptorGroups> ref_groups;
  ref_groups.reserve(references.size());
  for (const auto& ref : references) {
    ref_groups.push_back(
        group_by_label(tag_caption(ref, *backends.tagger, config.average_strategy), config));
  }
  const DescriptorGroups merged = merge_reference_groups(ref_groups);

  EmbeddingCache cache(*backends.embedder);
  ScoreReport report;
  if (auto fs = f_single(cand_groups, merged, cache, config)) {
    report.per_category = std::move(fs->per_category);
    report.overlap_count = report.per_category.size();
    report.f_single = fs->value;
    report.penalty = overlap_penalty(static_cast<long>(report.overlap_count), config);
    report.aces_1 = report.f_single - report.penalty;
  } else if (config.sbert_fallback) {
    const Embedding& cand_emb = cache.get(candidate);
    std::vector<double> sims;
    sims.reserve(references.size());
    for (const auto& ref : references) {
      if (detail::blank(ref)) throw EmptyText();
      sims.push_back(similarity(cand_emb, cache.get(ref), config.distance_technique));
    }
    report.penalty = overlap_penalty(0, config);
    report.aces_1 = detail::order_free_mean(std::move(sims)) - report.penalty;
    report.fallback_used = true;
  }

  report.fluency_probability = fluency_error_probability(candidate, *backends.fluency);
  const int flag = fluency_flag(report.fluency_probability, config.fluency_threshold);
  report.fluency_flagged = flag == 1;
  report.final = report.aces_1 - config.fluency_weight * flag * report.aces_1;
  return report;
}

// Arithmetic mean of the pair scores.
inline double corpus_score(std::span<const ScoreReport> reports) {
  if (reports.empty()) throw EmptyCorpus();
  double sum = 0.0;
  for (const auto& r : reports) sum += r.final;
  return sum / static_cast<double>(reports.size());
}

}  // namespace aces
