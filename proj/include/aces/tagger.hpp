#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aces/config.hpp"
#include "aces/error.hpp"
#include "aces/labels.hpp"
#include "aces/log.hpp"
#include "aces/text.hpp"
#include "aces/types.hpp"

namespace aces {

// Softmax scores of one model subtoken, attributed to a caption word.
struct SubtokenPrediction {
  std::string subtoken_text;
  std::size_t word_index = 0;
  std::map<DescriptorLabel, double> label_scores;
};

// Token-classification model. Implementations must be safe for concurrent
// predict() calls once constructed.
class TaggerBackend {
 public:
  virtual ~TaggerBackend() = default;

  virtual const std::vector<DescriptorLabel>& label_inventory() const = 0;
  virtual std::size_t max_sequence_length() const { return 512; }

  // Predictions for the subtokens of `words`, in order. Words beyond the
  // sequence budget are left out entirely.
  virtual std::vector<SubtokenPrediction> predict(std::span<const std::string> words) const = 0;
};

// A label inventory holds 10 or 13 distinct labels including O; the 10-label
// inventory may not use the extended categories.
inline void validate_label_inventory(const std::vector<DescriptorLabel>& labels) {
  if (labels.size() != 10 && labels.size() != 13) {
    throw InferenceError("label inventory must have 10 or 13 entries, got " +
                         std::to_string(labels.size()));
  }
  std::set<DescriptorLabel> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) throw InferenceError("duplicate label in inventory");
  if (!seen.count(DescriptorLabel::O)) throw InferenceError("label inventory lacks O");
  if (labels.size() == 10) {
    for (auto l : labels) {
      if (is_extended_label(l)) {
        throw InferenceError("label " + std::string(render(l)) +
                             " is not part of the 10-label inventory");
      }
    }
  }
}

struct WordLabel {
  DescriptorLabel label = DescriptorLabel::O;
  double confidence = 0.0;

  bool operator==(const WordLabel&) const = default;
};

namespace detail {

// Highest score; ties go to the earlier label in canonical order.
inline std::pair<DescriptorLabel, double> argmax(const std::map<DescriptorLabel, double>& scores) {
  if (scores.empty()) throw EmptyGroup("subtoken has no label scores");
  auto best = scores.begin();
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return {best->first, best->second};
}

}  // namespace detail

// Collapses the subtokens of one word into a single label.
//   first    label of the first subtoken
//   max      label holding the highest score of any single subtoken
//   average  argmax of per-label means
//   simple   majority vote of per-subtoken argmaxes; ties go to the label
//            that wins earliest among the subtokens
inline WordLabel aggregate_word(std::span<const SubtokenPrediction> subtokens,
                                AverageStrategy strategy) {
  if (subtokens.empty()) throw EmptyGroup("word has no subtokens");
  switch (strategy) {
    case AverageStrategy::kFirst: {
      auto [label, score] = detail::argmax(subtokens.front().label_scores);
      return {label, score};
    }
    case AverageStrategy::kMax: {
      WordLabel best{};
      bool have = false;
      for (const auto& st : subtokens) {
        auto [label, score] = detail::argmax(st.label_scores);
        if (!have || score > best.confidence) {
          best = {label, score};
          have = true;
        }
      }
      return best;
    }
    case AverageStrategy::kAverage: {
      std::map<DescriptorLabel, double> sums;
      for (const auto& st : subtokens) {
        if (st.label_scores.empty()) throw EmptyGroup("subtoken has no label scores");
        for (const auto& [label, score] : st.label_scores) sums[label] += score;
      }
      for (auto& [_, v] : sums) v /= static_cast<double>(subtokens.size());
      auto [label, mean] = detail::argmax(sums);
      return {label, mean};
    }
    case AverageStrategy::kSimple: {
      std::vector<DescriptorLabel> votes;
      votes.reserve(subtokens.size());
      for (const auto& st : subtokens) votes.push_back(detail::argmax(st.label_scores).first);
      std::map<DescriptorLabel, std::size_t> counts;
      for (auto v : votes) ++counts[v];
      std::size_t top = 0;
      for (const auto& [_, c] : counts) top = std::max(top, c);
      for (auto v : votes) {
        if (counts[v] == top) {
          return {v, static_cast<double>(top) / static_cast<double>(votes.size())};
        }
      }
      break;
    }
  }
  throw Error("unreachable aggregation strategy");
}

// Groups consecutive predictions by word_index and aggregates each word.
// Returns (word_index, label) pairs in input order.
inline std::vector<std::pair<std::size_t, WordLabel>> aggregate_subtokens(
    std::span<const SubtokenPrediction> predictions, AverageStrategy strategy) {
  std::vector<std::pair<std::size_t, WordLabel>> out;
  std::size_t begin = 0;
  while (begin < predictions.size()) {
    std::size_t end = begin + 1;
    while (end < predictions.size() &&
           predictions[end].word_index == predictions[begin].word_index) {
      ++end;
    }
    out.emplace_back(predictions[begin].word_index,
                     aggregate_word(predictions.subspan(begin, end - begin), strategy));
    begin = end;
  }
  return out;
}

struct LabeledWord {
  std::string word;
  WordLabel label;

  bool operator==(const LabeledWord&) const = default;
};

// One entry per caption word. Words the backend produced no subtokens for
// (truncated or untokenizable) are labeled O.
inline std::vector<LabeledWord> label_words(const std::string& text, const TaggerBackend& backend,
                                            AverageStrategy strategy) {
  std::vector<LabeledWord> out;
  const std::vector<std::string> words = tokenize_words(text);
  if (words.empty()) return out;

  std::vector<SubtokenPrediction> predictions;
  try {
    predictions = backend.predict(words);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InferenceError(std::string("tagger backend failed: ") + e.what());
  }
  for (const auto& p : predictions) {
    if (p.word_index >= words.size()) {
      throw InferenceError("tagger backend returned a subtoken for word " +
                           std::to_string(p.word_index) + " of " + std::to_string(words.size()));
    }
  }
  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const auto& a, const auto& b) { return a.word_index < b.word_index; });

  out.reserve(words.size());
  for (const auto& w : words) out.push_back({w, {}});
  std::size_t covered = 0;
  for (const auto& [index, wl] : aggregate_subtokens(predictions, strategy)) {
    out[index].label = wl;
    covered = std::max(covered, index + 1);
  }
  if (covered < words.size()) {
    log::warning("caption truncated to " + std::to_string(covered) + " of " +
                 std::to_string(words.size()) + " words");
  }
  return out;
}

// Adjacent words with the same label merge into one span; O words produce no
// span. Span confidence is the mean of its word confidences.
inline std::vector<TaggedSpan> merge_spans(const std::vector<LabeledWord>& words) {
  std::vector<TaggedSpan> spans;
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t j = i + 1;
    while (j < words.size() && words[j].label.label == words[i].label.label) ++j;
    if (words[i].label.label != DescriptorLabel::O) {
      TaggedSpan span{{}, words[i].label.label, i, j, 0.0};
      for (std::size_t k = i; k < j; ++k) {
        if (k != i) span.text.push_back(' ');
        span.text += words[k].word;
        span.confidence += words[k].label.confidence;
      }
      span.confidence /= static_cast<double>(j - i);
      spans.push_back(std::move(span));
    }
    i = j;
  }
  return spans;
}

inline TaggedCaption tag_caption(const std::string& text, const TaggerBackend& backend,
                                 AverageStrategy strategy) {
  return {text, merge_spans(label_words(text, backend, strategy))};
}

inline DescriptorGroups group_by_label(const TaggedCaption& tagged, const AcesConfig& config) {
  DescriptorGroups groups;
  for (const auto& span : tagged.spans) {
    if (span.label == DescriptorLabel::O) continue;
    if (span.label == DescriptorLabel::OTHER && !config.include_other_label) continue;
    groups.add(span.label, span.text);
  }
  return groups;
}

}  // namespace aces
