#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aces/embedder.hpp"
#include "aces/error.hpp"
#include "aces/fluency.hpp"
#include "aces/labels.hpp"
#include "aces/tagger.hpp"
#include "aces/text.hpp"

// Deterministic table-driven backends. They make the whole metric runnable
// and checkable without model files.

namespace aces {

// Word -> label lookup. Every word is one subtoken with a one-hot score
// vector over the full 13-label inventory.
class StubTagger : public TaggerBackend {
 public:
  explicit StubTagger(std::map<std::string, DescriptorLabel> table,
                      DescriptorLabel default_label = DescriptorLabel::O,
                      std::size_t max_sequence_length = 512)
      : table_(std::move(table)),
        default_label_(default_label),
        max_sequence_length_(max_sequence_length),
        inventory_(kAllLabels.begin(), kAllLabels.end()) {
    if (max_sequence_length_ < 3) throw InferenceError("max_sequence_length must be at least 3");
  }

  const std::vector<DescriptorLabel>& label_inventory() const override { return inventory_; }
  std::size_t max_sequence_length() const override { return max_sequence_length_; }

  DescriptorLabel lookup(const std::string& word) const {
    auto it = table_.find(word);
    return it == table_.end() ? default_label_ : it->second;
  }

  std::vector<SubtokenPrediction> predict(std::span<const std::string> words) const override {
    // Two positions are reserved for the sequence delimiters.
    const std::size_t kept = std::min(words.size(), max_sequence_length_ - 2);
    std::vector<SubtokenPrediction> out;
    out.reserve(kept);
    for (std::size_t i = 0; i < kept; ++i) {
      SubtokenPrediction p{words[i], i, {}};
      const DescriptorLabel label = lookup(words[i]);
      for (auto l : inventory_) p.label_scores[l] = l == label ? 1.0 : 0.0;
      out.push_back(std::move(p));
    }
    return out;
  }

  const std::map<std::string, DescriptorLabel>& table() const { return table_; }

 private:
  std::map<std::string, DescriptorLabel> table_;
  DescriptorLabel default_label_;
  std::size_t max_sequence_length_;
  std::vector<DescriptorLabel> inventory_;
};

// Hash-seeded pseudo-random vectors. For text t the raw vector is produced
// by SplitMix64 started from FNV-1a-64(t) xor seed; each output's top 53 bits
// give u in [0, 1), mapped to 2u - 1 (or kept as u when `nonnegative`).
// Explicit vectors override the hash for listed texts.
class StubEmbedder : public EmbedderBackend {
 public:
  explicit StubEmbedder(std::size_t dimension = 16, std::uint64_t seed = 0,
                        bool nonnegative = false,
                        std::map<std::string, std::vector<double>> vectors = {})
      : dimension_(dimension), seed_(seed), nonnegative_(nonnegative),
        vectors_(std::move(vectors)) {
    if (dimension_ == 0) throw InferenceError("embedding dimension must be positive");
    for (const auto& [text, v] : vectors_) {
      if (v.size() != dimension_) throw DimensionMismatch(v.size(), dimension_);
    }
  }

  std::size_t dimension() const override { return dimension_; }

  std::vector<double> encode(std::string_view text) const override {
    if (auto it = vectors_.find(std::string(text)); it != vectors_.end()) return it->second;
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : text) {
      hash ^= c;
      hash *= 1099511628211ULL;
    }
    std::uint64_t state = hash ^ seed_;
    std::vector<double> out(dimension_);
    for (auto& v : out) {
      state += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = state;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      z ^= z >> 31;
      const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
      v = nonnegative_ ? u : 2.0 * u - 1.0;
    }
    return out;
  }

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
  bool nonnegative_;
  std::map<std::string, std::vector<double>> vectors_;
};

// Caption -> error probability. Keys are compared after word normalization
// (lower-case, punctuation stripped, single spaces).
class StubFluency : public FluencyBackend {
 public:
  explicit StubFluency(std::map<std::string, double> table = {}, double default_probability = 0.01)
      : default_probability_(default_probability) {
    for (auto& [text, p] : table) table_[normalize(text)] = p;
  }

  std::vector<double> error_probabilities(std::string_view text) const override {
    auto it = table_.find(normalize(text));
    return {it == table_.end() ? default_probability_ : it->second};
  }

  static std::string normalize(std::string_view text) {
    const auto words = tokenize_words(text);
    return join_words(words, 0, words.size());
  }

 private:
  std::map<std::string, double> table_;
  double default_probability_;
};

// Small vocabulary covering common caption words; used by --stub-backends
// when the model directory has no stub tables.
inline StubTagger default_stub_tagger() {
  using L = DescriptorLabel;
  std::map<std::string, DescriptorLabel> t = {
      {"person", L::WHO},       {"man", L::WHO},           {"woman", L::WHO},
      {"people", L::WHO},       {"child", L::WHO},         {"bird", L::WHO},
      {"birds", L::WHO},        {"dog", L::WHO},           {"pigeons", L::WHO},
      {"walking", L::HOW},      {"on", L::HOW},            {"caws", L::HOW},
      {"croaks", L::HOW},       {"talking", L::HOW},       {"speaking", L::HOW},
      {"barking", L::HOW},      {"chirping", L::HOW},      {"falls", L::HOW},
      {"falling", L::HOW},      {"typing", L::HOW},        {"rustling", L::HOW},
      {"hard", L::WHAT_WHERE},  {"surface", L::WHAT_WHERE}, {"floor", L::WHAT_WHERE},
      {"door", L::WHAT},        {"rain", L::WHAT},         {"thunder", L::WHAT},
      {"keyboard", L::WHAT},    {"water", L::WHAT},        {"car", L::WHAT},
      {"loudly", L::HOW_PROPERTY}, {"softly", L::HOW_PROPERTY},
      {"distance", L::WHERE},   {"street", L::WHERE},      {"room", L::WHERE},
      {"background", L::WHERE}, {"then", L::WHEN},         {"while", L::WHEN},
      {"noise", L::SOUND_TYPE}, {"music", L::SOUND_TYPE},  {"loud", L::SOUND_PROPERTY},
      {"quiet", L::SOUND_PROPERTY}, {"cold", L::NON_AUDITORY_SENSATION},
  };
  return StubTagger(std::move(t));
}

inline StubFluency default_stub_fluency() {
  return StubFluency({{"a door is followed by a", 0.99}, {"rain falls", 0.01}}, 0.01);
}

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InferenceError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InferenceError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

// {"labels": {"word": "LABEL", ...}, "default": "O", "max_sequence_length": 512}
inline StubTagger stub_tagger_from_json(const nlohmann::json& j) {
  try {
    std::map<std::string, DescriptorLabel> table;
    for (const auto& [word, label] : j.at("labels").items()) {
      table.emplace(word, parse_label(label.get<std::string>()));
    }
    return StubTagger(std::move(table), parse_label(j.value("default", std::string("O"))),
                      j.value("max_sequence_length", std::size_t{512}));
  } catch (const nlohmann::json::exception& e) {
    throw InferenceError(std::string("stub tagger table: ") + e.what());
  }
}

// {"dimension": 16, "seed": 0, "nonnegative": false, "vectors": {"text": [...]}}
inline StubEmbedder stub_embedder_from_json(const nlohmann::json& j) {
  try {
    std::map<std::string, std::vector<double>> vectors;
    if (j.contains("vectors")) {
      for (const auto& [text, v] : j.at("vectors").items()) {
        vectors.emplace(text, v.get<std::vector<double>>());
      }
    }
    return StubEmbedder(j.value("dimension", std::size_t{16}), j.value("seed", std::uint64_t{0}),
                        j.value("nonnegative", false), std::move(vectors));
  } catch (const nlohmann::json::exception& e) {
    throw InferenceError(std::string("stub embedder table: ") + e.what());
  }
}

// {"default": 0.01, "table": {"caption": 0.99, ...}}
inline StubFluency stub_fluency_from_json(const nlohmann::json& j) {
  try {
    return StubFluency(j.value("table", std::map<std::string, double>{}),
                       j.value("default", 0.01));
  } catch (const nlohmann::json::exception& e) {
    throw InferenceError(std::string("stub fluency table: ") + e.what());
  }
}

}  // namespace aces
