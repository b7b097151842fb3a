#pragma once

// ONNX Runtime implementations of the three backends. Only available when
// the project is configured with ACES_WITH_ONNXRUNTIME=ON.

#ifdef ACES_WITH_ONNXRUNTIME

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <onnxruntime_cxx_api.h>

#include "aces/embedder.hpp"
#include "aces/error.hpp"
#include "aces/fluency.hpp"
#include "aces/tagger.hpp"
#include "aces/text.hpp"
#include "aces/tokenizer.hpp"

namespace aces::onnx {

inline Ort::Env& environment() {
  static Ort::Env env(ORT_LOGGING_LEVEL_WARNING, "aces");
  return env;
}

// One inference session over a graph taking input_ids / attention_mask
// (and token_type_ids when the graph declares it). Run() is thread-safe in
// ONNX Runtime, so a single session serves all callers.
class Session {
 public:
  explicit Session(const std::filesystem::path& model_path) {
    Ort::SessionOptions options;
    options.SetGraphOptimizationLevel(GraphOptimizationLevel::ORT_ENABLE_ALL);
    try {
      session_ = std::make_unique<Ort::Session>(environment(), model_path.c_str(), options);
      Ort::AllocatorWithDefaultOptions allocator;
      for (std::size_t i = 0; i < session_->GetInputCount(); ++i) {
        input_names_.emplace_back(session_->GetInputNameAllocated(i, allocator).get());
      }
    } catch (const Ort::Exception& e) {
      throw InferenceError("cannot load " + model_path.string() + ": " + e.what());
    }
  }

  struct Output {
    std::vector<std::int64_t> shape;
    std::vector<float> values;
  };

  Output run(const EncodedWords& encoded, const char* output_name) const {
    const auto n = static_cast<std::int64_t>(encoded.input_ids.size());
    const std::array<std::int64_t, 2> shape{1, n};
    std::vector<std::int64_t> ids = encoded.input_ids;
    std::vector<std::int64_t> mask = encoded.attention_mask;
    std::vector<std::int64_t> type_ids(ids.size(), 0);
    auto memory = Ort::MemoryInfo::CreateCpu(OrtArenaAllocator, OrtMemTypeDefault);

    std::vector<Ort::Value> inputs;
    std::vector<const char*> names;
    for (const auto& name : input_names_) {
      std::vector<std::int64_t>* data = nullptr;
      if (name == "input_ids") {
        data = &ids;
      } else if (name == "attention_mask") {
        data = &mask;
      } else if (name == "token_type_ids") {
        data = &type_ids;
      } else {
        throw InferenceError("unsupported model input '" + name + "'");
      }
      inputs.push_back(Ort::Value::CreateTensor<std::int64_t>(memory, data->data(), data->size(),
                                                              shape.data(), shape.size()));
      names.push_back(name.c_str());
    }
    try {
      auto outputs = session_->Run(Ort::RunOptions{nullptr}, names.data(), inputs.data(),
                                   inputs.size(), &output_name, 1);
      auto info = outputs.front().GetTensorTypeAndShapeInfo();
      Output out;
      out.shape = info.GetShape();
      const float* data = outputs.front().GetTensorData<float>();
      out.values.assign(data, data + info.GetElementCount());
      return out;
    } catch (const Ort::Exception& e) {
      throw InferenceError(std::string("inference failed: ") + e.what());
    }
  }

 private:
  std::unique_ptr<Ort::Session> session_;
  std::vector<std::string> input_names_;
};

// model.onnx with output logits [1, seq, n_labels], tokenizer files and
// labels.json.
class OnnxTagger : public TaggerBackend {
 public:
  OnnxTagger(const std::filesystem::path& model_path, std::unique_ptr<SubwordTokenizer> tokenizer,
             std::vector<DescriptorLabel> inventory, std::size_t max_sequence_length = 512)
      : session_(model_path),
        tokenizer_(std::move(tokenizer)),
        inventory_(std::move(inventory)),
        max_sequence_length_(max_sequence_length) {
    validate_label_inventory(inventory_);
  }

  const std::vector<DescriptorLabel>& label_inventory() const override { return inventory_; }
  std::size_t max_sequence_length() const override { return max_sequence_length_; }

  std::vector<SubtokenPrediction> predict(std::span<const std::string> words) const override {
    const EncodedWords encoded = encode_words(*tokenizer_, words, max_sequence_length_);
    const auto out = session_.run(encoded, "logits");
    const std::size_t n_labels = inventory_.size();
    if (out.shape.size() != 3 || out.shape[1] != static_cast<std::int64_t>(encoded.input_ids.size()) ||
        out.shape[2] != static_cast<std::int64_t>(n_labels)) {
      throw InferenceError("unexpected logits shape from tagger model");
    }
    std::vector<SubtokenPrediction> preds;
    for (std::size_t pos = 0; pos < encoded.input_ids.size(); ++pos) {
      if (encoded.word_index[pos] < 0) continue;
      const float* logits = out.values.data() + pos * n_labels;
      const float top = *std::max_element(logits, logits + n_labels);
      double z = 0.0;
      std::vector<double> e(n_labels);
      for (std::size_t k = 0; k < n_labels; ++k) z += e[k] = std::exp(double(logits[k]) - top);
      SubtokenPrediction p{encoded.pieces[pos], static_cast<std::size_t>(encoded.word_index[pos]),
                           {}};
      for (std::size_t k = 0; k < n_labels; ++k) p.label_scores[inventory_[k]] = e[k] / z;
      preds.push_back(std::move(p));
    }
    return preds;
  }

 private:
  Session session_;
  std::unique_ptr<SubwordTokenizer> tokenizer_;
  std::vector<DescriptorLabel> inventory_;
  std::size_t max_sequence_length_;
};

// model.onnx with output sentence_embedding [1, D].
class OnnxEmbedder : public EmbedderBackend {
 public:
  OnnxEmbedder(const std::filesystem::path& model_path, std::unique_ptr<SubwordTokenizer> tokenizer,
               std::size_t dimension, std::size_t max_sequence_length = 512)
      : session_(model_path),
        tokenizer_(std::move(tokenizer)),
        dimension_(dimension),
        max_sequence_length_(max_sequence_length) {}

  std::size_t dimension() const override { return dimension_; }

  std::vector<double> encode(std::string_view text) const override {
    const auto words = split_whitespace(text);
    const auto out =
        session_.run(encode_words(*tokenizer_, words, max_sequence_length_), "sentence_embedding");
    if (out.values.size() != dimension_) throw DimensionMismatch(out.values.size(), dimension_);
    return {out.values.begin(), out.values.end()};
  }

 private:
  Session session_;
  std::unique_ptr<SubwordTokenizer> tokenizer_;
  std::size_t dimension_;
  std::size_t max_sequence_length_;
};

// model.onnx with output error_probs [1, n_error_types] or [1, 1].
class OnnxFluency : public FluencyBackend {
 public:
  OnnxFluency(const std::filesystem::path& model_path, std::unique_ptr<SubwordTokenizer> tokenizer,
              std::size_t max_sequence_length = 512)
      : session_(model_path),
        tokenizer_(std::move(tokenizer)),
        max_sequence_length_(max_sequence_length) {}

  std::vector<double> error_probabilities(std::string_view text) const override {
    const auto words = split_whitespace(text);
    const auto out = session_.run(encode_words(*tokenizer_, words, max_sequence_length_),
                                  "error_probs");
    return {out.values.begin(), out.values.end()};
  }

 private:
  Session session_;
  std::unique_ptr<SubwordTokenizer> tokenizer_;
  std::size_t max_sequence_length_;
};

}  // namespace aces::onnx

#endif  // ACES_WITH_ONNXRUNTIME
