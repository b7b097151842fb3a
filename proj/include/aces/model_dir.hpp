#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aces/error.hpp"
#include "aces/labels.hpp"
#include "aces/scoring.hpp"
#include "aces/stub_backends.hpp"
#include "aces/tagger.hpp"
#include "aces/tokenizer.hpp"

#ifdef ACES_WITH_ONNXRUNTIME
#include "aces/onnx_backends.hpp"
#endif

// Model directory layout:
//
//   <models>/tagger/   model.onnx, labels.json, tokenizer files
//   <models>/embedder/ model.onnx, meta.json ({"dimension": D}), tokenizer files
//   <models>/fluency/  model.onnx, tokenizer files
//
// In stub mode each subdirectory may instead hold a stub.json table.

namespace aces {

struct LoadedBackends {
  std::unique_ptr<TaggerBackend> tagger;
  std::unique_ptr<EmbedderBackend> embedder;
  std::unique_ptr<FluencyBackend> fluency;

  Backends view() const { return {tagger.get(), embedder.get(), fluency.get()}; }
};

// labels.json is either a list of label names in index order, an object
// {"0": "WHO", ...}, or a model config carrying "id2label".
inline std::vector<DescriptorLabel> read_label_inventory(const std::filesystem::path& path) {
  nlohmann::json j = detail::read_json_file(path);
  if (j.is_object() && j.contains("id2label")) j = j["id2label"];
  std::vector<DescriptorLabel> labels;
  try {
    if (j.is_array()) {
      for (const auto& name : j) labels.push_back(parse_label(name.get<std::string>()));
    } else if (j.is_object()) {
      std::map<long, DescriptorLabel> by_index;
      for (const auto& [key, name] : j.items()) {
        by_index[std::stol(key)] = parse_label(name.get<std::string>());
      }
      long expect = 0;
      for (const auto& [index, label] : by_index) {
        if (index != expect++) throw InferenceError("labels.json indices are not contiguous");
        labels.push_back(label);
      }
    } else {
      throw InferenceError("labels.json must be a list or an object");
    }
  } catch (const InferenceError&) {
    throw;
  } catch (const std::exception& e) {
    throw InferenceError(path.string() + ": " + e.what());
  }
  validate_label_inventory(labels);
  return labels;
}

// Stub tables from <dir>/<component>/stub.json where present, built-in
// defaults otherwise.
inline LoadedBackends load_stub_backends(const std::optional<std::filesystem::path>& dir) {
  namespace fs = std::filesystem;
  auto table = [&](const char* component) -> std::optional<nlohmann::json> {
    if (!dir) return std::nullopt;
    const fs::path p = *dir / component / "stub.json";
    if (!fs::exists(p)) return std::nullopt;
    return detail::read_json_file(p);
  };
  LoadedBackends b;
  if (auto j = table("tagger")) {
    b.tagger = std::make_unique<StubTagger>(stub_tagger_from_json(*j));
  } else {
    b.tagger = std::make_unique<StubTagger>(default_stub_tagger());
  }
  if (auto j = table("embedder")) {
    b.embedder = std::make_unique<StubEmbedder>(stub_embedder_from_json(*j));
  } else {
    b.embedder = std::make_unique<StubEmbedder>();
  }
  if (auto j = table("fluency")) {
    b.fluency = std::make_unique<StubFluency>(stub_fluency_from_json(*j));
  } else {
    b.fluency = std::make_unique<StubFluency>(default_stub_fluency());
  }
  return b;
}

namespace detail {

inline void require_file(const std::filesystem::path& dir, const char* component,
                         const char* file) {
  if (!std::filesystem::exists(dir / component / file)) {
    throw MissingBackend(std::string(component) + " (expected " + (dir / component / file).string() +
                         ")");
  }
}

}  // namespace detail

// Checks the layout first so that a missing component is reported by name
// before any model is loaded.
inline LoadedBackends load_model_backends(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw MissingBackend("model directory " + dir.string());
  }
  detail::require_file(dir, "tagger", "model.onnx");
  detail::require_file(dir, "tagger", "labels.json");
  detail::require_file(dir, "embedder", "model.onnx");
  detail::require_file(dir, "embedder", "meta.json");
  detail::require_file(dir, "fluency", "model.onnx");
#ifdef ACES_WITH_ONNXRUNTIME
  const auto meta = detail::read_json_file(dir / "embedder" / "meta.json");
  const auto max_len = [](const std::filesystem::path& d) -> std::size_t {
    const auto p = d / "meta.json";
    if (!std::filesystem::exists(p)) return 512;
    return detail::read_json_file(p).value("max_sequence_length", std::size_t{512});
  };
  LoadedBackends b;
  b.tagger = std::make_unique<onnx::OnnxTagger>(
      dir / "tagger" / "model.onnx", load_tokenizer(dir / "tagger"),
      read_label_inventory(dir / "tagger" / "labels.json"), max_len(dir / "tagger"));
  b.embedder = std::make_unique<onnx::OnnxEmbedder>(
      dir / "embedder" / "model.onnx", load_tokenizer(dir / "embedder"),
      meta.at("dimension").get<std::size_t>(), max_len(dir / "embedder"));
  b.fluency = std::make_unique<onnx::OnnxFluency>(
      dir / "fluency" / "model.onnx", load_tokenizer(dir / "fluency"), max_len(dir / "fluency"));
  return b;
#else
  throw InferenceError(
      "model backends need ONNX Runtime; rebuild with -DACES_WITH_ONNXRUNTIME=ON or use stub "
      "backends");
#endif
}

}  // namespace aces
