#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aces/config.hpp"
#include "aces/error.hpp"
#include "aces/types.hpp"

namespace aces {

// Text -> vector model (sentence-embedding model with pooling baked in).
// Implementations must be safe for concurrent encode() calls.
class EmbedderBackend {
 public:
  virtual ~EmbedderBackend() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::vector<double> encode(std::string_view text) const = 0;
};

inline Embedding embed_text(std::string_view text, const EmbedderBackend& backend) {
  if (text.empty()) throw EmptyText();
  std::vector<double> raw;
  try {
    raw = backend.encode(text);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InferenceError(std::string("embedding backend failed: ") + e.what());
  }
  if (raw.size() != backend.dimension()) throw DimensionMismatch(raw.size(), backend.dimension());
  return Embedding::normalized(std::move(raw));
}

// cosine: dot product of the unit vectors, in [-1, 1].
// euclidean: 1 / (1 + |a - b|), in (0, 1].
inline double similarity(const Embedding& a, const Embedding& b, DistanceTechnique technique) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch(a.dimension(), b.dimension());
  const auto av = a.values();
  const auto bv = b.values();
  if (technique == DistanceTechnique::kCosine) {
    double dot = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sq += d * d;
  }
  return 1.0 / (1.0 + std::sqrt(sq));
}

// Per-call memo of text embeddings. Not thread-safe; create one per scoring
// call.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(const EmbedderBackend& backend) : backend_(backend) {}

  const Embedding& get(const std::string& text) {
    auto it = cache_.find(text);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(text, embed_text(text, backend_)).first->second;
  }

  std::size_t size() const { return cache_.size(); }

 private:
  const EmbedderBackend& backend_;
  std::unordered_map<std::string, Embedding> cache_;
};

}  // namespace aces
