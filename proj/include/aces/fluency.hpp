#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "aces/error.hpp"

namespace aces {

// Caption fluency-error classifier: one probability per error head (a single
// entry for binary models).
class FluencyBackend {
 public:
  virtual ~FluencyBackend() = default;

  virtual std::vector<double> error_probabilities(std::string_view text) const = 0;
};

// Probability that the caption has any fluency error: the maximum over the
// model's error heads, clamped to [0, 1].
inline double fluency_error_probability(std::string_view text, const FluencyBackend& backend) {
  if (text.empty()) throw EmptyText();
  std::vector<double> probs;
  try {
    probs = backend.error_probabilities(text);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InferenceError(std::string("fluency backend failed: ") + e.what());
  }
  if (probs.empty()) throw InferenceError("fluency backend returned no probabilities");
  double p = 0.0;
  for (double v : probs) {
    if (std::isnan(v)) throw InferenceError("fluency backend returned NaN");
    p = std::max(p, v);
  }
  return std::clamp(p, 0.0, 1.0);
}

// Strict: a probability equal to the threshold is not flagged.
constexpr int fluency_flag(double probability, double threshold) {
  return probability > threshold ? 1 : 0;
}

}  // namespace aces
