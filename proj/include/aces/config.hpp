#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "aces/error.hpp"

namespace aces {

enum class AverageStrategy { kSimple, kFirst, kMax, kAverage };
enum class DistanceTechnique { kCosine, kEuclidean };

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

constexpr std::string_view to_string(AverageStrategy s) {
  switch (s) {
    case AverageStrategy::kSimple: return "simple";
    case AverageStrategy::kFirst: return "first";
    case AverageStrategy::kMax: return "max";
    case AverageStrategy::kAverage: return "average";
  }
  return "max";
}

constexpr std::string_view to_string(DistanceTechnique t) {
  return t == DistanceTechnique::kCosine ? "cosine" : "euclidean";
}

// Case-insensitive.
inline AverageStrategy parse_average_strategy(std::string_view text) {
  const std::string key = detail::lower(text);
  for (auto s : {AverageStrategy::kSimple, AverageStrategy::kFirst, AverageStrategy::kMax,
                 AverageStrategy::kAverage}) {
    if (key == to_string(s)) return s;
  }
  throw ConfigError("average_strategy", "expected simple|first|max|average, got '" +
                                            std::string(text) + "'");
}

inline DistanceTechnique parse_distance_technique(std::string_view text) {
  const std::string key = detail::lower(text);
  if (key == "cosine") return DistanceTechnique::kCosine;
  if (key == "euclidean") return DistanceTechnique::kEuclidean;
  throw ConfigError("distance_technique",
                    "expected cosine|euclidean, got '" + std::string(text) + "'");
}

// Metric hyperparameters. Defaults are the tuned values the metric ships with.
struct AcesConfig {
  double fluency_weight = 0.5;
  double fluency_threshold = 0.9;
  double f_beta = 9.0;
  bool apply_penalty = true;
  int penalty_score = 1850;
  int total_labels = 13;
  AverageStrategy average_strategy = AverageStrategy::kMax;
  DistanceTechnique distance_technique = DistanceTechnique::kCosine;
  // Use whole-caption embedding similarity when no descriptor label overlaps.
  bool sbert_fallback = true;
  bool include_other_label = false;

  bool operator==(const AcesConfig&) const = default;
};

inline AcesConfig validate_config(AcesConfig config) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(config.fluency_weight)) throw ConfigError("fluency_weight", "must be in [0, 1]");
  if (!in_unit(config.fluency_threshold)) {
    throw ConfigError("fluency_threshold", "must be in [0, 1]");
  }
  if (!std::isfinite(config.f_beta) || config.f_beta <= 0.0) {
    throw ConfigError("f_beta", "must be > 0");
  }
  if (config.penalty_score < 1) throw ConfigError("penalty_score", "must be a positive integer");
  if (config.total_labels < 1) throw ConfigError("total_labels", "must be a positive integer");
  return config;
}

namespace detail {

// Tuning knobs that select alternative score compositions. They are accepted
// only at the values the shipped metric uses.
inline const nlohmann::json& fixed_options() {
  static const nlohmann::json kFixed = {
      {"division", 0.998},
      {"use_score", "no"},
      {"overlap_type", "both"},
      {"F1", 3.798},
      {"overall_sbert", false},
      {"overall_sbert_weight", 0.5},
      {"F1_calc", "max-mean"},
      {"use_sbert", true},
      {"fl_weighing", true},
      {"model", "gijs/aces-roberta-13"},
  };
  return kFixed;
}

inline bool same_option_value(const nlohmann::json& got, const nlohmann::json& want) {
  if (want.is_number() && got.is_number()) {
    return std::abs(got.get<double>() - want.get<double>()) <= 1e-12;
  }
  if (want.is_string() && got.is_string()) {
    return lower(got.get<std::string>()) == lower(want.get<std::string>());
  }
  return got == want;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

inline int get_int_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
      return static_cast<int>(v.get<double>());
    }
    throw ConfigError(key, "must be an integer");
  }
  return v.get<int>();
}

}  // namespace detail

// Parses a config object. Missing fields keep their defaults; enumerations
// are case-insensitive; the result is validated.
inline AcesConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  AcesConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "fluency_weight") {
      c.fluency_weight = detail::get_field<double>(j, "fluency_weight");
    } else if (key == "fluency_threshold") {
      c.fluency_threshold = detail::get_field<double>(j, "fluency_threshold");
    } else if (key == "f_beta") {
      c.f_beta = detail::get_field<double>(j, "f_beta");
    } else if (key == "apply_penalty") {
      c.apply_penalty = detail::get_field<bool>(j, "apply_penalty");
    } else if (key == "penalty_score") {
      c.penalty_score = detail::get_int_field(j, "penalty_score");
    } else if (key == "total_labels") {
      c.total_labels = detail::get_int_field(j, "total_labels");
    } else if (key == "average_strategy") {
      c.average_strategy =
          parse_average_strategy(detail::get_field<std::string>(j, "average_strategy"));
    } else if (key == "distance_technique") {
      c.distance_technique =
          parse_distance_technique(detail::get_field<std::string>(j, "distance_technique"));
    } else if (key == "sbert_fallback") {
      c.sbert_fallback = detail::get_field<bool>(j, "sbert_fallback");
    } else if (key == "include_other_label") {
      c.include_other_label = detail::get_field<bool>(j, "include_other_label");
    } else if (detail::fixed_options().contains(key)) {
      if (!detail::same_option_value(value, detail::fixed_options()[key])) {
        throw ConfigError(key, "unsupported non-default option");
      }
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return validate_config(c);
}

inline nlohmann::ordered_json to_json(const AcesConfig& c) {
  nlohmann::ordered_json j;
  j["fluency_weight"] = c.fluency_weight;
  j["fluency_threshold"] = c.fluency_threshold;
  j["f_beta"] = c.f_beta;
  j["apply_penalty"] = c.apply_penalty;
  j["penalty_score"] = c.penalty_score;
  j["total_labels"] = c.total_labels;
  j["average_strategy"] = std::string(to_string(c.average_strategy));
  j["distance_technique"] = std::string(to_string(c.distance_technique));
  j["sbert_fallback"] = c.sbert_fallback;
  j["include_other_label"] = c.include_other_label;
  return j;
}

inline AcesConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", e.what());
  }
  return config_from_json(j);
}

}  // namespace aces
