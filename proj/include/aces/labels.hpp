#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "aces/error.hpp"

namespace aces {

// Sound descriptor categories. Declaration order is the canonical order used
// for iteration, reports and label inventories.
enum class DescriptorLabel : std::uint8_t {
  WHO,
  WHO_WHAT_PROPERTY,
  WHAT,
  HOW,
  HOW_PROPERTY,
  WHEN,
  WHERE,
  WHAT_WHERE,
  SOUND_TYPE,
  SOUND_PROPERTY,
  NON_AUDITORY_SENSATION,
  OTHER,
  O,
};

inline constexpr std::size_t kNumLabels = 13;

inline constexpr std::array<DescriptorLabel, kNumLabels> kAllLabels = {
    DescriptorLabel::WHO,
    DescriptorLabel::WHO_WHAT_PROPERTY,
    DescriptorLabel::WHAT,
    DescriptorLabel::HOW,
    DescriptorLabel::HOW_PROPERTY,
    DescriptorLabel::WHEN,
    DescriptorLabel::WHERE,
    DescriptorLabel::WHAT_WHERE,
    DescriptorLabel::SOUND_TYPE,
    DescriptorLabel::SOUND_PROPERTY,
    DescriptorLabel::NON_AUDITORY_SENSATION,
    DescriptorLabel::OTHER,
    DescriptorLabel::O,
};

// Labels that only exist in the 13-label inventory.
constexpr bool is_extended_label(DescriptorLabel label) {
  return label == DescriptorLabel::WHO_WHAT_PROPERTY ||
         label == DescriptorLabel::HOW_PROPERTY || label == DescriptorLabel::WHAT_WHERE;
}

// Display names, exactly as used in model label files.
constexpr std::string_view render(DescriptorLabel label) {
  switch (label) {
    case DescriptorLabel::WHO: return "WHO";
    case DescriptorLabel::WHO_WHAT_PROPERTY: return "WHO/WHAT PROPERTY";
    case DescriptorLabel::WHAT: return "WHAT";
    case DescriptorLabel::HOW: return "HOW";
    case DescriptorLabel::HOW_PROPERTY: return "HOW PROPERTY";
    case DescriptorLabel::WHEN: return "WHEN";
    case DescriptorLabel::WHERE: return "WHERE";
    case DescriptorLabel::WHAT_WHERE: return "WHAT/WHERE";
    case DescriptorLabel::SOUND_TYPE: return "SOUND TYPE";
    case DescriptorLabel::SOUND_PROPERTY: return "SOUND PROPERTY";
    case DescriptorLabel::NON_AUDITORY_SENSATION: return "NON-AUDITORY SENSATION";
    case DescriptorLabel::OTHER: return "OTHER";
    case DescriptorLabel::O: return "O";
  }
  return "O";
}

namespace detail {

// Upper-cases and folds the separators ' ', '-', '/' onto '_' so that
// "What/Where", "WHAT_WHERE" and "what-where" compare equal.
inline std::string fold_label_key(std::string_view text) {
  std::string key;
  key.reserve(text.size());
  for (char ch : text) {
    if (ch == ' ' || ch == '-' || ch == '/' || ch == '_') {
      key.push_back('_');
    } else {
      key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    }
  }
  return key;
}

}  // namespace detail

inline std::optional<DescriptorLabel> try_parse_label(std::string_view text) {
  const std::string key = detail::fold_label_key(text);
  for (DescriptorLabel label : kAllLabels) {
    if (detail::fold_label_key(render(label)) == key) return label;
  }
  return std::nullopt;
}

inline DescriptorLabel parse_label(std::string_view text) {
  if (auto label = try_parse_label(text)) return *label;
  throw Error("unknown descriptor label: '" + std::string(text) + "'");
}

constexpr std::size_t label_index(DescriptorLabel label) {
  return static_cast<std::size_t>(label);
}

}  // namespace aces
