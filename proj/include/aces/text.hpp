#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace aces {

// Caption word segmentation shared by tagging and the stub backends:
// lower-case, split on whitespace, strip leading and trailing ASCII
// punctuation from each word. Words that are pure punctuation vanish.
inline std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0;
    std::size_t e = current.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(current[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(current[e - 1]))) --e;
    if (b < e) words.emplace_back(current.substr(b, e - b));
    current.clear();
  };
  for (char ch : text) {
    const auto uch = static_cast<unsigned char>(ch);
    if (std::isspace(uch)) {
      flush();
    } else {
      current.push_back(uch < 0x80 ? static_cast<char>(std::tolower(uch)) : ch);
    }
  }
  flush();
  return words;
}

// Plain whitespace split, no normalization.
inline std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string join_words(const std::vector<std::string>& words, std::size_t begin,
                              std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i != begin) out.push_back(' ');
    out += words[i];
  }
  return out;
}

}  // namespace aces
