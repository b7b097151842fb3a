#pragma once

#include <cctype>
#include <climits>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aces/error.hpp"

// Subword tokenizers for the exported transformer models. Inputs are already
// segmented into words (see text.hpp), so alignment of subtokens to words is
// exact and needs no offset bookkeeping.

namespace aces {

struct SubtokenPiece {
  std::int64_t id = 0;
  std::string text;

  bool operator==(const SubtokenPiece&) const = default;
};

class SubwordTokenizer {
 public:
  virtual ~SubwordTokenizer() = default;

  // `first_word` is true for the first word of a sequence; byte-level BPE
  // vocabularies encode the preceding space into the subtoken.
  virtual std::vector<SubtokenPiece> encode_word(std::string_view word,
                                                 bool first_word) const = 0;
  virtual std::int64_t bos_id() const = 0;
  virtual std::int64_t eos_id() const = 0;
  virtual std::int64_t pad_id() const = 0;
};

// Model-ready sequence. word_index is -1 for special tokens.
struct EncodedWords {
  std::vector<std::int64_t> input_ids;
  std::vector<std::int64_t> attention_mask;
  std::vector<long> word_index;
  std::vector<std::string> pieces;
  std::size_t words_kept = 0;
  bool truncated = false;
};

// Encodes whole words until the next word would push the sequence (including
// the two special tokens) past max_length. Words are never split by
// truncation, so a truncated sequence labels its prefix exactly as the prefix
// alone would be labeled.
inline EncodedWords encode_words(const SubwordTokenizer& tokenizer,
                                 std::span<const std::string> words, std::size_t max_length) {
  if (max_length < 3) throw InferenceError("max_sequence_length must be at least 3");
  EncodedWords out;
  out.input_ids.push_back(tokenizer.bos_id());
  out.word_index.push_back(-1);
  out.pieces.emplace_back("<bos>");
  for (std::size_t w = 0; w < words.size(); ++w) {
    auto pieces = tokenizer.encode_word(words[w], w == 0);
    if (out.input_ids.size() + pieces.size() + 1 > max_length) {
      out.truncated = true;
      break;
    }
    for (auto& p : pieces) {
      out.input_ids.push_back(p.id);
      out.word_index.push_back(static_cast<long>(w));
      out.pieces.push_back(std::move(p.text));
    }
    out.words_kept = w + 1;
  }
  out.input_ids.push_back(tokenizer.eos_id());
  out.word_index.push_back(-1);
  out.pieces.emplace_back("<eos>");
  out.attention_mask.assign(out.input_ids.size(), 1);
  return out;
}

// BERT-style WordPiece over vocab.txt (one token per line, id = line number).
class WordPieceTokenizer : public SubwordTokenizer {
 public:
  explicit WordPieceTokenizer(std::unordered_map<std::string, std::int64_t> vocab,
                              bool lowercase = true)
      : vocab_(std::move(vocab)), lowercase_(lowercase) {
    unk_ = require("[UNK]");
    cls_ = require("[CLS]");
    sep_ = require("[SEP]");
    auto pad = vocab_.find("[PAD]");
    pad_ = pad == vocab_.end() ? 0 : pad->second;
  }

  static std::unique_ptr<WordPieceTokenizer> from_file(const std::filesystem::path& vocab_txt,
                                                       bool lowercase = true) {
    std::ifstream in(vocab_txt);
    if (!in) throw InferenceError("cannot open " + vocab_txt.string());
    std::unordered_map<std::string, std::int64_t> vocab;
    std::string line;
    std::int64_t id = 0;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      vocab.emplace(line, id++);
    }
    return std::make_unique<WordPieceTokenizer>(std::move(vocab), lowercase);
  }

  std::vector<SubtokenPiece> encode_word(std::string_view word, bool) const override {
    std::string text(word);
    if (lowercase_) {
      text = fold_latin_accents(text);
      for (char& ch : text) {
        const auto uch = static_cast<unsigned char>(ch);
        if (uch < 0x80) ch = static_cast<char>(std::tolower(uch));
      }
    }
    std::vector<SubtokenPiece> out;
    for (const auto& chunk : split_punctuation(text)) wordpiece(chunk, out);
    return out;
  }

  std::int64_t bos_id() const override { return cls_; }
  std::int64_t eos_id() const override { return sep_; }
  std::int64_t pad_id() const override { return pad_; }

 private:
  static constexpr std::size_t kMaxCharsPerWord = 100;

  std::int64_t require(const std::string& token) const {
    auto it = vocab_.find(token);
    if (it == vocab_.end()) throw InferenceError("WordPiece vocabulary lacks " + token);
    return it->second;
  }

  // Uncased vocabularies are built from accent-stripped text. Covers
  // U+00C0..U+017F; other code points pass through.
  static std::string fold_latin_accents(const std::string& text) {
    static constexpr std::string_view kBase =
        "AAAAAA_CEEEEIIII_NOOOOO__UUUUY__aaaaaa_ceeeeiiii_nooooo__uuuuy_y"
        "AaAaAaCcCcCcCcDd__EeEeEeEeEeGgGgGgGgHh__IiIiIiIiI___JjKk_LlLlLl_"
        "___NnNnNn___OoOoOo__RrRrRrSsSsSsSsTtTt__UuUuUuUuUuUuWwYyYZzZzZz_";
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      const auto b0 = static_cast<unsigned char>(text[i]);
      if ((b0 == 0xC3 || b0 == 0xC4 || b0 == 0xC5) && i + 1 < text.size()) {
        const auto b1 = static_cast<unsigned char>(text[i + 1]);
        const unsigned cp = ((b0 & 0x1Fu) << 6) | (b1 & 0x3Fu);
        if ((b1 & 0xC0) == 0x80 && cp >= 0xC0 && cp < 0x180 && kBase[cp - 0xC0] != '_') {
          out.push_back(kBase[cp - 0xC0]);
          ++i;
          continue;
        }
      }
      out.push_back(text[i]);
    }
    return out;
  }

  static std::vector<std::string> split_punctuation(std::string_view word) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : word) {
      const auto uch = static_cast<unsigned char>(ch);
      if (uch < 0x80 && std::ispunct(uch)) {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
        out.emplace_back(1, ch);
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
  }

  // Greedy longest-match-first. A chunk with any unmatched remainder
  // becomes a single [UNK].
  void wordpiece(const std::string& chunk, std::vector<SubtokenPiece>& out) const {
    if (chunk.size() > kMaxCharsPerWord) {
      out.push_back({unk_, "[UNK]"});
      return;
    }
    std::vector<SubtokenPiece> pieces;
    std::size_t start = 0;
    while (start < chunk.size()) {
      std::size_t end = chunk.size();
      bool found = false;
      while (end > start) {
        std::string candidate = chunk.substr(start, end - start);
        if (start > 0) candidate = "##" + candidate;
        auto it = vocab_.find(candidate);
        if (it != vocab_.end()) {
          pieces.push_back({it->second, std::move(candidate)});
          found = true;
          break;
        }
        --end;
        // Do not cut inside a UTF-8 sequence.
        while (end > start && (static_cast<unsigned char>(chunk[end]) & 0xC0) == 0x80) --end;
      }
      if (!found) {
        out.push_back({unk_, "[UNK]"});
        return;
      }
      start = end;
    }
    out.insert(out.end(), pieces.begin(), pieces.end());
  }

  std::unordered_map<std::string, std::int64_t> vocab_;
  bool lowercase_ = true;
  std::int64_t unk_ = 0, cls_ = 0, sep_ = 0, pad_ = 0;
};

// GPT-2/RoBERTa byte-level BPE over vocab.json + merges.txt.
class ByteLevelBpeTokenizer : public SubwordTokenizer {
 public:
  ByteLevelBpeTokenizer(std::unordered_map<std::string, std::int64_t> vocab,
                        std::vector<std::pair<std::string, std::string>> merges,
                        bool add_prefix_space)
      : vocab_(std::move(vocab)), add_prefix_space_(add_prefix_space) {
    for (std::size_t i = 0; i < merges.size(); ++i) {
      ranks_.emplace(merges[i].first + ' ' + merges[i].second, static_cast<int>(i));
    }
    init_byte_map();
    bos_ = lookup_or("<s>", 0);
    pad_ = lookup_or("<pad>", 1);
    eos_ = lookup_or("</s>", 2);
    unk_ = lookup_or("<unk>", 3);
  }

  static std::unique_ptr<ByteLevelBpeTokenizer> from_files(
      const std::filesystem::path& vocab_json, const std::filesystem::path& merges_txt,
      bool add_prefix_space) {
    std::ifstream vin(vocab_json);
    if (!vin) throw InferenceError("cannot open " + vocab_json.string());
    nlohmann::json vj;
    try {
      vin >> vj;
    } catch (const nlohmann::json::exception& e) {
      throw InferenceError(vocab_json.string() + ": " + e.what());
    }
    std::unordered_map<std::string, std::int64_t> vocab;
    for (const auto& [tok, id] : vj.items()) vocab.emplace(tok, id.get<std::int64_t>());

    std::ifstream min(merges_txt);
    if (!min) throw InferenceError("cannot open " + merges_txt.string());
    std::vector<std::pair<std::string, std::string>> merges;
    std::string line;
    while (std::getline(min, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.rfind("#version", 0) == 0) continue;
      const auto sp = line.find(' ');
      if (sp == std::string::npos) throw InferenceError("malformed merge rule: " + line);
      merges.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return std::make_unique<ByteLevelBpeTokenizer>(std::move(vocab), std::move(merges),
                                                   add_prefix_space);
  }

  std::vector<SubtokenPiece> encode_word(std::string_view word, bool first_word) const override {
    std::string text;
    if (!first_word || add_prefix_space_) text.push_back(' ');
    text.append(word);
    std::vector<SubtokenPiece> out;
    for (const auto& chunk : pretokenize(text)) {
      std::string mapped;
      for (unsigned char b : chunk) mapped += byte_map_[b];
      for (auto& piece : bpe(mapped)) {
        auto it = vocab_.find(piece);
        out.push_back({it == vocab_.end() ? unk_ : it->second, std::move(piece)});
      }
    }
    return out;
  }

  std::int64_t bos_id() const override { return bos_; }
  std::int64_t eos_id() const override { return eos_; }
  std::int64_t pad_id() const override { return pad_; }

 private:
  std::int64_t lookup_or(const std::string& token, std::int64_t fallback) const {
    auto it = vocab_.find(token);
    return it == vocab_.end() ? fallback : it->second;
  }

  static std::string utf8(unsigned cp) {
    std::string s;
    if (cp < 0x80) {
      s.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      s.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      s.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      s.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      s.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return s;
  }

  // Printable bytes map to themselves, the rest to code points from 256 up.
  void init_byte_map() {
    unsigned next = 256;
    for (unsigned b = 0; b < 256; ++b) {
      const bool printable =
          (b >= 33 && b <= 126) || (b >= 161 && b <= 172) || (b >= 174 && b <= 255);
      byte_map_[b] = utf8(printable ? b : next++);
    }
  }

  enum class CharClass { kLetter, kNumber, kSpace, kOther };

  static CharClass classify(unsigned char c) {
    if (c >= 0x80 || std::isalpha(c)) return CharClass::kLetter;
    if (std::isdigit(c)) return CharClass::kNumber;
    if (std::isspace(c)) return CharClass::kSpace;
    return CharClass::kOther;
  }

  // The GPT-2 split pattern restricted to single words: English
  // contractions, then " ?letters", " ?digits" and " ?other" runs. Non-ASCII
  // bytes count as letters.
  static std::vector<std::string> pretokenize(const std::string& text) {
    static const char* kContractions[] = {"'s", "'t", "'re", "'ve", "'m", "'ll", "'d"};
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
      bool matched = false;
      for (const char* c : kContractions) {
        const std::string_view cv(c);
        if (text.compare(i, cv.size(), cv) == 0) {
          out.emplace_back(cv);
          i += cv.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      std::size_t start = i;
      if (text[i] == ' ' && i + 1 < text.size() &&
          classify(static_cast<unsigned char>(text[i + 1])) != CharClass::kSpace) {
        ++i;
      }
      const CharClass cls = classify(static_cast<unsigned char>(text[i]));
      while (i < text.size() && classify(static_cast<unsigned char>(text[i])) == cls) ++i;
      out.push_back(text.substr(start, i - start));
    }
    return out;
  }

  static std::vector<std::string> utf8_chars(const std::string& s) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size();) {
      const auto c = static_cast<unsigned char>(s[i]);
      const std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : 4;
      out.push_back(s.substr(i, len));
      i += len;
    }
    return out;
  }

  std::vector<std::string> bpe(const std::string& mapped) const {
    std::vector<std::string> symbols = utf8_chars(mapped);
    while (symbols.size() > 1) {
      int best_rank = INT_MAX;
      std::size_t best = 0;
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = ranks_.find(symbols[i] + ' ' + symbols[i + 1]);
        if (it != ranks_.end() && it->second < best_rank) {
          best_rank = it->second;
          best = i;
        }
      }
      if (best_rank == INT_MAX) break;
      const std::string left = symbols[best];
      const std::string right = symbols[best + 1];
      std::vector<std::string> merged;
      merged.reserve(symbols.size());
      for (std::size_t i = 0; i < symbols.size();) {
        if (i + 1 < symbols.size() && symbols[i] == left && symbols[i + 1] == right) {
          merged.push_back(left + right);
          i += 2;
        } else {
          merged.push_back(symbols[i]);
          ++i;
        }
      }
      symbols = std::move(merged);
    }
    return symbols;
  }

  std::unordered_map<std::string, std::int64_t> vocab_;
  std::unordered_map<std::string, int> ranks_;
  std::string byte_map_[256];
  bool add_prefix_space_ = false;
  std::int64_t bos_ = 0, eos_ = 2, pad_ = 1, unk_ = 3;
};

// Picks the tokenizer from the files present in a model directory:
// vocab.json + merges.txt -> byte-level BPE, vocab.txt -> WordPiece.
// tokenizer_config.json may set "add_prefix_space" (BPE, default false) and
// "do_lower_case" (WordPiece, default true).
inline std::unique_ptr<SubwordTokenizer> load_tokenizer(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  nlohmann::json cfg = nlohmann::json::object();
  if (fs::exists(dir / "tokenizer_config.json")) {
    std::ifstream in(dir / "tokenizer_config.json");
    cfg = nlohmann::json::parse(in, nullptr, false);
    if (!cfg.is_object()) throw InferenceError("malformed tokenizer_config.json in " + dir.string());
  }
  if (fs::exists(dir / "vocab.json") && fs::exists(dir / "merges.txt")) {
    return ByteLevelBpeTokenizer::from_files(dir / "vocab.json", dir / "merges.txt",
                                             cfg.value("add_prefix_space", false));
  }
  if (fs::exists(dir / "vocab.txt")) {
    return WordPieceTokenizer::from_file(dir / "vocab.txt", cfg.value("do_lower_case", true));
  }
  throw InferenceError("no tokenizer files (vocab.txt or vocab.json+merges.txt) in " +
                       dir.string());
}

}  // namespace aces
