#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aces/benchmark.hpp"
#include "aces/config.hpp"
#include "aces/model_dir.hpp"
#include "aces/parallel.hpp"
#include "aces/scoring.hpp"

// Command implementations behind tools/aces. Each returns the process exit
// code: 0 success, 1 fatal (nothing scored), 2 partial failure. Data goes to
// `out` (or the output file), diagnostics to `err`.

namespace aces::cli {

struct ScoreRequest {
  std::string id;
  std::string candidate;
  std::vector<std::string> references;
};

struct CommonOptions {
  std::optional<std::filesystem::path> models;
  std::optional<std::filesystem::path> config;
  bool stub_backends = false;
  std::optional<bool> fallback;
  std::size_t threads = 1;
};

struct ScoreOptions : CommonOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> output;
  std::string format = "jsonl";
};

struct BenchmarkOptions : CommonOptions {
  std::filesystem::path input;
  std::optional<std::filesystem::path> report;
};

// One input row: either a request or the reason it could not be read.
using RequestRow = std::variant<ScoreRequest, std::string>;

inline RequestRow parse_jsonl_request(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::string("not a JSON object");
  ScoreRequest r;
  try {
    r.id = j.at("id").get<std::string>();
    r.candidate = j.at("candidate").get<std::string>();
    r.references = j.at("references").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    return std::string("bad request: ") + e.what();
  }
  if (r.references.empty()) return std::string("references must be non-empty");
  return r;
}

// RFC 4180 fields: quoted fields may contain commas and doubled quotes.
inline std::optional<std::vector<std::string>> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

// Columns id,candidate,ref1..refN; empty reference cells are ignored.
inline RequestRow parse_csv_request(const std::string& line) {
  auto fields = split_csv_line(line);
  if (!fields) return std::string("unterminated quote");
  if (fields->size() < 3) return std::string("expected id,candidate,ref1[,ref2...]");
  ScoreRequest r{(*fields)[0], (*fields)[1], {}};
  for (std::size_t i = 2; i < fields->size(); ++i) {
    if (!(*fields)[i].empty()) r.references.push_back((*fields)[i]);
  }
  if (r.references.empty()) return std::string("references must be non-empty");
  return r;
}

struct NumberedRow {
  std::size_t line;
  RequestRow row;
};

inline std::vector<NumberedRow> read_requests(std::istream& in, const std::string& format) {
  std::vector<NumberedRow> rows;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (format == "csv") {
      if (rows.empty() && text.rfind("id,", 0) == 0) continue;  // header
      rows.push_back({line, parse_csv_request(text)});
    } else {
      rows.push_back({line, parse_jsonl_request(text)});
    }
  }
  return rows;
}

namespace detail {

inline std::optional<std::filesystem::path> model_dir(const CommonOptions& o) {
  if (o.models) return o.models;
  if (const char* env = std::getenv("ACES_MODEL_DIR"); env && *env) {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

inline LoadedBackends load_backends(const CommonOptions& o) {
  const auto dir = model_dir(o);
  if (o.stub_backends) return load_stub_backends(dir);
  if (!dir) throw MissingBackend("model directory (pass --models or set ACES_MODEL_DIR)");
  return load_model_backends(*dir);
}

inline AcesConfig load_effective_config(const CommonOptions& o) {
  AcesConfig config = o.config ? load_config(*o.config) : AcesConfig{};
  if (o.fallback) config.sbert_fallback = *o.fallback;
  return validate_config(config);
}

// Writes to `path` when given, else to `fallback`.
class Sink {
 public:
  Sink(const std::optional<std::filesystem::path>& path, std::ostream& fallback)
      : stream_(&fallback) {
    if (path) {
      file_.open(*path);
      if (!file_) throw Error("cannot write " + path->string());
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

}  // namespace detail

inline int run_score(const ScoreOptions& options, std::ostream& out, std::ostream& err) {
  if (options.format != "jsonl" && options.format != "csv") {
    err << "error: unknown --format '" << options.format << "' (jsonl|csv)\n";
    return 1;
  }
  std::ifstream in(options.input);
  if (!in) {
    err << "error: cannot open input " << options.input << '\n';
    return 1;
  }
  const auto rows = read_requests(in, options.format);
  if (rows.empty()) {
    err << "error: no requests in " << options.input << '\n';
    return 1;
  }

  AcesConfig config;
  LoadedBackends backends;
  try {
    config = detail::load_effective_config(options);
    backends = detail::load_backends(options);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const Backends view = backends.view();

  std::vector<std::optional<ScoreReport>> reports(rows.size());
  std::vector<std::string> failures(rows.size());
  parallel_for(rows.size(), options.threads, [&](std::size_t i) {
    if (const auto* bad = std::get_if<std::string>(&rows[i].row)) {
      failures[i] = *bad;
      return;
    }
    const auto& req = std::get<ScoreRequest>(rows[i].row);
    try {
      reports[i] = aces_pair(req.candidate, req.references, view, config);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  detail::Sink sink(options.output, out);
  std::vector<ScoreReport> scored;
  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!reports[i]) {
      ++n_failed;
      const auto* req = std::get_if<ScoreRequest>(&rows[i].row);
      err << "failed: " << (req ? req->id : "line " + std::to_string(rows[i].line)) << ": "
          << failures[i] << '\n';
      continue;
    }
    nlohmann::ordered_json line;
    line["id"] = std::get<ScoreRequest>(rows[i].row).id;
    const auto fields = to_json(*reports[i]);
    for (const auto& [k, v] : fields.items()) line[k] = v;
    sink.stream() << line.dump() << '\n';
    scored.push_back(*reports[i]);
  }
  nlohmann::ordered_json summary;
  summary["corpus_mean"] = scored.empty() ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(corpus_score(scored));
  summary["n_scored"] = scored.size();
  summary["n_failed"] = n_failed;
  sink.stream() << summary.dump() << '\n';
  sink.stream().flush();
  if (n_failed > 0) {
    err << n_failed << " of " << rows.size() << " requests failed\n";
    return 2;
  }
  return 0;
}

// Prints one tab-separated row per labeled span: text, label, word range,
// confidence.
inline int run_tag(const std::string& text, const CommonOptions& options, std::ostream& out,
                   std::ostream& err) {
  try {
    const AcesConfig config = detail::load_effective_config(options);
    const LoadedBackends backends = detail::load_backends(options);
    const TaggedCaption tagged = tag_caption(text, *backends.tagger, config.average_strategy);
    for (const auto& span : tagged.spans) {
      std::ostringstream conf;
      conf << std::fixed << std::setprecision(4) << span.confidence;
      out << span.text << '\t' << render(span.label) << '\t' << span.word_start << '-'
          << span.word_end << '\t' << conf.str() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

inline PairMetric aces_pair_metric(const Backends& backends, const AcesConfig& config) {
  return [backends, config](const EvalItem& item) {
    return std::pair{aces_pair(item.caption_a, item.references, backends, config).final,
                     aces_pair(item.caption_b, item.references, backends, config).final};
  };
}

// JSON report to --output (or `out`); aligned table to `err` when the JSON
// goes to `out`, otherwise to `out`.
inline int run_benchmark(const BenchmarkOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto items = load_eval_set(options.input);
    if (items.empty()) {
      err << "error: no items in " << options.input << '\n';
      return 1;
    }
    const AcesConfig config = detail::load_effective_config(options);
    const LoadedBackends backends = detail::load_backends(options);
    const BenchmarkReport report =
        benchmark_accuracy(items, aces_pair_metric(backends.view(), config), options.threads);
    detail::Sink sink(options.report, out);
    sink.stream() << to_json(report).dump(2) << '\n';
    (options.report ? out : err) << format_table(report);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace aces::cli
