// aces: score audio captions, tag descriptor spans, run the pairwise
// human-agreement benchmark.
//
//   aces score --input requests.jsonl --models DIR [--config cfg.json] [--output out.jsonl]
//   aces tag "a person is walking on a hard surface" --models DIR
//   aces benchmark --input eval.jsonl --models DIR [--output report.json]
//
// --stub-backends swaps the models for deterministic lookup tables.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aces/cli.hpp"
#include "aces/log.hpp"

namespace {

void add_common(CLI::App* cmd, aces::cli::CommonOptions& o, std::string& fallback) {
  cmd->add_option("--models", o.models, "Model directory (default: $ACES_MODEL_DIR)");
  cmd->add_option("--config", o.config, "Metric config JSON");
  cmd->add_flag("--stub-backends", o.stub_backends, "Use deterministic table backends");
  cmd->add_option("--fallback", fallback, "Whole-caption similarity when no label overlaps")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

void apply_fallback(aces::cli::CommonOptions& o, const std::string& fallback) {
  if (!fallback.empty()) o.fallback = fallback == "on";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audio caption evaluation on sound-descriptor semantics"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Only log errors");

  aces::cli::ScoreOptions score;
  std::string score_fallback;
  auto* score_cmd = app.add_subcommand("score", "Score candidate captions against references");
  score_cmd->add_option("--input", score.input, "Requests (JSON Lines or CSV)")->required();
  score_cmd->add_option("--output", score.output, "Output JSON Lines (default: stdout)");
  score_cmd->add_option("--format", score.format, "Input format")
      ->check(CLI::IsMember({"jsonl", "csv"}));
  add_common(score_cmd, score, score_fallback);

  aces::cli::CommonOptions tag;
  std::string tag_fallback;
  std::string tag_text;
  auto* tag_cmd = app.add_subcommand("tag", "Print the descriptor spans of one caption");
  tag_cmd->add_option("text", tag_text, "Caption text")->required();
  add_common(tag_cmd, tag, tag_fallback);

  aces::cli::BenchmarkOptions bench;
  std::string bench_fallback;
  auto* bench_cmd = app.add_subcommand("benchmark", "Pairwise human-agreement accuracy");
  bench_cmd->add_option("--input", bench.input, "Eval set (JSON Lines)")->required();
  bench_cmd->add_option("--output", bench.report, "Report JSON (default: stdout)");
  add_common(bench_cmd, bench, bench_fallback);

  CLI11_PARSE(app, argc, argv);
  if (quiet) aces::log::set_level(aces::log::Level::kError);

  if (*score_cmd) {
    apply_fallback(score, score_fallback);
    return aces::cli::run_score(score, std::cout, std::cerr);
  }
  if (*tag_cmd) {
    apply_fallback(tag, tag_fallback);
    return aces::cli::run_tag(tag_text, tag, std::cout, std::cerr);
  }
  apply_fallback(bench, bench_fallback);
  return aces::cli::run_benchmark(bench, std::cout, std::cerr);
}
