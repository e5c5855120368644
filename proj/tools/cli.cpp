#include "cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "litcp/pipeline.hpp"

namespace litcp {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> ranks;
  std::optional<double> threshold;
  std::optional<std::string> strategy;
  std::optional<std::size_t> top_n;
  bool quiet = false;
};

PipelineConfig resolve_config(const GlobalFlags& g) {
  PipelineConfig cfg;
  if (!g.config.empty()) load_config(cfg, g.config);
  if (g.seed) cfg.als.seed = *g.seed;
  if (g.threads) cfg.als.threads = *g.threads;
  if (g.ranks) cfg.selection.ranks = parse_rank_list(*g.ranks);
  if (g.threshold) cfg.selection.threshold = *g.threshold;
  if (g.strategy) cfg.selection.strategy = parse_strategy(*g.strategy);
  if (g.top_n) cfg.top_n = *g.top_n;
  return cfg;
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("litcp", sink);
  logger->set_pattern("[%l] %v");
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> prev;
    ~Restore() { spdlog::set_default_logger(prev); }
  } restore{previous};

  CLI::App app{"Sparse CP tensor decomposition of a document corpus"};
  app.name("litcp");
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--config", g.config, "Pipeline config file (key = value)");
  app.add_option("--seed", g.seed, "Random seed for factor initialization");
  app.add_option("--threads", g.threads, "Worker threads for MTTKRP")->check(CLI::PositiveNumber);
  app.add_option("--ranks", g.ranks, "Comma-separated rank list, e.g. 20,40,60");
  app.add_option("--threshold", g.threshold, "Cosine threshold")->check(CLI::Range(0.0, 1.0));
  app.add_option("--strategy", g.strategy, "stable-then-dedup | greedy-dedup")
      ->check(CLI::IsMember({"stable-then-dedup", "greedy-dedup"}));
  app.add_option("--top-n", g.top_n, "Entries listed per mode")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Only log warnings and errors");

  std::string corpus, format, tensor_dir, models_dir, selection, out_path, workdir;
  std::optional<int> max_iters;
  std::optional<double> tolerance;
  std::optional<std::size_t> keywords;
  bool similarity = false;

  auto* ingest = app.add_subcommand("ingest", "Build the tensor from a corpus table");
  ingest->add_option("--corpus", corpus, "Corpus table (csv or tsv)");
  ingest->add_option("--format", format, "csv | tsv");
  ingest->add_option("--out", out_path, "Tensor directory to write");

  auto* factorize = app.add_subcommand("factorize", "CP-ALS at every rank");
  factorize->add_option("--tensor", tensor_dir, "Tensor directory");
  factorize->add_option("--out", out_path, "Directory for model-<R>.txt files");
  factorize->add_option("--max-iters", max_iters, "ALS sweep limit")->check(CLI::PositiveNumber);
  factorize->add_option("--tol", tolerance, "Stop when the fit improves by less");

  auto* select_cmd = app.add_subcommand("select", "Select distinct components");
  select_cmd->add_option("--models", models_dir, "Directory with model files");
  select_cmd->add_option("--out", out_path, "Selection listing to write");
  select_cmd->add_flag("--similarity", similarity, "Include the full similarity matrix");

  auto* report = app.add_subcommand("report", "Write report.json, summary.json, index.html");
  report->add_option("--tensor", tensor_dir, "Tensor directory");
  report->add_option("--models", models_dir, "Directory with model files");
  report->add_option("--selection", selection, "Selection listing");
  report->add_option("--out", out_path, "Report directory");
  report->add_option("--keywords", keywords, "Keywords per cloud")->check(CLI::PositiveNumber);

  auto* pipeline = app.add_subcommand("pipeline", "ingest, factorize, select and report");
  pipeline->add_option("--corpus", corpus, "Corpus table");
  pipeline->add_option("--workdir", workdir, "Directory for intermediate files");
  pipeline->add_option("--out", out_path, "Report directory");
  pipeline->add_option("--max-iters", max_iters, "ALS sweep limit")->check(CLI::PositiveNumber);
  pipeline->add_flag("--similarity", similarity, "Include the full similarity matrix");

  for (auto* sub : {ingest, factorize, select_cmd, report, pipeline}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << "\n" << app.help();
    return code;
  }
  if (g.quiet) logger->set_level(spdlog::level::warn);

  try {
    PipelineConfig cfg = resolve_config(g);
    if (!workdir.empty()) cfg.workdir = workdir;
    if (max_iters) cfg.als.max_iters = *max_iters;
    if (tolerance) cfg.als.fit_tolerance = *tolerance;
    if (keywords) cfg.keywords = *keywords;
    if (similarity) cfg.include_similarity = true;
    if (!corpus.empty()) cfg.corpus = corpus;
    if (!format.empty()) cfg.corpus_format = parse_corpus_format(format);
    cfg.validate();

    const fs::path default_tensor = cfg.workdir / "tensor";
    const fs::path default_models = cfg.workdir / "models";
    const fs::path default_selection = cfg.workdir / "selection.json";

    if (*ingest) {
      if (cfg.corpus.empty()) throw std::invalid_argument("ingest needs --corpus or a config");
      const fs::path dest = or_default(out_path, default_tensor);
      IngestStats st;
      save_tensor(dest, ingest_corpus(cfg.corpus, cfg.corpus_format, cfg.rules, &st));
      out << "tensor written to " << dest.string() << "\n";
    } else if (*factorize) {
      const fs::path dest = or_default(out_path, default_models);
      const auto files = run_factorize(or_default(tensor_dir, default_tensor),
                                       cfg.selection.ranks, cfg.als, dest);
      for (const auto& f : files) out << f.string() << "\n";
      if (files.size() != cfg.selection.ranks.size()) {
        err << "litcp: " << cfg.selection.ranks.size() - files.size()
            << " rank(s) failed to factorize\n";
        return 1;
      }
    } else if (*select_cmd) {
      const fs::path models = or_default(models_dir, default_models);
      const fs::path dest = or_default(out_path, default_selection);
      const LoadedPool pool = load_component_pool(models);
      const SelectionResult sel = run_select(models, cfg.selection, dest, cfg.include_similarity);
      out << "kept " << sel.kept.size() << " of " << pool.components.size()
          << " components (" << to_string(cfg.selection.strategy)
          << ", threshold " << cfg.selection.threshold << ")\n";
      for (std::size_t i : sel.kept) {
        const Component& c = pool.components[i];
        out << "  rank " << c.origin_rank << " #" << c.index_in_model << " weight "
            << c.weight << " partners:";
        if (sel.partners[i].empty()) out << " none";
        for (const auto& p : sel.partners[i]) {
          const Component& q = pool.components[p.component];
          out << " (" << q.origin_rank << "#" << q.index_in_model << ", " << p.cosine << ")";
        }
        out << "\n";
      }
    } else if (*report) {
      const fs::path dest = or_default(out_path, cfg.output);
      run_report(or_default(tensor_dir, default_tensor), or_default(models_dir, default_models),
                 or_default(selection, default_selection), dest, cfg.top_n, cfg.keywords);
      out << "report written to " << dest.string() << "\n";
    } else if (*pipeline) {
      if (!out_path.empty()) cfg.output = out_path;
      run_pipeline(cfg);
      out << "report written to " << cfg.output.string() << "\n";
    }
  } catch (const std::exception& e) {
    err << "litcp: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace litcp
