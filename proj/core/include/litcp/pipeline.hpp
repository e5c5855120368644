#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "litcp/corpus.hpp"
#include "litcp/cp_als.hpp"
#include "litcp/ensemble.hpp"
#include "litcp/report.hpp"
#include "litcp/sparse_tensor.hpp"

namespace litcp {

/// Everything an end-to-end run needs.
///
/// Config files are `key = value` lines; '#' starts a comment. Relative
/// paths resolve against the config file's directory. Keys:
///
///   corpus, corpus_format (csv|tsv), workdir, output, stopwords,
///   min_token_length, dna_min_length, max_char_repeat, max_consonant_run,
///   require_vowel, non_english_threshold, name_df_floor,
///   ranks (comma list), threshold, strategy, max_iters, fit_tolerance,
///   seed, threads, top_n, keywords, similarity (true|false)
struct PipelineConfig {
  std::filesystem::path corpus;
  CorpusFormat corpus_format = CorpusFormat::kCsv;
  std::filesystem::path workdir = "work";
  std::filesystem::path output = "report";
  CleaningRules rules = CleaningRules::defaults();
  SelectionConfig selection;
  AlsOptions als;
  std::size_t top_n = kDefaultTopN;
  std::size_t keywords = kDefaultKeywordCount;
  bool include_similarity = false;

  void validate() const;
};

/// Applies one `key = value` setting. Throws std::invalid_argument for an
/// unknown key or bad value.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value,
                        const std::filesystem::path& base_dir);
/// Throws std::runtime_error when the file cannot be read, naming the line
/// of any bad entry.
void load_config(PipelineConfig& cfg, const std::filesystem::path& file);

/// "20,40,60" -> {20, 40, 60}.
std::vector<std::size_t> parse_rank_list(std::string_view s);

/// Mode holding the vocabulary: the mode named "word", else the last mode.
std::size_t word_mode_of(const LabeledTensor& t);

struct IngestStats {
  LoadStats load;
  std::size_t after_cleaning = 0;
  std::size_t after_dedup = 0;
  std::size_t skipped_without_tokens = 0;
};

/// Load -> clean -> dedup -> count -> tensor.
LabeledTensor ingest_corpus(const std::filesystem::path& corpus, CorpusFormat format,
                            const CleaningRules& rules, IngestStats* stats = nullptr);

inline std::string model_file_name(std::size_t rank) {
  return "model-" + std::to_string(rank) + ".txt";
}

/// Decomposes the tensor in `tensor_dir` at every rank and writes
/// `model-<R>.txt` files into `models_dir`. Returns the files written.
std::vector<std::filesystem::path> run_factorize(const std::filesystem::path& tensor_dir,
                                                 std::span<const std::size_t> ranks,
                                                 const AlsOptions& opts,
                                                 const std::filesystem::path& models_dir);

struct LoadedPool {
  std::vector<Component> components;
  std::vector<std::size_t> ranks;
  std::filesystem::path tensor_dir;  // resolved from the models, may be empty
};

/// Reads every model-<R>.txt in `models_dir` in ascending rank order.
LoadedPool load_component_pool(const std::filesystem::path& models_dir);

/// Selects from the pool in `models_dir` and writes the selection listing.
/// The threshold and strategy come from `cfg`; the rank list recorded is the
/// set of ranks found on disk.
SelectionResult run_select(const std::filesystem::path& models_dir, SelectionConfig cfg,
                           const std::filesystem::path& out_file, bool include_similarity);

/// Builds and emits the report for the components named in the selection
/// listing.
void run_report(const std::filesystem::path& tensor_dir,
                const std::filesystem::path& models_dir,
                const std::filesystem::path& selection_file,
                const std::filesystem::path& out_dir, std::size_t top,
                std::size_t keyword_count);

/// ingest -> factorize -> select -> report. Intermediate files go under
/// cfg.workdir (tensor/, models/, selection.json); the report to cfg.output.
void run_pipeline(const PipelineConfig& cfg);

}  // namespace litcp
