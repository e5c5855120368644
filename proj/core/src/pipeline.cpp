#include "litcp/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <stdexcept>

#include "text_util.hpp"

namespace litcp {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  rules.validate();
  selection.validate();
  als.validate();
  if (top_n < 1) throw std::invalid_argument("top_n must be >= 1");
  if (keywords < 1) throw std::invalid_argument("keywords must be >= 1");
}

std::vector<std::size_t> parse_rank_list(std::string_view s) {
  std::vector<std::size_t> ranks;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(',', start);
    if (end == std::string_view::npos) end = s.size();
    const std::string item = normalize_whitespace(s.substr(start, end - start));
    if (item.empty()) throw std::invalid_argument("empty entry in rank list '" + std::string(s) + "'");
    try {
      ranks.push_back(detail::parse_size(item));
    } catch (const std::runtime_error&) {
      throw std::invalid_argument("bad rank '" + item + "'");
    }
    start = end + 1;
  }
  return ranks;
}

namespace {

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + std::string(v) + "'");
}

std::size_t to_size(std::string_view v) {
  try {
    return detail::parse_size(v);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
}

double to_double(std::string_view v) {
  try {
    return detail::parse_double(v);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
}

fs::path resolve(const fs::path& base, std::string_view v) {
  fs::path p{std::string(v)};
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value,
                        const fs::path& base_dir) {
  if (key == "corpus") {
    cfg.corpus = resolve(base_dir, value);
  } else if (key == "corpus_format") {
    cfg.corpus_format = parse_corpus_format(value);
  } else if (key == "workdir") {
    cfg.workdir = resolve(base_dir, value);
  } else if (key == "output") {
    cfg.output = resolve(base_dir, value);
  } else if (key == "stopwords") {
    cfg.rules.stopwords = load_stopwords(resolve(base_dir, value));
  } else if (key == "min_token_length") {
    cfg.rules.min_token_length = to_size(value);
  } else if (key == "dna_min_length") {
    cfg.rules.dna_min_length = to_size(value);
  } else if (key == "max_char_repeat") {
    cfg.rules.max_char_repeat = to_size(value);
  } else if (key == "max_consonant_run") {
    cfg.rules.max_consonant_run = to_size(value);
  } else if (key == "require_vowel") {
    cfg.rules.require_vowel = parse_bool(value);
  } else if (key == "non_english_threshold") {
    cfg.rules.non_english_threshold = to_double(value);
  } else if (key == "name_df_floor") {
    cfg.rules.name_df_floor = to_size(value);
  } else if (key == "ranks") {
    cfg.selection.ranks = parse_rank_list(value);
  } else if (key == "threshold") {
    cfg.selection.threshold = to_double(value);
  } else if (key == "strategy") {
    cfg.selection.strategy = parse_strategy(value);
  } else if (key == "max_iters") {
    cfg.als.max_iters = static_cast<int>(to_size(value));
  } else if (key == "fit_tolerance") {
    cfg.als.fit_tolerance = to_double(value);
  } else if (key == "seed") {
    cfg.als.seed = to_size(value);
  } else if (key == "threads") {
    cfg.als.threads = static_cast<unsigned>(to_size(value));
  } else if (key == "top_n") {
    cfg.top_n = to_size(value);
  } else if (key == "keywords") {
    cfg.keywords = to_size(value);
  } else if (key == "similarity") {
    cfg.include_similarity = parse_bool(value);
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

void load_config(PipelineConfig& cfg, const fs::path& file) {
  const std::string text = detail::read_file(file);
  const fs::path base = file.parent_path();
  std::size_t lineno = 0;
  for (auto raw : detail::split_lines(text)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (normalize_whitespace(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = normalize_whitespace(line.substr(0, eq));
    const std::string value = normalize_whitespace(line.substr(eq + 1));
    try {
      apply_config_entry(cfg, key, value, base);
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::size_t word_mode_of(const LabeledTensor& t) {
  if (auto m = t.mode_index("word")) return *m;
  return t.tensor.order() - 1;
}

LabeledTensor ingest_corpus(const fs::path& corpus, CorpusFormat format,
                            const CleaningRules& rules, IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  auto records = load_corpus(corpus, format, &st.load);
  records = clean_and_filter(std::move(records), rules);
  st.after_cleaning = records.size();
  records = dedup(std::move(records));
  st.after_dedup = records.size();
  const QuadCounts q = build_counts(records, rules);
  st.skipped_without_tokens = q.skipped_records;
  auto t = counts_to_labeled_tensor(q);
  spdlog::info("ingest: {} rows, {} after cleaning, {} after dedup; tensor {}x{}x{}x{}, nnz {}",
               st.load.rows, st.after_cleaning, st.after_dedup, t.tensor.extent(0),
               t.tensor.extent(1), t.tensor.extent(2), t.tensor.extent(3), t.tensor.nnz());
  return t;
}

namespace {

std::string relative_ref(const fs::path& target, const fs::path& from_dir) {
  const fs::path rel = fs::weakly_canonical(target).lexically_relative(
      fs::weakly_canonical(from_dir));
  return rel.empty() ? fs::weakly_canonical(target).string() : rel.generic_string();
}

}  // namespace

std::vector<fs::path> run_factorize(const fs::path& tensor_dir,
                                    std::span<const std::size_t> ranks,
                                    const AlsOptions& opts, const fs::path& models_dir) {
  const LabeledTensor lt = load_tensor(tensor_dir);
  fs::create_directories(models_dir);
  const std::string ref = relative_ref(tensor_dir, models_dir);
  std::vector<fs::path> written;
  for (auto& run : factorize_ranks(lt.tensor, ranks, opts)) {
    ModelFile mf;
    mf.shape.assign(lt.tensor.shape().begin(), lt.tensor.shape().end());
    mf.axes_ref = ref;
    mf.fit_history = run.result.fit_history;
    mf.model = std::move(run.result.model);
    const fs::path file = models_dir / model_file_name(run.rank);
    save_model(file, mf);
    written.push_back(file);
  }
  return written;
}

LoadedPool load_component_pool(const fs::path& models_dir) {
  std::map<std::size_t, fs::path> files;
  for (const auto& entry : fs::directory_iterator(models_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("model-", 0) != 0 || entry.path().extension() != ".txt") continue;
    const std::string num = name.substr(6, name.size() - 6 - 4);
    try {
      files.emplace(detail::parse_size(num), entry.path());
    } catch (const std::runtime_error&) {
      continue;
    }
  }
  if (files.empty()) throw std::runtime_error("no model files in " + models_dir.string());

  LoadedPool pool;
  for (const auto& [rank, file] : files) {
    const ModelFile mf = load_model(file);
    if (mf.model.rank() != rank) {
      throw std::runtime_error(file.string() + ": rank differs from the file name");
    }
    if (pool.tensor_dir.empty() && mf.axes_ref != "-") {
      fs::path ref{mf.axes_ref};
      pool.tensor_dir = ref.is_relative() ? models_dir / ref : ref;
    }
    auto comps = components_of(mf.model);
    pool.components.insert(pool.components.end(), comps.begin(), comps.end());
    pool.ranks.push_back(rank);
  }
  return pool;
}

SelectionResult run_select(const fs::path& models_dir, SelectionConfig cfg,
                           const fs::path& out_file, bool include_similarity) {
  const LoadedPool pool = load_component_pool(models_dir);
  cfg.ranks = pool.ranks;
  cfg.validate();
  std::size_t word_mode = pool.components.front().factor_slices.size() - 1;
  if (!pool.tensor_dir.empty() && fs::exists(pool.tensor_dir / "tensor.tns")) {
    word_mode = word_mode_of(load_tensor(pool.tensor_dir));
  }
  const SelectionResult sel = select(pool.components, cfg, word_mode);
  spdlog::info("select: kept {} of {} components ({}, threshold {})", sel.kept.size(),
               pool.components.size(), to_string(cfg.strategy), cfg.threshold);
  if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
  detail::write_file(out_file, selection_to_json(pool.components, sel, cfg, word_mode,
                                                 include_similarity));
  return sel;
}

void run_report(const fs::path& tensor_dir, const fs::path& models_dir,
                const fs::path& selection_file, const fs::path& out_dir, std::size_t top,
                std::size_t keyword_count) {
  const LabeledTensor lt = load_tensor(tensor_dir);
  const LoadedPool pool = load_component_pool(models_dir);
  const SelectionListing listing = parse_selection_json(detail::read_file(selection_file));
  const std::size_t word_mode = word_mode_of(lt);

  std::vector<ComponentReport> reports;
  for (const auto& id : listing.kept) {
    auto it = std::find_if(pool.components.begin(), pool.components.end(),
                           [&](const Component& c) {
                             return c.origin_rank == id.origin_rank &&
                                    c.index_in_model == id.index;
                           });
    if (it == pool.components.end()) {
      throw std::runtime_error("selected component (rank " + std::to_string(id.origin_rank) +
                               ", index " + std::to_string(id.index) +
                               ") not found in " + models_dir.string());
    }
    reports.push_back(make_component_report(*it, lt, word_mode, top, keyword_count));
  }
  ReportSummary summary;
  summary.component_count = reports.size();
  summary.pool_size = listing.pool_size;
  summary.ranks = listing.ranks;
  summary.threshold = listing.threshold;
  summary.strategy = std::string(to_string(listing.strategy));
  emit_report(reports, summary, out_dir);
  spdlog::info("report: {} components written to {}", reports.size(), out_dir.string());
}

void run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.corpus.empty()) throw std::invalid_argument("no corpus configured");
  const fs::path tensor_dir = cfg.workdir / "tensor";
  const fs::path models_dir = cfg.workdir / "models";
  const fs::path selection_file = cfg.workdir / "selection.json";

  save_tensor(tensor_dir, ingest_corpus(cfg.corpus, cfg.corpus_format, cfg.rules));
  // Stale models from an earlier run with other ranks would join the pool.
  if (fs::exists(models_dir)) {
    for (const auto& entry : fs::directory_iterator(models_dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("model-", 0) == 0) fs::remove(entry.path());
    }
  }
  const auto written = run_factorize(tensor_dir, cfg.selection.ranks, cfg.als, models_dir);
  if (written.empty()) throw std::runtime_error("every rank failed to factorize");
  run_select(models_dir, cfg.selection, selection_file, cfg.include_similarity);
  run_report(tensor_dir, models_dir, selection_file, cfg.output, cfg.top_n, cfg.keywords);
}

}  // namespace litcp
