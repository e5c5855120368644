#include "litcp/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using litcp::PipelineConfig;

namespace {

const fs::path kFixtures{LITCP_FIXTURE_DIR};

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("litcp_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig toy_config(const fs::path& dir) {
  PipelineConfig cfg;
  cfg.corpus = kFixtures / "toy_corpus.csv";
  cfg.rules.stopwords = litcp::load_stopwords(kFixtures / "toy_stopwords.txt");
  cfg.workdir = dir / "work";
  cfg.output = dir / "report";
  cfg.selection.ranks = {2, 4};
  cfg.als.max_iters = 20;
  return cfg;
}

}  // namespace

TEST(RankList, Parse) {
  EXPECT_EQ(litcp::parse_rank_list("20, 40,60"), (std::vector<std::size_t>{20, 40, 60}));
  EXPECT_THROW(litcp::parse_rank_list("20,,40"), std::invalid_argument);
  EXPECT_THROW(litcp::parse_rank_list("twenty"), std::invalid_argument);
  EXPECT_THROW(litcp::parse_rank_list(""), std::invalid_argument);
}

TEST(Config, DefaultsAreValid) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.top_n, 13u);
  EXPECT_EQ(cfg.selection.threshold, 0.35);
  EXPECT_EQ(cfg.selection.ranks, (std::vector<std::size_t>{20, 40, 60, 80, 100, 120, 200}));
  EXPECT_EQ(cfg.als.max_iters, 100);
  EXPECT_EQ(cfg.als.fit_tolerance, 1e-6);
}

TEST(Config, LoadFileResolvesRelativePaths) {
  const fs::path dir = scratch_dir("config");
  std::ofstream(dir / "stop.txt") << "alpha\n";
  std::ofstream(dir / "run.conf") << "# comment\n"
                                     "corpus = data/c.tsv\n"
                                     "corpus_format = tsv\n"
                                     "stopwords = stop.txt   # trailing comment\n"
                                     "ranks = 3, 5\n"
                                     "threshold = 0.5\n"
                                     "strategy = greedy-dedup\n"
                                     "seed = 7\n"
                                     "threads = 2\n"
                                     "require_vowel = false\n"
                                     "similarity = true\n";
  PipelineConfig cfg;
  litcp::load_config(cfg, dir / "run.conf");
  EXPECT_EQ(cfg.corpus, dir / "data/c.tsv");
  EXPECT_EQ(cfg.corpus_format, litcp::CorpusFormat::kTsv);
  EXPECT_EQ(cfg.rules.stopwords, (std::unordered_set<std::string>{"alpha"}));
  EXPECT_EQ(cfg.selection.ranks, (std::vector<std::size_t>{3, 5}));
  EXPECT_EQ(cfg.selection.threshold, 0.5);
  EXPECT_EQ(cfg.selection.strategy, litcp::SelectionStrategy::kGreedyDedup);
  EXPECT_EQ(cfg.als.seed, 7u);
  EXPECT_EQ(cfg.als.threads, 2u);
  EXPECT_FALSE(cfg.rules.require_vowel);
  EXPECT_TRUE(cfg.include_similarity);
}

TEST(Config, BadEntriesNameTheLine) {
  const fs::path dir = scratch_dir("config_bad");
  std::ofstream(dir / "a.conf") << "seed = 1\nbogus = 2\n";
  PipelineConfig cfg;
  try {
    litcp::load_config(cfg, dir / "a.conf");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  std::ofstream(dir / "b.conf") << "no equals sign\n";
  EXPECT_THROW(litcp::load_config(cfg, dir / "b.conf"), std::runtime_error);
  EXPECT_THROW(litcp::load_config(cfg, dir / "missing.conf"), std::runtime_error);
}

TEST(Pipeline, StagesProduceConsistentArtifacts) {
  const fs::path dir = scratch_dir("pipeline_stages");
  const PipelineConfig cfg = toy_config(dir);
  litcp::run_pipeline(cfg);
  const fs::path work = cfg.workdir;
  EXPECT_TRUE(fs::exists(work / "tensor" / "tensor.tns"));
  for (int m = 0; m < 4; ++m) {
    EXPECT_TRUE(fs::exists(work / "tensor" / ("axis-" + std::to_string(m) + ".txt")));
  }
  EXPECT_TRUE(fs::exists(work / "models" / "model-2.txt"));
  EXPECT_TRUE(fs::exists(work / "models" / "model-4.txt"));
  EXPECT_TRUE(fs::exists(work / "selection.json"));
  EXPECT_TRUE(fs::exists(cfg.output / "index.html"));

  const auto pool = litcp::load_component_pool(work / "models");
  EXPECT_EQ(pool.components.size(), 6u);
  EXPECT_EQ(pool.ranks, (std::vector<std::size_t>{2, 4}));
  EXPECT_EQ(fs::weakly_canonical(pool.tensor_dir), fs::weakly_canonical(work / "tensor"));

  const auto model = litcp::load_model(work / "models" / "model-4.txt");
  EXPECT_EQ(model.shape, (std::vector<std::size_t>{9, 37, 9, 75}));
  EXPECT_LE(model.fit_history.size(), 20u);
}

TEST(Pipeline, StaleModelsAreRemoved) {
  const fs::path dir = scratch_dir("pipeline_stale");
  PipelineConfig cfg = toy_config(dir);
  cfg.selection.ranks = {2, 3};
  litcp::run_pipeline(cfg);
  cfg.selection.ranks = {2};
  litcp::run_pipeline(cfg);
  EXPECT_FALSE(fs::exists(cfg.workdir / "models" / "model-3.txt"));
  EXPECT_EQ(litcp::load_component_pool(cfg.workdir / "models").ranks,
            std::vector<std::size_t>{2});
}

TEST(Pipeline, MissingCorpusFails) {
  PipelineConfig cfg;
  cfg.workdir = scratch_dir("pipeline_missing") / "work";
  EXPECT_THROW(litcp::run_pipeline(cfg), std::invalid_argument);
  cfg.corpus = "/nonexistent/corpus.csv";
  EXPECT_THROW(litcp::run_pipeline(cfg), std::runtime_error);
}

TEST(Pool, EmptyModelsDirectoryThrows) {
  EXPECT_THROW(litcp::load_component_pool(scratch_dir("pool_empty")), std::runtime_error);
}

TEST(WordMode, NamedOrLast) {
  auto lt = litcp::with_default_labels(
      litcp::SparseTensor::from_entries({{{0, 0, 0}, 1.0}}, {1, 1, 1}));
  EXPECT_EQ(litcp::word_mode_of(lt), 2u);
  lt.mode_names = {"word", "x", "y"};
  EXPECT_EQ(litcp::word_mode_of(lt), 0u);
}
