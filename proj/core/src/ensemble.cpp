#include "litcp/ensemble.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

namespace litcp {

using nlohmann::json;

std::string_view to_string(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kStableThenDedup:
      return "stable-then-dedup";
    case SelectionStrategy::kGreedyDedup:
      return "greedy-dedup";
  }
  return "unknown";
}

SelectionStrategy parse_strategy(std::string_view s) {
  if (s == "stable-then-dedup") return SelectionStrategy::kStableThenDedup;
  if (s == "greedy-dedup") return SelectionStrategy::kGreedyDedup;
  throw std::invalid_argument("unknown selection strategy '" + std::string(s) +
                              "' (expected stable-then-dedup or greedy-dedup)");
}

void SelectionConfig::validate() const {
  if (ranks.empty()) throw std::invalid_argument("rank list is empty");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] == 0) throw std::invalid_argument("ranks must be positive");
    if (i > 0 && ranks[i] <= ranks[i - 1]) {
      throw std::invalid_argument("ranks must be distinct and ascending");
    }
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine: lengths differ (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVectorError("cosine: zero vector");
  const double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<Component> components_of(const KruskalModel& m) {
  m.validate();
  std::vector<Component> out;
  out.reserve(m.rank());
  for (std::size_t j = 0; j < m.rank(); ++j) {
    Component c;
    c.origin_rank = m.rank();
    c.index_in_model = j;
    c.weight = m.weights[j];
    c.flags = m.flags[j];
    for (const auto& f : m.factors) c.factor_slices.push_back(f.column(j));
    out.push_back(std::move(c));
  }
  return out;
}

std::uint64_t rank_seed(std::uint64_t seed, std::size_t rank) {
  // splitmix64 finalizer over the combined inputs.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(rank) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<RankRun> factorize_ranks(const SparseTensor& t,
                                     std::span<const std::size_t> ranks,
                                     const AlsOptions& opts) {
  std::vector<RankRun> runs;
  for (std::size_t r : ranks) {
    AlsOptions o = opts;
    o.seed = rank_seed(opts.seed, r);
    try {
      RankRun run{r, cp_als(t, r, o)};
      spdlog::info("rank {}: {} sweeps, fit {:.6f}{}", r, run.result.iterations,
                   run.result.fit_history.back(),
                   run.result.converged ? "" : " (iteration limit)");
      runs.push_back(std::move(run));
    } catch (const std::exception& e) {
      spdlog::warn("rank {} dropped: {}", r, e.what());
    }
  }
  return runs;
}

std::vector<Component> decompose_ensemble(const SparseTensor& t,
                                          const SelectionConfig& cfg,
                                          const AlsOptions& opts) {
  cfg.validate();
  std::vector<Component> pool;
  for (const auto& run : factorize_ranks(t, cfg.ranks, opts)) {
    auto comps = components_of(run.result.model);
    pool.insert(pool.end(), std::make_move_iterator(comps.begin()),
                std::make_move_iterator(comps.end()));
  }
  return pool;
}

namespace {

const std::vector<double>& word_slice(const Component& c, std::size_t word_mode) {
  if (word_mode >= c.factor_slices.size()) {
    throw std::out_of_range("word mode " + std::to_string(word_mode) +
                            " out of range for component of order " +
                            std::to_string(c.factor_slices.size()));
  }
  return c.factor_slices[word_mode];
}

// Unit-2-norm copies of the word slices; empty for zero slices.
std::vector<std::vector<double>> unit_word_slices(std::span<const Component> comps,
                                                  std::size_t word_mode) {
  std::vector<std::vector<double>> out;
  out.reserve(comps.size());
  std::size_t extent = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& w = word_slice(comps[i], word_mode);
    if (i == 0) extent = w.size();
    if (w.size() != extent) {
      throw std::invalid_argument("components disagree on the word-mode extent");
    }
    double n = 0.0;
    for (double x : w) n += x * x;
    if (n == 0.0) {
      out.emplace_back();
      continue;
    }
    n = std::sqrt(n);
    std::vector<double> u(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) u[k] = w[k] / n;
    out.push_back(std::move(u));
  }
  return out;
}

double unit_dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return 0.0;
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += a[k] * b[k];
  return std::clamp(d, -1.0, 1.0);
}

}  // namespace

Matrix similarity_matrix(std::span<const Component> components, std::size_t word_mode) {
  const auto unit = unit_word_slices(components, word_mode);
  const std::size_t n = components.size();
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = unit_dot(unit[i], unit[j]);
      s(i, j) = c;
      s(j, i) = c;
    }
  }
  return s;
}

SelectionResult select(std::span<const Component> components, const SelectionConfig& cfg,
                       std::size_t word_mode) {
  if (!(cfg.threshold >= 0.0)) throw std::invalid_argument("threshold must be >= 0");
  SelectionResult res;
  const std::size_t n = components.size();
  res.stable.assign(n, false);
  res.partners.assign(n, {});
  if (n == 0) return res;

  const auto unit = unit_word_slices(components, word_mode);
  const double tau = cfg.threshold;

  for (std::size_t i = 0; i < n; ++i) {
    if (unit[i].empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || unit[j].empty()) continue;
      if (components[j].origin_rank == components[i].origin_rank) continue;
      const double c = unit_dot(unit[i], unit[j]);
      if (c >= tau) res.partners[i].push_back({j, c});
    }
    std::stable_sort(res.partners[i].begin(), res.partners[i].end(),
                     [](const StabilityPartner& a, const StabilityPartner& b) {
                       return a.cosine > b.cosine;
                     });
    res.stable[i] = !res.partners[i].empty();
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double wa = std::abs(components[a].weight);
    const double wb = std::abs(components[b].weight);
    if (wa != wb) return wa > wb;
    if (components[a].origin_rank != components[b].origin_rank) {
      return components[a].origin_rank < components[b].origin_rank;
    }
    return components[a].index_in_model < components[b].index_in_model;
  });

  for (std::size_t i : order) {
    if (unit[i].empty()) continue;
    if (cfg.strategy == SelectionStrategy::kStableThenDedup && !res.stable[i]) continue;
    bool distinct = true;
    for (std::size_t k : res.kept) {
      if (unit_dot(unit[i], unit[k]) >= tau) {
        distinct = false;
        break;
      }
    }
    if (distinct) res.kept.push_back(i);
  }
  return res;
}

std::vector<Component> select_components(std::span<const Component> components,
                                         const SelectionConfig& cfg,
                                         std::size_t word_mode) {
  const auto res = select(components, cfg, word_mode);
  std::vector<Component> out;
  out.reserve(res.kept.size());
  for (std::size_t i : res.kept) out.push_back(components[i]);
  return out;
}

std::string selection_to_json(std::span<const Component> pool, const SelectionResult& sel,
                              const SelectionConfig& cfg, std::size_t word_mode,
                              bool include_similarity) {
  json doc;
  doc["schema_version"] = 1;
  doc["threshold"] = cfg.threshold;
  doc["strategy"] = std::string(to_string(cfg.strategy));
  doc["ranks"] = cfg.ranks;
  doc["word_mode"] = word_mode;
  doc["pool_size"] = pool.size();
  json kept = json::array();
  for (std::size_t i : sel.kept) {
    const Component& c = pool[i];
    json partners = json::array();
    for (const auto& p : sel.partners[i]) {
      partners.push_back({{"origin_rank", pool[p.component].origin_rank},
                          {"index", pool[p.component].index_in_model},
                          {"cosine", p.cosine}});
    }
    kept.push_back({{"origin_rank", c.origin_rank},
                    {"index", c.index_in_model},
                    {"weight", c.weight},
                    {"flags", c.flags},
                    {"stable", static_cast<bool>(sel.stable[i])},
                    {"partners", std::move(partners)}});
  }
  doc["kept"] = std::move(kept);
  if (include_similarity) {
    json ids = json::array();
    for (const auto& c : pool) ids.push_back({c.origin_rank, c.index_in_model});
    const Matrix s = similarity_matrix(pool, word_mode);
    json rows = json::array();
    for (std::size_t i = 0; i < s.rows(); ++i) {
      auto r = s.row(i);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    doc["similarity"] = {{"components", std::move(ids)}, {"matrix", std::move(rows)}};
  }
  return doc.dump(2) + "\n";
}

SelectionListing parse_selection_json(std::string_view text) {
  SelectionListing out;
  try {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() != 1) {
      throw std::runtime_error("unsupported selection schema_version");
    }
    out.threshold = doc.at("threshold").get<double>();
    out.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    out.ranks = doc.at("ranks").get<std::vector<std::size_t>>();
    out.pool_size = doc.at("pool_size").get<std::size_t>();
    for (const auto& k : doc.at("kept")) {
      out.kept.push_back({k.at("origin_rank").get<std::size_t>(),
                          k.at("index").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed selection listing: ") + e.what());
  }
  return out;
}

}  // namespace litcp
