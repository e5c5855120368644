#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "litcp/cp_als.hpp"
#include "litcp/linalg.hpp"
#include "litcp/sparse_tensor.hpp"

namespace litcp {

/// One rank-one term of a decomposition, tagged with where it came from.
struct Component {
  std::size_t origin_rank = 0;
  std::size_t index_in_model = 0;
  double weight = 0.0;
  std::uint8_t flags = kFlagNone;
  /// Column index_in_model of each factor matrix, one vector per mode.
  std::vector<std::vector<double>> factor_slices;

  bool operator==(const Component&) const = default;
};

enum class SelectionStrategy {
  /// Keep components that recur across ranks, then drop near-duplicates.
  kStableThenDedup,
  /// Drop near-duplicates only.
  kGreedyDedup,
};

std::string_view to_string(SelectionStrategy s);
/// Accepts "stable-then-dedup" and "greedy-dedup".
SelectionStrategy parse_strategy(std::string_view s);

struct SelectionConfig {
  std::vector<std::size_t> ranks{20, 40, 60, 80, 100, 120, 200};
  double threshold = 0.35;
  SelectionStrategy strategy = SelectionStrategy::kStableThenDedup;

  /// Ranks must be non-empty, positive, distinct and ascending;
  /// threshold in [0, 1].
  void validate() const;
};

/// Raised by cosine() for an all-zero vector.
class ZeroVectorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// dot(u, v) / (|u|_2 |v|_2). Throws std::invalid_argument for differing
/// lengths and ZeroVectorError when either vector is zero.
double cosine(std::span<const double> u, std::span<const double> v);

/// Splits an arranged model into its components.
std::vector<Component> components_of(const KruskalModel& m);

/// Seed used for the decomposition at `rank`; a fixed mix of both inputs.
std::uint64_t rank_seed(std::uint64_t seed, std::size_t rank);

struct RankRun {
  std::size_t rank = 0;
  AlsResult result;
};

/// Runs cp_als once per configured rank with seed rank_seed(opts.seed, R).
/// A rank whose decomposition throws is logged and omitted.
std::vector<RankRun> factorize_ranks(const SparseTensor& t,
                                     std::span<const std::size_t> ranks,
                                     const AlsOptions& opts);

/// factorize_ranks() flattened into a single component pool.
std::vector<Component> decompose_ensemble(const SparseTensor& t,
                                          const SelectionConfig& cfg,
                                          const AlsOptions& opts);

/// Pairwise word-factor cosines; diagonal is exactly 1.
Matrix similarity_matrix(std::span<const Component> components, std::size_t word_mode);

struct StabilityPartner {
  std::size_t component = 0;  // position in the input pool
  double cosine = 0.0;
};

struct SelectionResult {
  /// Positions in the input pool, in selection order.
  std::vector<std::size_t> kept;
  /// Per input component: recurs in another rank at cosine >= threshold.
  std::vector<bool> stable;
  /// Per input component: the cross-rank components that certify stability,
  /// sorted by descending cosine.
  std::vector<std::vector<StabilityPartner>> partners;
};

/// Threshold selection over a component pool.
///
/// Components with an all-zero word factor carry no topic and are never
/// kept. Candidates are visited in descending |weight| (ties by origin rank,
/// then index) and kept only if their word-factor cosine with every kept
/// component is below the threshold. Under kStableThenDedup only stable
/// components are candidates.
SelectionResult select(std::span<const Component> components,
                       const SelectionConfig& cfg, std::size_t word_mode);

/// select() returning the kept components themselves.
std::vector<Component> select_components(std::span<const Component> components,
                                         const SelectionConfig& cfg,
                                         std::size_t word_mode);

/// Writes the machine-readable selection listing (JSON, schema_version 1):
/// kept components with origin rank, index, weight, stability partners and,
/// when `include_similarity` is set, the full pool similarity matrix.
std::string selection_to_json(std::span<const Component> pool,
                              const SelectionResult& sel, const SelectionConfig& cfg,
                              std::size_t word_mode, bool include_similarity);

/// Component identity as stored in a selection listing.
struct ComponentId {
  std::size_t origin_rank = 0;
  std::size_t index = 0;
  bool operator==(const ComponentId&) const = default;
};

struct SelectionListing {
  double threshold = 0.0;
  SelectionStrategy strategy = SelectionStrategy::kStableThenDedup;
  std::vector<std::size_t> ranks;
  std::size_t pool_size = 0;
  std::vector<ComponentId> kept;
};

SelectionListing parse_selection_json(std::string_view json);

}  // namespace litcp
