#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "litcp/ensemble.hpp"
#include "litcp/sparse_tensor.hpp"

namespace litcp {

struct LabeledScore {
  std::string label;
  double score = 0.0;
  bool operator==(const LabeledScore&) const = default;
};

struct ModeEntries {
  std::string mode;
  std::vector<LabeledScore> entries;
  bool operator==(const ModeEntries&) const = default;
};

/// Human-readable view of one selected component.
struct ComponentReport {
  std::size_t origin_rank = 0;
  std::size_t index = 0;
  double weight = 0.0;
  std::uint8_t flags = 0;
  /// Highest-scoring entries of every mode, in mode order.
  std::vector<ModeEntries> modes;
  /// Word-mode entries for word-cloud rendering.
  std::vector<LabeledScore> keywords;

  bool operator==(const ComponentReport&) const = default;
};

inline constexpr std::size_t kDefaultTopN = 13;
inline constexpr std::size_t kDefaultKeywordCount = 50;
inline constexpr int kReportSchemaVersion = 1;

/// The n largest entries of the component's factor slice for `mode`,
/// sorted by descending score with ties broken by ascending label. Returns
/// every entry when n exceeds the axis size. Throws std::invalid_argument
/// for n == 0 or an axis whose size differs from the slice length.
std::vector<LabeledScore> top_n(const Component& c, std::size_t mode, std::size_t n,
                                const AxisMap& axis);

/// top_n() over the word mode; scores are passed through for renderer scaling.
std::vector<LabeledScore> keyword_cloud(const Component& c, std::size_t word_mode,
                                        std::size_t n, const AxisMap& axis);

ComponentReport make_component_report(const Component& c, const LabeledTensor& labels,
                                      std::size_t word_mode, std::size_t top,
                                      std::size_t keyword_count);

struct ReportSummary {
  std::size_t component_count = 0;
  std::size_t pool_size = 0;
  std::vector<std::size_t> ranks;
  double threshold = 0.0;
  std::string strategy;
};

/// Versioned JSON document holding every component report.
std::string report_to_json(std::span<const ComponentReport> reports);
/// Inverse of report_to_json(). Throws std::runtime_error on bad input.
std::vector<ComponentReport> parse_report_json(std::string_view json);

std::string summary_to_json(const ReportSummary& s);

/// Self-contained static HTML page: one section per component with a table
/// per mode and a scaled keyword cloud. Negative scores get a distinct style.
std::string render_html(std::span<const ComponentReport> reports, const ReportSummary& s);

/// Writes report.json, summary.json and index.html into `out_dir`, creating
/// it if needed. An empty report list produces a page with a notice.
/// Throws std::runtime_error when the directory cannot be written.
void emit_report(std::span<const ComponentReport> reports, const ReportSummary& summary,
                 const std::filesystem::path& out_dir);

std::string html_escape(std::string_view s);

}  // namespace litcp
