#include "litcp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>
#include <stdexcept>

#include "text_util.hpp"

namespace litcp {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<LabeledScore> top_n(const Component& c, std::size_t mode, std::size_t n,
                                const AxisMap& axis) {
  if (n == 0) throw std::invalid_argument("top_n: n must be >= 1");
  if (mode >= c.factor_slices.size()) {
    throw std::out_of_range("top_n: mode " + std::to_string(mode) + " out of range");
  }
  const auto& slice = c.factor_slices[mode];
  if (axis.size() != slice.size()) {
    throw std::invalid_argument("top_n: axis has " + std::to_string(axis.size()) +
                                " labels for a slice of length " +
                                std::to_string(slice.size()));
  }
  std::vector<std::size_t> idx(slice.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (slice[a] != slice[b]) return slice[a] > slice[b];
    return axis.label(a) < axis.label(b);
  };
  const std::size_t k = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    better);
  std::vector<LabeledScore> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({axis.label(idx[i]), slice[idx[i]]});
  return out;
}

std::vector<LabeledScore> keyword_cloud(const Component& c, std::size_t word_mode,
                                        std::size_t n, const AxisMap& axis) {
  return top_n(c, word_mode, n, axis);
}

ComponentReport make_component_report(const Component& c, const LabeledTensor& labels,
                                      std::size_t word_mode, std::size_t top,
                                      std::size_t keyword_count) {
  labels.validate();
  if (c.factor_slices.size() != labels.tensor.order()) {
    throw std::invalid_argument("component order differs from the tensor order");
  }
  ComponentReport r;
  r.origin_rank = c.origin_rank;
  r.index = c.index_in_model;
  r.weight = c.weight;
  r.flags = c.flags;
  for (std::size_t m = 0; m < labels.tensor.order(); ++m) {
    r.modes.push_back({labels.mode_names[m], top_n(c, m, top, labels.axes[m])});
  }
  r.keywords = keyword_cloud(c, word_mode, keyword_count, labels.axes[word_mode]);
  return r;
}

namespace {

json scores_to_json(const std::vector<LabeledScore>& v) {
  json arr = json::array();
  for (const auto& s : v) arr.push_back({{"label", s.label}, {"score", s.score}});
  return arr;
}

std::vector<LabeledScore> scores_from_json(const json& arr) {
  std::vector<LabeledScore> out;
  for (const auto& e : arr) {
    out.push_back({e.at("label").get<std::string>(), e.at("score").get<double>()});
  }
  return out;
}

std::string fmt_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace

std::string report_to_json(std::span<const ComponentReport> reports) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  json comps = json::array();
  for (const auto& r : reports) {
    json modes = json::array();
    for (const auto& m : r.modes) {
      modes.push_back({{"mode", m.mode}, {"entries", scores_to_json(m.entries)}});
    }
    comps.push_back({{"origin_rank", r.origin_rank},
                     {"index", r.index},
                     {"weight", r.weight},
                     {"flags", r.flags},
                     {"modes", std::move(modes)},
                     {"keywords", scores_to_json(r.keywords)}});
  }
  doc["components"] = std::move(comps);
  return doc.dump(2) + "\n";
}

std::vector<ComponentReport> parse_report_json(std::string_view text) {
  std::vector<ComponentReport> out;
  try {
    const json doc = json::parse(text);
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw std::runtime_error("unsupported report schema_version");
    }
    for (const auto& c : doc.at("components")) {
      ComponentReport r;
      r.origin_rank = c.at("origin_rank").get<std::size_t>();
      r.index = c.at("index").get<std::size_t>();
      r.weight = c.at("weight").get<double>();
      r.flags = c.at("flags").get<std::uint8_t>();
      for (const auto& m : c.at("modes")) {
        r.modes.push_back({m.at("mode").get<std::string>(), scores_from_json(m.at("entries"))});
      }
      r.keywords = scores_from_json(c.at("keywords"));
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
  return out;
}

std::string summary_to_json(const ReportSummary& s) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["component_count"] = s.component_count;
  doc["pool_size"] = s.pool_size;
  doc["ranks"] = s.ranks;
  doc["threshold"] = s.threshold;
  doc["strategy"] = s.strategy;
  return doc.dump(2) + "\n";
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

constexpr std::string_view kStyle = R"(
body { font-family: sans-serif; margin: 2em; color: #222; background: #fafafa; }
h1 { font-size: 1.5em; }
.summary td { padding: 0.1em 1em 0.1em 0; }
.component { background: #fff; border: 1px solid #ddd; border-radius: 4px;
             margin: 1.5em 0; padding: 1em; }
.component h2 { font-size: 1.15em; margin-top: 0; }
.modes { display: flex; flex-wrap: wrap; gap: 1.5em; }
.modes table { border-collapse: collapse; font-size: 0.85em; }
.modes th, .modes td { text-align: left; padding: 0.1em 0.6em; border-bottom: 1px solid #eee; }
.modes td.score { text-align: right; font-family: monospace; }
.cloud { margin-top: 1em; line-height: 2.2em; }
.cloud span { margin-right: 0.6em; color: #1f4e79; }
.neg { color: #b00020 !important; font-style: italic; }
.flag { color: #b00020; font-size: 0.85em; }
.notice { padding: 1em; background: #fff3cd; border: 1px solid #ffe08a; }
)";

}  // namespace

std::string render_html(std::span<const ComponentReport> reports, const ReportSummary& s) {
  std::string h;
  h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  h += "<title>Component report</title>\n<style>";
  h += kStyle;
  h += "</style>\n</head>\n<body>\n<h1>Latent component report</h1>\n";
  h += "<table class=\"summary\">\n";
  h += "<tr><td>Selected components</td><td>" + std::to_string(s.component_count) +
       "</td></tr>\n";
  h += "<tr><td>Pooled components</td><td>" + std::to_string(s.pool_size) + "</td></tr>\n";
  std::string ranks;
  for (std::size_t i = 0; i < s.ranks.size(); ++i) {
    if (i) ranks += ", ";
    ranks += std::to_string(s.ranks[i]);
  }
  h += "<tr><td>Ranks</td><td>" + html_escape(ranks) + "</td></tr>\n";
  h += "<tr><td>Threshold</td><td>" + detail::format_double(s.threshold) + "</td></tr>\n";
  h += "<tr><td>Strategy</td><td>" + html_escape(s.strategy) + "</td></tr>\n</table>\n";

  if (reports.empty()) {
    h += "<p class=\"notice\">No components were selected.</p>\n";
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    const std::string id = "c-" + std::to_string(r.origin_rank) + "-" + std::to_string(r.index);
    h += "<section class=\"component\" id=\"" + id + "\">\n";
    h += "<h2>Component " + std::to_string(k + 1) + " &middot; rank " +
         std::to_string(r.origin_rank) + ", index " + std::to_string(r.index) +
         " &middot; weight <span" + (r.weight < 0 ? " class=\"neg\"" : std::string()) + ">" +
         fmt_score(r.weight) + "</span>";
    if (r.flags & kFlagNegativeWeight) h += " <span class=\"flag\">[negative weight]</span>";
    if (r.flags & kFlagUnnormalized) h += " <span class=\"flag\">[unnormalized]</span>";
    h += "</h2>\n<div class=\"modes\">\n";
    for (const auto& m : r.modes) {
      h += "<table>\n<tr><th>" + html_escape(m.mode) + "</th><th>score</th></tr>\n";
      for (const auto& e : m.entries) {
        const std::string cls = e.score < 0 ? " class=\"neg\"" : "";
        h += "<tr" + cls + "><td>" + html_escape(e.label) + "</td><td class=\"score\">" +
             fmt_score(e.score) + "</td></tr>\n";
      }
      h += "</table>\n";
    }
    h += "</div>\n<div class=\"cloud\">\n";
    double max_abs = 0.0;
    for (const auto& kw : r.keywords) max_abs = std::max(max_abs, std::abs(kw.score));
    for (const auto& kw : r.keywords) {
      const double rel = max_abs > 0 ? std::abs(kw.score) / max_abs : 0.0;
      char size[32];
      std::snprintf(size, sizeof(size), "%.2fem", 0.8 + 1.6 * rel);
      h += "<span style=\"font-size:" + std::string(size) + "\"";
      if (kw.score < 0) h += " class=\"neg\"";
      h += " title=\"" + fmt_score(kw.score) + "\">" + html_escape(kw.label) + "</span>\n";
    }
    h += "</div>\n</section>\n";
  }
  h += "</body>\n</html>\n";
  return h;
}

void emit_report(std::span<const ComponentReport> reports, const ReportSummary& summary,
                 const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  detail::write_file(out_dir / "report.json", report_to_json(reports));
  detail::write_file(out_dir / "summary.json", summary_to_json(summary));
  detail::write_file(out_dir / "index.html", render_html(reports, summary));
}

}  // namespace litcp
