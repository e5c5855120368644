#include <stdexcept>
#include <string>

#include "litcp/cp_als.hpp"
#include "text_util.hpp"

namespace litcp {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_double;
using detail::parse_size;
using detail::split_ws;

void save_model(const fs::path& file, const ModelFile& mf) {
  const KruskalModel& m = mf.model;
  m.validate();
  if (mf.shape.size() != m.order()) {
    throw std::invalid_argument("save_model: shape length differs from model order");
  }
  for (std::size_t k = 0; k < m.order(); ++k) {
    if (m.factors[k].rows() != mf.shape[k]) {
      throw std::invalid_argument("save_model: factor rows differ from shape");
    }
  }
  const std::string ref = mf.axes_ref.empty() ? "-" : mf.axes_ref;
  if (ref.find_first_of("\r\n") != std::string::npos) {
    throw std::invalid_argument("save_model: axes reference contains a line break");
  }

  std::string out = "litcp-model " + std::to_string(kModelFormatVersion) + "\n";
  out += "order " + std::to_string(m.order()) + "\n";
  out += "shape";
  for (auto e : mf.shape) out += " " + std::to_string(e);
  out += "\nrank " + std::to_string(m.rank()) + "\n";
  out += "axes " + ref + "\n";
  out += "weights";
  for (double w : m.weights) out += " " + format_double(w);
  out += "\nflags";
  for (auto f : m.flags) out += " " + std::to_string(static_cast<unsigned>(f));
  out += "\nfit_history " + std::to_string(mf.fit_history.size());
  for (double h : mf.fit_history) out += " " + format_double(h);
  out += "\n";
  for (std::size_t k = 0; k < m.order(); ++k) {
    const auto& f = m.factors[k];
    out += "factor " + std::to_string(k) + " " + std::to_string(f.rows()) + " " +
           std::to_string(f.cols()) + "\n";
    for (std::size_t i = 0; i < f.rows(); ++i) {
      const auto row = f.row(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) out += ' ';
        out += format_double(row[j]);
      }
      out += '\n';
    }
  }
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  detail::write_file(file, out);
}

ModelFile load_model(const fs::path& file) {
  const std::string text = detail::read_file(file);
  const auto lines = detail::split_lines(text);
  std::size_t at = 0;

  auto fail = [&](const std::string& what) -> void {
    throw std::runtime_error(file.string() + ":" + std::to_string(at + 1) + ": " + what);
  };
  auto next = [&](std::string_view key) {
    if (at >= lines.size()) fail("unexpected end of file, expected '" + std::string(key) + "'");
    auto parts = split_ws(lines[at]);
    if (parts.empty() || parts[0] != key) fail("expected '" + std::string(key) + "'");
    parts.erase(parts.begin());
    return parts;
  };

  ModelFile mf;
  try {
    auto magic = next("litcp-model");
    if (magic.size() != 1 || parse_size(magic[0]) != kModelFormatVersion) {
      fail("unsupported model format version");
    }
    ++at;
    auto order_v = next("order");
    if (order_v.size() != 1) fail("bad order line");
    const std::size_t order = parse_size(order_v[0]);
    ++at;
    auto shape_v = next("shape");
    if (shape_v.size() != order) fail("shape length differs from order");
    for (auto s : shape_v) mf.shape.push_back(parse_size(s));
    ++at;
    auto rank_v = next("rank");
    if (rank_v.size() != 1) fail("bad rank line");
    const std::size_t rank = parse_size(rank_v[0]);
    ++at;
    auto axes_v = next("axes");
    if (axes_v.empty()) fail("bad axes line");
    // The reference is the rest of the line so paths may contain spaces.
    mf.axes_ref = std::string(lines[at].substr(lines[at].find("axes") + 5));
    ++at;
    auto w = next("weights");
    if (w.size() != rank) fail("weight count differs from rank");
    for (auto s : w) mf.model.weights.push_back(parse_double(s));
    ++at;
    auto fl = next("flags");
    if (fl.size() != rank) fail("flag count differs from rank");
    for (auto s : fl) mf.model.flags.push_back(static_cast<std::uint8_t>(parse_size(s)));
    ++at;
    auto hist = next("fit_history");
    if (hist.empty() || parse_size(hist[0]) != hist.size() - 1) fail("bad fit_history line");
    for (std::size_t i = 1; i < hist.size(); ++i) mf.fit_history.push_back(parse_double(hist[i]));
    ++at;
    for (std::size_t k = 0; k < order; ++k) {
      auto hdr = next("factor");
      if (hdr.size() != 3 || parse_size(hdr[0]) != k) fail("bad factor header");
      const std::size_t rows = parse_size(hdr[1]);
      const std::size_t cols = parse_size(hdr[2]);
      if (rows != mf.shape[k] || cols != rank) fail("factor dimensions disagree with header");
      ++at;
      FactorMatrix f(rows, cols);
      for (std::size_t i = 0; i < rows; ++i, ++at) {
        if (at >= lines.size()) fail("truncated factor");
        auto vals = split_ws(lines[at]);
        if (vals.size() != cols) fail("wrong value count in factor row");
        for (std::size_t j = 0; j < cols; ++j) f(i, j) = parse_double(vals[j]);
      }
      mf.model.factors.push_back(std::move(f));
    }
    if (at != lines.size()) fail("trailing content");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    if (msg.rfind(file.string(), 0) == 0) throw;
    fail(msg);
  }
  return mf;
}

}  // namespace litcp
