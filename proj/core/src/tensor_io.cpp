#include <stdexcept>
#include <string>

#include "litcp/sparse_tensor.hpp"
#include "text_util.hpp"

namespace litcp {

namespace fs = std::filesystem;
using detail::format_double;
using detail::parse_double;
using detail::parse_size;
using detail::split_ws;

namespace {

fs::path axis_path(const fs::path& dir, std::size_t mode) {
  return dir / ("axis-" + std::to_string(mode) + ".txt");
}

[[noreturn]] void malformed(const fs::path& file, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " +
                           what);
}

// Header line "<key> <v>..." ; returns the values.
std::vector<std::string_view> expect_key(const fs::path& file,
                                         std::span<const std::string_view> lines,
                                         std::size_t at, std::string_view key) {
  if (at >= lines.size()) malformed(file, at + 1, "missing '" + std::string(key) + "'");
  auto parts = split_ws(lines[at]);
  if (parts.empty() || parts[0] != key) {
    malformed(file, at + 1, "expected '" + std::string(key) + "'");
  }
  parts.erase(parts.begin());
  return parts;
}

}  // namespace

void save_tensor(const fs::path& dir, const LabeledTensor& lt) {
  lt.validate();
  const SparseTensor& t = lt.tensor;
  for (const auto& name : lt.mode_names) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos) {
      throw std::invalid_argument("mode name '" + name +
                                  "' must be non-empty without whitespace");
    }
  }
  fs::create_directories(dir);

  std::string out = "litcp-tensor " + std::to_string(kTensorFormatVersion) + "\n";
  out += "order " + std::to_string(t.order()) + "\n";
  out += "shape";
  for (auto e : t.shape()) out += " " + std::to_string(e);
  out += "\nmodes";
  for (const auto& n : lt.mode_names) out += " " + n;
  out += "\nnnz " + std::to_string(t.nnz()) + "\n";
  for (std::size_t k = 0; k < t.nnz(); ++k) {
    for (auto c : t.coord(k)) {
      out += std::to_string(c);
      out += ' ';
    }
    out += format_double(t.values()[k]);
    out += '\n';
  }
  detail::write_file(dir / "tensor.tns", out);

  for (std::size_t m = 0; m < t.order(); ++m) {
    std::string labels;
    for (const auto& l : lt.axes[m].labels()) {
      if (l.find_first_of("\r\n") != std::string::npos) {
        throw std::invalid_argument("axis label contains a line break");
      }
      labels += l;
      labels += '\n';
    }
    detail::write_file(axis_path(dir, m), labels);
  }
}

LabeledTensor load_tensor(const fs::path& dir) {
  const fs::path file = dir / "tensor.tns";
  const std::string text = detail::read_file(file);
  const auto lines = detail::split_lines(text);

  auto magic = expect_key(file, lines, 0, "litcp-tensor");
  if (magic.size() != 1 || parse_size(magic[0]) != kTensorFormatVersion) {
    malformed(file, 1, "unsupported tensor format version");
  }
  auto order_v = expect_key(file, lines, 1, "order");
  if (order_v.size() != 1) malformed(file, 2, "bad order line");
  const std::size_t order = parse_size(order_v[0]);

  auto shape_v = expect_key(file, lines, 2, "shape");
  if (shape_v.size() != order) malformed(file, 3, "shape length differs from order");
  std::vector<std::size_t> shape;
  for (auto s : shape_v) shape.push_back(parse_size(s));

  auto modes_v = expect_key(file, lines, 3, "modes");
  if (modes_v.size() != order) malformed(file, 4, "mode-name count differs from order");

  auto nnz_v = expect_key(file, lines, 4, "nnz");
  if (nnz_v.size() != 1) malformed(file, 5, "bad nnz line");
  const std::size_t nnz = parse_size(nnz_v[0]);
  if (lines.size() != 5 + nnz) {
    malformed(file, lines.size(), "expected " + std::to_string(nnz) +
                                      " nonzero lines, found " +
                                      std::to_string(lines.size() - 5));
  }

  std::vector<SparseTensor::Entry> entries;
  entries.reserve(nnz);
  for (std::size_t k = 0; k < nnz; ++k) {
    auto parts = split_ws(lines[5 + k]);
    if (parts.size() != order + 1) malformed(file, 6 + k, "wrong field count");
    SparseTensor::Entry e;
    e.coord.reserve(order);
    try {
      for (std::size_t m = 0; m < order; ++m) {
        e.coord.push_back(static_cast<Coord>(parse_size(parts[m])));
      }
      e.value = parse_double(parts[order]);
    } catch (const std::runtime_error& err) {
      malformed(file, 6 + k, err.what());
    }
    entries.push_back(std::move(e));
  }

  LabeledTensor lt;
  try {
    lt.tensor = SparseTensor::from_entries(std::move(entries), shape);
  } catch (const std::logic_error& err) {
    throw std::runtime_error(file.string() + ": " + err.what());
  }
  if (lt.tensor.nnz() != nnz) {
    throw std::runtime_error(file.string() + ": duplicate or zero entries");
  }
  for (auto n : modes_v) lt.mode_names.emplace_back(n);

  for (std::size_t m = 0; m < order; ++m) {
    const fs::path ap = axis_path(dir, m);
    const std::string labels_text = detail::read_file(ap);
    std::vector<std::string> labels;
    std::size_t start = 0;
    while (start < labels_text.size()) {
      std::size_t end = labels_text.find('\n', start);
      if (end == std::string::npos) end = labels_text.size();
      labels.emplace_back(labels_text.substr(start, end - start));
      start = end + 1;
    }
    if (labels.size() != shape[m]) {
      throw std::runtime_error(ap.string() + ": " + std::to_string(labels.size()) +
                               " labels for extent " + std::to_string(shape[m]));
    }
    try {
      lt.axes.emplace_back(std::move(labels));
    } catch (const std::invalid_argument& err) {
      throw std::runtime_error(ap.string() + ": " + err.what());
    }
  }
  return lt;
}

}  // namespace litcp
